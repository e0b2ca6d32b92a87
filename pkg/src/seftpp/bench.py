"""Benchmark harness: primitive length x waypoint resolution x strategy grid."""
from __future__ import annotations

import json
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .planner import InvalidStart, Planner
from .scenario import Scenario, ScenarioError, bundled, load_scenario
from .worldmodel import NoPath

STRATEGIES = ("normal", "improved")


@dataclass
class BenchConfig:
    scenarios: list
    lengths: list = field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    resolutions: list = field(default_factory=lambda: [1.0, 0.7, 0.4, 0.1])
    repetitions: int = 20
    strategies: list = field(default_factory=lambda: list(STRATEGIES))

    def __post_init__(self):
        if not self.scenarios:
            raise ScenarioError("bench.scenarios", "no scenarios given")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ScenarioError("bench.repetitions", "must be an integer >= 1")
        for name, vals in (("bench.lengths", self.lengths), ("bench.resolutions", self.resolutions)):
            if not vals or any(isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 for v in vals):
                raise ScenarioError(name, "need a non-empty list of positive numbers")
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad or not self.strategies:
            raise ScenarioError("bench.strategies", f"unknown strategies {bad}")
        self.lengths = [float(v) for v in self.lengths]
        self.resolutions = [float(v) for v in self.resolutions]


def resolve_scenario(name: str, base_dir: Path | None = None) -> Path:
    """A scenario file path, or the name of a bundled scenario."""
    p = Path(name)
    if base_dir is not None and not p.is_absolute():
        q = base_dir / p
        if q.exists():
            return q
    if p.exists():
        return p
    b = bundled(name)
    if b.exists():
        return b
    raise ScenarioError("bench.scenarios", f"scenario {name!r} not found")


def load_bench_config(path: str | Path) -> BenchConfig:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except OSError as e:
        raise ScenarioError("config", str(e)) from None
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError("config", f"TOML syntax: {e}") from None
    b = doc.get("bench", doc)
    if not isinstance(b, dict):
        raise ScenarioError("bench", "expected a table")
    scen = b.get("scenarios")
    if not isinstance(scen, list) or not all(isinstance(s, str) for s in scen):
        raise ScenarioError("bench.scenarios", "expected a list of paths")
    kw = {k: b[k] for k in ("lengths", "resolutions", "repetitions", "strategies") if k in b}
    return BenchConfig([str(resolve_scenario(s, path.parent)) for s in scen], **kw)


def cell_scenario(sc: Scenario, length: float, resolution: float) -> Scenario:
    prims = tuple(m.with_length(length) for m in sc.primitives)
    return sc.with_(primitives=prims, waypoint_resolution=resolution)


@dataclass
class BenchRow:
    scenario: str
    length: float
    resolution: float
    strategy: str
    status: str  # 'ok' or 'failed'
    mean_ms: float = float("nan")
    std_ms: float = float("nan")
    expanded: int = 0
    checked: int = 0
    guaranteed: int = 0
    fraction: float = float("nan")
    cost: float = float("nan")
    reason: str = ""


def _run_cell(args) -> dict:
    """Time one (scenario, length, resolution, strategy) cell."""
    path, length, res, strategy, reps = args
    sc = cell_scenario(load_scenario(path), length, res)
    times = []
    result = None
    try:
        for _ in range(reps):
            t0 = time.perf_counter()
            result = Planner(sc, strategy).plan()
            times.append((time.perf_counter() - t0) * 1e3)
    except (NoPath, InvalidStart) as e:
        return {"ok": False, "reason": str(e)}
    st = result.stats
    return {
        "ok": True,
        "times": times,
        "stats": st.as_dict(),
        "cost": result.cost,
        "path": [tuple(p) for p in result.path[:-1]],
    }


def _workers() -> int:
    v = os.environ.get("SEFTPP_THREADS")
    if v:
        try:
            return max(1, int(v))
        except ValueError:
            raise ScenarioError("SEFTPP_THREADS", f"expected an integer, got {v!r}") from None
    return os.cpu_count() or 1


def run_bench(cfg: BenchConfig, workers: int | None = None) -> list[BenchRow]:
    """Run every cell; counts in each row come from the improved run of that cell."""
    jobs = []
    for path in cfg.scenarios:
        for L in cfg.lengths:
            for res in cfg.resolutions:
                # counts are taken from the improved strategy even if not timed
                strategies = list(cfg.strategies)
                if "improved" not in strategies:
                    strategies.append("improved")
                for strat in strategies:
                    reps = cfg.repetitions if strat in cfg.strategies else 1
                    jobs.append((path, L, res, strat, reps))
    n = min(workers or _workers(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            outs = list(ex.map(_run_cell, jobs))
    else:
        outs = [_run_cell(j) for j in jobs]
    by_key = {j[:4]: o for j, o in zip(jobs, outs)}

    rows = []
    for path, L, res, strat, _ in jobs:
        if strat not in cfg.strategies:
            continue
        o = by_key[(path, L, res, strat)]
        ref = by_key[(path, L, res, "improved")]
        name = Path(path).stem
        if not o["ok"]:
            rows.append(BenchRow(name, L, res, strat, "failed", reason=o["reason"]))
            continue
        times = o["times"]
        st = ref["stats"] if ref["ok"] else o["stats"]
        row = BenchRow(
            name, L, res, strat, "ok",
            mean_ms=statistics.fmean(times),
            std_ms=statistics.pstdev(times) if len(times) > 1 else 0.0,
            expanded=o["stats"]["expanded"],
            checked=st["checked_primitives"],
            guaranteed=st["guaranteed_primitives"],
            cost=o["cost"],
        )
        tot = row.checked + row.guaranteed
        row.fraction = row.guaranteed / tot if tot else float("nan")
        if ref["ok"] and (o["path"] != ref["path"] or o["cost"] != ref["cost"]):
            row.status = "failed"
            row.reason = "result differs from the improved strategy"
        rows.append(row)
    return rows


COLUMNS = [
    ("scenario", "{}"),
    ("length", "{:.1f}"),
    ("resolution", "{:.1f}"),
    ("strategy", "{}"),
    ("status", "{}"),
    ("mean_ms", "{:.1f}"),
    ("std_ms", "{:.1f}"),
    ("expanded", "{}"),
    ("checked", "{}"),
    ("guaranteed", "{}"),
    ("fraction", "{:.4f}"),
]


def format_table(rows: list[BenchRow]) -> str:
    cells = [[name for name, _ in COLUMNS]]
    for r in rows:
        d = asdict(r)
        cells.append([fmt.format(d[name]) for name, fmt in COLUMNS])
    widths = [max(len(row[i]) for row in cells) for i in range(len(COLUMNS))]
    lines = []
    for k, row in enumerate(cells):
        lines.append("  ".join(v.rjust(w) if k else v.ljust(w) for v, w in zip(row, widths)).rstrip())
    for r in rows:
        if r.status == "failed":
            lines.append(f"# failed: {r.scenario} len={r.length} res={r.resolution} {r.strategy}: {r.reason}")
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[BenchRow], cfg: BenchConfig) -> str:
    def clean(v):
        return None if isinstance(v, float) and v != v else v

    doc = {
        "config": {
            "scenarios": [Path(s).stem for s in cfg.scenarios],
            "lengths": cfg.lengths,
            "resolutions": cfg.resolutions,
            "repetitions": cfg.repetitions,
            "strategies": cfg.strategies,
        },
        "rows": [{k: clean(v) for k, v in asdict(r).items()} for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"
