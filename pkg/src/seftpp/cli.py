"""Command-line front end: ``seftpp plan | bench | validate``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .bench import format_table, load_bench_config, rows_to_json, run_bench
from .geometry import Pose2
from .planner import InvalidStart, PlanFailure, PlanResult, Planner
from .scenario import ScenarioError, load_scenario
from .svg import render_svg
from .validate import validate_path
from .worldmodel import MapParseError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_PATH = 2


class PathFileError(ValueError):
    pass


def format_path(result: PlanResult) -> str:
    lines = [f"{x!r} {y!r} {th!r}" for x, y, th in result.poses()]
    gx, gy = result.goal
    lines.append(f"{float(gx)!r} {float(gy)!r} nan")
    return "\n".join(lines) + "\n"


def parse_path(text: str) -> list:
    """Poses from a path file; a trailing 'x y nan' goal line is kept as a point."""
    out = []
    for i, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise PathFileError(f"line {i}: expected 'x y theta'")
        try:
            x, y, th = (float(v) for v in parts)
        except ValueError:
            raise PathFileError(f"line {i}: not a number") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PathFileError(f"line {i}: non-finite coordinate")
        out.append((x, y) if math.isnan(th) else Pose2(x, y, th))
    if not out:
        raise PathFileError("path file is empty")
    return out


def _write(path: str | None, data: str | bytes) -> None:
    if path is None or path == "-":
        sys.stdout.write(data if isinstance(data, str) else data.decode())
        return
    p = Path(path)
    if isinstance(data, bytes):
        p.write_bytes(data)
    else:
        p.write_text(data)


def run_plan(args) -> int:
    sc = load_scenario(args.scenario)
    planner = Planner(sc, "normal" if args.normal else "improved")
    try:
        result = planner.plan()
    except PlanFailure as e:
        print(f"no path: {e}", file=sys.stderr)
        if args.stats:
            _write(args.stats, json.dumps({"found": False, **e.stats.as_dict()}, indent=2) + "\n")
        return EXIT_NO_PATH
    _write(args.out, format_path(result))
    if args.stats:
        _write(args.stats, json.dumps({"found": True, "cost": result.cost, **result.stats.as_dict()}, indent=2) + "\n")
    if args.svg:
        _write(args.svg, render_svg(sc, result))
    st = result.stats
    print(
        f"path found: cost {result.cost:.3f}, {len(result.segments)} primitives, "
        f"{st.expanded} expanded, {st.wall_time_ms:.1f} ms",
        file=sys.stderr,
    )
    return EXIT_OK


def run_bench_cmd(args) -> int:
    cfg = load_bench_config(args.config)
    rows = run_bench(cfg)
    table = format_table(rows)
    out = Path(args.out)
    out.write_text(rows_to_json(rows, cfg))
    out.with_suffix(".txt").write_text(table)
    sys.stdout.write(table)
    return EXIT_OK


def run_validate(args) -> int:
    sc = load_scenario(args.scenario)
    try:
        text = Path(args.path).read_text()
    except OSError as e:
        raise PathFileError(str(e)) from None
    poses = parse_path(text)
    if args.step is not None and not 0 < args.step <= 0.1:
        raise PathFileError("--step must be in (0, 0.1]")
    rep = validate_path(sc, poses, args.step or 0.01)
    for line in rep.lines():
        print(line)
    print("valid" if rep.ok else "INVALID")
    return EXIT_OK if rep.ok else EXIT_NO_PATH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seftpp", description="Self-entanglement-free tethered path planning")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("plan", help="plan a path for a scenario")
    p.add_argument("--scenario", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--improved", action="store_true", help="sparse validity checking (default)")
    g.add_argument("--normal", action="store_true", help="check every waypoint")
    p.add_argument("--out", help="path file, one 'x y theta' per line (default stdout)")
    p.add_argument("--stats", help="JSON statistics file")
    p.add_argument("--svg", help="SVG figure")
    p.set_defaults(func=run_plan)

    b = sub.add_parser("bench", help="run the benchmark grid")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True, help="JSON output; the text table goes next to it as .txt")
    b.set_defaults(func=run_bench_cmd)

    v = sub.add_parser("validate", help="replay a path file against the validity conditions")
    v.add_argument("--scenario", required=True)
    v.add_argument("--path", required=True)
    v.add_argument("--step", type=float, default=None, help="replay spacing, at most 0.1 (default 0.01)")
    v.set_defaults(func=run_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidStart as e:
        print(f"error: start: {e}", file=sys.stderr)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
    except MapParseError as e:
        print(f"error: map: {e}", file=sys.stderr)
    except PathFileError as e:
        print(f"error: path: {e}", file=sys.stderr)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
