"""Reduced words of signed ray crossings (h-signatures)."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .geometry import Point

Letter = tuple  # (ray id, +1 | -1)


@dataclass(frozen=True)
class Ray:
    id: int
    x: float
    y: float  # origin; the ray points in +y


@dataclass(frozen=True)
class HWord:
    letters: tuple = ()

    def __str__(self) -> str:
        return format_word(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    @classmethod
    def parse(cls, text: str) -> "HWord":
        return cls(reduce_letters(parse_letters(text)))


EMPTY = HWord()


def format_word(letters: Sequence[Letter]) -> str:
    return " ".join(f"r{i}" if s > 0 else f"r{i}^-1" for i, s in letters)


_TOKEN = re.compile(r"^r(\d+)(?:\^(-?1)|⁻¹)?$")


def parse_letters(text: str) -> list[Letter]:
    out = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad h-word token {tok!r}")
        sign = -1 if (tok.endswith("⁻¹") or m.group(2) == "-1") else 1
        out.append((int(m.group(1)), sign))
    return out


def reduce_letters(letters: Iterable[Letter], prefix: Sequence[Letter] = ()) -> tuple:
    stack = list(prefix)
    for i, s in letters:
        if stack and stack[-1][0] == i and stack[-1][1] == -s:
            stack.pop()
        else:
            stack.append((i, s))
    return tuple(stack)


def append_reduce(w: HWord, letters: Iterable[Letter]) -> HWord:
    letters = list(letters)
    if not letters:
        return w
    return HWord(reduce_letters(letters, w.letters))


def h_equals(a: HWord, b: HWord) -> bool:
    return a.letters == b.letters


def inverse(w: HWord) -> HWord:
    return HWord(tuple((i, -s) for i, s in reversed(w.letters)))


def segment_crossings(p: Point, q: Point, rays: Sequence[Ray]) -> list[Letter]:
    """Signed crossings of p->q with upward rays, ordered along the segment.

    A point with x equal to the ray's x belongs to the +x side, so a polyline
    through a ray vertex is counted exactly once.
    """
    px, py = p
    qx, qy = q
    if px == qx:
        return []
    hits = []
    lo, hi = (px, qx) if px < qx else (qx, px)
    for r in rays:
        X = r.x
        if not lo - 1.0 <= X <= hi + 1.0:
            continue
        sp = px >= X
        sq = qx >= X
        if sp == sq:
            continue
        u = (X - px) / (qx - px)
        y = py + u * (qy - py)
        if y > r.y:
            hits.append((u, r.id, 1 if qx > px else -1))
    hits.sort()
    return [(i, s) for _, i, s in hits]


def polyline_crossings(pts: Sequence[Point], rays: Sequence[Ray]) -> list[Letter]:
    lo = min(p[0] for p in pts)
    hi = max(p[0] for p in pts)
    rays = [r for r in rays if lo <= r.x <= hi]
    if not rays:
        return []
    out: list[Letter] = []
    for a, b in zip(pts, pts[1:]):
        out.extend(segment_crossings(a, b, rays))
    return out


def polyline_word(pts: Sequence[Point], rays: Sequence[Ray], start: HWord = EMPTY) -> HWord:
    return append_reduce(start, polyline_crossings(pts, rays))
