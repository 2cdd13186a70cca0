"""Perfect and simple matchings of a dimer quiver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .quiver import DimerQuiver


@dataclass(frozen=True)
class Matching:
    arrows: frozenset

    def __contains__(self, aid):
        return aid in self.arrows

    def sorted(self) -> tuple:
        return tuple(sorted(self.arrows))

    def __repr__(self):
        return "{" + ",".join(self.sorted()) + "}"


@dataclass(frozen=True)
class MatchingIndex:
    """Ordered perfect matchings P, the simple ones S, and arrow membership tables.

    ``perfect_bits[a, j]`` is 1 when arrow a (quiver arrow order) lies in the
    j-th perfect matching, and ``simple_bits`` is the same table restricted
    to the simple columns.
    """

    arrows: tuple
    perfect: tuple
    simple: tuple
    perfect_bits: np.ndarray
    simple_bits: np.ndarray
    uncovered: tuple

    def to_dict(self):
        return {
            "perfect": [list(m.sorted()) for m in self.perfect],
            "simple": [list(m.sorted()) for m in self.simple],
            "uncovered_arrows": list(self.uncovered),
        }


def _cache(q: DimerQuiver) -> dict:
    return q.__dict__.setdefault("_derived", {})


def matching_order_key(m: Matching):
    return m.sorted()


def enumerate_perfect_matchings(q: DimerQuiver) -> list[Matching]:
    """All perfect matchings by exact cover, in canonical order."""
    faces = []
    for f in q.faces:
        distinct = sorted({q.arrow_index[a] for a in f})
        faces.append(distinct)
    masks = kernels.exact_cover(faces, len(q.arrows))
    out = []
    for mask in masks:
        ids = frozenset(q.arrows[i].id for i in range(len(q.arrows)) if mask >> i & 1)
        out.append(Matching(ids))
    return sorted(out, key=matching_order_key)


def uncovered_arrows(q: DimerQuiver, perfect: Iterable[Matching]) -> list[str]:
    """Arrows lying in no perfect matching."""
    used = set()
    for m in perfect:
        used |= m.arrows
    return [a.id for a in q.arrows if a.id not in used]


def strongly_connected_spanning(vertices, arrows) -> bool:
    """Whether the arrows connect every vertex to every other by directed paths."""
    vertices = list(vertices)
    if not vertices:
        return True
    fwd = {v: [] for v in vertices}
    bwd = {v: [] for v in vertices}
    for a in arrows:
        fwd[a.tail].append(a.head)
        bwd[a.head].append(a.tail)
    for adj in (fwd, bwd):
        seen = {vertices[0]}
        stack = [vertices[0]]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(vertices):
            return False
    # a single vertex still needs a closed walk through it
    if len(vertices) == 1:
        return any(True for _ in arrows)
    return True


def is_simple(q: DimerQuiver, x: Matching) -> bool:
    """Q minus x contains every vertex and is strongly connected."""
    rest = [a for a in q.arrows if a.id not in x.arrows]
    return strongly_connected_spanning(q.vertices, rest)


def classify(q: DimerQuiver) -> MatchingIndex:
    cache = _cache(q)
    if "matchings" in cache:
        return cache["matchings"]
    perfect = enumerate_perfect_matchings(q)
    simple = [m for m in perfect if is_simple(q, m)]
    n = len(q.arrows)
    pbits = np.zeros((n, len(perfect)), dtype=np.int64)
    for j, m in enumerate(perfect):
        for aid in m.arrows:
            pbits[q.arrow_index[aid], j] = 1
    cols = [perfect.index(m) for m in simple]
    sbits = pbits[:, cols] if cols else np.zeros((n, 0), dtype=np.int64)
    index = MatchingIndex(
        arrows=tuple(a.id for a in q.arrows),
        perfect=tuple(perfect),
        simple=tuple(simple),
        perfect_bits=pbits,
        simple_bits=sbits,
        uncovered=tuple(uncovered_arrows(q, perfect)),
    )
    cache["matchings"] = index
    return index
