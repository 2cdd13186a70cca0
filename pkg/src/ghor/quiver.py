"""Dimer quivers drawn in the fundamental polygon: data model, checks, I/O."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence

from .polygon import CrossingWord, MalformedWord, Polygon, abelianize, is_trivial


class QuiverFormatError(ValueError):
    """Input text or data does not describe a quiver."""


class EmbeddingError(ValueError):
    """Face corners do not assemble into a consistent rotation system."""


class PathError(ValueError):
    """An arrow sequence is not a composable path."""


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str
    crossings: CrossingWord = ()


class DimerQuiver:
    """Quiver with unit cycles (faces) and per-arrow side crossings."""

    def __init__(self, polygon: Polygon, vertices: Iterable[str], arrows: Iterable[Arrow],
                 faces: Iterable[Sequence[str]], name: str | None = None):
        self.polygon = polygon
        self.name = name
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self.faces = tuple(tuple(f) for f in faces)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverFormatError("duplicate vertex id")
        self._arrow = {}
        for a in self.arrows:
            if a.id in self._arrow:
                raise QuiverFormatError(f"duplicate arrow id {a.id!r}")
            for end in (a.tail, a.head):
                if end not in self.vertices:
                    raise QuiverFormatError(f"arrow {a.id!r} uses unknown vertex {end!r}")
            self._arrow[a.id] = a
        for i, f in enumerate(self.faces):
            if not f:
                raise QuiverFormatError(f"face {i} is empty")
            for aid in f:
                if aid not in self._arrow:
                    raise QuiverFormatError(f"face {i} uses unknown arrow {aid!r}")
        self.arrow_index = {a.id: i for i, a in enumerate(self.arrows)}
        self._out = {v: [] for v in self.vertices}
        self._in = {v: [] for v in self.vertices}
        for a in self.arrows:
            self._out[a.tail].append(a)
            self._in[a.head].append(a)

    def arrow(self, aid: str) -> Arrow:
        try:
            return self._arrow[aid]
        except KeyError:
            raise PathError(f"unknown arrow {aid!r}") from None

    def out_arrows(self, v) -> list[Arrow]:
        return self._out[v]

    def in_arrows(self, v) -> list[Arrow]:
        return self._in[v]

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.arrows) + len(self.faces)

    def endpoints(self, path: Sequence[str]) -> tuple[str, str]:
        """(tail, head) of a composable arrow sequence."""
        if not path:
            raise PathError("empty arrow sequence has no endpoints")
        arrows = [self.arrow(x) for x in path]
        for a, b in zip(arrows, arrows[1:]):
            if a.head != b.tail:
                raise PathError(f"arrows {a.id!r} and {b.id!r} do not compose: "
                                f"{a.head!r} != {b.tail!r}")
        return arrows[0].tail, arrows[-1].head

    def is_cycle(self, path: Sequence[str]) -> bool:
        t, h = self.endpoints(path)
        return t == h

    def crossing_word(self, path: Sequence[str]) -> CrossingWord:
        out: list[int] = []
        for x in path:
            out.extend(self.arrow(x).crossings)
        return tuple(out)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "polygon_half_sides": self.polygon.half_sides,
            "vertices": list(self.vertices),
            "arrows": [{"id": a.id, "tail": a.tail, "head": a.head, "crossings": list(a.crossings)}
                       for a in self.arrows],
            "faces": [list(f) for f in self.faces],
        }
        if self.name is not None:
            d["name"] = self.name
        return d

    def __eq__(self, other):
        if not isinstance(other, DimerQuiver):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(save(self))

    def __repr__(self):
        return (f"DimerQuiver(name={self.name!r}, N={self.polygon.half_sides}, "
                f"|Q0|={len(self.vertices)}, |Q1|={len(self.arrows)}, faces={len(self.faces)})")


# ---------------------------------------------------------------------------
# serialization


def from_dict(data: Any) -> DimerQuiver:
    if not isinstance(data, dict):
        raise QuiverFormatError("top level must be an object")
    for key in ("polygon_half_sides", "vertices", "arrows", "faces"):
        if key not in data:
            raise QuiverFormatError(f"missing field {key!r}")
    try:
        polygon = Polygon(data["polygon_half_sides"])
    except ValueError as e:
        raise QuiverFormatError(f"polygon_half_sides: {e}") from None
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise QuiverFormatError("vertices: expected a list of strings")
    arrows = []
    if not isinstance(data["arrows"], list):
        raise QuiverFormatError("arrows: expected a list")
    for i, a in enumerate(data["arrows"]):
        if not isinstance(a, dict):
            raise QuiverFormatError(f"arrows[{i}]: expected an object")
        for key in ("id", "tail", "head"):
            if not isinstance(a.get(key), str):
                raise QuiverFormatError(f"arrows[{i}].{key}: expected a string")
        try:
            crossings = polygon.check_word(a.get("crossings", []))
        except MalformedWord as e:
            raise QuiverFormatError(f"arrows[{i}].crossings: {e}") from None
        arrows.append(Arrow(a["id"], a["tail"], a["head"], crossings))
    faces = data["faces"]
    if not isinstance(faces, list) or not all(isinstance(f, list) for f in faces):
        raise QuiverFormatError("faces: expected a list of arrow-id lists")
    name = data.get("name")
    return DimerQuiver(polygon, vertices, arrows, faces, name=name)


def load(text: str) -> DimerQuiver:
    """Parse the JSON quiver format."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise QuiverFormatError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return from_dict(data)


def save(q: DimerQuiver) -> str:
    return json.dumps(q.to_dict(), indent=2) + "\n"


def to_dot(q: DimerQuiver) -> str:
    lines = [f"digraph {json.dumps(q.name or 'quiver')} {{"]
    for i, f in enumerate(q.faces):
        lines.append(f"  // face {i}: {' '.join(f)}")
    for v in q.vertices:
        lines.append(f"  {json.dumps(v)};")
    for a in q.arrows:
        label = a.id if not a.crossings else f"{a.id} {list(a.crossings)}"
        lines.append(f"  {json.dumps(a.tail)} -> {json.dumps(a.head)} [label={json.dumps(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rotation system

Dart = tuple[str, str]  # ("in" | "out", arrow id)


@dataclass
class RotationSystem:
    """Counterclockwise cyclic order of arrow-ends around each vertex.

    ``face_sign[i]`` is +1 for faces traversed counterclockwise and -1 for
    the others; the two faces along any arrow have opposite signs.  A vertex
    whose corners close up into more than one cycle is reported with several
    cycles (a pinched point of the surface).
    """

    cycles: dict[str, list[tuple[Dart, ...]]]
    face_sign: list[int]
    succ: dict[Dart, Dart] = field(repr=False)

    def position(self, dart: Dart) -> tuple[int, int]:
        """(sheet index, position) of a dart at its vertex."""
        for cycles in self.cycles.values():
            for s, c in enumerate(cycles):
                if dart in c:
                    return s, c.index(dart)
        raise KeyError(dart)

    def vertex_of(self, q: DimerQuiver, dart: Dart) -> str:
        a = q.arrow(dart[1])
        return a.tail if dart[0] == "out" else a.head


def _face_signs(q: DimerQuiver) -> list[int]:
    incid: dict[str, list[int]] = {}
    for i, f in enumerate(q.faces):
        for aid in f:
            incid.setdefault(aid, []).append(i)
    sign = [0] * len(q.faces)
    for start in range(len(q.faces)):
        if sign[start]:
            continue
        sign[start] = 1
        stack = [start]
        while stack:
            i = stack.pop()
            for aid in q.faces[i]:
                for j in incid[aid]:
                    if j == i:
                        if incid[aid].count(i) > 1:
                            raise EmbeddingError(f"arrow {aid!r} bounds face {i} twice")
                        continue
                    if sign[j] == 0:
                        sign[j] = -sign[i]
                        stack.append(j)
                    elif sign[j] == sign[i]:
                        raise EmbeddingError(f"faces {i} and {j} share arrow {aid!r} "
                                             f"with the same orientation")
    return sign


def rotation_system(q: DimerQuiver) -> RotationSystem:
    """Rebuild the cyclic order of arrow-ends at each vertex from face corners."""
    if not q.faces:
        raise EmbeddingError("quiver has no faces")
    sign = _face_signs(q)
    succ: dict[Dart, Dart] = {}
    for i, f in enumerate(q.faces):
        for k, u in enumerate(f):
            v = f[(k + 1) % len(f)]
            au, av = q.arrow(u), q.arrow(v)
            if au.head != av.tail:
                raise EmbeddingError(f"face {i}: {u!r} -> {v!r} is not a corner")
            if sign[i] > 0:
                src, dst = ("out", v), ("in", u)
            else:
                src, dst = ("in", u), ("out", v)
            if src in succ:
                raise EmbeddingError(f"vertex {au.head!r}: dart {src} has two successors")
            succ[src] = dst
    darts = [(d, a.id) for a in q.arrows for d in ("out", "in")]
    missing = [d for d in darts if d not in succ]
    if missing:
        raise EmbeddingError(f"darts without corners: {missing}")
    cycles: dict[str, list[tuple[Dart, ...]]] = {v: [] for v in q.vertices}
    seen: set[Dart] = set()
    for d in darts:
        if d in seen:
            continue
        c = []
        x = d
        while x not in seen:
            seen.add(x)
            c.append(x)
            x = succ[x]
        if x != d:
            raise EmbeddingError(f"corner walk from {d} does not close")
        a = q.arrow(d[1])
        vertex = a.tail if d[0] == "out" else a.head
        cycles[vertex].append(_rotate_min(tuple(c)))
    for v in cycles:
        cycles[v].sort()
    return RotationSystem(cycles, sign, succ)


def _rotate_min(c: tuple) -> tuple:
    i = min(range(len(c)), key=lambda k: c[k])
    return c[i:] + c[:i]


def faces_from_rotation(q: DimerQuiver, rot: RotationSystem) -> list[tuple[str, ...]]:
    """Faces traced back from the rotation system, each rotated to start at its least arrow."""
    pred_out = {dst[1]: src[1] for src, dst in rot.succ.items() if src[0] == "out"}
    next_neg = {src[1]: dst[1] for src, dst in rot.succ.items() if src[0] == "in"}
    faces = []
    for step in (pred_out, next_neg):
        seen = set()
        for a in q.arrows:
            if a.id in seen:
                continue
            f = []
            x = a.id
            while x not in seen:
                seen.add(x)
                f.append(x)
                x = step[x]
            faces.append(_rotate_min(tuple(f)))
    return sorted(faces)


def canonical_faces(q: DimerQuiver) -> list[tuple[str, ...]]:
    return sorted(_rotate_min(f) for f in q.faces)


# ---------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class ValidationReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def validate(q: DimerQuiver) -> ValidationReport:
    """Run every structural check; failures are reported, never raised."""
    checks = []
    n = q.polygon.half_sides

    bad_faces = []
    for i, f in enumerate(q.faces):
        for k, u in enumerate(f):
            v = f[(k + 1) % len(f)]
            if q.arrow(u).head != q.arrow(v).tail:
                bad_faces.append({"face": i, "at": [u, v]})
                break
    checks.append(Check("faces-are-cycles", not bad_faces, bad_faces or None))

    counts = Counter(aid for f in q.faces for aid in f)
    wrong = {a.id: counts.get(a.id, 0) for a in q.arrows if counts.get(a.id, 0) != 2}
    checks.append(Check("two-face-incidences", not wrong, wrong or None))

    repeats = sorted({aid for f in q.faces for aid, c in Counter(f).items() if c > 1})
    checks.append(Check("repeated-arrow-in-face", True, repeats or None))

    chi = q.euler_characteristic()
    checks.append(Check("euler-characteristic", chi == 2 - n, {"chi": chi, "expected": 2 - n}))

    if q.vertices:
        seen = {q.vertices[0]}
        stack = [q.vertices[0]]
        while stack:
            v = stack.pop()
            for a in q.out_arrows(v) + q.in_arrows(v):
                for w in (a.tail, a.head):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        unreached = [v for v in q.vertices if v not in seen]
    else:
        unreached = ["<no vertices>"]
    checks.append(Check("connected", not unreached, unreached or None))

    zero = (0,) * n
    nonzero = {}
    nontrivial = []
    for i, f in enumerate(q.faces):
        w = q.crossing_word(f)
        cls = abelianize(w, q.polygon)
        if cls != zero:
            nonzero[i] = list(cls)
        elif not is_trivial(w, q.polygon):
            nontrivial.append(i)
    checks.append(Check("face-class-zero", not nonzero, nonzero or None))
    nontrivial.extend(nonzero)
    checks.append(Check("face-cover-trivial", not nontrivial, sorted(nontrivial) or None))

    try:
        rot = rotation_system(q)
        same = faces_from_rotation(q, rot) == canonical_faces(q)
        pinched = {v: len(c) for v, c in rot.cycles.items() if len(c) > 1}
        checks.append(Check("rotation-round-trip", same, {"pinched_vertices": pinched} if pinched else None))
    except EmbeddingError as e:
        checks.append(Check("rotation-round-trip", False, str(e)))
    return ValidationReport(checks)
