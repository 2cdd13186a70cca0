"""Built-in instance families and the instance suite."""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterator

from .polygon import Polygon, invert_word
from .quiver import Arrow, DimerQuiver, QuiverFormatError, from_dict, save, validate

DATA_DIR_ENV = "GHOR_DATA_DIR"


def _x_letter(k: int) -> int:
    # the loop x_k leaves through side k for odd k and through side k+N for
    # even k, matching the alternating letters of the corner relator
    return k if k % 2 else -k


def build_polynomial(n: int) -> DimerQuiver:
    """One vertex, loops x_1..x_N and y, faces x_1...x_N y and x_N...x_1 y.

    With the crossings of x_k taken from the corner relator, the first face
    reads w w^-1 and the second reads the inverse relator, so both are
    trivial in the cover.
    """
    polygon = Polygon(n)
    xs = [Arrow(f"x{k}", "v", "v", (_x_letter(k),)) for k in range(1, n + 1)]
    y_word = invert_word(tuple(_x_letter(k) for k in range(1, n + 1)))
    y = Arrow("y", "v", "v", y_word)
    ids = [a.id for a in xs]
    faces = [ids + ["y"], ids[::-1] + ["y"]]
    return DimerQuiver(polygon, ["v"], xs + [y], faces, name=f"polynomial-{n}")


def build_conifold_torus() -> DimerQuiver:
    """The conifold quiver on the square; a_i b_j have classes +-e_1, +-e_2."""
    arrows = [
        Arrow("a1", "1", "2", (1,)),
        Arrow("a2", "1", "2", (2,)),
        Arrow("b1", "2", "1", ()),
        Arrow("b2", "2", "1", (-1, -2)),
    ]
    faces = [["a1", "b1", "a2", "b2"], ["a1", "b2", "a2", "b1"]]
    return DimerQuiver(Polygon(2), ["1", "2"], arrows, faces, name="conifold")


def build_center_deficient() -> DimerQuiver:
    """Polynomial torus quiver with the loop y split by a second vertex.

    Every cycle through vertex 2 uses both halves of y, so the label of x1
    never occurs at vertex 2 and no power of it lies in the center.
    """
    arrows = [
        Arrow("x1", "1", "1", (1,)),
        Arrow("x2", "1", "1", (-2,)),
        Arrow("y1", "1", "2", (2,)),
        Arrow("y2", "2", "1", (-1,)),
    ]
    faces = [["x1", "x2", "y1", "y2"], ["x2", "x1", "y1", "y2"]]
    return DimerQuiver(Polygon(2), ["1", "2"], arrows, faces, name="center-deficient")


# ---------------------------------------------------------------------------
# genus two

_A = ("a1", "a2", "a3")
_B = ("b1", "b2", "b3")
_FIRST_FACE = ("a1", "b1", "a2", "b2", "a3", "b3")


def _rotate_min(face: tuple) -> tuple:
    return min(face[k:] + face[:k] for k in range(len(face)))


def _second_faces() -> list[tuple]:
    """Alternating 6-cycles through every a and b arrow once, up to rotation."""
    out = set()
    for pa in itertools.permutations(_A):
        for pb in itertools.permutations(_B):
            face = tuple(x for pair in zip(pa, pb) for x in pair)
            if _rotate_min(face) != _rotate_min(_FIRST_FACE):
                out.add(_rotate_min(face))
    return sorted(out)


def _octagon_candidate(second: tuple, perm: tuple) -> DimerQuiver:
    """Crossings along the first face: four generator letters, one empty arrow, one closing arrow."""
    letters = [(_x_letter(k),) for k in perm]
    closing = invert_word(tuple(x for w in letters for x in w))
    crossing = dict(zip(_FIRST_FACE, letters + [(), closing]))
    arrows = [Arrow(a, "1", "2", crossing[a]) for a in _A] + [Arrow(b, "2", "1", crossing[b]) for b in _B]
    return DimerQuiver(Polygon(4), ["1", "2"], arrows, [list(_FIRST_FACE), list(second)],
                       name="genus2-octagon")


def search_octagon_quivers(accept: Callable[[DimerQuiver], bool] | None = None) -> Iterator[DimerQuiver]:
    """Two-vertex, six-arrow dimer quivers on the octagon, in a fixed order.

    The second face runs over all alternating orderings of the arrows and the
    crossing letters over all placements of x_1..x_4 on the first face.
    Candidates must validate with no pinched vertex; ``accept`` filters
    further.
    """
    for second in _second_faces():
        for perm in itertools.permutations(range(1, 5)):
            q = _octagon_candidate(second, perm)
            report = validate(q)
            if not report.ok or report["rotation-round-trip"].witness is not None:
                continue
            if accept is None or accept(q):
                yield q


def suite_criteria(q: DimerQuiver, degree: int = 6) -> bool:
    """Geodesic certificate, every perfect matching simple, and R = S up to ``degree``."""
    from .central import center_sample, cycle_algebra_sample
    from .cycles import is_geodesic_algebra
    from .matchings import classify

    index = classify(q)
    if len(index.simple) != len(index.perfect) or not index.perfect:
        return False
    if not is_geodesic_algebra(q).certified:
        return False
    return center_sample(q, degree).elements == cycle_algebra_sample(q, degree).elements


def build_genus2() -> DimerQuiver:
    """The first octagon quiver accepted by the search, as shipped in the data directory."""
    return _named(from_dict(json.loads(_data_text("genus2-octagon.json"))), "genus2-octagon")


def _named(q: DimerQuiver, name: str) -> DimerQuiver:
    q.name = name
    return q


# ---------------------------------------------------------------------------
# suite


@dataclass
class InstanceSpec:
    """An instance with the properties the harness expects it to have.

    ``expected`` holds the geodesic flag, |P|, |S|, the lattice rank and the
    noetherian verdict; ``provenance`` says where each number comes from.
    """

    name: str
    family: str
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    source: str = "builtin"

    def to_dict(self):
        return {"name": self.name, "family": self.family, "params": self.params,
                "expected": self.expected, "provenance": self.provenance, "source": self.source}


@dataclass
class SuiteEntry:
    spec: InstanceSpec
    quiver: DimerQuiver | None
    error: str | None = None


def _data_text(filename: str) -> str:
    return resources.files("ghor").joinpath("data", filename).read_text()


def builtin_files() -> list[str]:
    return sorted(p.name for p in resources.files("ghor").joinpath("data").iterdir()
                  if p.name.endswith(".json"))


BUILDERS: dict[str, Callable[[], DimerQuiver]] = {
    "polynomial-2": lambda: build_polynomial(2),
    "polynomial-3": lambda: build_polynomial(3),
    "polynomial-4": lambda: build_polynomial(4),
    "conifold": build_conifold_torus,
    "center-deficient": build_center_deficient,
    "genus2-octagon": build_genus2,
}


def instance_document(spec: InstanceSpec, q: DimerQuiver) -> dict:
    """Quiver fields plus the suite metadata, as written to the data directory."""
    doc = q.to_dict()
    doc.update({"family": spec.family, "params": spec.params, "expected": spec.expected,
                "provenance": spec.provenance})
    return doc


def _spec_from_doc(doc: dict, name: str, source: str) -> InstanceSpec:
    return InstanceSpec(name, doc.get("family", "user"), doc.get("params", {}), doc.get("expected", {}),
                        doc.get("provenance", {}), source)


def _load_dir(directory: Path, source: str) -> list[SuiteEntry]:
    out = []
    for path in sorted(directory.glob("*.json")):
        name = path.stem
        try:
            doc = json.loads(path.read_text())
            q = from_dict(doc)
            name = q.name or name
            q.name = name
            out.append(SuiteEntry(_spec_from_doc(doc, name, source), q))
        except (OSError, json.JSONDecodeError, QuiverFormatError) as e:
            out.append(SuiteEntry(InstanceSpec(name, "user", source=source), None, f"{path.name}: {e}"))
    return out


def load_suite(data_dir: str | os.PathLike | None = None) -> list[SuiteEntry]:
    """Built-in instances plus quiver files from ``data_dir`` (or $GHOR_DATA_DIR).

    Files that fail to parse come back as entries with ``error`` set rather
    than aborting the suite.  A user file reusing a name raises ValueError.
    """
    entries = []
    for filename in builtin_files():
        doc = json.loads(_data_text(filename))
        name = doc["name"]
        q = BUILDERS[name]() if name in BUILDERS else from_dict(doc)
        q.name = name
        entries.append(SuiteEntry(_spec_from_doc(doc, name, "builtin"), q))
    user = data_dir if data_dir is not None else os.environ.get(DATA_DIR_ENV)
    if user:
        entries.extend(_load_dir(Path(user), str(user)))
    seen = set()
    for e in entries:
        if e.spec.name in seen:
            raise ValueError(f"duplicate instance name {e.spec.name!r}")
        seen.add(e.spec.name)
    return entries
