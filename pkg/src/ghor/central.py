"""Cycle semigroups at each vertex, the center, the cycle algebra, and their lattices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cycles import (CycleRecord, GeodesicVerdict, PreconditionError, axis_class, bounded_cycles,
                     elementary_cycles, is_geodesic_algebra)
from .labels import PERFECT, SIMPLE, ExponentVector, arrow_label_table, path_label
from .matchings import classify
from .quiver import DimerQuiver


class ModeError(ValueError):
    """Some arrow has label degree zero in the requested basis."""


def label_basis(q: DimerQuiver, basis: str | None = None) -> str:
    """Simple-matching basis when every arrow is in a simple matching, else perfect.

    Falling back to the perfect basis emits a warning, because the center is
    then read off perfect-matching labels.
    """
    table = arrow_label_table(q, SIMPLE)
    legal = table.shape[1] > 0 and bool((table.sum(axis=1) > 0).all())
    if basis is None:
        if legal:
            return SIMPLE
        warnings.warn(f"{q.name}: some arrow lies in no simple matching; using perfect-matching labels",
                      stacklevel=2)
        return PERFECT
    if basis == SIMPLE and not legal:
        raise ModeError("some arrow lies in no simple matching")
    return basis


def _checked_table(q: DimerQuiver, basis: str) -> np.ndarray:
    table = arrow_label_table(q, basis)
    if table.shape[1] == 0 or (table.sum(axis=1) == 0).any():
        raise ModeError(f"arrow with zero label degree in basis {basis}")
    return table


def default_degree(q: DimerQuiver) -> int:
    """2 * (length of the longest elementary cycle + 1)."""
    cycles = elementary_cycles(q)
    longest = max((len(c) for c in cycles), default=0)
    return 2 * (longest + 1)


# ---------------------------------------------------------------------------
# samples


@dataclass(frozen=True)
class SemigroupSample:
    basis: str
    degree: int
    elements: frozenset  # exponent tuples
    generators: tuple  # irreducible elements of the sample
    notes: tuple = ()

    def __contains__(self, v):
        return tuple(v) in self.elements

    def __len__(self):
        return len(self.elements)

    def sorted(self) -> list[tuple]:
        return sorted(self.elements, key=lambda v: (sum(v), v))

    def slice(self, degree: int) -> frozenset:
        return frozenset(v for v in self.elements if sum(v) <= degree)

    def to_dict(self):
        return {"basis": self.basis, "degree": self.degree, "size": len(self.elements),
                "elements": [list(v) for v in self.sorted()],
                "generators": [list(v) for v in self.generators], "notes": list(self.notes)}


def irreducibles(elements) -> tuple:
    """Nonzero elements that are not a sum of two nonzero elements of the set."""
    elems = set(elements)
    nonzero = sorted((v for v in elems if any(v)), key=lambda v: (sum(v), v))
    out = []
    for u in nonzero:
        split = False
        for w in nonzero:
            if sum(w) * 2 > sum(u):
                break
            d = tuple(a - b for a, b in zip(u, w))
            if min(d) >= 0 and any(d) and d in elems:
                split = True
                break
        if not split:
            out.append(u)
    return tuple(out)


def _sample(basis, degree, elements, notes=()) -> SemigroupSample:
    elements = frozenset(elements)
    return SemigroupSample(basis, degree, elements, irreducibles(elements), tuple(notes))


def vertex_semigroup(q: DimerQuiver, i: str, degree: int, basis: str | None = None) -> SemigroupSample:
    """Labels of all closed walks at ``i`` of label degree at most ``degree``."""
    basis = label_basis(q, basis)
    table = _checked_table(q, basis)
    vidx = {v: k for k, v in enumerate(q.vertices)}
    tails = [vidx[a.tail] for a in q.arrows]
    heads = [vidx[a.head] for a in q.arrows]
    start = vidx[i]
    states = kernels.label_closure(start, tails, heads, table, degree)
    return _sample(basis, degree, (vec for v, vec in states if v == start))


def center_sample(q: DimerQuiver, degree: int, basis: str | None = None) -> SemigroupSample:
    """Labels occurring at every vertex, up to ``degree``."""
    basis = label_basis(q, basis)
    common = None
    for v in q.vertices:
        s = vertex_semigroup(q, v, degree, basis).elements
        common = s if common is None else common & s
    notes = ["equals the degree slice of the center only when the quiver is certified geodesic"]
    if basis == PERFECT:
        notes.append("perfect-matching labels used: some arrow lies in no simple matching")
    return _sample(basis, degree, common or (), notes)


def cycle_algebra_cycles(q: DimerQuiver, basis: str | None = None) -> list[tuple[ExponentVector, CycleRecord]]:
    """Distinct elementary-cycle labels, each with the first cycle that carries it."""
    basis = label_basis(q, basis)
    seen = {}
    for c in elementary_cycles(q):
        lab = path_label(q, c.arrows, basis)
        seen.setdefault(lab.exponents, (lab, c))
    return [seen[k] for k in sorted(seen, key=lambda v: (sum(v), v))]


def cycle_algebra_generators(q: DimerQuiver, basis: str | None = None) -> list[ExponentVector]:
    """Labels of the elementary cycles, which generate every closed-walk label."""
    return [lab for lab, _ in cycle_algebra_cycles(q, basis)]


def cycle_algebra_sample(q: DimerQuiver, degree: int, basis: str | None = None) -> SemigroupSample:
    """Sums of cycle-algebra generators of degree at most ``degree``."""
    basis = label_basis(q, basis)
    gens = [g.exponents for g in cycle_algebra_generators(q, basis)]
    dim = arrow_label_table(q, basis).shape[1]
    zero = (0,) * dim
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                w = tuple(a + b for a, b in zip(u, g))
                if sum(w) <= degree and w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return _sample(basis, degree, seen)


def realized_at(q: DimerQuiver, vertex: str, target, basis: str) -> tuple | None:
    """A closed walk at ``vertex`` whose label is exactly ``target``, or None."""
    table = _checked_table(q, basis)
    rows = [tuple(int(x) for x in r) for r in table]
    target = tuple(int(x) for x in target)
    if not any(target):
        return ()
    seen = set()
    stack = [(vertex, (0,) * len(target), ())]
    while stack:
        v, acc, walk = stack.pop()
        for a in q.out_arrows(v):
            nxt = tuple(x + y for x, y in zip(acc, rows[q.arrow_index[a.id]]))
            if any(x > t for x, t in zip(nxt, target)):
                continue
            if nxt == target:
                if a.head == vertex:
                    return walk + (a.id,)
                continue
            if (a.head, nxt) not in seen:
                seen.add((a.head, nxt))
                stack.append((a.head, nxt, walk + (a.id,)))
    return None


def in_center(q: DimerQuiver, target, basis: str) -> dict | None:
    """Per-vertex closed walks realizing ``target`` at every vertex, or None."""
    out = {}
    for v in q.vertices:
        w = realized_at(q, v, target, basis)
        if w is None:
            return None
        out[v] = w
    return out


# ---------------------------------------------------------------------------
# lattices


def elementary_divisors(matrix) -> list[int]:
    """Nonzero diagonal of the Smith normal form of an integer matrix."""
    a = [[int(x) for x in row] for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    out = []
    t = 0
    while t < min(rows, cols):
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                f = a[i][t] // p
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                f = a[t][j] // p
                if f:
                    for row in a:
                        row[j] -= f * row[t]
                if a[t][j]:
                    done = False
            if not done:
                # move the smallest leftover in row/column t to the pivot
                best = (abs(p), t, t)
                for i in range(t + 1, rows):
                    if a[i][t] and abs(a[i][t]) < best[0]:
                        best = (abs(a[i][t]), i, t)
                for j in range(t + 1, cols):
                    if a[t][j] and abs(a[t][j]) < best[0]:
                        best = (abs(a[t][j]), t, j)
                _, i, j = best
                if i != t:
                    a[t], a[i] = a[i], a[t]
                if j != t:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                continue
            # divisibility: fold in any entry not divisible by the pivot
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % p), None)
            if bad is not None:
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                done = False
        out.append(abs(a[t][t]))
        t += 1
    return out


@dataclass(frozen=True)
class LatticeSummary:
    matrix: tuple  # generator rows
    rank: int
    divisors: tuple

    def to_dict(self):
        return {"rank": self.rank, "elementary_divisors": list(self.divisors),
                "generators": [list(r) for r in self.matrix]}


def krull_dimension(vectors) -> LatticeSummary:
    """Rank of the integer lattice spanned by the vectors (Krull dimension of the semigroup ring)."""
    rows = tuple(tuple(int(x) for x in v) for v in vectors)
    if not rows:
        return LatticeSummary((), 0, ())
    divs = elementary_divisors(rows)
    return LatticeSummary(rows, len(divs), tuple(divs))


@dataclass
class TReport:
    lattice: LatticeSummary
    expected_rank: int
    normalization: dict  # k -> sigma exponent of gamma_k gamma_{k+N}, None if not a sigma power
    certified: bool

    @property
    def ok(self) -> bool:
        return self.lattice.rank == self.expected_rank and all(
            v is not None for v in self.normalization.values())

    def to_dict(self):
        return {"lattice": self.lattice.to_dict(), "expected_rank": self.expected_rank,
                "normalization": {str(k): v for k, v in self.normalization.items()},
                "certified_witnesses": self.certified, "ok": self.ok}


def axis_witnesses(q: DimerQuiver, verdict: GeodesicVerdict | None = None) -> tuple[dict, bool]:
    """gamma_k for k = 1..2N: the geodesic witnesses when certified, else shortest cycles of each axis class."""
    if verdict is not None and verdict.certified:
        return dict(verdict.witnesses), True
    n = q.polygon.half_sides
    pool = bounded_cycles(q, max(3, n))
    out = {}
    for k in range(1, 2 * n + 1):
        target = axis_class(n, k)
        for c in pool:
            if c.class_vector == target:
                out[k] = c.arrows
                break
    return out, False


def t_subalgebra(q: DimerQuiver, witnesses: dict, basis: str | None = None,
                 certified: bool = True) -> TReport:
    """Lattice of sigma and the gamma_k labels, with the gamma_k gamma_{k+N} sigma-power check."""
    n = q.polygon.half_sides
    missing = [k for k in range(1, 2 * n + 1) if k not in witnesses]
    if missing:
        raise PreconditionError(f"no witness for gamma_k, k in {missing}")
    basis = label_basis(q, basis)
    labels = {k: path_label(q, witnesses[k], basis) for k in witnesses}
    dim = len(next(iter(labels.values())))
    vectors = [(1,) * dim] + [labels[k].exponents for k in sorted(labels)]
    norm = {}
    for k in range(1, n + 1):
        s = labels[k] + labels[k + n]
        first = s.exponents[0]
        norm[k] = first if all(x == first for x in s.exponents) else None
    return TReport(krull_dimension(vectors), n + 1, norm, certified)


# ---------------------------------------------------------------------------
# sigma inversion, noetherianity, depiction


def _t_combination(q, cycle: CycleRecord, witnesses: dict, basis: str):
    """Nonnegative gamma counts plus a sigma exponent reproducing the cycle's label, or None."""
    n = q.polygon.half_sides
    counts = {}
    for k, c in enumerate(cycle.class_vector, start=1):
        if c > 0:
            counts[k] = c
        elif c < 0:
            counts[k + n] = -c
    label = path_label(q, cycle.arrows, basis)
    total = np.zeros(len(label), dtype=np.int64)
    for k, c in counts.items():
        total += c * path_label(q, witnesses[k], basis).array()
    diff = label.array() - total
    if len(set(diff.tolist())) > 1:
        return None
    return {"gamma": {str(k): c for k, c in sorted(counts.items())}, "sigma": int(diff[0]) if len(diff) else 0}


@dataclass
class AgreementReport:
    basis: str
    degree: int
    rows: list  # one dict per generator
    exhausted: list

    @property
    def ok(self) -> bool:
        return not self.exhausted

    def to_dict(self):
        return {"basis": self.basis, "degree": self.degree, "generators": self.rows,
                "exhausted": self.exhausted, "ok": self.ok}


def sigma_inverted_agreement(q: DimerQuiver, degree: int | None = None, basis: str | None = None,
                             verdict: GeodesicVerdict | None = None) -> AgreementReport:
    """For each cycle-algebra generator s, the least m <= degree with s * sigma^m central.

    Also writes s as gamma-monomial times a sigma power whenever the label
    arithmetic allows it.
    """
    basis = label_basis(q, basis)
    degree = default_degree(q) if degree is None else degree
    witnesses, _ = axis_witnesses(q, verdict)
    rows, exhausted = [], []
    for lab, cyc in cycle_algebra_cycles(q, basis):
        row = {"generator": list(lab), "cycle": list(cyc.arrows), "m": None, "walks": None}
        for m in range(degree + 1):
            walks = in_center(q, lab.shift(m).exponents, basis)
            if walks is not None:
                row["m"], row["walks"] = m, {v: list(w) for v, w in walks.items()}
                break
        if row["m"] is None:
            exhausted.append(list(lab))
        have = len(witnesses) == 2 * q.polygon.half_sides
        row["t_combination"] = _t_combination(q, cyc, witnesses, basis) if have else None
        rows.append(row)
    return AgreementReport(basis, degree, rows, exhausted)


def _support_obstruction(q: DimerQuiver, g, basis: str) -> str | None:
    """A vertex with no closed walk inside the arrows whose labels stay in supp(g), or None.

    Any closed walk labelled n*g uses only such arrows, so the obstruction
    rules out every power of g at once.
    """
    table = _checked_table(q, basis)
    support = {i for i, x in enumerate(g) if x}
    allowed = [a for a in q.arrows if {i for i, x in enumerate(table[q.arrow_index[a.id]]) if x} <= support]
    for v in q.vertices:
        # v lies on a closed walk iff some allowed arrow out of v can get back to v
        adj: dict[str, list[str]] = {}
        for a in allowed:
            adj.setdefault(a.tail, []).append(a.head)
        stack = list(adj.get(v, []))
        seen = set()
        back = False
        while stack:
            w = stack.pop()
            if w == v:
                back = True
                break
            if w in seen:
                continue
            seen.add(w)
            stack.extend(adj.get(w, []))
        if not back:
            return v
    return None


@dataclass
class NoetherianVerdict:
    status: str  # "noetherian-certified-at-bound" | "nonnoetherian-certified" | "inconclusive"
    basis: str
    nmax: int
    degree: int
    powers: list  # per generator: {"generator", "n"}
    witness: dict | None = None

    def to_dict(self):
        return {"status": self.status, "basis": self.basis, "nmax": self.nmax, "degree": self.degree,
                "powers": self.powers, "witness": self.witness}


def noetherian_center_test(q: DimerQuiver, nmax: int = 4, basis: str | None = None) -> NoetherianVerdict:
    """Bounded check that every generator has a central power.

    The center is noetherian exactly when each monomial of the cycle algebra
    has a power in it; checking the generators is enough because the center
    is closed under products.  A generator none of whose powers can be
    central (support obstruction) certifies the opposite.
    """
    basis = label_basis(q, basis)
    gens = cycle_algebra_generators(q, basis)
    degree = nmax * max((g.degree for g in gens), default=0)
    powers, witness = [], None
    status = "noetherian-certified-at-bound"
    for g in gens:
        hit = None
        for n in range(1, nmax + 1):
            if in_center(q, g.scale(n).exponents, basis) is not None:
                hit = n
                break
        powers.append({"generator": list(g), "n": hit})
        if hit is None:
            v = _support_obstruction(q, g.exponents, basis)
            if v is not None:
                status = "nonnoetherian-certified"
                witness = witness or {"generator": list(g), "vertex": v,
                                      "reason": "no closed walk at this vertex uses only arrows "
                                                "whose labels lie in the generator's support"}
            elif status != "nonnoetherian-certified":
                status = "inconclusive"
                witness = witness or {"generator": list(g), "reason": f"no power up to {nmax} is central"}
    if gens == []:
        status = "inconclusive"
        witness = {"reason": "no cycles"}
    return NoetherianVerdict(status, basis, nmax, degree, powers, witness)


@dataclass
class DepictionReport:
    basis: str
    degree: int
    agreement: AgreementReport
    equal_by_degree: dict  # d -> R_d == S_d
    noetherian: NoetherianVerdict
    ranks: dict
    notes: list = field(default_factory=list)

    @property
    def summary(self) -> str:
        if all(self.equal_by_degree.values()):
            return "R = S at all sampled degrees; depiction trivial"
        return "R is strictly smaller than S; generator-level depiction witnesses listed"

    def to_dict(self):
        return {"basis": self.basis, "degree": self.degree, "summary": self.summary,
                "agreement": self.agreement.to_dict(),
                "equal_by_degree": {str(d): v for d, v in self.equal_by_degree.items()},
                "noetherian": self.noetherian.to_dict(), "ranks": self.ranks, "notes": self.notes}


def lattice_ranks(q: DimerQuiver, degree: int | None = None, basis: str | None = None,
                  verdict: GeodesicVerdict | None = None) -> dict:
    """Ranks of the S-, T- and R-generator lattices."""
    basis = label_basis(q, basis)
    degree = default_degree(q) if degree is None else degree
    s_rank = krull_dimension(g.exponents for g in cycle_algebra_generators(q, basis)).rank
    r_rank = krull_dimension(center_sample(q, degree, basis).generators).rank
    witnesses, certified = axis_witnesses(q, verdict)
    t = None
    if len(witnesses) == 2 * q.polygon.half_sides:
        t = t_subalgebra(q, witnesses, basis, certified).lattice.rank
    return {"S": s_rank, "T": t, "R": r_rank, "T_witnesses_certified": certified}


def depiction_report(q: DimerQuiver, degree: int | None = None, nmax: int = 4,
                     basis: str | None = None, verdict: GeodesicVerdict | None = None) -> DepictionReport:
    basis = label_basis(q, basis)
    degree = default_degree(q) if degree is None else degree
    if verdict is None:
        verdict = is_geodesic_algebra(q)
    agreement = sigma_inverted_agreement(q, degree, basis, verdict)
    r = center_sample(q, degree, basis)
    s = cycle_algebra_sample(q, degree, basis)
    equal = {d: r.slice(d) == s.slice(d) for d in range(degree + 1)}
    notes = ["prime-spectrum surjectivity is not checked computationally; evidence is monomial-level only"]
    if not verdict.certified:
        notes.append("quiver not certified geodesic: the sampled R is not guaranteed to be the center")
    return DepictionReport(basis, degree, agreement, equal, noetherian_center_test(q, nmax, basis),
                           lattice_ranks(q, degree, basis, verdict), notes)
