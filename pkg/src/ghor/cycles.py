"""Cycles of a dimer quiver: classes, lifts to the cover, geodesics, parallel families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .labels import ExponentVector, eta_bar, sigma_equal, sigma_normal_form, tau_bar
from .matchings import Matching, classify, is_simple
from .polygon import LiftedVertex, abelianize, cover, is_trivial
from .quiver import DimerQuiver, PathError, rotation_system
from . import kernels


class PreconditionError(ValueError):
    """An operation was called on input outside its domain."""


class ConstructionGap(RuntimeError):
    """No simple matching could be built from a subdivision."""


class TheoremViolation(RuntimeError):
    """Same-class cycles whose labels are not sigma-equivalent."""


@dataclass(frozen=True)
class CycleRecord:
    arrows: tuple
    base: str
    class_vector: tuple
    label_eta: ExponentVector
    label_tau: ExponentVector
    crossing: tuple

    def __len__(self):
        return len(self.arrows)

    def to_dict(self):
        return {
            "arrows": list(self.arrows),
            "base": self.base,
            "class": list(self.class_vector),
            "eta": list(self.label_eta),
            "tau": list(self.label_tau),
        }


def _arrows(c) -> tuple:
    return c.arrows if isinstance(c, CycleRecord) else tuple(c)


def _closed(q: DimerQuiver, c) -> tuple:
    arrows = _arrows(c)
    t, h = q.endpoints(arrows)
    if t != h:
        raise PathError(f"path {list(arrows)} is not closed: {t!r} -> {h!r}")
    return arrows


def cycle_record(q: DimerQuiver, arrows: Sequence[str]) -> CycleRecord:
    arrows = _closed(q, arrows)
    word = q.crossing_word(arrows)
    return CycleRecord(arrows, q.arrow(arrows[0]).tail, abelianize(word, q.polygon),
                       eta_bar(q, arrows), tau_bar(q, arrows), word)


def rotate_canonical(q: DimerQuiver, arrows: Sequence[str]) -> tuple:
    """The rotation of a cyclic arrow sequence with the least arrow-index tuple."""
    arrows = tuple(arrows)
    idx = [q.arrow_index[a] for a in arrows]
    best = min(range(len(arrows)), key=lambda k: idx[k:] + idx[:k])
    return arrows[best:] + arrows[:best]


def _order_key(q: DimerQuiver, arrows) -> tuple:
    return len(arrows), tuple(q.arrow_index[a] for a in arrows)


# ---------------------------------------------------------------------------
# enumeration


def elementary_cycles(q: DimerQuiver) -> list[CycleRecord]:
    """Every directed cycle without a repeated vertex, one record per rotation class.

    Cycles are grown from their least vertex (in quiver order) through larger
    vertices only, so each is produced once per arrow sequence.
    """
    order = {v: i for i, v in enumerate(q.vertices)}
    found = []
    for s in q.vertices:
        lo = order[s]
        stack = [(s, (), {s})]
        while stack:
            v, path, seen = stack.pop()
            for a in q.out_arrows(v):
                if a.head == s:
                    found.append(path + (a.id,))
                elif order[a.head] > lo and a.head not in seen:
                    stack.append((a.head, path + (a.id,), seen | {a.head}))
    cycles = {rotate_canonical(q, c) for c in found}
    return [cycle_record(q, c) for c in sorted(cycles, key=lambda c: _order_key(q, c))]


def bounded_cycles(q: DimerQuiver, bound: int) -> list[CycleRecord]:
    """Closed walks that split into at most ``bound`` elementary cycles, up to rotation.

    Walks are built by splicing an elementary cycle into a shorter walk at a
    vertex they share; every closed walk arises this way from its
    elementary-cycle decomposition.
    """
    elem = [c.arrows for c in elementary_cycles(q)]
    at_vertex: dict[str, list[tuple]] = {v: [] for v in q.vertices}
    for c in elem:
        for k in range(len(c)):
            rot = c[k:] + c[:k]
            at_vertex[q.arrow(rot[0]).tail].append(rot)
    seen = set(elem)
    level = list(elem)
    for _ in range(1, bound):
        nxt = []
        for w in level:
            for p in range(len(w)):
                v = q.arrow(w[p]).tail
                for d in at_vertex[v]:
                    new = rotate_canonical(q, w[:p] + d + w[p:])
                    if new not in seen:
                        seen.add(new)
                        nxt.append(new)
        level = nxt
    return [cycle_record(q, c) for c in sorted(seen, key=lambda c: _order_key(q, c))]


# ---------------------------------------------------------------------------
# classes and lifts


def cycle_class(q: DimerQuiver, cycle) -> tuple:
    arrows = _closed(q, cycle)
    return abelianize(q.crossing_word(arrows), q.polygon)


def is_contractible(q: DimerQuiver, cycle) -> bool:
    """Whether the lift of the cycle closes up in the universal cover."""
    arrows = _closed(q, cycle)
    return is_trivial(q.crossing_word(arrows), q.polygon)


def lift(q: DimerQuiver, path: Sequence[str]) -> list[LiftedVertex]:
    """Lifted vertices visited by a path started in the base tile."""
    path = tuple(path)
    q.endpoints(path)
    tess = cover(q.polygon)
    here = LiftedVertex(tess.base, q.arrow(path[0]).tail)
    out = [here]
    for aid in path:
        a = q.arrow(aid)
        here = LiftedVertex(tess.walk(here.tile, a.crossings), a.head)
        out.append(here)
    return out


def lift_is_cyclic_subpath_free(q: DimerQuiver, path: Sequence[str]) -> bool:
    """True when no two prefixes of the lifted path end at the same lifted vertex."""
    points = lift(q, path)
    return len(set(points)) == len(points)


# ---------------------------------------------------------------------------
# representatives


def _eta_rows(q: DimerQuiver) -> list[tuple]:
    bits = classify(q).perfect_bits
    return [tuple(int(x) for x in row) for row in bits]


def _exact_representatives(q: DimerQuiver, path: tuple) -> list[tuple]:
    rows = _eta_rows(q)
    tail, head = q.endpoints(path)
    target = tuple(eta_bar(q, path))
    zero = (0,) * len(target)
    out = []
    stack = [(tail, zero, ())]
    while stack:
        v, acc, walk = stack.pop()
        if acc == target:
            if v == head:
                out.append(walk)
            continue
        for a in q.out_arrows(v):
            nxt = tuple(x + y for x, y in zip(acc, rows[q.arrow_index[a.id]]))
            if all(x <= t for x, t in zip(nxt, target)):
                stack.append((a.head, nxt, walk + (a.id,)))
    return sorted(set(out), key=lambda w: _order_key(q, w))


def unit_rewrites(q: DimerQuiver) -> list[tuple[tuple, tuple]]:
    """Pairs (p, p') of paths that complete the same arrow to its two faces."""
    by_arrow: dict[str, list[tuple]] = {}
    for f in q.faces:
        for k, aid in enumerate(f):
            by_arrow.setdefault(aid, []).append(f[k + 1:] + f[:k])
    rules = set()
    for comps in by_arrow.values():
        for p, r in itertools.permutations(comps, 2):
            if p != r:
                rules.add((p, r))
    return sorted(rules)


def _rewrite_representatives(q: DimerQuiver, path: tuple, depth: int) -> list[tuple]:
    rules = unit_rewrites(q)
    seen = {path}
    level = [path]
    for _ in range(depth):
        nxt = []
        for w in level:
            for lhs, rhs in rules:
                n = len(lhs)
                for i in range(len(w) - n + 1):
                    if w[i:i + n] == lhs:
                        new = w[:i] + rhs + w[i + n:]
                        if new not in seen:
                            seen.add(new)
                            nxt.append(new)
        level = nxt
    return sorted(seen, key=lambda w: _order_key(q, w))


def representatives(q: DimerQuiver, path: Sequence[str], rewrite_depth: int | None = None) -> list[tuple]:
    """Paths equal to ``path`` in the algebra.

    With ``rewrite_depth=None`` this is the complete list: every coterminal
    path with the same perfect-matching label, found by a label-bounded
    search.  An integer depth instead closes ``path`` under at most that many
    unit-cycle rewrites.  The exact mode needs every arrow in some perfect
    matching; otherwise the rewrite closure at depth 2 is used.
    """
    path = tuple(path)
    q.endpoints(path)
    if rewrite_depth is None and not classify(q).uncovered:
        return _exact_representatives(q, path)
    return _rewrite_representatives(q, path, 2 if rewrite_depth is None else rewrite_depth)


def representative_mode(q: DimerQuiver, rewrite_depth: int | None) -> str:
    if rewrite_depth is None and not classify(q).uncovered:
        return "exact"
    return f"rewrite-depth-{2 if rewrite_depth is None else rewrite_depth}"


def is_geodesic_cycle(q: DimerQuiver, cycle, rewrite_depth: int | None = None) -> bool:
    """No cyclic permutation of any representative revisits a lifted vertex."""
    arrows = _closed(q, cycle)
    for rep in representatives(q, arrows, rewrite_depth):
        for k in range(len(rep)):
            if not lift_is_cyclic_subpath_free(q, rep[k:] + rep[:k]):
                return False
    return True


# ---------------------------------------------------------------------------
# transversal intersection


class _Strands:
    """Side tests for arrow-ends against a path passing through a vertex."""

    def __init__(self, q: DimerQuiver):
        rot = rotation_system(q)
        self.where = {}
        for v, sheets in rot.cycles.items():
            for s, c in enumerate(sheets):
                for p, d in enumerate(c):
                    self.where[d] = (v, s, p, len(c))

    def side(self, into, out, dart):
        """'L' or 'R' of ``dart`` relative to a pass entering by ``into`` and leaving by ``out``.

        None when the pass or the dart lies on another sheet of a pinched
        vertex, where a single strand does not separate anything.
        """
        _, si, pi, n = self.where[into]
        _, so, po, _ = self.where[out]
        _, sd, pd, _ = self.where[dart]
        if si != so or sd != so:
            return None
        rd = (pd - po) % n
        ri = (pi - po) % n
        return "L" if 0 < rd < ri else "R"

    def sheet(self, dart):
        return self.where[dart][1]


def _passes(q: DimerQuiver, c: tuple):
    n = len(c)
    return [(q.arrow(c[i]).head, ("in", c[i]), ("out", c[(i + 1) % n])) for i in range(n)]


def transversely_intersect(q: DimerQuiver, c1, c2, _strands: _Strands | None = None) -> bool:
    """Whether two cycles cross somewhere on the surface.

    Passes through a common vertex cross when the second cycle arrives and
    leaves on opposite sides of the first.  A stretch of shared arrows is
    treated as one contact: the side where the second cycle joins is compared
    with the side where it departs.  A cycle never crosses itself.
    """
    a1, a2 = _closed(q, c1), _closed(q, c2)
    if rotate_canonical(q, a1) == rotate_canonical(q, a2):
        return False
    st = _strands or _Strands(q)
    p1, p2 = _passes(q, a1), _passes(q, a2)
    n, m = len(p1), len(p2)
    for i, (v, i1, o1) in enumerate(p1):
        for j, (w, i2, o2) in enumerate(p2):
            if v != w:
                continue
            same_in, same_out = i1 == i2, o1 == o2
            if not same_in and not same_out:
                if st.sheet(i1) != st.sheet(o1):
                    if st.sheet(i2) != st.sheet(o2):
                        return True
                    continue
                s_in, s_out = st.side(i1, o1, i2), st.side(i1, o1, o2)
                if s_in and s_out and s_in != s_out:
                    return True
            elif same_in and not same_out:
                # end of a shared stretch; walk back to where it began
                s_out = st.side(i1, o1, o2)
                for k in range(1, n * m + 1):
                    ii, jj = (i - k) % n, (j - k) % m
                    if p1[ii][1] != p2[jj][1]:
                        s_in = st.side(p1[ii][1], p1[ii][2], p2[jj][1])
                        if s_in and s_out and s_in != s_out:
                            return True
                        break
    return False


def pairwise_parallel(q: DimerQuiver, cycles: Iterable) -> bool:
    cycles = list(cycles)
    st = _Strands(q)
    return not any(transversely_intersect(q, a, b, st) for a, b in itertools.combinations(cycles, 2))


# ---------------------------------------------------------------------------
# geodesic certificate


def axis_class(n: int, k: int) -> tuple:
    """Class of gamma_k: +e_k for k <= N, -e_(k-N) above."""
    v = [0] * n
    if k <= n:
        v[k - 1] = 1
    else:
        v[k - n - 1] = -1
    return tuple(v)


@dataclass
class GeodesicVerdict:
    status: str  # "geodesic" | "inconclusive"
    witnesses: dict = field(default_factory=dict)  # k -> gamma_k arrows
    families: dict = field(default_factory=dict)  # k -> {vertex: arrows}
    missing: list = field(default_factory=list)  # (k, reason)
    bound: int = 3
    representatives: str = "exact"

    @property
    def certified(self) -> bool:
        return self.status == "geodesic"

    def to_dict(self):
        return {
            "status": self.status,
            "bound": self.bound,
            "representatives": self.representatives,
            "witnesses": {str(k): list(v) for k, v in sorted(self.witnesses.items())},
            "families": {str(k): {v: list(c) for v, c in sorted(fam.items())}
                         for k, fam in sorted(self.families.items())},
            "missing": [{"k": k, "reason": r} for k, r in self.missing],
        }


def _rotations_at(q: DimerQuiver, arrows: tuple) -> dict[str, tuple]:
    out = {}
    for k in range(len(arrows)):
        rot = arrows[k:] + arrows[:k]
        out.setdefault(q.arrow(rot[0]).tail, rot)
    return out


def _find_family(q, gamma, candidates, st, geodesic):
    """Backtracking choice of one parallel geodesic cycle per vertex, gamma fixed at its tail."""
    base = q.arrow(gamma[0]).tail
    chosen = {v: r for v, r in _rotations_at(q, gamma).items()}
    order = [v for v in q.vertices if v not in chosen]

    def ok(c, picked):
        return all(not transversely_intersect(q, c, d, st) for d in picked)

    def search(i, picked):
        if i == len(order):
            return True
        v = order[i]
        if v in chosen:
            return search(i + 1, picked)
        for c in candidates:
            rots = _rotations_at(q, c)
            if v not in rots or not geodesic(c):
                continue
            if ok(c, picked):
                before = dict(chosen)
                for w, r in rots.items():
                    chosen.setdefault(w, r)
                if search(i + 1, picked + [c]):
                    return True
                chosen.clear()
                chosen.update(before)
        return False

    if search(0, [gamma]):
        family = {v: chosen[v] for v in q.vertices}
        family[base] = gamma
        return family
    return None


def default_bound(q: DimerQuiver) -> int:
    """Concatenation bound for witness search: max(3, N).

    On one-vertex quivers a cycle of class +-e_k may need N loops, so a fixed
    bound of 3 would miss witnesses for N >= 4.
    """
    return max(3, q.polygon.half_sides)


def is_geodesic_algebra(q: DimerQuiver, bound: int | None = None,
                        rewrite_depth: int | None = None) -> GeodesicVerdict:
    """Search for the geodesic cycles gamma_1..gamma_2N and their parallel families.

    Candidates are closed walks of at most ``bound`` elementary cycles
    (default :func:`default_bound`),
    filtered by class before any lifting.  Family members must have the same
    class as gamma_k.  Exhausting the candidates gives an inconclusive
    verdict, never a disproof.
    """
    n = q.polygon.half_sides
    bound = default_bound(q) if bound is None else bound
    mode = representative_mode(q, rewrite_depth)
    verdict = GeodesicVerdict("geodesic", bound=bound, representatives=mode)
    pool = bounded_cycles(q, bound)
    by_class: dict[tuple, list[tuple]] = {}
    for c in pool:
        by_class.setdefault(c.class_vector, []).append(c.arrows)
    st = _Strands(q)
    memo: dict[tuple, bool] = {}

    def geodesic(c):
        if c not in memo:
            memo[c] = is_geodesic_cycle(q, c, rewrite_depth)
        return memo[c]

    for k in range(1, 2 * n + 1):
        cands = by_class.get(axis_class(n, k), [])
        if not cands:
            verdict.missing.append((k, "no cycle of this class within the bound"))
            continue
        found = False
        any_geodesic = False
        for gamma in cands:
            if not geodesic(gamma):
                continue
            any_geodesic = True
            family = _find_family(q, gamma, cands, st, geodesic)
            if family is not None:
                verdict.witnesses[k] = gamma
                verdict.families[k] = family
                found = True
                break
        if not found:
            reason = "no parallel geodesic family" if any_geodesic else "no geodesic cycle of this class"
            verdict.missing.append((k, reason))
    if verdict.missing:
        verdict.status = "inconclusive"
    return verdict


# ---------------------------------------------------------------------------
# subdivisions


@dataclass(frozen=True)
class Piece:
    kind: str  # "column" | "pillar"
    faces: tuple  # face indices
    interior: tuple  # arrow ids not on the family
    boundary: tuple  # family arrow ids on the piece
    bounding_cycles: tuple  # family cycles touching the piece

    def to_dict(self):
        return {"kind": self.kind, "faces": list(self.faces), "interior": list(self.interior),
                "boundary": list(self.boundary), "bounding_cycles": [list(c) for c in self.bounding_cycles]}


@dataclass(frozen=True)
class Subdivision:
    family: tuple  # distinct family cycles in canonical rotation
    pieces: tuple

    def check(self) -> list[str]:
        """Arrows lying in the interior of more than one piece (empty when valid)."""
        seen: dict[str, int] = {}
        bad = []
        for i, p in enumerate(self.pieces):
            for a in p.interior:
                if a in seen and seen[a] != i:
                    bad.append(a)
                seen[a] = i
        return sorted(set(bad))

    def to_dict(self):
        return {"family": [list(c) for c in self.family], "pieces": [p.to_dict() for p in self.pieces]}


def subdivision_from_family(q: DimerQuiver, family) -> Subdivision:
    """Cut Q along a parallel family and sort the strips into columns and pillars.

    Strips are the classes of faces glued along arrows off the family.  A
    strip whose bounding family cycles share an arrow is a pillar, any other
    strip a column.
    """
    cycles = list(family.values()) if isinstance(family, dict) else list(family)
    cycles = [_closed(q, c) for c in cycles]
    distinct = sorted({rotate_canonical(q, c) for c in cycles}, key=lambda c: _order_key(q, c))
    if isinstance(family, dict):
        for v, c in family.items():
            if q.arrow(c[0]).tail != v:
                raise PreconditionError(f"family cycle for {v!r} is based at {q.arrow(c[0]).tail!r}")
        missing = [v for v in q.vertices if v not in family]
        if missing:
            raise PreconditionError(f"family has no cycle at {missing}")
    if not pairwise_parallel(q, distinct):
        raise PreconditionError("family cycles intersect transversely")
    on_family = {a for c in distinct for a in c}

    parent = list(range(len(q.faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    incid: dict[str, list[int]] = {}
    for i, f in enumerate(q.faces):
        for a in f:
            incid.setdefault(a, []).append(i)
    for a, fs in incid.items():
        if a not in on_family:
            for j in fs[1:]:
                parent[find(j)] = find(fs[0])
    strips: dict[int, list[int]] = {}
    for i in range(len(q.faces)):
        strips.setdefault(find(i), []).append(i)

    pieces = []
    for faces in sorted(strips.values()):
        arrows = {a for i in faces for a in q.faces[i]}
        interior = tuple(a.id for a in q.arrows if a.id in arrows and a.id not in on_family)
        boundary = tuple(a.id for a in q.arrows if a.id in arrows and a.id in on_family)
        bounding = tuple(c for c in distinct if set(c) & set(boundary))
        shared = any(set(x) & set(y) for x, y in itertools.combinations(bounding, 2))
        pieces.append(Piece("pillar" if shared else "column", tuple(faces), interior, boundary, bounding))
    return Subdivision(tuple(distinct), tuple(pieces))


def _strip_covers(q: DimerQuiver, piece: Piece) -> list[int]:
    index = {a: i for i, a in enumerate(piece.interior)}
    faces = [sorted({index[a] for a in q.faces[f] if a in index}) for f in piece.faces]
    return kernels.exact_cover(faces, len(piece.interior))


def matching_from_subdivision(q: DimerQuiver, sub: Subdivision) -> Matching:
    """A simple matching built from the interiors of the pieces.

    Each piece contributes one interior arrow per unit cycle (an exact cover
    of its faces by arrows off the family).  Choices are tried in canonical
    order and the first combination that is a simple matching is returned.
    """
    bad = sub.check()
    if bad:
        raise PreconditionError(f"arrows {bad} are interior to several pieces")
    covered = sorted(f for p in sub.pieces for f in p.faces)
    if covered != list(range(len(q.faces))):
        raise PreconditionError("pieces do not partition the faces")
    options = []
    for p in sub.pieces:
        sols = []
        for mask in _strip_covers(q, p):
            sols.append(frozenset(a for i, a in enumerate(p.interior) if mask >> i & 1))
        sols.sort(key=lambda s: sorted(q.arrow_index[a] for a in s))
        if not sols:
            raise ConstructionGap(f"piece with faces {list(p.faces)} has no interior perfect cover")
        options.append(sols)
    for combo in itertools.product(*options):
        m = Matching(frozenset().union(*combo))
        if is_simple(q, m):
            return m
    raise ConstructionGap("no combination of piece covers is a simple matching")


# ---------------------------------------------------------------------------
# class / label correspondence


@dataclass
class TheoremReport:
    bound: int
    cycles: int
    pairs: int
    violations: list
    conditional: bool

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {"bound": self.bound, "cycles": self.cycles, "pairs": self.pairs,
                "violations": self.violations, "conditional": self.conditional, "ok": self.ok}


def verify_class_label_theorem(q: DimerQuiver, bound: int = 3, geodesic: bool | None = None,
                               label=tau_bar) -> TheoremReport:
    """Check [p] = [r] iff tau(p) and tau(r) differ by a power of sigma, over all bounded cycle pairs.

    Both relations are equivalence relations, so the check compares the two
    partitions of the cycle list and reports one witness pair per mismatch.
    ``geodesic`` skips the certificate search when the answer is known; the
    report is conditional when the quiver is not certified.
    """
    if geodesic is None:
        geodesic = is_geodesic_algebra(q).certified
    cycles = bounded_cycles(q, bound)
    by_class: dict[tuple, list[tuple]] = {}
    by_label: dict[tuple, list[tuple]] = {}
    for c in cycles:
        lab = label(q, c.arrows)
        nf = sigma_normal_form(lab)[1].exponents
        by_class.setdefault(c.class_vector, []).append((nf, c))
        by_label.setdefault(nf, []).append((c.class_vector, c))
    violations = []
    for cls, items in by_class.items():
        first_nf, first = items[0]
        for nf, c in items[1:]:
            if nf != first_nf:
                violations.append({"kind": "same-class-different-label", "class": list(cls),
                                   "p": list(first.arrows), "q": list(c.arrows)})
                first_nf = nf
    for nf, items in by_label.items():
        first_cls, first = items[0]
        for cls, c in items[1:]:
            if cls != first_cls:
                violations.append({"kind": "same-label-different-class", "label": list(nf),
                                   "p": list(first.arrows), "q": list(c.arrows)})
                first_cls = cls
    n = len(cycles)
    return TheoremReport(bound, n, n * (n - 1) // 2, violations, not geodesic)


def sigma_exponent(q: DimerQuiver, p, r) -> int:
    """The l with tau(p) - tau(r) = l * (1, ..., 1) for same-class cycles p, r."""
    cp, cr = cycle_class(q, p), cycle_class(q, r)
    if cp != cr:
        raise PreconditionError(f"classes differ: {list(cp)} vs {list(cr)}")
    ell = sigma_equal(tau_bar(q, _arrows(p)), tau_bar(q, _arrows(r)))
    if ell is None:
        raise TheoremViolation(f"cycles {list(_arrows(p))} and {list(_arrows(r))} share a class "
                               f"but their labels are not sigma-equivalent")
    return ell
