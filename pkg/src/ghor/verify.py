"""Per-instance check suites with pass / fail / inconclusive outcomes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any

from .central import (center_sample, cycle_algebra_sample, default_degree, label_basis, lattice_ranks,
                      noetherian_center_test, sigma_inverted_agreement, vertex_semigroup)
from .cycles import (ConstructionGap, GeodesicVerdict, bounded_cycles, is_contractible, is_geodesic_algebra,
                     matching_from_subdivision, subdivision_from_family, verify_class_label_theorem)
from .instances import InstanceSpec
from .labels import PERFECT, SIMPLE, path_label
from .matchings import classify, is_simple
from .quiver import DimerQuiver, validate

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Outcome:
    name: str
    status: str
    detail: Any = None

    def to_dict(self):
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def face_label_checks(q: DimerQuiver) -> list[Outcome]:
    """Every unit cycle has label (1, ..., 1) over P and over S."""
    out = []
    for basis in (PERFECT, SIMPLE):
        bad = []
        for i, f in enumerate(q.faces):
            lab = path_label(q, f, basis)
            if any(x != 1 for x in lab.exponents):
                bad.append({"face": i, "label": list(lab)})
        out.append(Outcome(f"face-label-{basis}", _status(not bad), bad or None))
    return out


def matching_checks(q: DimerQuiver, verdict: GeodesicVerdict) -> list[Outcome]:
    index = classify(q)
    out = [Outcome("simple-subset-of-perfect", _status(set(index.simple) <= set(index.perfect)))]
    if verdict.certified:
        used = {a for m in index.simple for a in m.arrows}
        missing = [a.id for a in q.arrows if a.id not in used]
        out.append(Outcome("arrows-in-simple-matchings", _status(not missing), missing or None))
    return out


def cycle_invariant_checks(q: DimerQuiver, verdict: GeodesicVerdict, bound: int = 3) -> list[Outcome]:
    """Contractibility, class and label consistency over bounded cycles, plus subdivisions."""
    cycles = bounded_cycles(q, bound)
    basis = SIMPLE if label_basis_legal(q) else PERFECT
    c_class, c_sigma, zero_iff = [], [], []
    for c in cycles:
        contractible = is_contractible(q, c)
        zero_class = not any(c.class_vector)
        sigma_trivial = len(set(path_label(q, c.arrows, basis).exponents)) <= 1
        if contractible and not zero_class:
            c_class.append(list(c.arrows))
        if contractible and not sigma_trivial:
            c_sigma.append(list(c.arrows))
        if zero_class != sigma_trivial:
            zero_iff.append(list(c.arrows))
    out = [
        Outcome("contractible-implies-class-zero", _status(not c_class), c_class[:5] or None),
        Outcome("contractible-implies-sigma-label", _status(not c_sigma), c_sigma[:5] or None),
    ]
    if verdict.certified:
        out.append(Outcome("class-zero-iff-sigma-label", _status(not zero_iff), zero_iff[:5] or None))
    else:
        out.append(Outcome("class-zero-iff-sigma-label", INCONCLUSIVE,
                           {"reason": "quiver not certified geodesic", "mismatches": zero_iff[:5]}))

    if verdict.certified:
        faces = [tuple(f) for f in q.faces]
        bad = []
        for k, g in verdict.witnesses.items():
            doubled = g + g
            for f in faces:
                if any(doubled[i:i + len(f)] == f for i in range(len(g))) and len(f) <= len(g):
                    bad.append({"k": k, "face": list(f)})
        out.append(Outcome("geodesics-avoid-unit-cycles", _status(not bad), bad or None))
        gaps = []
        for k, fam in sorted(verdict.families.items()):
            try:
                m = matching_from_subdivision(q, subdivision_from_family(q, fam))
                if not is_simple(q, m):
                    gaps.append({"k": k, "matching": list(m.sorted())})
            except ConstructionGap as e:
                gaps.append({"k": k, "error": str(e)})
        out.append(Outcome("subdivision-matchings-simple", _status(not gaps), gaps or None))
    return out


def label_basis_legal(q: DimerQuiver) -> bool:
    table = classify(q).simple_bits
    return table.shape[1] > 0 and bool((table.sum(axis=1) > 0).all())


def theorem_checks(q: DimerQuiver, verdict: GeodesicVerdict, bound: int = 3) -> list[Outcome]:
    report = verify_class_label_theorem(q, bound, geodesic=verdict.certified)
    detail = report.to_dict()
    if verdict.certified:
        status = _status(report.ok)
    else:
        status = PASS if report.ok else INCONCLUSIVE
    return [Outcome("class-label-correspondence", status, detail)] + cycle_invariant_checks(q, verdict, bound)


def central_checks(q: DimerQuiver, verdict: GeodesicVerdict, degree: int | None = None,
                   nmax: int = 4) -> tuple[list[Outcome], dict]:
    degree = default_degree(q) if degree is None else degree
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        basis = label_basis(q)
    r = center_sample(q, degree, basis)
    out = []
    subset = all(r.elements <= vertex_semigroup(q, v, degree, basis).elements for v in q.vertices)
    s = cycle_algebra_sample(q, degree, basis)
    out.append(Outcome("center-in-vertex-semigroups", _status(subset)))
    out.append(Outcome("center-in-cycle-algebra", _status(r.elements <= s.elements)))
    ranks = lattice_ranks(q, degree, basis, verdict)
    equal = ranks["S"] == ranks["R"] and (ranks["T"] is None or ranks["T"] == ranks["S"])
    out.append(Outcome("lattice-ranks-agree", _status(equal), ranks))
    agreement = sigma_inverted_agreement(q, degree, basis, verdict)
    out.append(Outcome("sigma-inverted-agreement", PASS if agreement.ok else INCONCLUSIVE,
                       {"m": [row["m"] for row in agreement.rows], "exhausted": agreement.exhausted}))
    noeth = noetherian_center_test(q, nmax, basis)
    facts = {"basis": basis, "degree": degree, "ranks": ranks, "noetherian": noeth.status,
             "noetherian_witness": noeth.witness, "R_equals_S": r.elements == s.elements}
    return out, facts


def expectation_checks(spec: InstanceSpec, facts: dict) -> list[Outcome]:
    """Compare recomputed properties with the instance's stored expectations."""
    out = []
    for key, want in sorted(spec.expected.items()):
        if key not in facts:
            continue
        got = facts[key]
        out.append(Outcome(f"expected-{key}", _status(got == want), {"expected": want, "computed": got}))
    return out


def verify_instance(spec: InstanceSpec, q: DimerQuiver, bound: int | None = None, degree: int | None = None,
                    nmax: int = 4, theorem_bound: int = 3) -> list[Outcome]:
    """Run every module's checks on one instance."""
    report = validate(q)
    out = [Outcome("validate", _status(report.ok), [c.to_dict() for c in report.failures()] or None)]
    if not report.ok:
        return out
    verdict = is_geodesic_algebra(q, bound)
    out.append(Outcome("geodesic", PASS if verdict.certified else INCONCLUSIVE,
                       {"status": verdict.status, "missing": verdict.missing}))
    out.extend(face_label_checks(q))
    out.extend(matching_checks(q, verdict))
    out.extend(theorem_checks(q, verdict, theorem_bound))
    central, facts = central_checks(q, verdict, degree, nmax)
    out.extend(central)
    index = classify(q)
    facts.update({"geodesic": verdict.certified, "perfect": len(index.perfect), "simple": len(index.simple),
                  "dim": facts["ranks"]["S"]})
    out.extend(expectation_checks(spec, facts))
    return out
