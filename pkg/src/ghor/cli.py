"""Command-line interface: ``ghor <command> <instance> [flags]``.

An instance is a quiver JSON file or the name of a suite instance.  Results
go to stdout (JSON with ``--json``), diagnostics and timings to stderr.  The
exit code is 0 when no check failed; inconclusive verdicts do not fail.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path
from typing import Any

from . import central, cycles, labels
from .instances import DATA_DIR_ENV, InstanceSpec, instance_document, load_suite
from .matchings import classify
from .polygon import Polygon, cover
from .quiver import PathError, QuiverFormatError, load, to_dot, validate
from .verify import FAIL, INCONCLUSIVE, PASS, Outcome, theorem_checks, verify_instance

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def canonical_json(obj: Any) -> str:
    """Sorted keys, two-space indent, trailing newline: parse and re-emit gives the same text."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _resolve(arg: str, data_dir: str | None):
    path = Path(arg)
    if path.suffix == ".json" or path.exists():
        try:
            q = load(path.read_text())
        except OSError as e:
            raise UsageError(f"cannot read {arg}: {e.strerror}") from None
        q.name = q.name or path.stem
        return InstanceSpec(q.name, "user", source=str(path)), q
    for e in load_suite(data_dir):
        if e.spec.name == arg:
            if e.quiver is None:
                raise UsageError(e.error)
            return e.spec, e.quiver
    raise UsageError(f"no file or suite instance named {arg!r}")


def _report(command: str, instance: str | None, params: dict, results: Any, checks: list[Outcome]) -> dict:
    return {
        "command": command,
        "instance": instance,
        "parameters": params,
        "results": results,
        "checks": [c.to_dict() for c in checks],
        "inconclusive": [c.name for c in checks if c.status == INCONCLUSIVE],
        "verdict": _overall(checks),
    }


def _overall(checks: list[Outcome]) -> str:
    if any(c.status == FAIL for c in checks):
        return FAIL
    if any(c.status == INCONCLUSIVE for c in checks):
        return INCONCLUSIVE
    return PASS


def _human(report: dict) -> str:
    lines = [f"{report['command']}: {report['instance'] or ''}".rstrip()]
    for k, v in report["parameters"].items():
        lines.append(f"  {k} = {v}")
    for c in report["checks"]:
        lines.append(f"  [{c['status']}] {c['name']}")
    results = report["results"]
    if isinstance(results, dict):
        for k, v in results.items():
            lines.append(f"  {k}: {json.dumps(v, sort_keys=True)}")
    lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args):
    spec, q = _resolve(args.instance, args.data_dir)
    if args.dot:
        return None, to_dot(q)
    rep = validate(q)
    checks = [Outcome(c.name, PASS if c.passed else FAIL, c.witness) for c in rep.checks]
    return _report("validate", spec.name, {}, {"chi": q.euler_characteristic()}, checks), None


def cmd_matchings(args):
    spec, q = _resolve(args.instance, args.data_dir)
    index = classify(q)
    results = {"perfect_count": len(index.perfect), "simple_count": len(index.simple)}
    if args.list or args.json:
        results.update(index.to_dict())
    return _report("matchings", spec.name, {}, results, []), None


def cmd_label(args):
    spec, q = _resolve(args.instance, args.data_dir)
    path = tuple(x for x in args.path.split(",") if x)
    if not path:
        raise UsageError("--path needs at least one arrow id")
    eta, tau = labels.eta_bar(q, path), labels.tau_bar(q, path)
    results = {"path": list(path), "eta": list(eta), "tau": list(tau)}
    for key, lab in (("eta", eta), ("tau", tau)):
        ell, rest = labels.sigma_normal_form(lab)
        results[f"{key}_normal_form"] = {"sigma_power": ell, "rest": list(rest)}
    return _report("label", spec.name, {"path": args.path}, results, []), None


def cmd_theorems(args):
    spec, q = _resolve(args.instance, args.data_dir)
    verdict = cycles.is_geodesic_algebra(q, args.geodesic_bound, args.rewrite_depth)
    checks = theorem_checks(q, verdict, args.bound)
    return _report("theorems", spec.name, {"bound": args.bound, "representatives": verdict.representatives},
                   {"geodesic": verdict.status}, checks), None


def cmd_geodesic(args):
    spec, q = _resolve(args.instance, args.data_dir)
    verdict = cycles.is_geodesic_algebra(q, args.bound, args.rewrite_depth)
    status = PASS if verdict.certified else INCONCLUSIVE
    params = {"bound": verdict.bound, "representatives": verdict.representatives}
    return _report("geodesic", spec.name, params, verdict.to_dict(),
                   [Outcome("geodesic-certificate", status)]), None


def cmd_center(args):
    spec, q = _resolve(args.instance, args.data_dir)
    degree = central.default_degree(q) if args.degree is None else args.degree
    basis = central.label_basis(q)
    r = central.center_sample(q, degree, basis)
    per_vertex = {v: central.vertex_semigroup(q, v, degree, basis).to_dict() for v in q.vertices}
    s = central.cycle_algebra_sample(q, degree, basis)
    dep = central.depiction_report(q, degree, args.nmax, basis)
    results = {"center": r.to_dict(), "vertices": per_vertex, "cycle_algebra": s.to_dict(),
               "depiction": dep.to_dict()}
    return _report("center", spec.name, {"degree": degree, "basis": basis, "nmax": args.nmax}, results, []), None


def cmd_dims(args):
    spec, q = _resolve(args.instance, args.data_dir)
    degree = central.default_degree(q) if args.degree is None else args.degree
    basis = central.label_basis(q)
    verdict = cycles.is_geodesic_algebra(q, args.bound)
    s = central.krull_dimension(g.exponents for g in central.cycle_algebra_generators(q, basis))
    r = central.krull_dimension(central.center_sample(q, degree, basis).generators)
    results = {"S": s.to_dict(), "R": r.to_dict(), "rank": s.rank, "N_plus_1": q.polygon.half_sides + 1}
    witnesses, certified = central.axis_witnesses(q, verdict)
    checks = []
    if len(witnesses) == 2 * q.polygon.half_sides:
        t = central.t_subalgebra(q, witnesses, basis, certified)
        results["T"] = t.to_dict()
    if verdict.certified:
        checks.append(Outcome("rank-is-N-plus-1", PASS if s.rank == q.polygon.half_sides + 1 else FAIL,
                              {"rank": s.rank}))
    else:
        checks.append(Outcome("rank-is-N-plus-1", INCONCLUSIVE, {"rank": s.rank, "reason": "not certified geodesic"}))
    return _report("dims", spec.name, {"degree": degree, "basis": basis}, results, checks), None


def cmd_noetherian(args):
    spec, q = _resolve(args.instance, args.data_dir)
    v = central.noetherian_center_test(q, args.nmax)
    status = INCONCLUSIVE if v.status == "inconclusive" else PASS
    return _report("noetherian", spec.name, {"nmax": args.nmax}, v.to_dict(),
                   [Outcome("noetherian-verdict", status, v.status)]), None


def cmd_examples(args):
    suite = load_suite(args.data_dir)
    if args.emit:
        out = Path(args.emit)
        out.mkdir(parents=True, exist_ok=True)
        for e in suite:
            if e.quiver is not None:
                (out / f"{e.spec.name}.json").write_text(canonical_json(instance_document(e.spec, e.quiver)))
    rows = []
    for e in suite:
        row = e.spec.to_dict()
        if e.quiver is not None:
            row["size"] = {"vertices": len(e.quiver.vertices), "arrows": len(e.quiver.arrows),
                           "faces": len(e.quiver.faces)}
        if e.error:
            row["error"] = e.error
        rows.append(row)
    checks = [Outcome(f"load-{e.spec.name}", FAIL, e.error) for e in suite if e.error]
    return _report("examples", None, {"emit": args.emit}, {"instances": rows}, checks), None


def cmd_verify_all(args):
    results, checks = {}, []
    for e in load_suite(args.data_dir):
        if e.quiver is None:
            checks.append(Outcome(f"{e.spec.name}/load", FAIL, e.error))
            continue
        outcomes = verify_instance(e.spec, e.quiver, args.bound, args.degree, args.nmax)
        results[e.spec.name] = _overall(outcomes)
        checks.extend(Outcome(f"{e.spec.name}/{o.name}", o.status, o.detail) for o in outcomes)
    params = {"bound": args.bound, "degree": args.degree, "nmax": args.nmax}
    return _report("verify-all", None, params, results, checks), None


def cmd_tessellation(args):
    tess = cover(Polygon(args.half_sides))
    return None, canonical_json(tess.dump(args.radius))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--data-dir", default=None,
                        help=f"extra directory of quiver files (default: ${DATA_DIR_ENV})")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")

    p = argparse.ArgumentParser(prog="ghor", description="Ghor algebra toolkit for dimer quivers on polygon surfaces.")
    sub = p.add_subparsers(dest="command", metavar="command")

    def add(name, fn, help_, instance=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if instance:
            sp.add_argument("instance", help="quiver JSON file or suite instance name")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "structural checks of a quiver")
    sp.add_argument("--dot", action="store_true", help="print Graphviz DOT instead")
    sp = add("matchings", cmd_matchings, "perfect and simple matchings")
    sp.add_argument("--list", action="store_true", help="list every matching")
    sp = add("label", cmd_label, "labels of a path")
    sp.add_argument("--path", required=True, help="comma-separated arrow ids")
    sp = add("theorems", cmd_theorems, "class/label correspondence and cycle invariants")
    sp.add_argument("--bound", type=int, default=3, help="concatenation bound for cycles (default 3)")
    sp.add_argument("--geodesic-bound", type=int, default=None, help="witness search bound (default max(3, N))")
    sp.add_argument("--rewrite-depth", type=int, default=None, help="use unit-cycle rewrites to this depth")
    sp = add("geodesic", cmd_geodesic, "geodesic certificate search")
    sp.add_argument("--bound", type=int, default=None, help="witness search bound (default max(3, N))")
    sp.add_argument("--rewrite-depth", type=int, default=None, help="use unit-cycle rewrites to this depth")
    sp = add("center", cmd_center, "vertex semigroups, center and cycle algebra samples")
    sp.add_argument("--degree", type=int, default=None, help="label degree bound")
    sp.add_argument("--nmax", type=int, default=4, help="largest power tried per generator")
    sp = add("dims", cmd_dims, "lattice ranks of S, R and T")
    sp.add_argument("--degree", type=int, default=None, help="label degree bound for R")
    sp.add_argument("--bound", type=int, default=None, help="witness search bound")
    sp = add("noetherian", cmd_noetherian, "bounded noetherianity verdict")
    sp.add_argument("--nmax", type=int, default=4, help="largest power tried per generator")
    sp = add("examples", cmd_examples, "list the instance suite", instance=False)
    sp.add_argument("--emit", default=None, metavar="DIR", help="write every instance file into DIR")
    sp = add("verify-all", cmd_verify_all, "every check on every suite instance", instance=False)
    sp.add_argument("--bound", type=int, default=None, help="witness search bound")
    sp.add_argument("--degree", type=int, default=None, help="label degree bound")
    sp.add_argument("--nmax", type=int, default=4, help="largest power tried per generator")
    sp = add("tessellation", cmd_tessellation, "dump tiles of the universal cover", instance=False)
    sp.add_argument("half_sides", type=int, help="N for the 2N-gon")
    sp.add_argument("--radius", type=int, default=2)
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if not getattr(args, "fn", None):
        parser.print_usage(stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report, raw = args.fn(args)
    except (UsageError, QuiverFormatError, PathError, ValueError) as e:
        print(f"ghor {args.command}: error: {e}", file=stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - start
    for w in caught:
        print(f"warning: {w.message}", file=stderr)
    print(f"{args.command}: {elapsed:.3f}s", file=stderr)
    if raw is not None:
        stdout.write(raw)
        return EXIT_OK
    if args.timing:
        report["wall_time"] = round(elapsed, 3)
    stdout.write(canonical_json(report) if args.json else _human(report))
    return EXIT_FAIL if report["verdict"] == FAIL else EXIT_OK


def main() -> None:
    sys.exit(run())
