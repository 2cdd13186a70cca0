import io
import json
import shutil
import subprocess
import sys

import pytest

from ghor.cli import canonical_json, run
from ghor.instances import build_conifold_torus, build_polynomial, instance_document, InstanceSpec
from ghor.quiver import save


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    return code, json.loads(out)


REPORT_KEYS = {"command", "instance", "parameters", "results", "checks", "inconclusive", "verdict"}


@pytest.mark.parametrize("argv", [
    ("validate", "conifold"), ("matchings", "conifold"), ("label", "conifold", "--path", "a1,b1"),
    ("theorems", "polynomial-2"), ("geodesic", "conifold"), ("center", "conifold", "--degree", "4"),
    ("dims", "polynomial-3"), ("noetherian", "conifold"), ("examples",),
])
def test_reports_have_common_shape(argv):
    code, rep = call_json(*argv)
    assert code == 0
    assert set(rep) == REPORT_KEYS
    assert rep["command"] == argv[0]


def test_json_is_canonical_and_deterministic():
    code, out1, _ = call("dims", "conifold", "--json")
    _, out2, _ = call("dims", "conifold", "--json")
    assert out1 == out2
    assert canonical_json(json.loads(out1)) == out1
    assert "wall_time" not in json.loads(out1)


def test_timing_flag_and_stderr():
    code, out, err = call("matchings", "conifold", "--json", "--timing")
    assert "wall_time" in json.loads(out)
    assert err.startswith("matchings: ")


def test_dims_polynomial_4():
    code, rep = call_json("dims", "polynomial-4")
    assert code == 0
    assert rep["results"]["rank"] == 5
    assert rep["checks"][0] == {"name": "rank-is-N-plus-1", "status": "pass", "detail": {"rank": 5}}


def test_dims_uncertified_is_inconclusive():
    code, rep = call_json("dims", "center-deficient")
    assert code == 0
    assert rep["verdict"] == "inconclusive"
    assert rep["inconclusive"] == ["rank-is-N-plus-1"]


def test_matchings_counts_and_list():
    code, rep = call_json("matchings", "center-deficient")
    assert rep["results"]["perfect_count"] == 4
    assert rep["results"]["simple_count"] == 2
    code, out, _ = call("matchings", "conifold", "--list")
    assert "perfect_count: 4" in out
    assert "verdict: pass" in out


def test_label_command():
    code, rep = call_json("label", "conifold", "--path", "a1,b1,a2,b2")
    assert rep["results"]["tau"] == [1, 1, 1, 1]
    assert rep["results"]["tau_normal_form"] == {"sigma_power": 1, "rest": [0, 0, 0, 0]}


def test_label_errors():
    assert call("label", "conifold", "--path", "a1,a2")[0] == 2
    assert call("label", "conifold", "--path", ",")[0] == 2


def test_geodesic_and_noetherian_verdicts():
    code, rep = call_json("geodesic", "center-deficient")
    assert code == 0 and rep["results"]["status"] == "inconclusive"
    code, rep = call_json("noetherian", "center-deficient")
    assert code == 0 and rep["results"]["status"] == "nonnoetherian-certified"
    assert rep["results"]["witness"]["vertex"] == "2"


def test_center_warns_on_fallback():
    code, out, err = call("center", "center-deficient", "--degree", "3")
    assert code == 0
    assert "warning:" in err and "perfect-matching labels" in err


def test_validate_file_and_dot(tmp_path):
    path = tmp_path / "q.json"
    path.write_text(save(build_conifold_torus()))
    code, rep = call_json("validate", str(path))
    assert code == 0 and rep["verdict"] == "pass"
    code, out, _ = call("validate", str(path), "--dot")
    assert out.startswith("digraph")


def test_validate_failure_exit_code(tmp_path):
    d = build_conifold_torus().to_dict()
    d["arrows"][2]["crossings"] = [1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    code, rep = call_json("validate", str(path))
    assert code == 1
    assert rep["verdict"] == "fail"


@pytest.mark.parametrize("argv", [
    (), ("nonsense",), ("validate",), ("validate", "no-such-instance"), ("label", "conifold"),
    ("validate", "/nonexistent/x.json"),
])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_malformed_file_is_usage_error(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{")
    code, _, err = call("validate", str(path))
    assert code == 2 and "error" in err


def test_examples_emit(tmp_path):
    code, rep = call_json("examples", "--emit", str(tmp_path / "out"))
    assert code == 0
    names = sorted(r["name"] for r in rep["results"]["instances"])
    assert sorted(p.stem for p in (tmp_path / "out").iterdir()) == names
    code, rep2 = call_json("examples", "--data-dir", str(tmp_path / "extra"))
    assert code == 0


def test_verify_all_passes():
    code, rep = call_json("verify-all")
    assert code == 0
    assert rep["verdict"] == "inconclusive"
    assert rep["results"]["conifold"] == "pass"
    assert rep["results"]["center-deficient"] == "inconclusive"


def test_verify_all_flips_on_injected_fault(tmp_path):
    q = build_polynomial(2)
    q.name = "faulty"
    spec = InstanceSpec("faulty", "polynomial", {"N": 2}, {"perfect": 99}, {"perfect": "deliberately wrong"})
    (tmp_path / "faulty.json").write_text(canonical_json(instance_document(spec, q)))
    code, rep = call_json("verify-all", "--data-dir", str(tmp_path))
    assert code == 1
    assert rep["results"]["faulty"] == "fail"
    assert "faulty/expected-perfect" in [c["name"] for c in rep["checks"] if c["status"] == "fail"]


def test_verify_all_reports_unloadable_file(tmp_path):
    (tmp_path / "junk.json").write_text("[")
    code, rep = call_json("verify-all", "--data-dir", str(tmp_path))
    assert code == 1
    assert any(c["name"] == "junk/load" for c in rep["checks"])


def test_tessellation_dump():
    code, out, _ = call("tessellation", "3", "--radius", "1")
    assert code == 0
    assert len(json.loads(out)["tiles"]) == 7


def test_theorems_flags():
    code, rep = call_json("theorems", "conifold", "--bound", "2", "--rewrite-depth", "2")
    assert code == 0
    assert rep["parameters"] == {"bound": 2, "representatives": "rewrite-depth-2"}


def test_console_script_and_module():
    exe = shutil.which("ghor")
    cmds = [[sys.executable, "-m", "ghor", "dims", "conifold", "--json"]]
    if exe:
        cmds.append([exe, "dims", "conifold", "--json"])
    outputs = set()
    for cmd in cmds:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        outputs.add(proc.stdout)
    assert len(outputs) == 1
    proc = subprocess.run([sys.executable, "-m", "ghor", "bogus"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 2
