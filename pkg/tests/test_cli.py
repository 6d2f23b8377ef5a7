import json
import subprocess
import sys

import pytest

from areaformula.cli import main
from areaformula.io import InstanceFormatError, dumps_instance, instance_from_dict, instance_to_dict, load_instance
from areaformula.spaces import GeneratorSpec, generate

SINGLETON = {
    "points": ["a", "b", "c"],
    "metric": {"matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
    "family": [{"members": ["a"], "zeta": 2}, {"members": ["b"], "zeta": 1}, {"members": ["c"], "zeta": 6}],
    "gauge": {"type": "explicit"},
    "measure": {"type": "atomic", "mass": {"a": 1, "b": 2, "c": 3}},
}


@pytest.fixture
def singleton_file(tmp_path):
    p = tmp_path / "abc.json"
    p.write_text(json.dumps(SINGLETON))
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_area_check_worked_example(singleton_file, capsys):
    code, out, _ = run(["area-check", singleton_file, "--variant", "general-I", "--set", "a,c"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["lhs"] == 4 and rep["rhs"] == 4 and rep["verdict"] == "equal"
    assert rep["backend"] == "rational" and rep["hypotheses"]["all_verified"]


def test_cantor_measure_via_cli(tmp_path, capsys):
    p = tmp_path / "c4.json"
    code, out, _ = run(["gen", "cantor", "--depth", 4], capsys)
    p.write_text(out)
    code, out, _ = run(["measure", p, "--alpha", "0.6309297535714574", "--delta", "0.2"], capsys)
    assert code == 0 and abs(json.loads(out)["value"] - 1) <= 1e-9


@pytest.mark.parametrize("spec", [
    GeneratorSpec("cantor", depth=4),
    GeneratorSpec("sierpinski", depth=2),
    GeneratorSpec("epsilon-net", h="1/8"),
    GeneratorSpec("epsilon-net", region=((0, 1), (-1, 0)), h="1/4"),
    GeneratorSpec("singleton-complete", n=6, seed=2, measure="heavy"),
    GeneratorSpec("random-metric", n=5, seed=1, family="all-subsets"),
])
def test_round_trip_identity(spec):
    text = dumps_instance(generate(spec))
    again = instance_from_dict(json.loads(text))
    assert json.loads(dumps_instance(again)) == json.loads(text)
    assert instance_to_dict(again)["family"] == json.loads(text)["family"]


def test_table_measure_round_trip(tmp_path):
    doc = dict(SINGLETON, measure={"type": "table", "table": [
        {"members": ["a"], "value": 1}, {"members": ["b"], "value": 1}, {"members": ["c"], "value": "inf"},
        {"members": ["a", "b", "c"], "value": "inf"}]})
    inst = instance_from_dict(doc)
    assert inst.measure(frozenset([0, 1])) == float("inf")
    p = tmp_path / "t.json"
    p.write_text(dumps_instance(inst))
    assert instance_to_dict(load_instance(p)) == instance_to_dict(inst)


def test_density_profile_csv(singleton_file, capsys):
    code, out, _ = run(["density", singleton_file, "--point", "b", "--profile", "--out", "csv"], capsys)
    assert code == 0 and out == "scale,value\n0,2\n"
    code, out, _ = run(["measure", singleton_file, "--profile", "--out", "csv"], capsys)
    assert out.splitlines()[0] == "scale,value" and "\r" not in out


@pytest.mark.parametrize("argv,expected", [
    (["lemmas", "{f}", "--t", "3"], 0),
    (["lemmas", "{f}", "--t", "1"], 1),
    (["lemmas", "{f}", "--lemma", "major", "--t", "0.4"], 0),
    (["lemmas", "{f}", "--lemma", "major", "--t", "3"], 1),
    (["abscont", "{f}"], 0),
    (["enlarge", "{f}", "--set", "a"], 0),
    (["density", "{f}", "--point", "zz"], 2),
    (["area-check", "{f}", "--set", "a,q"], 2),
    (["measure", "{f}", "--delta", "0"], 2),
])
def test_exit_codes(singleton_file, capsys, argv, expected):
    code, _, _ = run([a.format(f=singleton_file) for a in argv], capsys)
    assert code == expected


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, _, err = run(["measure", bad], capsys)
    assert code == 2 and "line 1" in err
    dup = dict(SINGLETON, points=["a", "a", "c"])
    bad.write_text(json.dumps(dup))
    assert run(["measure", bad], capsys)[0] == 2
    with pytest.raises(InstanceFormatError):
        instance_from_dict({"points": ["a"]})


def test_hunt_command(capsys):
    code, out, _ = run(["hunt", "--count", 5, "--seed", 3], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["counterexamples"] == [] and sum(r["count"] for r in rep["table"]) == 5


def test_probe_command(tmp_path, capsys):
    p = tmp_path / "net.json"
    p.write_text(dumps_instance(generate(GeneratorSpec("epsilon-net", h="1/16"))))
    assert run(["probe", p, "--kind", "regularity", "--point", "p8"], capsys)[0] == 0
    assert run(["probe", p, "--kind", "ball-diameter", "--point", "p8"], capsys)[0] == 0
    assert run(["probe", p, "--kind", "spherical", "--point", "p8", "--alpha", "1"], capsys)[0] == 0


def test_module_entry_point(singleton_file):
    res = subprocess.run([sys.executable, "-m", "areaformula", "abscont", str(singleton_file)], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["agree"]


def test_instance_from_stdin(singleton_file):
    res = subprocess.run([sys.executable, "-m", "areaformula", "measure", "-", "--set", "a,b"],
                         input=singleton_file.read_text(), capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["psi"] == 3
