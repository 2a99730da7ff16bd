import json
import subprocess
import sys
from pathlib import Path

import pytest

from polysol.cli import (
    EXIT_OK,
    EXIT_PARSE,
    EXIT_SOLVE,
    EXIT_VERIFY,
    ParseError,
    format_problem,
    main,
    parse_problem,
)
from polysol.coeffrings import Ring

GOLDEN = Path(__file__).parent / "golden"
PROBLEMS = sorted(p for p in GOLDEN.glob("*.json") if not p.name.endswith(".verify.json"))


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="problem.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


@pytest.mark.parametrize("problem", PROBLEMS, ids=lambda p: p.stem)
def test_golden_ascii(problem, capsys, monkeypatch):
    monkeypatch.delenv("POLYSOL_UNICODE", raising=False)
    code, out, _ = run_cli(capsys, "solve", str(problem))
    assert code == EXIT_OK
    assert out == problem.with_suffix(".txt").read_text()


@pytest.mark.parametrize("problem", PROBLEMS, ids=lambda p: p.stem)
def test_golden_unicode(problem, capsys, monkeypatch):
    monkeypatch.setenv("POLYSOL_UNICODE", "1")
    code, out, _ = run_cli(capsys, "solve", str(problem))
    assert code == EXIT_OK
    assert out == problem.with_suffix(".unicode.txt").read_text()


def test_helmholtz_double_text_output(capsys):
    code, out, _ = run_cli(capsys, "solve", str(GOLDEN / "helmholtz_double.json"))
    assert out == "0.375*y*z - 0.125*y^3*z - 0.375*x^2*y*z + 0.25*x^2*y^3*z\n"


def test_stokes_json_verify(capsys, monkeypatch):
    monkeypatch.delenv("POLYSOL_UNICODE", raising=False)
    code, out, _ = run_cli(capsys, "solve", str(GOLDEN / "stokes_rational.json"), "--output", "json", "--verify")
    assert code == EXIT_OK
    assert out == (GOLDEN / "stokes_rational.verify.json").read_text()
    doc = json.loads(out)
    assert doc["verification"]["exact_zero"] is True
    assert doc["verification"]["constraints"]["div_u"] == "0"


@pytest.mark.parametrize("problem", PROBLEMS, ids=lambda p: p.stem)
def test_every_golden_verifies(problem, capsys):
    code, out, _ = run_cli(capsys, "solve", str(problem), "--verify")
    assert code == EXIT_OK
    assert "verification: passed" in out


@pytest.mark.parametrize("problem", PROBLEMS, ids=lambda p: p.stem)
def test_output_is_deterministic(problem, capsys):
    outs = {run_cli(capsys, "solve", str(problem), "--output", "json")[1] for _ in range(3)}
    assert len(outs) == 1


@pytest.mark.parametrize("problem", PROBLEMS, ids=lambda p: p.stem)
def test_problem_round_trip(problem):
    parsed = parse_problem(problem.read_text())
    again = parse_problem(format_problem(parsed))
    assert again == parsed
    assert format_problem(again) == format_problem(parsed)


def test_helmholtz_problem_parses():
    doc = '{"dim":3,"pde":"helmholtz","params":{"k":"2"},"mode":"rational","rhs":[[{"exp":[2,3,1],"coef":"1"}]]}'
    p = parse_problem(doc)
    assert p.dim == 3 and p.pde == "helmholtz" and p.mode is Ring.RATIONAL
    assert p.params["k"] == 2


def test_verify_subcommand(tmp_path, capsys):
    problem = str(GOLDEN / "stokes_rational.json")
    _, out, _ = run_cli(capsys, "solve", problem, "--output", "json")
    solution = write(tmp_path, out, "solution.json")
    code, out, _ = run_cli(capsys, "verify", problem, solution)
    assert code == EXIT_OK and out.startswith("verification: passed")


def test_verify_subcommand_rejects_wrong_solution(tmp_path, capsys):
    problem = str(GOLDEN / "helmholtz_rational.json")
    bad = {"solution": {"u": [[{"exp": [0, 1, 1], "coef": "3/8"}]]}}
    code, out, _ = run_cli(capsys, "verify", problem, write(tmp_path, bad, "bad.json"))
    assert code == EXIT_VERIFY
    assert "FAILED" in out


def test_verify_json_output(tmp_path, capsys):
    problem = str(GOLDEN / "maxwell_complex_rational.json")
    _, out, _ = run_cli(capsys, "solve", problem, "--output", "json")
    code, out, _ = run_cli(capsys, "verify", problem, write(tmp_path, out, "s.json"), "--output", "json")
    report = json.loads(out)
    assert code == EXIT_OK and report["passed"] and report["constraints"]["lorenz_gauge"] == "0"


# --- exit codes --------------------------------------------------------------


BASE = {"dim": 3, "pde": "helmholtz", "params": {"k": "2"}, "mode": "rational",
        "rhs": [[{"exp": [2, 3, 1], "coef": "1"}]]}


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["rhs"][0][0].update(exp=[2, 3]),
        lambda d: d.update(pde="wave"),
        lambda d: d["rhs"][0][0].update(coef="abc"),
        lambda d: d.update(mode="quaternion"),
        lambda d: d.update(extra=1),
        lambda d: d["params"].update(q="1"),
        lambda d: d.pop("rhs"),
        lambda d: d["rhs"].append([]),
        lambda d: d["params"].pop("k"),
        lambda d: d["rhs"][0][0].update(exp=[2, -3, 1]),
    ],
    ids=["exp-length", "unknown-pde", "bad-literal", "bad-mode", "unknown-field",
         "unknown-param", "missing-rhs", "component-count", "missing-param", "negative-exp"],
)
def test_parse_errors_exit_2(mutate, tmp_path, capsys):
    doc = json.loads(json.dumps(BASE))
    mutate(doc)
    code, out, err = run_cli(capsys, "solve", write(tmp_path, doc))
    assert code == EXIT_PARSE
    assert out == "" and "parse error" in err


def test_malformed_json_reports_position(tmp_path, capsys):
    code, _, err = run_cli(capsys, "solve", write(tmp_path, '{"dim": 3,\n  "pde": }'))
    assert code == EXIT_PARSE
    assert "line 2" in err


def test_parse_error_names_field():
    doc = json.loads(json.dumps(BASE))
    doc["rhs"][0][0]["exp"] = [2, 3]
    with pytest.raises(ParseError) as info:
        parse_problem(json.dumps(doc))
    assert info.value.field == "rhs[0][0].exp"


def test_missing_file_exit_2(capsys):
    code, _, _ = run_cli(capsys, "solve", "/nonexistent/problem.json")
    assert code == EXIT_PARSE


def test_zero_wavenumber_exit_3(tmp_path, capsys):
    doc = dict(BASE, params={"k": "0"})
    parse_problem(json.dumps(doc))
    code, out, err = run_cli(capsys, "solve", write(tmp_path, doc))
    assert code == EXIT_SOLVE
    assert "zeroth-order term vanishes" in err


def test_maxwell_non_conserving_charge_exit_3(tmp_path, capsys):
    doc = json.loads((GOLDEN / "maxwell_complex_rational.json").read_text())
    doc["params"]["rho"] = [{"exp": [1, 1, 0], "coef": "2i"}]
    code, _, err = run_cli(capsys, "solve", write(tmp_path, doc))
    assert code == EXIT_SOLVE and "charge-conserving" in err


def test_maxwell_requires_dim_3(tmp_path, capsys):
    doc = {"dim": 2, "pde": "maxwell", "rhs": [[], [], []]}
    code, _, _ = run_cli(capsys, "solve", write(tmp_path, doc))
    assert code == EXIT_PARSE


@pytest.mark.parametrize(
    "pde,params,count",
    [
        ("helmholtz", {"k": "2"}, 1),
        ("zeroth-order", {"alpha": "1", "op": [{"exp": [1, 0], "coef": "1"}]}, 1),
        ("elastodynamics", {"rho": "1", "mu": "1", "nu": "1/4", "omega": "1"}, 2),
        ("poisson", {}, 1),
        ("bilaplace", {"method": "direct"}, 1),
        ("elastostatics", {"nu": "1/3"}, 2),
        ("stokes", {"mu": "1"}, 2),
        ("anisotropic-poisson", {"A": [["2", "0"], ["0", "1"]]}, 1),
        ("factorized-anisotropic", {"factors": [[["1", "0"], ["0", "1"]]]}, 1),
    ],
)
def test_zero_rhs_gives_zero_solution(pde, params, count, tmp_path, capsys):
    doc = {"dim": 2, "pde": pde, "params": params, "mode": "rational", "rhs": [[] for _ in range(count)]}
    code, out, _ = run_cli(capsys, "solve", write(tmp_path, doc), "--verify")
    assert code == EXIT_OK
    assert set(out.splitlines()[0].split(" = ")[-1].split()) == {"0"}


def test_every_pde_solves_and_verifies_in_each_mode(tmp_path, capsys):
    doc = {"dim": 2, "pde": "stokes", "params": {"mu": "3/2"},
           "rhs": [[{"exp": [1, 2], "coef": "1/3"}], [{"exp": [0, 1], "coef": "2"}]]}
    path = write(tmp_path, doc)
    for mode in ("double", "rational", "rational-big", "complex", "complex-rational", "interval"):
        code, out, _ = run_cli(capsys, "solve", path, "--verify", "--mode", mode)
        assert code == EXIT_OK, (mode, out)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polysol", "solve", str(GOLDEN / "helmholtz_rational.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "helmholtz_rational.txt").read_text()
