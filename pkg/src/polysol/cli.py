"""``polysol`` command line: read a JSON problem, solve it, optionally verify.

Exit codes: 0 success, 2 malformed input, 3 solver precondition failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field

from .coeffrings import LiteralError, Ring, format_literal, parse_literal
from .errors import DimensionMismatchError, PolysolError, RingError, SolverPreconditionError
from .helmfamily import (
    ElastodynamicsParams,
    HelmholtzParams,
    MaxwellParams,
    ZerothOrderParams,
    solve_elastodynamics,
    solve_helmholtz,
    solve_maxwell,
    solve_zeroth_order,
)
from .laplfamily import (
    AnisotropicPoissonParams,
    BilaplaceParams,
    ElastostaticsParams,
    FactorizedAnisotropicParams,
    PoissonParams,
    StokesParams,
    solve_anisotropic_poisson,
    solve_bilaplace,
    solve_elastostatics,
    solve_factorized_anisotropic,
    solve_poisson,
    solve_stokes,
)
from .polycore import PdoSpec, Polynomial, PolyVector
from .verify import ResidualReport, residual

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVE = 3
EXIT_VERIFY = 4

SCALAR, VECTOR, MATRIX, MATRICES, TERMS, CHOICE = (
    "scalar", "vector", "matrix", "matrices", "terms", "choice",
)

# pde tag -> {param name: (kind, required)}
PARAMS = {
    "helmholtz": {"k": (SCALAR, True)},
    "zeroth-order": {"alpha": (SCALAR, True), "op": (TERMS, True)},
    "elastodynamics": {
        "rho": (SCALAR, True), "mu": (SCALAR, True), "nu": (SCALAR, True), "omega": (SCALAR, True),
    },
    "maxwell": {
        "mu": (SCALAR, False), "eps": (SCALAR, False), "omega": (SCALAR, False), "rho": (TERMS, False),
    },
    "poisson": {},
    "bilaplace": {"method": (CHOICE, False)},
    "elastostatics": {"nu": (SCALAR, True), "mu": (SCALAR, False)},
    "stokes": {"mu": (SCALAR, True)},
    "anisotropic-poisson": {"A": (MATRIX, True)},
    "factorized-anisotropic": {"factors": (MATRICES, True)},
}

# solution fields per pde tag
FIELDS = {
    "helmholtz": [("u", SCALAR)],
    "zeroth-order": [("u", SCALAR)],
    "elastodynamics": [("u", VECTOR)],
    "maxwell": [("E", VECTOR), ("H", VECTOR), ("A", VECTOR), ("phi", SCALAR)],
    "poisson": [("u", SCALAR)],
    "bilaplace": [("u", SCALAR)],
    "elastostatics": [("u", VECTOR)],
    "stokes": [("u", VECTOR), ("p", SCALAR)],
    "anisotropic-poisson": [("u", SCALAR)],
    "factorized-anisotropic": [("u", SCALAR)],
}

_TOP_LEVEL = {"dim", "pde", "params", "rhs", "mode"}

_TERM_RE = re.compile(r'\{\s*"exp": \[([^\]]*)\],\s*"coef": ("[^"]*")\s*\}')


class ParseError(PolysolError, ValueError):
    """Malformed problem or solution document; ``field`` names the offending location."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass
class ProblemFile:
    dim: int
    pde: str
    params: dict = field(default_factory=dict)
    rhs: list = field(default_factory=list)
    mode: Ring = Ring.DOUBLE

    @property
    def component_count(self) -> int:
        if self.pde == "maxwell":
            return 3
        if FIELDS[self.pde][0][1] == VECTOR:
            return self.dim
        return 1


# ---------------------------------------------------------------------------
# parsing


def _literal(value, ring, where):
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise ParseError("coefficient literal must be a string", where)
    try:
        return parse_literal(str(value), ring)
    except LiteralError as exc:
        raise ParseError(str(exc), where) from None


def _terms(raw, dim, ring, where) -> Polynomial:
    if not isinstance(raw, list):
        raise ParseError("expected a list of terms", where)
    items = []
    for i, term in enumerate(raw):
        tw = f"{where}[{i}]"
        if not isinstance(term, dict):
            raise ParseError("term must be an object with 'exp' and 'coef'", tw)
        unknown = set(term) - {"exp", "coef"}
        if unknown:
            raise ParseError(f"unknown field(s) {sorted(unknown)}", tw)
        if "exp" not in term or "coef" not in term:
            raise ParseError("term needs both 'exp' and 'coef'", tw)
        exp = term["exp"]
        if not isinstance(exp, list) or not all(
            isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in exp
        ):
            raise ParseError("exponents must be a list of non-negative integers", f"{tw}.exp")
        if len(exp) != dim:
            raise ParseError(f"exponent list has length {len(exp)}, expected {dim}", f"{tw}.exp")
        items.append((tuple(exp), _literal(term["coef"], ring, f"{tw}.coef")))
    return Polynomial(items, dim)


def _matrix(raw, ring, where):
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise ParseError("expected a non-empty list of rows", where)
    return tuple(
        tuple(_literal(v, ring, f"{where}[{i}][{j}]") for j, v in enumerate(row))
        for i, row in enumerate(raw)
    )


def _param(kind, raw, dim, ring, where):
    if kind == SCALAR:
        return _literal(raw, ring, where)
    if kind == TERMS:
        return _terms(raw, dim, ring, where)
    if kind == MATRIX:
        return _matrix(raw, ring, where)
    if kind == MATRICES:
        if not isinstance(raw, list) or not raw:
            raise ParseError("expected a non-empty list of matrices", where)
        return tuple(_matrix(m, ring, f"{where}[{i}]") for i, m in enumerate(raw))
    if raw not in ("iterated", "direct"):
        raise ParseError("method must be 'iterated' or 'direct'", where)
    return raw


def parse_problem(text: str | bytes, mode: str | None = None) -> ProblemFile:
    """Parse and validate a JSON problem document; ``mode`` overrides the file's mode."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("problem must be a JSON object")
    unknown = set(doc) - _TOP_LEVEL
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}")
    for key in ("dim", "pde", "rhs"):
        if key not in doc:
            raise ParseError("missing required field", key)

    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError("dimension must be a positive integer", "dim")
    pde = doc["pde"]
    if pde not in PARAMS:
        raise ParseError(f"unknown pde {pde!r}; expected one of {sorted(PARAMS)}", "pde")
    try:
        ring = Ring(mode if mode is not None else doc.get("mode", "double"))
    except ValueError:
        raise ParseError(f"unknown mode; expected one of {[r.value for r in Ring]}", "mode") from None

    schema = PARAMS[pde]
    raw_params = doc.get("params", {})
    if not isinstance(raw_params, dict):
        raise ParseError("params must be an object", "params")
    unknown = set(raw_params) - set(schema)
    if unknown:
        raise ParseError(f"unknown parameter(s) {sorted(unknown)} for {pde}", "params")
    params = {}
    for name, (kind, required) in schema.items():
        if name not in raw_params:
            if required:
                raise ParseError("missing required parameter", f"params.{name}")
            continue
        params[name] = _param(kind, raw_params[name], dim, ring, f"params.{name}")

    rhs_raw = doc["rhs"]
    if not isinstance(rhs_raw, list):
        raise ParseError("rhs must be a list of components", "rhs")
    rhs = [_terms(c, dim, ring, f"rhs[{i}]") for i, c in enumerate(rhs_raw)]
    problem = ProblemFile(dim, pde, params, rhs, ring)
    if pde == "maxwell" and dim != 3:
        raise ParseError("maxwell problems are three-dimensional", "dim")
    if len(rhs) != problem.component_count:
        raise ParseError(f"expected {problem.component_count} component(s), got {len(rhs)}", "rhs")
    return problem


# ---------------------------------------------------------------------------
# formatting


def dump_json(doc) -> str:
    """Indented JSON with every ``{"exp", "coef"}`` term kept on one line."""
    text = json.dumps(doc, indent=2)

    def one_line(m):
        exps = ", ".join(x.strip() for x in m.group(1).split(",") if x.strip())
        return f'{{"exp": [{exps}], "coef": {m.group(2)}}}'

    return _TERM_RE.sub(one_line, text) + "\n"


def _terms_json(p: Polynomial) -> list:
    return [{"exp": list(e), "coef": format_literal(c)} for e, c in p.items()]


def _param_json(value):
    if isinstance(value, Polynomial):
        return _terms_json(value)
    if isinstance(value, str):
        return value
    if isinstance(value, tuple):
        return [_param_json(v) for v in value]
    return format_literal(value)


def format_problem(problem: ProblemFile) -> str:
    doc = {
        "dim": problem.dim,
        "pde": problem.pde,
        "mode": problem.mode.value,
        "params": {k: _param_json(v) for k, v in problem.params.items()},
        "rhs": [_terms_json(c) for c in problem.rhs],
    }
    return dump_json(doc)


# ---------------------------------------------------------------------------
# solving


def build_pde(problem: ProblemFile):
    """The parameter object for ``problem``; raises SolverPreconditionError on bad values."""
    p, tag = problem.params, problem.pde
    if tag == "helmholtz":
        return HelmholtzParams(p["k"])
    if tag == "zeroth-order":
        return ZerothOrderParams(p["alpha"], PdoSpec(p["op"]))
    if tag == "elastodynamics":
        return ElastodynamicsParams(p["rho"], p["mu"], p["nu"], p["omega"])
    if tag == "maxwell":
        return MaxwellParams(*(p.get(k, _one(problem.mode)) for k in ("mu", "eps", "omega")))
    if tag == "poisson":
        return PoissonParams()
    if tag == "bilaplace":
        return BilaplaceParams(p.get("method", "iterated"))
    if tag == "elastostatics":
        return ElastostaticsParams(p["nu"], p.get("mu", _one(problem.mode)))
    if tag == "stokes":
        return StokesParams(p["mu"])
    if tag == "anisotropic-poisson":
        return AnisotropicPoissonParams(p["A"])
    return FactorizedAnisotropicParams(p["factors"])


def _one(ring):
    return parse_literal("1", ring)


def solve_problem(problem: ProblemFile) -> dict:
    """Solve and return the named solution fields (see ``FIELDS``)."""
    pde = build_pde(problem)
    rhs = problem.rhs
    if isinstance(pde, HelmholtzParams):
        return {"u": solve_helmholtz(rhs[0], pde.k)}
    if isinstance(pde, ZerothOrderParams):
        return {"u": solve_zeroth_order(rhs[0], pde.alpha, pde.op)}
    if isinstance(pde, ElastodynamicsParams):
        return {"u": solve_elastodynamics(rhs, rho=pde.rho, mu=pde.mu, nu=pde.nu, omega=pde.omega)}
    if isinstance(pde, MaxwellParams):
        E, H, A, phi = solve_maxwell(
            rhs, mu=pde.mu, eps=pde.eps, omega=pde.omega,
            rho=problem.params.get("rho"), return_potentials=True,
        )
        return {"E": E, "H": H, "A": A, "phi": phi}
    if isinstance(pde, PoissonParams):
        return {"u": solve_poisson(rhs[0])}
    if isinstance(pde, BilaplaceParams):
        return {"u": solve_bilaplace(rhs[0], pde.method)}
    if isinstance(pde, ElastostaticsParams):
        return {"u": solve_elastostatics(rhs, nu=pde.nu, mu=pde.mu)}
    if isinstance(pde, StokesParams):
        u, p = solve_stokes(rhs, mu=pde.mu)
        return {"u": u, "p": p}
    if isinstance(pde, AnisotropicPoissonParams):
        return {"u": solve_anisotropic_poisson(rhs[0], pde.A)}
    return {"u": solve_factorized_anisotropic(rhs[0], pde.factors)}


def verify_solution(problem: ProblemFile, solution: dict) -> ResidualReport:
    pde = build_pde(problem)
    rhs = problem.rhs
    tag = problem.pde
    if tag == "maxwell":
        sol = tuple(solution[k] for k in ("E", "H", "A", "phi") if k in solution)
        source = (PolyVector(rhs), problem.params["rho"]) if "rho" in problem.params else PolyVector(rhs)
        return residual(pde, sol, source)
    if tag == "stokes":
        return residual(pde, (solution["u"], solution["p"]), PolyVector(rhs))
    if FIELDS[tag][0][1] == VECTOR:
        return residual(pde, solution["u"], PolyVector(rhs))
    return residual(pde, solution["u"], rhs[0])


def parse_solution(text: str | bytes, problem: ProblemFile) -> dict:
    """Read solution fields from ``polysol solve --output json`` output (or its ``solution`` object)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(doc, dict) and "solution" in doc:
        doc = doc["solution"]
    if not isinstance(doc, dict):
        raise ParseError("solution must be a JSON object")
    fields = dict(FIELDS[problem.pde])
    unknown = set(doc) - set(fields)
    if unknown:
        raise ParseError(f"unknown solution field(s) {sorted(unknown)}", "solution")
    out = {}
    for name, kind in FIELDS[problem.pde]:
        if name not in doc:
            if problem.pde == "maxwell" and name in ("A", "phi"):
                continue
            raise ParseError("missing solution field", f"solution.{name}")
        comps = doc[name]
        if not isinstance(comps, list):
            raise ParseError("expected a list of components", f"solution.{name}")
        polys = [_terms(c, problem.dim, problem.mode, f"solution.{name}[{i}]") for i, c in enumerate(comps)]
        if kind == SCALAR:
            if len(polys) != 1:
                raise ParseError("scalar field needs exactly one component", f"solution.{name}")
            out[name] = polys[0]
        else:
            out[name] = PolyVector(polys)
    return out


# ---------------------------------------------------------------------------
# output


def _components(value) -> list[Polynomial]:
    return [value] if isinstance(value, Polynomial) else list(value)


def _render_text(problem: ProblemFile, solution: dict, unicode: bool) -> list[str]:
    shown = [(k, v) for k, v in solution.items() if k not in ("A", "phi")]
    if len(shown) == 1:
        return [c.format(unicode) for c in _components(shown[0][1])]
    lines = []
    for name, value in shown:
        if isinstance(value, Polynomial):
            lines.append(f"{name} = {value.format(unicode)}")
        else:
            lines.extend(f"{name}_{i + 1} = {c.format(unicode)}" for i, c in enumerate(value))
    return lines


def _report_json(report: ResidualReport, unicode: bool) -> dict:
    return {
        "exact_zero": report.exact_zero,
        "passed": report.passed(),
        "max_coeff_magnitude": report.max_coeff_magnitude,
        "residual": [c.format(unicode) for c in _components(report.residual)],
        "constraints": {
            name: (r.format(unicode) if isinstance(r, Polynomial) else [c.format(unicode) for c in r])
            for name, r in report.constraint_residuals.items()
        },
    }


def _report_text(report: ResidualReport, unicode: bool) -> list[str]:
    status = "passed" if report.passed() else "FAILED"
    lines = [
        f"verification: {status} (exact_zero={str(report.exact_zero).lower()}, "
        f"max_coeff_magnitude={report.max_coeff_magnitude!r})"
    ]
    if not report.exact_zero:
        lines.extend(f"  residual_{i + 1} = {c.format(unicode)}" for i, c in enumerate(_components(report.residual)))
    for name, r in report.constraint_residuals.items():
        comps = _components(r)
        if len(comps) == 1:
            lines.append(f"  {name} = {comps[0].format(unicode)}")
        else:
            lines.extend(f"  {name}_{i + 1} = {c.format(unicode)}" for i, c in enumerate(comps))
    return lines


def render(problem, solution, report, output, unicode) -> str:
    if output == "json":
        doc = {
            "pde": problem.pde,
            "dim": problem.dim,
            "mode": problem.mode.value,
            "solution": {k: [_terms_json(c) for c in _components(v)] for k, v in solution.items()},
        }
        if report is not None:
            doc["verification"] = _report_json(report, unicode)
        return dump_json(doc)
    lines = _render_text(problem, solution, unicode)
    if report is not None:
        lines += _report_text(report, unicode)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _unicode_enabled() -> bool:
    return os.environ.get("POLYSOL_UNICODE", "") == "1"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polysol", description="Polynomial particular solutions of linear PDEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("problem", help="problem JSON file ('-' for stdin)")
    s.add_argument("--verify", action="store_true", help="check the solution with the residual oracle")
    s.add_argument("--output", choices=("text", "json"), default="text")
    s.add_argument("--mode", choices=[r.value for r in Ring], help="override the coefficient ring")

    v = sub.add_parser("verify", help="check a stored solution against a problem")
    v.add_argument("problem")
    v.add_argument("solution")
    v.add_argument("--output", choices=("text", "json"), default="text")
    v.add_argument("--mode", choices=[r.value for r in Ring])
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    unicode = _unicode_enabled()
    try:
        problem = parse_problem(_read(args.problem), args.mode)
        if args.command == "verify":
            solution = parse_solution(_read(args.solution), problem)
    except (ParseError, OSError) as exc:
        print(f"polysol: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    try:
        if args.command == "solve":
            solution = solve_problem(problem)
        report = verify_solution(problem, solution) if args.command == "verify" or args.verify else None
    except (SolverPreconditionError, RingError, DimensionMismatchError, ZeroDivisionError) as exc:
        print(f"polysol: cannot solve: {exc}", file=sys.stderr)
        return EXIT_SOLVE

    if args.command == "verify":
        if args.output == "json":
            sys.stdout.write(dump_json(_report_json(report, unicode)))
        else:
            sys.stdout.write("\n".join(_report_text(report, unicode)) + "\n")
    else:
        sys.stdout.write(render(problem, solution, report, args.output, unicode))
    if report is not None and not report.passed():
        return EXIT_VERIFY
    return EXIT_OK


def run() -> None:
    sys.exit(main())
