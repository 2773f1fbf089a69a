"""``rho-lab`` command line front-end.

Exit codes: 0 when every asserted check passes, 1 when one fails, 2 for
invalid input and 3 for an internal numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import suites
from .errors import InvalidInput, NumericalFailure
from .model import ModelParams, PhysicalParams
from .report import Report, to_csv, to_json, to_table

DEFAULT_NMAX = {
    "spectrum": 5,
    "states": 4,
    "gram": 6,
    "kg-residual": 10,
    "ode-residual": 12,
    "ladder": 10,
    "hermiticity": 8,
    "measure-solve": 8,
    "pt-compare": 10,
    "limit-scan": 5,
    "commutators": 8,
    "verify-all": 12,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _tol_item(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or key not in suites.DEFAULT_TOL:
        raise argparse.ArgumentTypeError(
            f"expected KEY=VALUE with KEY in {sorted(suites.DEFAULT_TOL)}, got {text!r}")
    return key, _float(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--N", type=_float, help="m c^2 / (hbar omega)")
    g.add_argument("--m", type=_float)
    g.add_argument("--omega", type=_float)
    g.add_argument("--hbar", type=_float)
    g.add_argument("--c", type=_float)
    g.add_argument("--lambda", dest="lam", type=_float, help="bare coupling")
    g.add_argument("--sigma", type=_float, help="rescaled coupling N * lambda")
    o = common.add_argument_group("run")
    o.add_argument("--nmax", type=int)
    o.add_argument("--tol", type=_tol_item, action="append", default=[], metavar="KEY=VALUE")
    o.add_argument("--format", choices=("json", "csv", "table"), default="table")
    o.add_argument("--output", help="write the report here instead of stdout")
    o.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="rho-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "spectrum": "exact and perturbative energies",
        "states": "tabulate exact, perturbative and oscillator states on a grid",
        "gram": "Gram matrix of the exact states",
        "kg-residual": "Klein-Gordon residuals of the exact solutions",
        "ode-residual": "relativistic Hermite ODE residuals",
        "ladder": "ladder coefficients and their differential certification",
        "hermiticity": "defect matrix M - M^T of the perturbed Hamiltonian",
        "measure-solve": "solve for the measure that symmetrizes the Hamiltonian",
        "pt-compare": "perturbation theory against closed forms and exact states",
        "limit-scan": "N-doubling convergence tables",
        "commutators": "algebra residuals in the minimal representation (diagnostic)",
        "verify-all": "every acceptance suite on its fixed parameter grid",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=text) for name, text in helps.items()}
    subs["gram"].add_argument("--measure", choices=("alpha2", "flat", "tx"), default="alpha2")
    subs["hermiticity"].add_argument("--measure", choices=("flat", "perturbed"), default="flat")
    subs["hermiticity"].add_argument("--a", type=_float, default=-1.0,
                                     help="coefficient of the perturbed measure 1 + a xi^2/N")
    subs["limit-scan"].add_argument("--doublings", type=int, default=2)
    return parser


def resolve_params(args, required: bool = True) -> ModelParams | None:
    phys = [args.m, args.omega, args.hbar, args.c]
    have_phys = any(v is not None for v in phys)
    if args.N is not None and have_phys:
        raise InvalidInput("give either --N or the physical quadruple, not both")
    if have_phys and any(v is None for v in phys):
        raise InvalidInput("--m, --omega, --hbar and --c must be given together")
    if args.lam is not None and args.sigma is not None:
        raise InvalidInput("give either --lambda or --sigma, not both")
    if args.N is None and not have_phys:
        if required:
            raise InvalidInput("one of --N or --m/--omega/--hbar/--c is required")
        return None
    if args.lam is None and args.sigma is None:
        if required:
            raise InvalidInput("one of --lambda or --sigma is required")
        return None
    N = args.N if args.N is not None else PhysicalParams(*phys).N
    if args.sigma is not None:
        return ModelParams.from_sigma(N, args.sigma)
    return ModelParams.from_lambda(N, args.lam)


def _prefixed(label, result):
    checks, data = result
    for c in checks:
        c.name = f"{label}.{c.name}"
    return checks, data


def _verify_jobs(seed: int, tol: dict):
    """``(label, thunk)`` pairs covering the acceptance grid."""
    jobs = []
    grid = [(N, lam) for N in (1.0, 5.0, 10.0, 100.0) for lam in (0.0, 1.0, 1.0 / N)]
    for N, lam in grid:
        p = ModelParams.from_lambda(N, lam)
        tag = f"N={N:g},lambda={lam:.6g}"
        jobs.append((f"c01.{tag}", lambda p=p: suites.ode_residual(p, 12, tol)))
        jobs.append((f"c02.{tag}", lambda p=p: suites.kg(p, 10, tol)))
        jobs.append((f"c03.{tag}", lambda p=p: suites.gram(p, 10, "alpha2", tol)))
        jobs.append((f"c03.{tag}", lambda p=p: (suites.states(p, 10, tol)[0], {})))
        jobs.append((f"c04.{tag}", lambda p=p: suites.ladder(p, 10, tol)))
    for N in (10.0, 20.0, 40.0):
        p = ModelParams.from_sigma(N, 0.0)
        jobs.append((f"c05.N={N:g}", lambda p=p: suites.spectrum(p, 5, tol)))
    p10 = ModelParams.from_sigma(10.0, 0.0)
    jobs.append(("c05-c08.N=10", lambda: suites.pt_compare(p10, 12, tol)))
    jobs.append(("c06.N=10", lambda: suites.hermiticity(p10, 8, "flat", -1.0, tol)))
    for sigma in (0.0, 0.25, 1.0):
        for nmax in (6, 8, 12):
            p = ModelParams.from_sigma(10.0, sigma)
            jobs.append((f"c07.sigma={sigma:g},nmax={nmax}",
                         lambda p=p, nmax=nmax: suites.measure_solve(p, nmax, tol)))
    for N in (10.0, 20.0):
        p = ModelParams.from_sigma(N, 0.0)
        jobs.append((f"c07.N={N:g}", lambda p=p: suites.hermiticity(p, 8, "perturbed", -1.0, tol)))
    for sigma in (0.0, 1.0):
        p = ModelParams.from_sigma(20.0, sigma)
        jobs.append((f"c09-c10.sigma={sigma:g}", lambda p=p: suites.limit_scan(p, 6, tol)))
    jobs.append(("c10.lambda=1", lambda: suites.vacuum_scan(tol)))
    jobs.append(("c11", lambda: suites.oracle_agreement(seed, 100, tol)))
    p100 = ModelParams.from_sigma(100.0, 0.0)
    for N in (10.0, 20.0, 40.0):
        p = ModelParams.from_sigma(N, 0.0)
        jobs.append((f"c12.N={N:g}", lambda p=p: _diagnostic(suites.ladder(p, 10, tol))))
    jobs.append(("c12.commutators.N=100", lambda: _diagnostic(suites.commutators(p100, 8, tol))))
    return jobs


def _diagnostic(result):
    checks, data = result
    for c in checks:
        c.asserted = False
    return checks, data


def _threads() -> int:
    raw = os.environ.get("RHO_LAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInput(f"RHO_LAB_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidInput("RHO_LAB_THREADS must be at least 1")
    return value


def verify_all(seed: int, tol: dict):
    jobs = _verify_jobs(seed, tol)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda job: _prefixed(job[0], job[1]()), jobs))
    checks = [c for cs, _ in results for c in cs]
    return checks, {}


def run(args) -> Report:
    cmd = args.command
    nmax = DEFAULT_NMAX[cmd] if args.nmax is None else args.nmax
    if nmax < 0:
        raise InvalidInput("--nmax must be non-negative")
    tol = dict(args.tol)
    params = resolve_params(args, required=cmd != "verify-all")
    echo = {"command": cmd, "nmax": nmax, "seed": args.seed, "tol": dict(sorted(tol.items()))}
    if cmd == "verify-all":
        checks, data = verify_all(args.seed, tol)
        return Report(echo, params.as_dict() if params else {}, checks, data)
    if cmd == "gram":
        echo["measure"] = args.measure
        checks, data = suites.gram(params, nmax, args.measure, tol)
    elif cmd == "hermiticity":
        echo.update(measure=args.measure, a=args.a)
        checks, data = suites.hermiticity(params, nmax, args.measure, args.a, tol)
    elif cmd == "limit-scan":
        echo["doublings"] = args.doublings
        if args.doublings < 1:
            raise InvalidInput("--doublings must be at least 1")
        checks, data = suites.limit_scan(params, nmax, tol, args.doublings)
    else:
        fn = {
            "spectrum": suites.spectrum,
            "states": suites.states,
            "kg-residual": suites.kg,
            "ode-residual": suites.ode_residual,
            "ladder": suites.ladder,
            "measure-solve": suites.measure_solve,
            "pt-compare": suites.pt_compare,
            "commutators": suites.commutators,
        }[cmd]
        checks, data = fn(params, nmax, tol=tol)
    return Report(echo, params.as_dict(), checks, data)


def render(report: Report, fmt: str) -> str:
    return {"json": to_json, "csv": to_csv, "table": to_table}[fmt](report)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except NumericalFailure as exc:
        print(f"rho-lab: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (InvalidInput, ValueError) as exc:
        print(f"rho-lab: invalid input: {exc}", file=sys.stderr)
        return 2
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
