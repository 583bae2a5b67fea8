"""Command-line entry point: ``icps {state,q-scan,var-scan,verify,limits}``.

Exit codes: 0 success, 1 invalid input, 2 verification failure,
3 internal consistency error.
"""

import argparse
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__, analysis
from .fock import EigenConvergenceError
from .states import IcpsParams, icps_coefficients, icps_eigenvalue, icps_state
from .verify import DEFAULT_SEED, run_verification

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


_ANGLE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text):
    """Radians as a float, or a multiple of pi such as ``pi/2`` or ``3pi/4``."""
    m = _ANGLE.match(text)
    if m:
        coef = m.group(1)
        coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        denom = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / denom
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_pi_frac(text):
    try:
        return float(Fraction(text)) * math.pi
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from None


def parse_int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def parse_tol(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from None


def make_grid(lo, hi, step, name):
    """Inclusive uniform grid from ``lo`` to ``hi``; ``hi`` is hit exactly."""
    if not (math.isfinite(lo) and math.isfinite(hi) and math.isfinite(step)):
        raise InputError(f"{name} grid bounds must be finite")
    if step <= 0:
        raise InputError(f"{name} step must be positive, got {step}")
    if hi < lo:
        raise InputError(f"{name} grid is empty: max {hi} < min {lo}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    grid = lo + step * np.arange(count)
    if hi - grid[-1] > 1e-9 * max(1.0, abs(hi)):
        grid = np.append(grid, hi)
    grid[-1] = hi
    return grid


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return format(float(x), ".17g")


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if not math.isfinite(x) else float(x)
    return x


def render(command, meta, blocks, output_format):
    """Serialize ``blocks`` (name -> (columns, rows)); the first block is the main table."""
    if output_format == "json":
        names = list(blocks)
        doc = {"meta": {"tool": "icps", "version": __version__, "command": command, **meta}}
        cols, rows = blocks[names[0]]
        doc["rows"] = [{c: _json_value(v) for c, v in zip(cols, r)} for r in rows]
        if len(names) > 1:
            doc["blocks"] = {
                n: [{c: _json_value(v) for c, v in zip(blocks[n][0], r)} for r in blocks[n][1]]
                for n in names[1:]
            }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    lines = [f"# icps {__version__} {command}"]
    lines += [f"# {k} = {_meta_text(v)}" for k, v in meta.items()]
    for i, (name, (cols, rows)) in enumerate(blocks.items()):
        if len(blocks) > 1:
            if i:
                lines.append("")
            lines.append(f"# block: {name}")
        lines.append(",".join(cols))
        lines += [",".join(fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _meta_text(v):
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_meta_text(x) for x in v) + "]"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _params_from_args(args):
    theta0 = args.theta0_pi_frac if args.theta0_pi_frac is not None else args.theta0
    try:
        return IcpsParams(args.M, args.eta, args.m, theta0)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_state(args):
    p = _params_from_args(args)
    coeffs = icps_coefficients(p.M, p.eta)
    psi = icps_state(p)
    rho = 0j if p.eta == 0.0 else icps_eigenvalue(p)
    meta = {
        "M": p.M,
        "eta": p.eta,
        "m": p.m,
        "theta0": p.theta0,
        "theta_m": p.theta_m,
        "rho_modulus": abs(rho),
        "rho_phase": p.theta_m if p.eta > 0 else 0.0,
        "c0": coeffs.c0,
    }
    rows = [(n, a.real, a.imag, abs(a) ** 2) for n, a in enumerate(psi)]
    return meta, {"state": (["n", "re", "im", "prob"], rows)}


def cmd_q_scan(args):
    eta_grid = make_grid(args.eta_min, args.eta_max, args.eta_step, "eta")
    if eta_grid[0] < 0 or eta_grid[-1] > 1:
        raise InputError("eta grid must lie within [0, 1]")
    if min(args.M_list) < 1:
        raise InputError("every M must be >= 1")
    rows = analysis.q_scan(args.M_list, eta_grid)
    meta = {
        "M_list": args.M_list,
        "eta_min": args.eta_min,
        "eta_max": args.eta_max,
        "eta_step": args.eta_step,
    }
    return meta, {"q": (["M", "eta", "Q", "vacuum_flag"], rows)}


def cmd_var_scan(args):
    eta_grid = make_grid(args.eta_min, args.eta_max, args.eta_step, "eta")
    if eta_grid[0] < 0 or eta_grid[-1] > 1:
        raise InputError("eta grid must lie within [0, 1]")
    theta_grid = make_grid(args.theta_min, args.theta_max, args.theta_step, "theta")
    if min(args.M_list) < 1:
        raise InputError("every M must be >= 1")
    rows, summary = [], []
    for M in args.M_list:
        surf = analysis.variance_surface(M, eta_grid, theta_grid)
        for i, eta in enumerate(surf.eta_grid):
            for j, theta in enumerate(surf.theta_grid):
                vx = surf.var_x[i, j]
                rows.append((M, eta, theta, vx, surf.var_p[i, j], vx < 0.5 - analysis.SQUEEZE_TOL))
        for j, theta in enumerate(surf.theta_grid):
            k = int(np.argmin(surf.var_x[:, j]))
            summary.append((M, theta, surf.eta0[j], surf.eta_grid[k], surf.var_x[k, j]))
    meta = {
        "M_list": args.M_list,
        "eta_min": args.eta_min,
        "eta_max": args.eta_max,
        "eta_step": args.eta_step,
        "theta_min": args.theta_min,
        "theta_max": args.theta_max,
        "theta_step": args.theta_step,
    }
    return meta, {
        "variance": (["M", "eta", "theta_m", "var_x", "var_p", "squeezed_x"], rows),
        "squeezing_boundary": (["M", "theta_m", "eta0", "eta_min_var_x", "min_var_x"], summary),
    }


def cmd_limits(args):
    if args.lam <= 0:
        raise InputError(f"lam must be positive, got {args.lam}")
    if args.pb_M < 1:
        raise InputError("pb-M must be >= 1")
    theta0 = args.theta0_pi_frac if args.theta0_pi_frac is not None else args.theta0
    eta_grid = make_grid(args.pb_eta_min, 1.0, args.pb_eta_step, "pb-eta")
    if eta_grid[0] < 0:
        raise InputError("pb-eta-min must be >= 0")
    pb = analysis.pb_limit_fidelities(args.pb_M, eta_grid, m=0, theta0=theta0)
    spec = analysis.coherent_limit_probe(
        analysis.CoherentLimitSpec(args.lam, theta0, tuple(args.M_list))
    )
    coherent = [
        (M, le, f is None, f)
        for M, le, f in zip(spec.M_list, spec.log_etas, spec.fidelities)
    ]
    probe = [(M, analysis.factorial_root_ratio(M), math.exp(-1.0)) for M in args.probe_M]
    meta = {
        "lam": args.lam,
        "theta0": theta0,
        "M_list": args.M_list,
        "pb_M": args.pb_M,
        "pb_eta_min": args.pb_eta_min,
        "pb_eta_step": args.pb_eta_step,
        "probe_M": args.probe_M,
    }
    return meta, {
        "pb_limit": (["M", "eta", "fidelity"], [(args.pb_M, e, f) for e, f in zip(eta_grid, pb)]),
        "coherent_limit": (["M", "log_eta", "skipped", "fidelity"], coherent),
        "factorial_root_ratio": (["M", "value", "inv_e"], probe),
    }


def cmd_verify(args):
    tolerances = dict(args.tol or [])
    try:
        results = run_verification(
            seed=args.seed, M_max=args.M_max, oracle=args.oracle, tolerances=tolerances
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    ok = all(r.passed for r in results)
    lines = [f"icps {__version__} verify (seed={args.seed}, M_max={args.M_max})"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status} {r.name:<15} samples={r.samples:<6d} "
            f"max_residual={r.max_residual:.3e} tol={r.tolerance:.1e}"
        )
        if not r.passed:
            lines.append(f"     reproduce with {json.dumps(r.worst_case)}")
    text = "\n".join(lines) + "\n"
    report = json.dumps(
        {
            "meta": {"tool": "icps", "version": __version__, "command": "verify",
                     "seed": args.seed, "M_max": args.M_max, "oracle": args.oracle},
            "rows": [r.as_dict() for r in results],
            "passed": ok,
        },
        indent=1,
    ) + "\n"
    return text, report, ok


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=parse_tol, action="append", metavar="NAME=VALUE")

    phase = argparse.ArgumentParser(add_help=False)
    phase.add_argument("--theta0", type=parse_angle, default=0.0, help="radians, or e.g. pi/4")
    phase.add_argument("--theta0-pi-frac", type=parse_pi_frac, metavar="P/Q",
                       help="theta0 = (P/Q) * pi; overrides --theta0")

    parser = _Parser(prog="icps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"icps {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("state", parents=[common, phase], help="emit one ICPS")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--m", type=int, default=0)

    p = sub.add_parser("q-scan", parents=[common], help="Mandel Q over eta for several M")
    p.add_argument("--M-list", type=parse_int_list, default=list(range(1, 8)))
    p.add_argument("--eta-min", type=float, default=0.0)
    p.add_argument("--eta-max", type=float, default=1.0)
    p.add_argument("--eta-step", type=float, default=0.005)

    p = sub.add_parser("var-scan", parents=[common], help="x-quadrature variance over (eta, theta_m)")
    p.add_argument("--M-list", type=parse_int_list, default=[3, 7])
    p.add_argument("--eta-min", type=float, default=0.0)
    p.add_argument("--eta-max", type=float, default=1.0)
    p.add_argument("--eta-step", type=float, default=0.01)
    p.add_argument("--theta-min", type=parse_angle, default=0.0)
    p.add_argument("--theta-max", type=parse_angle, default=math.pi / 2)
    p.add_argument("--theta-step", type=parse_angle, default=math.pi / 100)

    p = sub.add_parser("verify", parents=[common], help="run the seeded invariant suites")
    p.add_argument("--M-max", type=int, default=40)
    p.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=True,
                   help="compare against dense diagonalization (M <= 10)")

    p = sub.add_parser("limits", parents=[common, phase], help="phase-state and coherent limits")
    p.add_argument("--lam", type=float, default=1.0, help="target coherent amplitude modulus")
    p.add_argument("--M-list", type=parse_int_list, default=[25, 50, 100, 200])
    p.add_argument("--pb-M", type=int, default=7)
    p.add_argument("--pb-eta-min", type=float, default=0.9)
    p.add_argument("--pb-eta-step", type=float, default=0.01)
    p.add_argument("--probe-M", type=parse_int_list, default=[10, 100, 1000, 10000])
    return parser


_COMMANDS = {
    "state": cmd_state,
    "q-scan": cmd_q_scan,
    "var-scan": cmd_var_scan,
    "limits": cmd_limits,
}


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            text, report, ok = cmd_verify(args)
            if args.format == "json" and args.out is None:
                sys.stdout.write(report)
            else:
                sys.stdout.write(text)
                if args.out is not None:
                    _write(report, args.out)
            return EXIT_OK if ok else EXIT_VERIFY
        meta, blocks = _COMMANDS[args.command](args)
        _write(render(args.command, meta, blocks, args.format), args.out)
    except InputError as exc:
        print(f"icps {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (analysis.QuadratureConsistencyError, EigenConvergenceError) as exc:
        print(f"icps {args.command}: internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
