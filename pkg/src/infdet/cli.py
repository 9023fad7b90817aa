"""Command line entry point.

Exit status: 0 when the command ran (verdicts are part of the output), 2 for
input errors, 3 when the minor enumeration exceeds its size cap.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from .fitting import SizeCapError
from .hessian import DomainError, SpecError
from .loja import LojaError, SamplePlan
from .parser import load_problem, serialize
from .perturb import build_pair, spectral_at, verify_pair
from .report import (
    DEFAULT_K_MAX,
    assumptions_for,
    fuse,
    render_kv,
    render_text,
    run_check,
    run_loja,
    run_report,
)

EXIT_OK, EXIT_INPUT, EXIT_SIZE = 0, 2, 3


def _plan_args(p: argparse.ArgumentParser) -> None:
    d = SamplePlan()
    p.add_argument("--rmin", type=float, default=d.rmin, help="smallest shell radius")
    p.add_argument("--rmax", type=float, default=d.rmax, help="largest shell radius")
    p.add_argument("--shells", type=int, default=d.shells)
    p.add_argument("--per-shell", type=int, default=d.per_shell)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--chart-grid", type=int, default=d.chart_grid, help="grid points per chart parameter")


def _kmax_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX, help="largest order tried for m^k certificates")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infdet", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("text", "kv"), default="text", help="output format")
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="exact identities and m^k certificates")
    c.add_argument("file")
    _kmax_arg(c)
    lo = sub.add_parser("loja", help="numerical Lojasiewicz exponents")
    lo.add_argument("file")
    _plan_args(lo)
    pe = sub.add_parser("perturb", help="spectral perturbations at one point of X")
    pe.add_argument("file")
    pe.add_argument("--point", required=True, help="comma separated coordinates, e.g. 0,0,1/2")
    pe.add_argument("--eps", type=float, default=None, help="epsilon scale for W")
    r = sub.add_parser("report", help="both pipelines and the fused verdict")
    r.add_argument("file")
    _kmax_arg(r)
    _plan_args(r)
    for p in (c, lo, pe, r):
        p.add_argument("--format", choices=("text", "kv"), default=argparse.SUPPRESS)
    return ap


def _plan(ns) -> SamplePlan:
    return SamplePlan(ns.rmin, ns.rmax, ns.shells, ns.per_shell, ns.seed, ns.chart_grid)


def _point(text: str) -> list[float]:
    try:
        return [float(Fraction(v.strip())) for v in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise SpecError("syntax-error", f"bad point {text!r}") from None


def _matrix(M: np.ndarray) -> str:
    return "[" + ", ".join("[" + ", ".join(format(float(v), ".10g") for v in row) + "]" for row in M) + "]"


def _perturb_output(P, point, eps, fmt: str) -> str:
    S = spectral_at(P, point)
    pair = build_pair(S, eps)
    chk = verify_pair(P, point, pair, S)
    from .hessian import check_hess_identity

    items = [
        ("problem", P.name),
        ("point", "(" + ", ".join(format(v, ".10g") for v in point) + ")"),
        ("H", _matrix(S.matrix)),
        ("eigenvalues", ", ".join(format(float(v), ".10g") for v in S.eigenvalues)),
        ("removed_index", f"{pair.index + 1} (smallest modulus)"),
        ("orthogonality_error", format(S.orthogonality_error(), ".3g")),
        ("reconstruction_error", format(S.reconstruction_error(), ".3g")),
        ("V", _matrix(pair.V)),
        ("W", _matrix(pair.W)),
        ("epsilons", ", ".join(format(float(v), ".10g") for v in pair.epsilons)),
        ("det_H_minus_V", format(chk.det_V, ".10g")),
        ("det_H_minus_V.tolerance", format(chk.V_tolerance, ".3g")),
        ("det_H_minus_V.ok", str(chk.V_ok).lower()),
        ("det_H_minus_W", format(chk.det_W, ".10g")),
        ("det_H_minus_W.expected", format(chk.det_W_expected, ".10g")),
        ("det_H_minus_W.ok", str(chk.W_ok).lower()),
        ("perturbed.hess_identity", str(check_hess_identity(chk.perturbed).holds).lower()),
    ]
    if fmt == "kv":
        return "".join(f"{k} = {v}\n" for k, v in items)
    body = "\n".join(f"{k:<26} {v}" for k, v in items)
    return body + "\n\nPerturbed problem (H - V):\n" + serialize(chk.perturbed)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        P = load_problem(ns.file)
        if ns.command == "check":
            out = fuse(P, run_check(P, ns.k_max), None, assumptions_for(P, ns.k_max))
        elif ns.command == "loja":
            if not P.xcharts:
                raise LojaError("the problem has no charts of X")
            out = fuse(P, None, run_loja(P, _plan(ns)))
        elif ns.command == "report":
            out = run_report(P, ns.k_max, _plan(ns))
        else:
            sys.stdout.write(_perturb_output(P, _point(ns.point), ns.eps, ns.format))
            return EXIT_OK
    except SizeCapError as e:
        print(f"infdet: size cap: {e}", file=sys.stderr)
        return EXIT_SIZE
    except (SpecError, LojaError, DomainError, ValueError, OSError) as e:
        print(f"infdet: {ns.file}: {e}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render_kv(out) if ns.format == "kv" else render_text(out))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
