"""Symbolic and numeric pipelines and the fused determinacy report."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .fitting import (
    Check,
    build_lambda,
    column_contract,
    fitting_ideal,
    verify_dol,
    verify_mudet_all,
    verify_psi_power_grad,
)
from .hessian import ProblemSpec, check_hess_identity, jacobian_ideal, sigma_generators
from .ideals import PowerCertificate, groebner, power_certificate
from .loja import LojaEstimate, SamplePlan, estimate_Df_exponent, estimate_gradient_exponent

CERTIFIED = "infinitely-determined (certified, sufficient)"
NUMERICAL = "infinitely-determined (numerical evidence)"
NOT_DETERMINED = "not-determined (witness)"
INCONCLUSIVE = "inconclusive"
DEFAULT_K_MAX = 8


@dataclass(frozen=True)
class Assumption:
    name: str
    status: str  # verified, complete, assumed
    detail: str


@dataclass(frozen=True)
class SymbolicResult:
    hess_identity: Check
    column_contract: Check
    dol: Check
    mudet: tuple
    psi_power_grad: Check
    ifit: PowerCertificate | None  # None when Y is not the origin
    ijac: PowerCertificate | None
    kf_generators: tuple
    k_max: int

    def identity_checks(self) -> list[Check]:
        return [self.hess_identity, self.column_contract, self.dol, *self.mudet, self.psi_power_grad]

    @property
    def certified(self) -> bool:
        return self.ifit is not None and self.ifit.succeeded


@dataclass(frozen=True)
class NumericResult:
    grad: LojaEstimate | None
    Df: LojaEstimate | None
    plan: SamplePlan
    note: str = ""

    @property
    def verdict(self) -> str:
        if self.grad is None or self.Df is None:
            return "inconclusive"
        if "fails" in (self.grad.verdict, self.Df.verdict):
            return "fails"
        if self.grad.holds and self.Df.holds:
            return "holds"
        return "inconclusive"

    @property
    def witness(self):
        for est in (self.grad, self.Df):
            if est is not None and est.verdict == "fails":
                return est.witness
        return None

    @property
    def min_Df_off_Y(self) -> float:
        """Smallest |D_f| seen at samples away from Y."""
        return math.nan if self.Df is None else self.Df.residual_floor


@dataclass(frozen=True)
class Report:
    problem: str
    spec: ProblemSpec = field(repr=False)
    assumptions: tuple
    symbolic: SymbolicResult | None
    numeric: NumericResult | None
    verdict: str
    anomalies: tuple = ()
    witness: str = ""


# assumptions

def _syzygy_assumption(P: ProblemSpec) -> Assumption:
    if P.p == 1:
        return Assumption("syzygies", "complete", "p = 1: the kernel of sigma is zero")
    leads = [f.leading_monomial() for f in P.psi]
    coprime = all(all(min(a, b) == 0 for a, b in zip(leads[i], leads[j]))
                  for i in range(P.p) for j in range(i + 1, P.p))
    if coprime:
        return Assumption("syzygies", "complete",
                          "leading monomials of psi are pairwise coprime, so the trivial relations generate")
    extra = f" plus {len(P.extra_syzygies)} supplied" if P.extra_syzygies else ""
    return Assumption("syzygies", "assumed",
                      f"trivial relations{extra} assumed to generate; K_f may be under-approximated")


def assumptions_for(P: ProblemSpec, k_max: int = DEFAULT_K_MAX) -> tuple:
    out = [Assumption("regdense", "assumed", "X minus Sigma is dense in X (not verified)")]
    if P.y_is_origin:
        cert = power_certificate(groebner(sigma_generators(P), P.n), k_max)
        if cert.succeeded:
            out.append(Assumption("onY", "verified", f"Sigma is contained in the origin ({cert.describe()})"))
        else:
            out.append(Assumption("onY", "assumed", "Sigma inside the origin not certified up to the order bound"))
    else:
        out.append(Assumption("onY", "assumed", "Sigma inside Y is a user assertion for chart-defined Y"))
    out.append(_syzygy_assumption(P))
    return tuple(out)


# pipelines

def _hess_check(P: ProblemSpec) -> Check:
    res = check_hess_identity(P)
    if res.holds:
        return Check("hess_identity", "true", "f''/2 - psi'^T H psi' lies in (psi)")
    i, j, _, nf = res.witness
    return Check("hess_identity", "false", f"entry ({i + 1},{j + 1}) leaves {P.fmt(nf)}", res.witness)


def _contract_check(P: ProblemSpec, F) -> Check:
    bad = column_contract(P, F)
    if not bad:
        return Check("column_contract", "true", f"{F.ncols} columns of Lambda map correctly under sigma")
    c, tag, diff = bad[0]
    return Check("column_contract", "false", f"column {c + 1} {tag} off by {P.fmt(diff)}", bad[0])


def run_check(P: ProblemSpec, k_max: int = DEFAULT_K_MAX) -> SymbolicResult:
    """Exact identities and finite-order certificates; raises SizeCapError on huge Lambda."""
    F = build_lambda(P)
    ifit = ijac = None
    if P.y_is_origin:
        ifit = power_certificate(fitting_ideal(P, F), k_max)
        ijac = power_certificate(jacobian_ideal(P), k_max, cofactor=list(P.psi))
    return SymbolicResult(
        hess_identity=_hess_check(P),
        column_contract=_contract_check(P, F),
        dol=verify_dol(P, F),
        mudet=tuple(verify_mudet_all(P, F)),
        psi_power_grad=verify_psi_power_grad(P, F),
        ifit=ifit,
        ijac=ijac,
        kf_generators=tuple(F.kf_gens),
        k_max=k_max,
    )


def run_loja(P: ProblemSpec, plan: SamplePlan = SamplePlan()) -> NumericResult:
    if not P.xcharts:
        return NumericResult(None, None, plan, "no charts of X; numeric pipeline skipped")
    return NumericResult(estimate_gradient_exponent(P, plan), estimate_Df_exponent(P, plan), plan)


def describe_witness(P: ProblemSpec, numeric: NumericResult) -> str:
    w = numeric.witness
    if w is None:
        return ""
    which = "|grad f|" if numeric.grad is not None and numeric.grad.verdict == "fails" else "|D_f|"
    pt = "(" + ", ".join(_num(v) for v in w.point) + ")"
    exact = ""
    if w.exact_point is not None:
        ep = "(" + ", ".join(str(v) for v in w.exact_point) + ")"
        exact = f"; exact recheck at {ep}: {'zero' if w.exact_zero else 'nonzero'}"
    return f"{which} = {_num(w.value)} at {pt}, distance {_num(w.distance)}{exact}"


def fuse(P: ProblemSpec, symbolic: SymbolicResult | None, numeric: NumericResult | None,
         assumptions: tuple = ()) -> Report:
    """Combine both pipelines; a certificate contradicted by a numeric failure is flagged."""
    anomalies = []
    if symbolic is not None:
        for c in symbolic.identity_checks():
            if c.status == "false":
                anomalies.append(f"identity {c.name} failed: {c.detail}")
    certified = symbolic is not None and symbolic.certified and P.y_is_origin
    nverdict = numeric.verdict if numeric is not None else "inconclusive"
    witness = describe_witness(P, numeric) if numeric is not None else ""
    if certified and nverdict == "fails":
        anomalies.append("symbolic certificate disagrees with numeric failure; "
                         "check sampling parameters and syzygy completeness")
    if certified:
        verdict = CERTIFIED
    elif nverdict == "fails" and numeric.witness is not None:
        verdict = NOT_DETERMINED
    elif nverdict == "holds":
        verdict = NUMERICAL
    else:
        verdict = INCONCLUSIVE
    return Report(P.name, P, assumptions, symbolic, numeric, verdict, tuple(anomalies), witness)


def run_report(P: ProblemSpec, k_max: int = DEFAULT_K_MAX, plan: SamplePlan = SamplePlan()) -> Report:
    """Both pipelines concurrently, then a deterministic join."""
    with ThreadPoolExecutor(max_workers=2) as pool:
        sym = pool.submit(run_check, P, k_max)
        num = pool.submit(run_loja, P, plan)
        symbolic, numeric = sym.result(), num.result()
    return fuse(P, symbolic, numeric, assumptions_for(P, k_max))


# rendering

def _num(v: float) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return format(float(v), ".10g")


def _cert(c: PowerCertificate | None) -> str:
    return "not-applicable (Y is not the origin)" if c is None else c.describe()


def _estimate_items(prefix: str, est: LojaEstimate | None) -> list[tuple[str, str]]:
    if est is None:
        return [(f"{prefix}.verdict", "not-run")]
    w = est.witness
    items = [
        (f"{prefix}.verdict", est.verdict),
        (f"{prefix}.alpha", _num(est.alpha_hat)),
        (f"{prefix}.logC", _num(est.logC_hat)),
        (f"{prefix}.support_points", str(est.support_points)),
        (f"{prefix}.samples_used", str(est.samples_used)),
        (f"{prefix}.residual_floor", _num(est.residual_floor)),
        (f"{prefix}.grid_bound", _num(est.grid_bound)),
        (f"{prefix}.witness", "none" if w is None else
         "(" + ", ".join(_num(v) for v in w.point) + f") value {_num(w.value)} distance {_num(w.distance)}"),
    ]
    if est.note:
        items.append((f"{prefix}.note", est.note))
    return items


def report_items(R: Report) -> list[tuple[str, str]]:
    """Flat ``(key, value)`` pairs in a fixed order."""
    P = R.spec
    items = [("problem", R.problem), ("n", str(P.n)), ("p", str(P.p)),
             ("Y", "origin" if P.y_is_origin else f"charts ({len(P.ycharts)})")]
    for a in R.assumptions:
        items.append((f"assumption.{a.name}", f"{a.status}: {a.detail}"))
    S = R.symbolic
    if S is not None:
        items.append(("k_max", str(S.k_max)))
        for c in (S.hess_identity, S.column_contract, S.dol):
            items.append((c.name, c.status))
        items.append(("mudet.count", str(len(S.mudet))))
        items.append(("mudet.all", "true" if all(bool(c) for c in S.mudet) else "false"))
        for c in S.mudet:
            items.append((c.name.replace("mudet(", "mudet.").rstrip(")"), c.status))
        items.append(("psi_power_grad", S.psi_power_grad.status))
        items.append(("kf.generators", "; ".join(P.fmt(g) for g in S.kf_generators)))
        items.append(("ifit", _cert(S.ifit)))
        items.append(("ijac", _cert(S.ijac)))
    N = R.numeric
    if N is not None:
        pl = N.plan
        items += [("plan.rmin", _num(pl.rmin)), ("plan.rmax", _num(pl.rmax)), ("plan.shells", str(pl.shells)),
                  ("plan.per_shell", str(pl.per_shell)), ("plan.seed", str(pl.seed)),
                  ("plan.chart_grid", str(pl.chart_grid))]
        items += _estimate_items("estims_grad", N.grad)
        items += _estimate_items("estims_Df", N.Df)
        items.append(("estims", N.verdict))
        items.append(("onYstr.min_abs_Df_off_Y", _num(N.min_Df_off_Y)))
        if N.note:
            items.append(("numeric.note", N.note))
    items.append(("anomaly", " | ".join(R.anomalies) if R.anomalies else "none"))
    items.append(("witness", R.witness or "none"))
    items.append(("verdict", R.verdict))
    return items


def render_kv(R: Report) -> str:
    return "".join(f"{k} = {v}\n" for k, v in report_items(R))


def render_text(R: Report) -> str:
    P = R.spec
    lines = [f"Problem {R.problem}: n = {P.n}, p = {P.p}, Y = "
             + ("origin" if P.y_is_origin else "charts"), ""]
    if R.assumptions:
        lines.append("Assumptions")
        lines += [f"  {a.name:<10} {a.status:<9} {a.detail}" for a in R.assumptions]
        lines.append("")
    S = R.symbolic
    if S is not None:
        lines.append("Symbolic checks (polynomial ideals, sufficient for germs)")
        for c in S.identity_checks():
            lines.append(f"  {c.name:<16} {c.status:<15} {c.detail}")
        lines.append(f"  K_f generators   {', '.join(P.fmt(g) for g in S.kf_generators) or '(none)'}")
        lines.append(f"  ifit             {_cert(S.ifit)}")
        lines.append(f"  ijac             {_cert(S.ijac)}")
        lines.append("")
    N = R.numeric
    if N is not None:
        lines.append(f"Numeric estimates (seed {N.plan.seed}, radii {N.plan.rmin:g} to {N.plan.rmax:g})")
        for label, est in (("|grad f|", N.grad), ("D_f", N.Df)):
            if est is None:
                lines.append(f"  {label:<9} not run")
                continue
            lines.append(f"  {label:<9} {est.verdict:<12} alpha {_num(est.alpha_hat)}, "
                         f"log C {_num(est.logC_hat)}, {est.support_points} decades")
            if est.note:
                lines.append(f"            {est.note}")
        lines.append(f"  smallest |D_f| away from Y: {_num(N.min_Df_off_Y)}")
        if N.note:
            lines.append(f"  {N.note}")
        lines.append("")
    for a in R.anomalies:
        lines.append(f"ANOMALY: {a}")
    if R.witness:
        lines.append(f"Witness: {R.witness}")
    lines.append(f"Verdict: {R.verdict}")
    return "\n".join(lines) + "\n"
