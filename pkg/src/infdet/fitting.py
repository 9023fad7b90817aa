"""The presentation matrix Lambda and the Fitting ideal K_f of its p x p minors."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

from .hessian import ProblemSpec, det_H, gradient, jacobian, psi_ideal
from .ideals import GroebnerBasis, groebner, member, normal_form
from .polycore import PolyMatrix, Polynomial, binomial, determinant, mat_minor

MINOR_CAP = 5000


class SizeCapError(RuntimeError):
    """Minor enumeration would exceed :data:`MINOR_CAP` column subsets."""


def build_columns(P: ProblemSpec) -> list[list[Polynomial]]:
    """The lifts ``h^j`` of ``df/dx_j`` through ``sigma``, one p-vector per variable."""
    def compute():
        J = jacobian(P)
        cols = []
        for j in range(P.n):
            h = []
            for i in range(P.p):
                acc = Polynomial.zero(P.n)
                for k in range(P.p):
                    fik = P.H[i, k]
                    if not fik:
                        continue
                    acc = acc + 2 * fik * J[k, j] + fik.diff(j) * P.psi[k]
                h.append(acc)
            cols.append(h)
        return cols
    return P.cached("columns", compute)


def trivial_syzygies(P: ProblemSpec) -> list[list[Polynomial]]:
    """Koszul relations: ``psi_s`` in slot r and ``-psi_r`` in slot s, for r < s."""
    zero = Polynomial.zero(P.n)
    out = []
    for r, s in combinations(range(P.p), 2):
        v = [zero] * P.p
        v[r] = P.psi[s]
        v[s] = -P.psi[r]
        out.append(v)
    return out


def sigma(P: ProblemSpec, vec) -> Polynomial:
    total = Polynomial.zero(P.n)
    for a, f in zip(vec, P.psi):
        total = total + a * f
    return total


@dataclass(frozen=True)
class FittingData:
    """Lambda, the provenance of each column and the normalised generators of K_f."""

    lam: PolyMatrix
    column_tags: tuple  # ("H", j) | ("Syz", r, s) | ("Extra", idx), all 0-based
    kf_gens: tuple
    minor_subsets: tuple  # column subset that produced each kf generator

    @property
    def ncols(self) -> int:
        return self.lam.cols

    def hcol_index(self, j: int) -> int:
        return self.column_tags.index(("H", j))


def build_lambda(P: ProblemSpec, cap: int = MINOR_CAP) -> FittingData:
    """Assemble ``Lambda = [h^1..h^n | trivial syzygies | extra syzygies]`` and its minors."""
    def compute():
        cols = build_columns(P)
        tags = [("H", j) for j in range(P.n)]
        syz = trivial_syzygies(P)
        tags += [("Syz", r, s) for r, s in combinations(range(P.p), 2)]
        extra = [list(s) for s in P.extra_syzygies]
        tags += [("Extra", i) for i in range(len(extra))]
        all_cols = cols + syz + extra
        lam = PolyMatrix.from_columns(all_cols, P.p, P.n)
        total = binomial(len(all_cols), P.p)
        if total > cap:
            raise SizeCapError(f"{total} minors of order {P.p} exceed the cap of {cap}")
        gens, subsets, seen = [], [], set()
        for subset in combinations(range(len(all_cols)), P.p):
            m = mat_minor(lam, range(P.p), subset)
            if m.is_zero():
                continue
            m = m.monic()
            if m in seen:
                continue
            seen.add(m)
            gens.append(m)
            subsets.append(subset)
        return FittingData(lam, tuple(tags), tuple(gens), tuple(subsets))
    return P.cached(("lambda", cap), compute)


def fitting_ideal(P: ProblemSpec, F: FittingData | None = None) -> GroebnerBasis:
    F = F or build_lambda(P)
    return P.cached("gb_kf", lambda: groebner(F.kf_gens, P.n))


def column_contract(P: ProblemSpec, F: FittingData | None = None) -> list[tuple]:
    """Columns violating ``sigma(col) = df/dx_j`` (H columns) or ``= 0`` (syzygies)."""
    F = F or build_lambda(P)
    grad = gradient(P)
    bad = []
    for c, tag in enumerate(F.column_tags):
        s = sigma(P, F.lam.column(c))
        want = grad[tag[1]] if tag[0] == "H" else Polynomial.zero(P.n)
        if s != want:
            bad.append((c, tag, s - want))
    return bad


@dataclass(frozen=True)
class Check:
    """Outcome of one identity check; ``status`` is ``true``, ``false`` or ``not-applicable``."""

    name: str
    status: str
    detail: str = ""
    witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.status in ("true", "not-applicable")

    def __bool__(self) -> bool:
        return self.status == "true"


def verify_dol(P: ProblemSpec, F: FittingData | None = None, method: str = "auto") -> Check:
    """Every ``g * psi_i`` with g a generator of K_f lies in the Jacobian ideal.

    ``method="certificate"`` writes each product as an explicit combination of
    the partial derivatives through the adjugate of its Lambda block.
    ``method="groebner"`` reduces the products modulo a Groebner basis of J_f.
    ``"auto"`` tries certificates and falls back to Groebner reduction.
    """
    if method not in ("auto", "certificate", "groebner"):
        raise ValueError(f"unknown method {method!r}")
    F = F or build_lambda(P)
    count = len(F.kf_gens) * P.p
    if method != "groebner":
        failed = [gi for gi in range(len(F.kf_gens)) if not dol_certificate_holds(P, F, gi)]
        if not failed:
            return Check("dol", "true", f"{count} products written explicitly in the partials of f")
        if method == "certificate":
            return Check("dol", "false", f"adjugate certificate fails for kf generator {failed[0]}",
                         (failed[0],))
    from .hessian import jacobian_ideal

    B = jacobian_ideal(P)
    for gi, g in enumerate(F.kf_gens):
        for i, f in enumerate(P.psi):
            if not member(g * f, B):
                return Check("dol", "false", f"kf generator {gi} times psi[{i + 1}] not in J_f",
                             (gi, i, normal_form(g * f, B)))
    return Check("dol", "true", f"{count} products reduced to 0 modulo J_f")


def dol_certificate_holds(P: ProblemSpec, F: FittingData, gi: int) -> bool:
    """Check ``minor * psi_i = sum over H columns c of adj[c][i] * df/dx_j(c)`` for all i.

    The minor is the one that produced ``F.kf_gens[gi]`` (before normalisation),
    so a true identity exhibits every ``g * psi_i`` inside the Jacobian ideal.
    """
    subset = F.minor_subsets[gi]
    minor = mat_minor(F.lam, range(P.p), subset)
    adj = cramer_cofactors(P, F, subset)
    grad = gradient(P)
    for i, f in enumerate(P.psi):
        total = Polynomial.zero(P.n)
        for c, col in enumerate(subset):
            tag = F.column_tags[col]
            if tag[0] == "H":
                total = total + adj[c][i] * grad[tag[1]]
        if total != minor * f:
            return False
    return True


def cramer_cofactors(P: ProblemSpec, F: FittingData, subset) -> list[list[Polynomial]]:
    """Adjugate of the Lambda block on ``subset``: ``minor * e_i = sum_c adj[c][i] * col_c``.

    Applying sigma turns this into an explicit representation of ``minor * psi_i``
    inside the Jacobian ideal, independent of any Groebner computation.
    """
    p = P.p
    block = [[F.lam[r, c] for c in subset] for r in range(p)]
    adj = [[Polynomial.zero(P.n)] * p for _ in range(p)]
    for a in range(p):
        for b in range(p):
            sub = [row[:a] + row[a + 1:] for k, row in enumerate(block) if k != b]
            cof = determinant(sub, P.n)
            adj[a][b] = cof if (a + b) % 2 == 0 else -cof
    return adj


def verify_mudet(P: ProblemSpec, F: FittingData | None, cols) -> Check:
    """``2^p * mu * det H - a_mu`` lies in (psi) for the psi' minor ``mu`` on ``cols``."""
    F = F or build_lambda(P)
    cols = tuple(cols)
    if len(cols) != P.p or list(cols) != sorted(set(cols)) or any(not 0 <= c < P.n for c in cols):
        raise ValueError("cols must be p strictly increasing variable indices")
    mu = mat_minor(jacobian(P), range(P.p), cols)
    a_mu = mat_minor(F.lam, range(P.p), [F.hcol_index(j) for j in cols])
    b_mu = mu * det_H(P) * (2 ** P.p) - a_mu
    nf = normal_form(b_mu, psi_ideal(P))
    label = "mudet(" + ",".join(P.varnames[c] for c in cols) + ")"
    if nf.is_zero():
        return Check(label, "true", f"mu = {P.fmt(mu)}, a_mu = {P.fmt(a_mu)}, b_mu = {P.fmt(b_mu)}",
                     (mu, a_mu, b_mu))
    return Check(label, "false", f"b_mu = {P.fmt(b_mu)} has normal form {P.fmt(nf)}", (mu, a_mu, b_mu))


def verify_mudet_all(P: ProblemSpec, F: FittingData | None = None) -> list[Check]:
    F = F or build_lambda(P)
    return [verify_mudet(P, F, cols) for cols in combinations(range(P.n), P.p)]


def psi_power_grad_products(P: ProblemSpec) -> list[Polynomial]:
    grad = gradient(P)
    return [f ** (P.p - 2) * g for f in P.psi for g in grad]


def v_germ(P: ProblemSpec) -> Polynomial:
    """``|psi|^(2(p-2)) * |grad f|^2``."""
    sq = Polynomial.zero(P.n)
    for f in P.psi:
        sq = sq + f * f
    gsq = Polynomial.zero(P.n)
    for g in gradient(P):
        gsq = gsq + g * g
    return sq ** (P.p - 2) * gsq


@dataclass(frozen=True)
class MembershipCertificate:
    """``target = sum cofactors[k] * members[k]`` where every member is a Lambda minor."""

    target: Polynomial
    members: tuple
    cofactors: tuple
    subsets: tuple

    def verify(self, P: ProblemSpec, F: FittingData) -> bool:
        total = Polynomial.zero(P.n)
        for m, c, subset in zip(self.members, self.cofactors, self.subsets):
            if mat_minor(F.lam, range(P.p), subset) != m:
                return False
            total = total + c * m
        return total == self.target


def psi_power_certificate(P: ProblemSpec, F: FittingData, i: int, j: int) -> MembershipCertificate:
    """Certificate that ``psi_i^(p-2) * df/dx_j`` is (plus or minus) one Lambda minor."""
    subset = explicit_psi_power_subset(P, F, i, j)
    m = mat_minor(F.lam, range(P.p), subset)
    target = P.psi[i] ** (P.p - 2) * gradient(P)[j]
    sign = 1 if m == target else -1
    return MembershipCertificate(target, (m,), (Polynomial.constant(sign, P.n),), (subset,))


def v_germ_certificate(P: ProblemSpec, F: FittingData) -> MembershipCertificate | None:
    """Expand ``|psi|^(2(p-2))`` and charge each term to some ``psi_i^(p-2) df/dx_j``.

    Returns None when a term has no exponent reaching ``p-2`` (possible for p >= 5).
    """
    from math import factorial

    p, e = P.p, P.p - 2
    grad = gradient(P)
    cofs: dict = {}
    for combo in combinations_with_replacement(range(p), e):
        alpha = [combo.count(k) for k in range(p)]
        coeff = factorial(e)
        for a in alpha:
            coeff //= factorial(a)
        exps = [2 * a for a in alpha]
        owner = next((k for k in range(p) if exps[k] >= e), None)
        if owner is None:
            return None
        exps[owner] -= e
        rest = Polynomial.constant(coeff, P.n)
        for k, ek in enumerate(exps):
            if ek:
                rest = rest * P.psi[k] ** ek
        for jj in range(P.n):
            key = (owner, jj)
            cofs[key] = cofs.get(key, Polynomial.zero(P.n)) + rest * grad[jj]
    members, cofactors, subsets = [], [], []
    for (i, jj), c in sorted(cofs.items()):
        cert = psi_power_certificate(P, F, i, jj)
        members.append(cert.members[0])
        cofactors.append(c * cert.cofactors[0])
        subsets.append(cert.subsets[0])
    return MembershipCertificate(v_germ(P), tuple(members), tuple(cofactors), tuple(subsets))


def verify_psi_power_grad(P: ProblemSpec, F: FittingData | None = None, method: str = "auto") -> Check:
    """``psi_i^(p-2) * df/dx_j`` for all i, j and the germ v lie in K_f; needs p >= 2.

    ``method="groebner"`` reduces every product modulo a Groebner basis of K_f.
    ``method="certificate"`` exhibits each product as an explicit combination of
    Lambda minors and checks the identity by exact expansion. ``"auto"`` uses
    certificates and falls back to Groebner reduction where none is available.
    """
    if method not in ("auto", "certificate", "groebner"):
        raise ValueError(f"unknown method {method!r}")
    if P.p < 2:
        return Check("psi_power_grad", "not-applicable", "requires at least two components of psi")
    F = F or build_lambda(P)
    grad = gradient(P)
    if method == "groebner":
        B = fitting_ideal(P, F)
        for i, f in enumerate(P.psi):
            for j, g in enumerate(grad):
                prod = f ** (P.p - 2) * g
                if not member(prod, B):
                    return Check("psi_power_grad", "false",
                                 f"psi[{i + 1}]^{P.p - 2} * df/d{P.varnames[j]} not in K_f",
                                 (i, j, normal_form(prod, B)))
        v = v_germ(P)
        if not member(v, B):
            return Check("psi_power_grad", "false", "germ v not in K_f", ("v", normal_form(v, B)))
        return Check("psi_power_grad", "true",
                     f"{P.p * P.n} products and v reduced to 0 modulo K_f (groebner)")
    for i in range(P.p):
        for j in range(P.n):
            cert = psi_power_certificate(P, F, i, j)
            if not cert.verify(P, F):
                return Check("psi_power_grad", "false",
                             f"psi[{i + 1}]^{P.p - 2} * df/d{P.varnames[j]} is not +-minor "
                             f"{cert.subsets[0]}", (i, j))
    vcert = v_germ_certificate(P, F)
    if vcert is None:
        if method == "certificate":
            return Check("psi_power_grad", "false", "no explicit certificate for v")
        if not member(v_germ(P), fitting_ideal(P, F)):
            return Check("psi_power_grad", "false", "germ v not in K_f")
        return Check("psi_power_grad", "true",
                     f"{P.p * P.n} products certified by explicit minors; v reduced to 0 modulo K_f")
    if not vcert.verify(P, F):
        return Check("psi_power_grad", "false", "certificate for v does not expand to v")
    return Check("psi_power_grad", "true",
                 f"{P.p * P.n} products and v certified by explicit minors of Lambda")


def explicit_psi_power_subset(P: ProblemSpec, F: FittingData, i: int, j: int) -> tuple:
    """Columns ``h^j`` and the trivial relations pairing i with every k != i.

    The minor on these columns equals ``+-psi_i^(p-2) * df/dx_j``.
    """
    cols = [F.hcol_index(j)]
    for k in range(P.p):
        if k == i:
            continue
        r, s = min(i, k), max(i, k)
        cols.append(F.column_tags.index(("Syz", r, s)))
    return tuple(cols)
