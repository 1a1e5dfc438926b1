"""The Sigma-period matrix Q, its determinant, and assembly of per(U, d + dy)."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .curve import CriticalData, discriminant_factor
from .product_formula import vandermonde


class SigmaError(ValueError):
    """Raised for a vanishing Sigma determinant or a case mismatch."""


@dataclass(frozen=True)
class SigmaMatrix:
    Q: list
    L: list  # diagonal of the exponential weight
    blocks: dict
    multipliers: tuple
    det: object
    det_L: object
    kind: str = "generic"
    notes: tuple = ()

    def as_dict(self) -> dict:
        from .report import cjson

        return {
            "kind": self.kind,
            "det": cjson(self.det),
            "det_L": cjson(self.det_L),
            "multipliers": [cjson(x) for x in self.multipliers],
            "Q": [[cjson(v) for v in row] for row in self.Q],
            "notes": list(self.notes),
        }


def m_block(s, c):
    """Rows (1, y, y^2, y^3) at y = +s and y = -s, with c = s^2."""
    return [[1 + 0 * s, s, c, c * s], [1 + 0 * s, -s, c, -c * s]]


def weights(cd: CriticalData, kind: str = "printed") -> list:
    """Diagonal of L.  ``printed``: exp(+-c1), exp(+-c2); ``pairing``: exp(+-s1), exp(+-s2),
    the value of e^y at the points (x_i, +-s_i)."""
    ctx = cd.ctx
    if kind == "printed":
        a, b = cd.c1, cd.c2
    elif kind == "pairing":
        a, b = cd.s1, cd.s2
    else:
        raise ValueError(kind)
    row = [ctx.exp(a), ctx.exp(-a), ctx.exp(b), ctx.exp(-b)]
    return row + row


def sigma_matrix(cd: CriticalData, weight: str = "printed") -> SigmaMatrix:
    """Q = L (M1, x1 M1; M2, x2 M2; M1, x3 M1; M2, x4 M2), columns 1, y, y^2, y^3, x, xy, xy^2, xy^3."""
    if cd.exceptional:
        raise SigmaError("generic case only; use sigma_matrix_exceptional")
    m1 = m_block(cd.s1, cd.c1)
    m2 = m_block(cd.s2, cd.c2)
    mult = (cd.x1, cd.x2, cd.x3, cd.x4)
    rows = []
    for blk, x in zip((m1, m2, m1, m2), mult):
        for r in blk:
            rows.append(list(r) + [x * v for v in r])
    diag = weights(cd, weight)
    q = [[diag[i] * v for v in row] for i, row in enumerate(rows)]
    det_l = 1
    for d in diag:
        det_l = det_l * d
    det = linalg.lu_det(q)
    return SigmaMatrix(q, diag, {"M1": m1, "M2": m2}, mult, det, det_l, "generic", (f"L weights: {weight}",))


def sigma_matrix_exceptional(cd: CriticalData) -> SigmaMatrix:
    """2x2 matrix in the basis 1, y at the points (x1, -s1), (x1, s1); det = 2 s1."""
    if not cd.exceptional:
        raise SigmaError("exceptional case only")
    ctx = cd.ctx
    s = cd.s1
    one = 1 + 0 * s
    q = [[one, -s], [one, s]]
    diag = [ctx.exp(-s), ctx.exp(s)]
    return SigmaMatrix(q, diag, {"M1": q}, (cd.x1,), linalg.lu_det(q), diag[0] * diag[1], "exceptional",
                       ("L omitted from Q: det L = 1",))


def delta_sigma(cd: CriticalData):
    """Vandermonde determinant of (s1, -s1, s2, -s2), computed directly."""
    return vandermonde([cd.s1, -cd.s1, cd.s2, -cd.s2])


def delta_sigma_closed(cd: CriticalData):
    """2^2 s1 s2 (c2 - c1)^2."""
    return 4 * cd.s1 * cd.s2 * (cd.c2 - cd.c1) ** 2


def block_elimination_det(cd: CriticalData):
    """(x3 - x1)^2 (x4 - x2)^2 Delta_Sigma^2 from the block structure."""
    return (cd.x3 - cd.x1) ** 2 * (cd.x4 - cd.x2) ** 2 * delta_sigma(cd) ** 2


def companion_product(cd: CriticalData) -> dict:
    """(x1 - x3)^2 (x2 - x4)^2: direct, from the printed quadratic formula, from the
    discriminant of (f(x) - c_i)/(x - x_i), and 16^-1 L^2 as printed."""
    lam = cd.lam
    direct = (cd.x1 - cd.x3) ** 2 * (cd.x2 - cd.x4) ** 2

    def printed_sq(x):
        return (-3 * x * x + 2 * (lam + 1) * x + (lam + 1) ** 2) / 4

    def disc(x):
        # discriminant of x^2 + (x_i - (lam+1)) x + x_i^2 - (lam+1) x_i + lam
        return -3 * x * x + 2 * (lam + 1) * x + (lam + 1) ** 2 - 4 * lam

    big_l = discriminant_factor(lam)
    return {
        "direct": direct,
        "printed_quadratic": printed_sq(cd.x1) * printed_sq(cd.x2),
        "derived_quadratic": disc(cd.x1) * disc(cd.x2),
        "printed_closed": big_l**2 / 16,
        "derived_closed": big_l**2,
    }


def det_q_closed_form(cd: CriticalData):
    """(lam^2 - lam + 1)^2 c1 c2 (c2 - c1)^4, as printed."""
    return discriminant_factor(cd.lam) ** 2 * cd.c1 * cd.c2 * (cd.c2 - cd.c1) ** 4


def det_q_derived(cd: CriticalData):
    """L^2 Delta_Sigma^2 = 16 L^2 c1 c2 (c2 - c1)^4, using (x1 - x3)^2 = L."""
    return 16 * discriminant_factor(cd.lam) ** 2 * cd.c1 * cd.c2 * (cd.c2 - cd.c1) ** 4


def theorem_value(cd: CriticalData):
    """-2^-6 3^12 pi^2 lam^2 (lam - 1)^2 / (L^9 sqrt L), principal square root."""
    ctx = cd.ctx
    lam = cd.lam
    big_l = discriminant_factor(lam)
    return -(ctx.mpf(3) ** 12 / 64) * ctx.pi**2 * lam**2 * (lam - 1) ** 2 / (big_l**9 * ctx.sqrt(big_l))


def f_form_printed(cd: CriticalData):
    """4 pi^2 c1 c2 / (L^2 (c1 - c2)^2), as printed."""
    ctx = cd.ctx
    return 4 * ctx.pi**2 * cd.c1 * cd.c2 / (discriminant_factor(cd.lam) ** 2 * (cd.c1 - cd.c2) ** 2)


def f_form_consistent(cd: CriticalData):
    """16 pi^2 c1 c2 / (L^2 (c1 - c2)^5): printed pushforward over printed det Q.

    With c1 - c2 = 2^2 3^-3 L sqrt(L) this equals the theorem value."""
    ctx = cd.ctx
    return 16 * ctx.pi**2 * cd.c1 * cd.c2 / (discriminant_factor(cd.lam) ** 2 * (cd.c1 - cd.c2) ** 5)


def theorem_branch(cd: CriticalData) -> int:
    """Sign e with c1 - c2 = e 2^2 3^-3 L sqrt(L) (principal sqrt)."""
    ctx = cd.ctx
    big_l = discriminant_factor(cd.lam)
    ref = 4 * big_l * ctx.sqrt(big_l) / 27
    return 1 if abs(cd.c1 - cd.c2 - ref) <= abs(cd.c1 - cd.c2 + ref) else -1


def exceptional_target(cd: CriticalData):
    """2 pi^2 / (-3)^(1/4) with (-3)^(1/4) := sqrt(2 lam - 1), i.e. sqrt of the chosen sqrt(-3)."""
    ctx = cd.ctx
    return 2 * ctx.pi**2 / ctx.sqrt(2 * cd.lam - 1)


@dataclass
class FinalPeriod:
    value: object
    pushforward: object
    sigma_det: object
    comparisons: dict = field(default_factory=dict)
    branch: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        from .report import cjson

        return {
            "value": cjson(self.value),
            "pushforward": cjson(self.pushforward),
            "sigma_det": cjson(self.sigma_det),
            "comparisons": {k: cjson(v) for k, v in self.comparisons.items()},
            "branch": self.branch,
        }


def final_period(cd: CriticalData, pushforward_value, sigma: SigmaMatrix | None = None) -> FinalPeriod:
    """per(U, nabla) = per(U, Sigma, nabla_Sigma) / per(Sigma, nabla)."""
    if sigma is None:
        sigma = sigma_matrix_exceptional(cd) if cd.exceptional else sigma_matrix(cd)
    if sigma.det == 0 or abs(sigma.det) <= 1e3 * float(cd.ctx.eps) * max(1.0, float(abs(sigma.det_L))):
        raise SigmaError("vanishing Sigma determinant")
    value = pushforward_value / sigma.det
    comp = {}
    branch = {"s1_sign": cd.branch.s1_sign, "s2_sign": cd.branch.s2_sign}
    if cd.exceptional:
        target = exceptional_target(cd)
        comp["target"] = target
        comp["ratio_to_target"] = value / target
    else:
        th = theorem_value(cd)
        comp["theorem"] = th
        comp["f_form_printed"] = f_form_printed(cd)
        comp["f_form_consistent"] = f_form_consistent(cd)
        comp["ratio_to_theorem"] = value / th
        branch["theorem_sqrt_sign"] = theorem_branch(cd)
    return FinalPeriod(value, pushforward_value, sigma.det, comp, branch)
