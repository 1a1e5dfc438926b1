"""Closed-form algebra of the Legendre curve y^2 = x(x-1)(x-lam)."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .numeric import cnum, get_context, kahan_sum

EXCEPTIONAL_TOL = 1e-9
CONDITIONING_TOL = 1e-3
DEGENERATE_TOL = 1e-12


class CurveCase(str, enum.Enum):
    GENERIC = "generic"
    EXCEPTIONAL = "exceptional"


class DegenerateCurveError(ValueError):
    """lam in {0, 1}: the cubic has a repeated root."""


class ConditioningWarning(UserWarning):
    """Curve parameter close to a degenerate or exceptional value."""


def discriminant_factor(lam):
    """lam^2 - lam + 1, whose vanishing merges the two critical values up to sign."""
    return lam * lam - lam + 1


def exceptional_root(ctx, sign: int = 1):
    """(1 + sign sqrt(-3)) / 2 in the working precision."""
    return (1 + sign * ctx.sqrt(cnum(ctx, -3))) / 2


@dataclass(frozen=True)
class CurveParams:
    lam: complex
    case: CurveCase

    @classmethod
    def from_lambda(cls, lam, ctx=None) -> "CurveParams":
        ctx = ctx or get_context()
        lam = cnum(ctx, lam)
        if abs(lam) < DEGENERATE_TOL or abs(lam - 1) < DEGENERATE_TOL:
            raise DegenerateCurveError(f"lambda = {lam} makes the curve singular")
        if abs(lam) < CONDITIONING_TOL or abs(lam - 1) < CONDITIONING_TOL:
            warnings.warn(f"lambda = {lam} is close to a degenerate value", ConditioningWarning, stacklevel=2)
        d = abs(discriminant_factor(lam))
        if d < EXCEPTIONAL_TOL:
            case = CurveCase.EXCEPTIONAL
            lam = exceptional_root(ctx, 1 if ctx.im(lam) >= 0 else -1)
        else:
            case = CurveCase.GENERIC
            if d < CONDITIONING_TOL:
                warnings.warn(
                    f"|lambda^2 - lambda + 1| = {float(d):.3g}: generic formulas are ill-conditioned",
                    ConditioningWarning,
                    stacklevel=2,
                )
        return cls(lam, case)

    @property
    def exceptional(self) -> bool:
        return self.case is CurveCase.EXCEPTIONAL

    def f(self, x):
        return x * (x - 1) * (x - self.lam)

    def fprime(self, x):
        return 3 * x * x - 2 * (self.lam + 1) * x + self.lam

    def fsecond(self, x):
        return 6 * x - 2 * (self.lam + 1)


@dataclass(frozen=True)
class BranchRecord:
    """Every sign / branch choice made while building :class:`CriticalData`."""

    sqrt_branch: str = "principal"
    root_order: str = "x1 has the lexicographically smaller (Re, Im)"
    swapped: bool = False
    s1_sign: int = 1
    s2_sign: int = 1
    notes: tuple = ()

    def as_dict(self) -> dict:
        return {
            "sqrt_branch": self.sqrt_branch,
            "root_order": self.root_order,
            "swapped": self.swapped,
            "s1_sign": self.s1_sign,
            "s2_sign": self.s2_sign,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class CriticalData:
    """Critical points x1, x2 of f, critical values c_i = f(x_i), s_i = sqrt(c_i)
    and companion roots x3, x4 (the other root of f(x) - c_1, resp. f(x) - c_2)."""

    params: CurveParams
    x1: complex
    x2: complex
    c1: complex
    c2: complex
    s1: complex
    s2: complex
    x3: complex
    x4: complex
    ctx: object = field(repr=False, compare=False)
    branch: BranchRecord = field(default_factory=BranchRecord)

    @property
    def lam(self):
        return self.params.lam

    @property
    def exceptional(self) -> bool:
        return self.params.exceptional

    @property
    def singular_points(self) -> list:
        """Ramification points of (x, y) -> y, in the order used for paths gamma_1.."""
        if self.exceptional:
            return [-self.s1, self.s1]
        return [-self.s1, self.s1, -self.s2, self.s2]

    def critical_point_of(self, q):
        """The critical x lying over the ramification value y = q."""
        if abs(q * q - self.c1) <= abs(q * q - self.c2):
            return self.x1
        return self.x2

    def swapped(self) -> "CriticalData":
        """Same curve with the roles of (x1, c1, s1, x3) and (x2, c2, s2, x4) exchanged."""
        b = self.branch
        rec = BranchRecord(b.sqrt_branch, b.root_order, not b.swapped, b.s2_sign, b.s1_sign, b.notes)
        return CriticalData(self.params, self.x2, self.x1, self.c2, self.c1, self.s2, self.s1,
                            self.x4, self.x3, self.ctx, rec)

    def with_signs(self, s1_sign: int = 1, s2_sign: int = 1) -> "CriticalData":
        """Flip the chosen square roots s1 -> -s1 and/or s2 -> -s2."""
        b = self.branch
        rec = BranchRecord(b.sqrt_branch, b.root_order, b.swapped, b.s1_sign * s1_sign,
                           b.s2_sign * s2_sign, b.notes)
        return CriticalData(self.params, self.x1, self.x2, self.c1, self.c2, s1_sign * self.s1,
                            s2_sign * self.s2, self.x3, self.x4, self.ctx, rec)


def critical_data(params: CurveParams | complex | str, ctx=None) -> CriticalData:
    ctx = ctx or get_context()
    if not isinstance(params, CurveParams):
        params = CurveParams.from_lambda(params, ctx)
    lam = cnum(ctx, params.lam)
    params = CurveParams(lam, params.case)
    if params.exceptional:
        x1 = x2 = (lam + 1) / 3
        c1 = c2 = (2 * lam - 1) / 9
        s1 = s2 = ctx.sqrt(c1)
        x3 = x4 = x1
        notes = ("exceptional: x1 = x2 is a double root of f'",)
    else:
        r = ctx.sqrt(discriminant_factor(lam))
        a, b = (lam + 1 - r) / 3, (lam + 1 + r) / 3
        if (float(ctx.re(a)), float(ctx.im(a))) > (float(ctx.re(b)), float(ctx.im(b))):
            a, b = b, a
        x1, x2 = a, b
        c1, c2 = params.f(x1), params.f(x2)
        s1, s2 = ctx.sqrt(c1), ctx.sqrt(c2)
        # x_i is a double root of f(x) - c_i, so the third root is (lam + 1) - 2 x_i.
        x3, x4 = lam + 1 - 2 * x1, lam + 1 - 2 * x2
        notes = ()
    return CriticalData(params, x1, x2, c1, c2, s1, s2, x3, x4, ctx, BranchRecord(notes=notes))


def identity_residuals(cd: CriticalData) -> dict:
    """Relative residuals of the closed-form identities for the critical data.

    Keys: ``fprime`` (max |f'(x_i)|), ``sqrt`` (max |s_i^2 - c_i|/|c_i|),
    ``product`` (c1 c2 = -lam^2 (lam-1)^2 / 27), ``difference``
    ((c1 - c2)^2 = 2^4/3^6 L^3), ``companion`` ((x1 - x3)^2 (x2 - x4)^2 = 2^-4 L^2,
    as printed), ``companion_exact`` ((x1 - x3)^2 (x2 - x4)^2 = L^2).
    """
    ctx = cd.ctx
    lam = cd.lam
    L = discriminant_factor(lam)

    def rel(a, b):
        scale = max(abs(a), abs(b), ctx.eps)
        return float(abs(a - b) / scale)

    fp = cd.params.fprime
    scale = abs(lam) + 1
    out = {
        "fprime": float(max(abs(fp(cd.x1)), abs(fp(cd.x2))) / scale**2),
        "sqrt": max(rel(cd.s1 * cd.s1, cd.c1), rel(cd.s2 * cd.s2, cd.c2)),
        "product": rel(cd.c1 * cd.c2, -(lam * lam) * (lam - 1) ** 2 / 27),
    }
    diff_sq = kahan_sum([cd.c1 * cd.c1, -2 * cd.c1 * cd.c2, cd.c2 * cd.c2])
    out["difference"] = rel(diff_sq, 16 * L**3 / 729)
    comp = (cd.x1 - cd.x3) ** 2 * (cd.x2 - cd.x4) ** 2
    out["companion"] = rel(comp, L**2 / 16)
    out["companion_exact"] = rel(comp, L**2)
    return out


@dataclass(frozen=True)
class SectorDescriptor:
    """Open sector lo < arg t < hi of the local parameter t = -(1/y)^(1/3) at infinity."""

    index: int
    lo: float
    hi: float

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, arg_t: float) -> bool:
        a = (arg_t - self.lo) % (2 * math.pi)
        return 0 < a < self.hi - self.lo

    def y_of_t(self, t: complex) -> complex:
        return -1 / t**3

    def x_direction(self) -> complex:
        """Direction of x -> infinity inside the sector (x ~ t^-2 on the curve)."""
        return complex(math.cos(-2 * self.center), math.sin(-2 * self.center))


def rapid_decay_sectors(cd: CriticalData | None = None) -> list[SectorDescriptor]:
    """The three sectors at infinity where e^y decays (|e^y| -> 0 along every ray)."""
    out = []
    for i in (1, 2, 3):
        c = 2 * (i - 1) * math.pi / 3
        out.append(SectorDescriptor(i, c - math.pi / 6, c + math.pi / 6))
    return out
