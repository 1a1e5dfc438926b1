"""Logarithmic connections on the y-line and the constructions built from the
Legendre double cover: the trace-zero pushforward, the twist by the
ramification divisor and the regularisation of the exponential factor."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import sympy as sp

from .curve import CriticalData
from .numeric import cnum, is_double

LAM, Y, X = sp.symbols("lam y x")


# ---------------------------------------------------------------------------
# Symbolic derivation of the rank-2 pushforward connection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicPushforward:
    """Omega = numerator / denominator * dy in the frame v1, v2 (column j = image of v_j)."""

    numerator: sp.Matrix
    denominator: sp.Expr
    frame: tuple


@lru_cache(maxsize=None)
def derive_pushforward() -> SymbolicPushforward:
    """Derive the connection matrix of d on ker(Tr) in the frame
    v1 = x - (lam+1)/3, v2 = x^2 - (lam^2+1)/3, working in k(lam, y)[x]/(f(x) - y^2).

    Along a fibre dx/dy = 2y / f'(x); 1/f'(x) is inverted modulo f(x) - y^2 and
    d v_j / dy is re-expressed in (v1, v2). The constant parts vanish because the
    trace of a derivative is the derivative of the (constant) trace.
    """
    f = X * (X - 1) * (X - LAM)
    g = f - Y**2
    fp = sp.diff(f, X)
    a, b, c = sp.symbols("a b c")
    rem = sp.rem(sp.expand((a + b * X + c * X**2) * fp), g, X)
    sol = sp.solve(sp.Poly(rem - 1, X).coeffs(), [a, b, c], dict=True)[0]
    inv_fp = sol[a] + sol[b] * X + sol[c] * X**2

    v1 = X - (LAM + 1) / 3
    v2 = X**2 - (LAM**2 + 1) / 3

    def coords(expr):
        p = sp.Poly(sp.rem(sp.expand(expr), g, X), X)
        c2, c1, c0 = p.coeff_monomial(X**2), p.coeff_monomial(X), p.coeff_monomial(1)
        const = sp.simplify(c0 + c1 * (LAM + 1) / 3 + c2 * (LAM**2 + 1) / 3)
        if const != 0:
            raise ArithmeticError("derivative left the trace-zero part")
        return sp.together(c1), sp.together(c2)

    a1, b1 = coords(2 * Y * inv_fp)
    a2, b2 = coords(2 * Y * 2 * X * inv_fp)
    omega = sp.Matrix([[a1, a2], [b1, b2]])
    den = sp.factor(sp.lcm([sp.denom(sp.together(e)) for e in omega]))
    num = omega.applyfunc(lambda e: sp.expand(sp.cancel(e * den)))
    return SymbolicPushforward(num, sp.expand(den), ("v1 = x - (lam+1)/3", "v2 = x^2 - (lam^2+1)/3"))


def printed_matrix(variant: str) -> sp.Matrix:
    """The two printed forms of the 2x2 matrix M with Omega = M * 2y dy / (3 (y^2-c1)(y^2-c2)).

    ``variant`` is ``"first"`` (entry (1,2) = 2/9 lam (lam+1) - 2/3 (lam+1) y^2) or
    ``"second"`` (entry (1,2) = 2/9 lam (lam^2+1) - 2/3 (lam+1) y^2).
    """
    r = sp.Rational
    e12 = {"first": r(2, 9) * LAM * (LAM + 1), "second": r(2, 9) * LAM * (LAM**2 + 1)}[variant]
    return sp.Matrix([
        [r(1, 9) * (LAM + 1) * (2 * LAM**2 - 3 * LAM + 2) + Y**2, e12 - r(2, 3) * (LAM + 1) * Y**2],
        [-r(2, 9) * (LAM**2 - LAM + 1), -r(2, 9) * LAM * (LAM + 1) + 2 * Y**2],
    ])


@lru_cache(maxsize=None)
def printed_variant_diagnostic() -> dict:
    """Which printed variant equals the derived matrix (as rational functions of lam, y)."""
    sym = derive_pushforward()
    omega = sym.numerator / sym.denominator
    quartic = sp.expand(sp.resultant(sp.diff(X * (X - 1) * (X - LAM), X), X * (X - 1) * (X - LAM) - Y**2, X) / 27)
    out = {}
    for variant in ("first", "second"):
        printed = printed_matrix(variant) * 2 * Y / (3 * quartic)
        diff = (omega - printed).applyfunc(sp.cancel)
        out[variant] = {
            "matches": all(e == 0 for e in diff),
            "mismatched_entries": [f"({i + 1},{j + 1})" for i in range(2) for j in range(2) if diff[i, j] != 0],
        }
    return out


def _num(ctx, value):
    """Exact sympy number -> ctx number."""
    value = sp.nsimplify(value) if not isinstance(value, (sp.Rational, sp.Integer)) else value
    if isinstance(value, (sp.Rational, sp.Integer)):
        q = Fraction(int(value.p), int(value.q))
        return ctx.mpf(q.numerator) / q.denominator
    re, im = sp.re(value), sp.im(value)
    digits = int(getattr(ctx, "dps", 17)) + 10
    if is_double(ctx):
        return complex(float(sp.N(re, digits)), float(sp.N(im, digits)))
    return ctx.mpc(ctx.mpf(str(sp.N(re, digits))), ctx.mpf(str(sp.N(im, digits))))


class NumericPolynomial:
    """Bivariate polynomial in (lam, y) evaluated at a fixed lam in a given context."""

    def __init__(self, expr, lam, ctx, in_lam: bool = True):
        gens = (LAM, Y) if in_lam else (Y,)
        poly = sp.Poly(sp.expand(expr), *gens)
        coeffs = {}
        for monom, coeff in poly.terms():
            j = monom[-1]
            term = _num(ctx, coeff) * (lam ** monom[0] if in_lam else 1)
            coeffs[j] = coeffs.get(j, 0) + term
        self.degree = max(coeffs) if coeffs else 0
        self.coeffs = [coeffs.get(j, 0) for j in range(self.degree + 1)]

    def __call__(self, y):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def derivative(self, y):
        acc = 0
        for j in range(self.degree, 0, -1):
            acc = acc * y + j * self.coeffs[j]
        return acc


@lru_cache(maxsize=None)
def _exceptional_reduction(sign: int):
    """Exact cancellation of the common factor y^2 - c1 at lam = (1 + sign sqrt(-3))/2."""
    sym = derive_pushforward()
    lam0 = (1 + sign * sp.sqrt(-3)) / 2
    c1 = sp.expand((2 * lam0 - 1) / 9)
    divisor = sp.Poly(Y**2 - c1, Y)
    num = []
    for e in sym.numerator:
        q, r = sp.div(sp.Poly(sp.expand(e.subs(LAM, lam0)), Y), divisor)
        if any(sp.simplify(cf) != 0 for cf in r.all_coeffs()):
            raise ArithmeticError("numerator not divisible by y^2 - c1")
        num.append(q.as_expr())
    qd, rd = sp.div(sp.Poly(sp.expand(sym.denominator.subs(LAM, lam0)), Y), divisor)
    if any(sp.simplify(cf) != 0 for cf in rd.all_coeffs()):
        raise ArithmeticError("denominator not divisible by y^2 - c1")
    return sp.Matrix(2, 2, [sp.simplify(e) for e in num]), sp.simplify(qd.as_expr()), lam0


class PushforwardForm:
    """Numerical Omega(y) = N(y)/Q(y) for a fixed curve, with exact partial fractions."""

    def __init__(self, cd: CriticalData):
        ctx = cd.ctx
        self.cd = cd
        if cd.exceptional:
            sign = 1 if float(ctx.im(cd.lam)) > 0 else -1
            num, den, _ = _exceptional_reduction(sign)
            self.num = [[NumericPolynomial(num[i, j], None, ctx, in_lam=False) for j in range(2)] for i in range(2)]
            self.den = NumericPolynomial(den, None, ctx, in_lam=False)
        else:
            sym = derive_pushforward()
            self.num = [[NumericPolynomial(sym.numerator[i, j], cd.lam, ctx) for j in range(2)] for i in range(2)]
            self.den = NumericPolynomial(sym.denominator, cd.lam, ctx)

    def matrix(self, y):
        d = self.den(y)
        return [[self.num[i][j](y) / d for j in range(2)] for i in range(2)]

    def residue(self, q):
        dq = self.den.derivative(q)
        return [[self.num[i][j](q) / dq for j in range(2)] for i in range(2)]


# ---------------------------------------------------------------------------
# Logarithmic connections
# ---------------------------------------------------------------------------

def mat_add(a, b):
    return [[a[i][j] + b[i][j] for j in range(len(a))] for i in range(len(a))]


def mat_scale(a, s):
    return [[s * v for v in row] for row in a]


def identity(r, ctx, scale=1):
    return [[ctx.mpf(scale) if i == j else ctx.mpf(0) for j in range(r)] for i in range(r)]


def trace(a):
    return sum(a[i][i] for i in range(len(a)))


def eigenvalues(a, ctx):
    """Eigenvalues of a 1x1 or 2x2 matrix, sorted by (Re, Im)."""
    if len(a) == 1:
        return [a[0][0]]
    t = a[0][0] + a[1][1]
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    disc = ctx.sqrt(t * t - 4 * det)
    pair = [(t - disc) / 2, (t + disc) / 2]
    return sorted(pair, key=lambda z: (round(float(ctx.re(z)), 12), float(ctx.im(z))))


@dataclass(frozen=True)
class LogConnection:
    """d + sum_q B_q dy/(y - q) + dF * Id on a trivial rank-r bundle.

    ``residues`` are r x r nested lists; the residue at infinity is derived.
    ``irregular`` holds the coefficients a_0..a_d of F. ``scalar_shifts`` records
    the identity multiple added to each residue by twists/regularisation, so the
    remaining part can be handed to the fibre model (branch tracking) when one is
    attached.
    """

    rank: int
    points: tuple
    residues: tuple
    ctx: object = field(repr=False, compare=False)
    irregular: tuple = ()
    frame: str = "e"
    scalar_shifts: tuple = ()
    fiber: object = field(default=None, repr=False, compare=False)
    label: str = ""

    def __post_init__(self):
        if len(self.points) != len(self.residues):
            raise ValueError("one residue per singular point")
        for i, p in enumerate(self.points):
            for q in self.points[i + 1:]:
                if abs(p - q) <= 1e-14 * (1 + abs(p)):
                    raise ValueError(f"singular points {p} and {q} coincide")
        if not self.scalar_shifts:
            object.__setattr__(self, "scalar_shifts", tuple(0 for _ in self.points))

    @property
    def n(self) -> int:
        return len(self.points)

    def residue(self, q):
        for p, b in zip(self.points, self.residues):
            if abs(p - q) <= 1e-12 * (1 + abs(q)):
                return b
        raise KeyError(q)

    def residue_at_infinity(self):
        acc = [[0] * self.rank for _ in range(self.rank)]
        for b in self.residues:
            acc = mat_add(acc, mat_scale(b, -1))
        return acc

    def irregular_derivative(self, y):
        acc = 0
        for k in range(len(self.irregular) - 1, 0, -1):
            acc = acc * y + k * self.irregular[k]
        return acc

    def irregular_value(self, y):
        acc = 0
        for c in reversed(self.irregular):
            acc = acc * y + c
        return acc

    @property
    def irregular_degree(self) -> int:
        for k in range(len(self.irregular) - 1, -1, -1):
            if self.irregular[k] != 0:
                return k
        return 0

    def matrix(self, y):
        """Connection matrix A(y) (coefficient of dy)."""
        a = [[0] * self.rank for _ in range(self.rank)]
        for p, b in zip(self.points, self.residues):
            a = mat_add(a, mat_scale(b, 1 / (y - p)))
        fprime = self.irregular_derivative(y)
        if fprime != 0:
            a = mat_add(a, [[fprime if i == j else 0 for j in range(self.rank)] for i in range(self.rank)])
        return a

    def traces(self) -> list:
        return [trace(b) for b in self.residues]

    def residue_sum_defect(self) -> float:
        """|sum of finite residues + residue at infinity| (zero by construction)."""
        tot = self.residue_at_infinity()
        for b in self.residues:
            tot = mat_add(tot, b)
        return float(max(abs(v) for row in tot for v in row))

    def to_json(self) -> dict:
        from .report import cjson

        return {
            "label": self.label,
            "rank": self.rank,
            "frame": self.frame,
            "irregular": [cjson(c) for c in self.irregular],
            "points": [
                {
                    "point": cjson(p),
                    "residue": [[cjson(v) for v in row] for row in b],
                    "eigenvalues": [cjson(e) for e in eigenvalues(b, self.ctx)],
                }
                for p, b in zip(self.points, self.residues)
            ],
            "infinity_eigenvalues": [cjson(e) for e in eigenvalues(self.residue_at_infinity(), self.ctx)],
        }


def rank_one(points, exponents, ctx, irregular=(), label="") -> LogConnection:
    """d + sum s_i dx/(x - lam_i) + dF."""
    pts = tuple(cnum(ctx, p) for p in points)
    return LogConnection(1, pts, tuple([[s]] for s in exponents), ctx, tuple(irregular),
                         label=label or "rank-1", scalar_shifts=tuple(exponents))


def pushforward_legendre(cd: CriticalData) -> tuple[LogConnection, LogConnection]:
    """Split pi_*(O_U, d + dy) = (O, d + dy) + (d + dy) (x) (V, nabla').

    Returns the rank-1 summand d + dy and the rank-2 connection nabla' on the
    trace-zero part, in the frame (v1, v2)."""
    ctx = cd.ctx
    from .transport import FiberModel

    form = PushforwardForm(cd)
    points = tuple(cd.singular_points)
    residues = tuple(form.residue(q) for q in points)
    rank1 = LogConnection(1, (), (), ctx, (ctx.mpf(0), ctx.mpf(1)), label="d+dy")
    rank2 = LogConnection(2, points, residues, ctx, (), frame="v1,v2", fiber=FiberModel(cd, form),
                          label="nabla'")
    return rank1, rank2


class AdmissibilityError(ValueError):
    pass


def twist_by_divisor(conn: LogConnection, cd: CriticalData) -> LogConnection:
    """Tensor with (O(-D), d + varpi): add the identity to the residue at each p in D."""
    if cd.exceptional:
        raise ValueError("the exceptional pushforward is admissible already; no twist")
    ctx = conn.ctx
    divisor = cd.singular_points
    points, residues, shifts = list(conn.points), list(conn.residues), list(conn.scalar_shifts)
    for p in divisor:
        for k, q in enumerate(points):
            if abs(q - p) <= 1e-12 * (1 + abs(p)):
                residues[k] = mat_add(residues[k], identity(conn.rank, ctx))
                shifts[k] = shifts[k] + 1
                break
        else:
            points.append(p)
            residues.append(identity(conn.rank, ctx))
            shifts.append(1)
    return replace(conn, points=tuple(points), residues=tuple(residues), scalar_shifts=tuple(shifts),
                   label=f"{conn.label} (x) (d+varpi)")


def tensor_exponential(conn: LogConnection, coefficients=(0, 1)) -> LogConnection:
    """(d + dF) (x) conn for F = sum a_k y^k (default F = y)."""
    ctx = conn.ctx
    old = list(conn.irregular) + [0] * max(0, len(coefficients) - len(conn.irregular))
    new = [old[k] + (coefficients[k] if k < len(coefficients) else 0) for k in range(len(old))]
    return replace(conn, irregular=tuple(ctx.mpf(0) + c for c in new), label=f"(d+dF) (x) {conn.label}")


def check_regularization_index(m: int, cd: CriticalData | None = None) -> int:
    if int(m) != m or m < 2:
        raise ValueError(f"regularisation index must be an integer >= 2, got {m}")
    if cd is not None:
        for c in (cd.c1, cd.c2):
            if abs(m * m - c) < 1e-12 * m * m:
                raise ValueError(f"m^2 = {m * m} coincides with a critical value")
    return int(m)


def regularize(conn: LogConnection, m: int, cd: CriticalData | None = None) -> LogConnection:
    """Replace the exponential factor e^y by (1 + y/m)^m: drop F = y and add the
    point -m with residue (m+1) Id."""
    m = check_regularization_index(m, cd)
    deg = conn.irregular_degree
    if deg != 1 or conn.irregular[1] != 1:
        raise ValueError("regularize expects the irregular part F = y")
    ctx = conn.ctx
    q = cnum(ctx, -m)
    for p in conn.points:
        if abs(p - q) < 1e-12 * m:
            raise ValueError("-m collides with an existing singular point")
    return replace(
        conn,
        points=conn.points + (q,),
        residues=conn.residues + (identity(conn.rank, ctx, m + 1),),
        scalar_shifts=conn.scalar_shifts + (m + 1,),
        irregular=(),
        label=f"{conn.label} regularised at m={m}",
    )


@dataclass(frozen=True)
class PointAdmissibility:
    point: object
    eigenvalues: list
    positive: bool
    integer_difference: bool
    small: bool


@dataclass(frozen=True)
class AdmissibilityReport:
    points: list
    infinity: PointAdmissibility

    @property
    def admissible(self) -> bool:
        return all(p.positive and not p.integer_difference for p in self.points)

    def as_dict(self) -> dict:
        from .report import cjson

        def one(p):
            return {"point": cjson(p.point) if p.point != "inf" else "inf",
                    "eigenvalues": [cjson(e) for e in p.eigenvalues],
                    "positive": p.positive, "integer_difference": p.integer_difference, "small": p.small}

        return {"admissible": self.admissible, "points": [one(p) for p in self.points],
                "infinity": one(self.infinity)}


def _point_report(point, mat, ctx, tol=1e-9, at_infinity=False) -> PointAdmissibility:
    eig = eigenvalues(mat, ctx)
    probe = [-e for e in eig] if at_infinity else eig
    positive = all(float(ctx.re(e)) > tol for e in probe)
    intdiff = False
    for i in range(len(eig)):
        for j in range(i + 1, len(eig)):
            d = eig[i] - eig[j]
            k = round(float(ctx.re(d)))
            if k != 0 and abs(d - k) < tol:
                intdiff = True
    small = not any(abs(float(ctx.im(e))) < tol and float(ctx.re(e)) <= tol and
                    abs(float(ctx.re(e)) - round(float(ctx.re(e)))) < tol for e in eig)
    return PointAdmissibility(point, eig, positive, intdiff, small)


def admissibility(conn: LogConnection) -> AdmissibilityReport:
    """Eigenvalue conditions of the product formula at every finite pole and at infinity.

    ``positive``: all eigenvalues have positive real part (at infinity: those of -Res).
    ``integer_difference``: two eigenvalues differ by a non-zero integer.
    ``small``: no eigenvalue is a non-positive integer.
    """
    ctx = conn.ctx
    pts = [_point_report(p, b, ctx) for p, b in zip(conn.points, conn.residues)]
    inf = _point_report("inf", conn.residue_at_infinity(), ctx, at_infinity=True)
    return AdmissibilityReport(pts, inf)
