"""Period matrices by quadrature, the regularised approximation sequence with
extrapolation, and the direct 4x4 period matrix on the curve itself."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import linalg
from .connection import (
    LogConnection,
    check_regularization_index,
    eigenvalues,
    pushforward_legendre,
    regularize,
    tensor_exponential,
    trace,
    twist_by_divisor,
)
from .curve import CriticalData
from .numeric import cnum, get_context, is_double, precision_name
from .paths import (
    Arc,
    DecayRay,
    PathSpec,
    RegularPoint,
    Segment,
    SingularPoint,
    detour_radius,
    path_to_point,
    straight_with_detours,
)
from .product_formula import (
    golden_delta,
    golden_rank1_pushforward,
    log_gamma,
    log_golden_D,
    log_regular_period_det,
    vandermonde,
)
from .quadrature import QuadratureSettings, integrate
from .transport import FiberTracker, LogTracker, inv2, mul2


class ConvergenceFailure(RuntimeError):
    """The approximation sequence or a quadrature did not converge."""


# ---------------------------------------------------------------------------
# Form bases and period matrices on the line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormBasis:
    """omega_i = (1/(y-l_i) - 1/(y-l_{i+1})) dy or eta_i = y^(i-1) dy / prod (y - l_k), i < n."""

    kind: str
    points: tuple

    def __post_init__(self):
        if self.kind not in ("omega", "eta"):
            raise ValueError(self.kind)

    @property
    def size(self) -> int:
        return len(self.points) - 1

    def values(self, y, diffs) -> list:
        n = len(self.points)
        if self.kind == "omega":
            inv = [1 / d for d in diffs]
            return [inv[i] - inv[i + 1] for i in range(n - 1)]
        den = 1
        for d in diffs:
            den = den * d
        out, p = [], 1 / den
        for _ in range(n - 1):
            out.append(p)
            p = p * y
        return out

    @property
    def labels(self) -> list:
        return [f"{self.kind}_{i + 1}" for i in range(self.size)]


class LineIntegrand:
    """<e_a, Sol(nabla*)(e*_b)> * form_i along a path starting at the base point.

    The dual solution is scalar(y) * V(y) V(p)^-1 for connections with a fibre
    model (rank 2) and scalar(y) for rank 1, where scalar carries the identity
    parts of the residues and exp(F).
    """

    def __init__(self, conn: LogConnection, forms: FormBasis, base, base_tracker=None):
        self.conn = conn
        self.forms = forms
        self.base = base
        self.ctx = conn.ctx
        self.tracker = base_tracker
        if conn.rank == 2:
            if conn.fiber is None:
                raise ValueError("rank-2 quadrature needs the fibre model")
            if self.tracker is None:
                self.tracker = conn.fiber.tracker_at(base)
            self.vp_inv = inv2(self.tracker.frame())

    def begin(self, path):
        logs = LogTracker(self.ctx, self.conn.points, path.start)
        fib = self.tracker.copy() if self.tracker is not None else None
        return logs, fib

    def _scalar(self, logs: LogTracker, y):
        acc = 0
        for s, lg in zip(self.conn.scalar_shifts, logs.logs):
            if s != 0:
                acc = acc + s * lg
        if self.conn.irregular:
            acc = acc + self.conn.irregular_value(y)
        return self.ctx.exp(acc)

    def evaluator(self, piece, state):
        logs0, fib0 = state
        conn = self.conn

        def ev(nodes):
            order = sorted(range(len(nodes)), key=lambda k: nodes[k].s)
            logs = logs0.copy()
            fib = fib0.copy() if fib0 is not None else None
            out = [None] * len(nodes)
            for k in order:
                nd = nodes[k]
                logs.advance(nd.z, nd.anchor, nd.delta)
                sc = self._scalar(logs, nd.z)
                fv = self.forms.values(nd.z, logs.diffs)
                if fib is None:
                    out[k] = [f * sc for f in fv]
                    continue
                fib.advance(nd.z, nd.anchor, nd.delta)
                sol = mul2(fib.frame(), self.vp_inv)
                row = []
                for f in fv:
                    fs = f * sc
                    row.extend([fs * sol[0][0], fs * sol[0][1], fs * sol[1][0], fs * sol[1][1]])
                out[k] = row
            return out

        return ev

    def advance(self, piece, state):
        logs, fib = state
        logs = logs.copy()
        fib = fib.copy() if fib is not None else None
        end = piece.b if isinstance(piece, Segment) else piece.end
        logs.advance(end)
        if fib is not None:
            fib.advance(end)
        return logs, fib


@dataclass
class PeriodMatrix:
    entries: list
    row_labels: list
    col_labels: list
    errors: list
    det: object = None
    det_error: float = 0.0
    normalization: object = 1
    notes: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.entries)

    def normalized_det(self):
        return self.det * self.normalization

    def permuted_columns(self, i, j) -> "PeriodMatrix":
        ent = [list(r) for r in self.entries]
        err = [list(r) for r in self.errors]
        for r, e in zip(ent, err):
            r[i], r[j] = r[j], r[i]
            e[i], e[j] = e[j], e[i]
        cols = list(self.col_labels)
        cols[i], cols[j] = cols[j], cols[i]
        return make_period_matrix(ent, self.row_labels, cols, err, self.normalization)

    def as_dict(self) -> dict:
        from .report import cjson

        return {
            "rows": self.row_labels,
            "cols": self.col_labels,
            "entries": [[cjson(v) for v in row] for row in self.entries],
            "errors": [[float(e) for e in row] for row in self.errors],
            "det": cjson(self.det),
            "det_error": self.det_error,
            "normalization": cjson(self.normalization),
            "notes": self.notes,
        }


def make_period_matrix(entries, rows, cols, errors, normalization=1, notes=None) -> PeriodMatrix:
    det = linalg.lu_det(entries)
    try:
        derr = linalg.det_error_bound(entries, errors)
    except ZeroDivisionError:
        derr = math.inf
    return PeriodMatrix(entries, rows, cols, errors, det, derr, normalization, notes or {})


def line_paths(conn: LogConnection, base, radius=None) -> list:
    """Straight paths (with detours) from the base point to every singular point."""
    if radius is None:
        radius = min([detour_radius(conn.points)] + [0.5 * float(abs(base - q)) for q in conn.points])
    out = []
    for i, q in enumerate(conn.points):
        eig = eigenvalues(conn.residues[i], conn.ctx)
        expo = min((complex(e) for e in eig), key=lambda z: z.real)
        out.append(path_to_point(base, q, conn.points, conn.ctx, expo, label=f"gamma_{i + 1}", radius=radius))
    return out


def fiber_normalization(conn: LogConnection, base):
    """kappa = exp(sum_q tr(B_q - shift_q I) Log(p - q)): turns Phi(p) = I into the
    normalisation det Sol(y) = prod (y - q)^{tr B_q} used by the product formula."""
    ctx = conn.ctx
    if conn.fiber is None:
        return ctx.mpf(1)
    acc = 0
    for q, b, s in zip(conn.points, conn.residues, conn.scalar_shifts):
        t = trace(b) - conn.rank * s
        acc = acc + t * ctx.log(base - q)
    return ctx.exp(acc)


def path_integrals(conn, forms, paths, base, settings):
    integrand = LineIntegrand(conn, forms, base)
    vals, errs = [], []
    for path in paths:
        v, e = integrate(integrand, path, settings, scalar=False)
        vals.append(v)
        errs.append(e)
    return vals, errs


def period_matrix_regular(conn: LogConnection, forms: FormBasis, paths=None, base=None,
                          settings: QuadratureSettings | None = None) -> PeriodMatrix:
    """Quadrature period matrix for the cycles delta_j = gamma_{j+1} - gamma_j.

    Rows are (form i, frame vector a), columns (cycle j, dual vector b).
    ``normalization`` is kappa^(n-1), so ``normalized_det()`` is comparable with
    the product formula.
    """
    ctx = conn.ctx
    settings = settings or QuadratureSettings(precision=precision_name(ctx))
    base = cnum(ctx, 0) if base is None else cnum(ctx, base)
    paths = paths or line_paths(conn, base)
    r = conn.rank
    vals, errs = path_integrals(conn, forms, paths, base, settings)
    n = len(paths)
    k = forms.size
    rows = [f"{lab}(e{a + 1})" for lab in forms.labels for a in range(r)]
    cols = [f"delta_{j + 1}(e*{b + 1})" for j in range(n - 1) for b in range(r)]
    ent = [[None] * (r * (n - 1)) for _ in range(r * k)]
    err = [[0.0] * (r * (n - 1)) for _ in range(r * k)]
    for i in range(k):
        for a in range(r):
            for j in range(n - 1):
                for b in range(r):
                    idx = i * r * r + a * r + b
                    ent[i * r + a][j * r + b] = vals[j + 1][idx] - vals[j][idx]
                    err[i * r + a][j * r + b] = errs[j + 1] + errs[j]
    kappa = fiber_normalization(conn, base)
    return make_period_matrix(ent, rows, cols, err, kappa ** (n - 1),
                              {"base": str(complex(base)), "paths": [p.label for p in paths]})


# ---------------------------------------------------------------------------
# The regularised connections and the approximation sequence
# ---------------------------------------------------------------------------

def generic_regularized(cd: CriticalData, m: int) -> LogConnection:
    """nabla_(m) = (d + (m+1) dy/(y+m)) (x) (d + varpi) (x) nabla'."""
    _, rank2 = pushforward_legendre(cd)
    twisted = twist_by_divisor(rank2, cd)
    return regularize(tensor_exponential(twisted), m, cd)


def exceptional_regularized(cd: CriticalData, m: int) -> LogConnection:
    _, rank2 = pushforward_legendre(cd)
    return regularize(tensor_exponential(rank2), m, cd)


def engine_log_det(conn: LogConnection, base=None):
    ctx = conn.ctx
    base = cnum(ctx, 0) if base is None else base
    return log_regular_period_det(conn, line_paths(conn, base))


@dataclass
class ApproxRecord:
    m: int
    log_D: object
    delta: object
    P: object
    factors: dict
    golden_log_D: object = None
    golden_delta: object = None

    @property
    def D(self):
        return None

    def as_dict(self) -> dict:
        from .report import cjson

        out = {
            "m": self.m,
            "log_D": cjson(self.log_D),
            "Delta": cjson(self.delta),
            "P": cjson(self.P),
            "factors": {k: cjson(v) for k, v in self.factors.items()},
        }
        if self.golden_log_D is not None:
            out["printed_log_D"] = cjson(self.golden_log_D)
            out["printed_Delta"] = cjson(self.golden_delta)
        return out


@dataclass
class Extrapolation:
    limit: object
    error: float
    order: int
    m0: int | None
    monotone: bool
    residual: float

    def as_dict(self) -> dict:
        from .report import cjson

        return {"limit": cjson(self.limit), "error": self.error, "order": self.order, "m0": self.m0,
                "monotone": self.monotone, "residual": self.residual}


def richardson(ms, values, ctx, max_order: int | None = None) -> Extrapolation:
    """Fit a + b/m + c/m^2 + ... by least squares; the order is chosen where
    successive limits agree best.  The error estimate is the change in the limit
    from the previous order plus the fit residual."""
    n = len(ms)
    if n < 2:
        raise ConvergenceFailure("need at least two values to extrapolate")
    max_order = min(max_order or n - 1, n - 1)
    fits = []
    for order in range(1, max_order + 1):
        rows = [[ctx.mpf(1) / ctx.mpf(m) ** k for k in range(order + 1)] for m in ms]
        coef = linalg.lstsq(rows, list(values))
        res = max(float(abs(sum(c * r for c, r in zip(coef, row)) - v)) for row, v in zip(rows, values))
        fits.append((order, coef[0], res))
    best = None
    for i in range(1, len(fits)):
        order, lim, res = fits[i]
        err = float(abs(lim - fits[i - 1][1])) + res
        if best is None or err < best[1]:
            best = (order, err, lim, res)
    if best is None:
        order, lim, res = fits[0]
        best = (order, float(abs(values[-1] - lim)), lim, res)
    order, err, lim, res = best
    dist = [float(abs(v - lim)) for v in values]
    m0 = None
    for i in range(n):
        if all(dist[j + 1] <= dist[j] for j in range(i, n - 1)):
            m0 = ms[i]
            break
    monotone = m0 is not None and m0 != ms[-1] or n == 1
    return Extrapolation(lim, err, order, m0, monotone, res)


def generic_factors(cd: CriticalData, m: int) -> dict:
    ctx = cd.ctx
    c1, c2 = cd.c1, cd.c2
    lm = ctx.log(m)
    f1 = ctx.exp(-8 * m * lm + 2 * m * ctx.log(m * m - c1) + 2 * m * ctx.log(m * m - c2))
    h = ctx.mpf(5) / 2
    f2 = ctx.exp(-10 * lm + h * ctx.log(m * m - c1) + h * ctx.log(m * m - c2))
    f3 = ctx.exp(10 * lm + 2 * log_gamma(ctx, m + 1) - log_gamma(ctx, m + 1 + ctx.mpf(14) / 3)
                 - log_gamma(ctx, m + 1 + ctx.mpf(16) / 3))
    return {"power": f1, "half_integral": f2, "gamma": f3}


def exceptional_factors(cd: CriticalData, m: int) -> dict:
    ctx = cd.ctx
    c1 = cd.c1
    lm = ctx.log(m)
    g = ctx.gamma(ctx.mpf(1) / 3) ** 2 * ctx.gamma(ctx.mpf(2) / 3) ** 2 if not is_double(ctx) else \
        ctx.exp(2 * log_gamma(ctx, 1 / 3) + 2 * log_gamma(ctx, 2 / 3))
    f1 = ctx.exp(2 * m * ctx.log(m * m - c1) - 4 * m * lm)
    f2 = (m * m - c1) / (m * m)
    f3 = ctx.exp(2 * lm + 2 * log_gamma(ctx, m + 1) - log_gamma(ctx, ctx.mpf(2) / 3 + m + 1)
                 - log_gamma(ctx, ctx.mpf(4) / 3 + m + 1))
    return {"gamma_constant": g, "power": f1, "quadratic": f2, "gamma": f3}


def closed_form_P(cd: CriticalData):
    """Printed limit 4 pi^2 c1^(3/2) c2^(3/2) / (c1 - c2)^3 (principal powers)."""
    ctx = cd.ctx
    h = ctx.mpf(3) / 2
    return 4 * ctx.pi**2 * ctx.exp(h * ctx.log(cd.c1) + h * ctx.log(cd.c2)) / (cd.c1 - cd.c2) ** 3


def engine_limit_P(cd: CriticalData):
    """Limit implied by the product formula: 4 pi^2 (s1 s2)^3 (c1 - c2)^6 up to the sign
    fixed by the path conventions (see ``approx_sequence``)."""
    ctx = cd.ctx
    return 4 * ctx.pi**2 * (cd.s1 * cd.s2) ** 3 * (cd.c1 - cd.c2) ** 6


def approx_sequence(cd: CriticalData, ms, max_order=None, base=None) -> tuple[list, Extrapolation]:
    """P_(m) = m^(-8m) D_(m) / Delta_(m)^2 from the product formula, extrapolated in 1/m."""
    if cd.exceptional:
        raise ValueError("approx_sequence is for the generic case; use exceptional_pipeline")
    ctx = cd.ctx
    ms = sorted(int(m) for m in ms)
    records = []
    for m in ms:
        check_regularization_index(m, cd)
        conn = generic_regularized(cd, m)
        logd = engine_log_det(conn, base)
        delta = vandermonde(conn.points, 1)
        logp = -8 * m * ctx.log(m) + logd - 2 * ctx.log(delta)
        records.append(ApproxRecord(m, logd, delta, ctx.exp(logp), generic_factors(cd, m),
                                    log_golden_D(cd, m), golden_delta(cd, m)))
    ext = richardson(ms, [r.P for r in records], ctx, max_order)
    return records, ext


def exceptional_pipeline(cd: CriticalData, ms, max_order=None, base=None) -> dict:
    """2x2-block analogue: P_(m) = m^(-4m) D_(m) / Delta_(m)^2 for the exceptional curve."""
    if not cd.exceptional:
        raise ValueError("exceptional_pipeline needs lambda^2 - lambda + 1 = 0")
    ctx = cd.ctx
    ms = sorted(int(m) for m in ms)
    records = []
    for m in ms:
        check_regularization_index(m, cd)
        conn = exceptional_regularized(cd, m)
        logd = engine_log_det(conn, base)
        delta = vandermonde(conn.points, 1)
        logp = -4 * m * ctx.log(m) + logd - 2 * ctx.log(delta)
        records.append(ApproxRecord(m, logd, delta, ctx.exp(logp), exceptional_factors(cd, m)))
    ext = richardson(ms, [r.P for r in records], ctx, max_order)
    target = 4 * ctx.pi**2 / 3
    conn = exceptional_regularized(cd, ms[-1])
    paths = line_paths(conn, cnum(ctx, 0) if base is None else base)
    from .product_formula import log_tame_symbol

    tame_minus_m = ctx.exp(log_tame_symbol(conn, conn.n - 1, paths[-1]))
    return {
        "records": records,
        "extrapolation": ext,
        "target": target,
        "tame_at_minus_m": tame_minus_m,
        "printed_tame_at_minus_m": ms[-1] ** 2 - cd.c1,
        "regularization": "(m+1) dy/(y+m)",
    }


def pushforward_period(cd: CriticalData) -> dict:
    """Period of the twisted pushforward: rank-1 part times the rank-2 limit.

    ``printed`` is 16 pi^2 c1^2 c2^2 / (c1 - c2); ``engine`` uses the limit implied
    by the product formula."""
    if cd.exceptional:
        raise ValueError("generic case only")
    ctx = cd.ctx
    rank1 = golden_rank1_pushforward(cd)
    printed = 16 * ctx.pi**2 * (cd.c1 * cd.c2) ** 2 / (cd.c1 - cd.c2)
    return {
        "rank1": rank1,
        "printed": printed,
        "product_of_printed": rank1 * closed_form_P(cd),
        "engine": rank1 * engine_limit_P(cd),
    }


# ---------------------------------------------------------------------------
# Direct period matrix on the curve
# ---------------------------------------------------------------------------

CURVE_FORMS = ("dx/y", "x dx/y", "dx", "x dx")


def _curve_form_values(x, y):
    return [1 / y, x / y, 1, x]


def exact_form_generators():
    """g(x, y) with partial derivatives, for the exact forms e^y (dg + g dy)."""
    return [
        ("1", lambda x, y: 1, lambda x, y: 0, lambda x, y: 0),
        ("x", lambda x, y: x, lambda x, y: 1, lambda x, y: 0),
        ("y", lambda x, y: y, lambda x, y: 0, lambda x, y: 1),
        ("xy", lambda x, y: x * y, lambda x, y: y, lambda x, y: x),
        ("x^2", lambda x, y: x * x, lambda x, y: 2 * x, lambda x, y: 0),
        ("x^2 y", lambda x, y: x * x * y, lambda x, y: 2 * x * y, lambda x, y: x * x),
        ("y^2", lambda x, y: y * y, lambda x, y: 0, lambda x, y: 2 * y),
        ("x^3", lambda x, y: x**3, lambda x, y: 3 * x * x, lambda x, y: 0),
    ]


class CurveIntegrand:
    """e^y * (forms) dx on one sheet, y = sign * exp(1/2 sum log(x - r_k)).

    For ``loop`` cycles the integrand is g(x, y) - g(x, -y): the closed loop
    around two branch points collapsed onto the path between them.
    """

    def __init__(self, cd: CriticalData, sign=1, loop=False, exact=False):
        self.cd = cd
        self.ctx = cd.ctx
        lam = cd.lam
        self.roots = [lam * 0, lam * 0 + 1, lam]
        self.sign = sign
        self.loop = loop
        self.exact = exact
        self.gens = exact_form_generators()

    def _values(self, x, y):
        ctx = self.ctx
        ey = ctx.exp(y)
        if not self.exact:
            return [ey * v for v in _curve_form_values(x, y)]
        lam = self.cd.lam
        dydx = ((3 * x - 2 * (lam + 1)) * x + lam) / (2 * y)
        out = []
        for _, g, gx, gy in self.gens:
            out.append(ey * (gx(x, y) + gy(x, y) * dydx + g(x, y) * dydx))
        return out

    def begin(self, path):
        start = path.start
        return _CurveLogs(self.ctx, self.roots, start)

    def evaluator(self, piece, state):
        def ev(nodes):
            order = sorted(range(len(nodes)), key=lambda k: nodes[k].s)
            logs = state.copy()
            out = [None] * len(nodes)
            for k in order:
                nd = nodes[k]
                logs.advance(nd.z, nd.anchor, nd.delta)
                y = self.sign * self.ctx.exp(sum(logs.logs) / 2)
                vals = self._values(nd.z, y)
                if self.loop:
                    other = self._values(nd.z, -y)
                    vals = [a - b for a, b in zip(vals, other)]
                out[k] = vals
            return out

        return ev

    def advance(self, piece, state):
        logs = state.copy()
        end = piece.b if isinstance(piece, Segment) else piece.end
        logs.advance(end)
        return logs


class _CurveLogs(LogTracker):
    """Continued logs that may start exactly at one of the roots (a branch point);
    that log is initialised at the first node from the exact offset."""

    def __init__(self, ctx, points, start, logs=None, diffs=None):
        if logs is None:
            diffs = [start - q for q in points]
            logs = [ctx.log(d) if d != 0 else None for d in diffs]
        super().__init__(ctx, points, start, logs, diffs)

    def copy(self):
        return _CurveLogs(self.ctx, self.points, self.y, self.logs, self.diffs)

    def advance(self, y, anchor=None, delta=None):
        ctx = self.ctx
        logs, diffs = [], []
        for q, lg, old in zip(self.points, self.logs, self.diffs):
            diff = delta if (delta is not None and anchor == q) else y - q
            if lg is None:
                logs.append(ctx.log(diff))
            else:
                logs.append(lg + ctx.log(diff / old))
            diffs.append(diff)
        self.logs, self.diffs = logs, diffs
        self.y = y
        return self


class ChainIntegrand:
    """e^y * form along a y-plane path, x = x_k(y) followed by root tracking.

    With x' = dx/dy = 2y / f'(x): dx/y = 2/f' dy, x dx/y = 2x/f' dy, dx = 2y/f' dy,
    x dx = 2xy/f' dy.
    """

    def __init__(self, cd: CriticalData, tracker: FiberTracker, sheet: int, exact=False):
        self.cd = cd
        self.ctx = cd.ctx
        self.tracker = tracker
        self.sheet = sheet
        self.exact = exact
        self.gens = exact_form_generators()

    def _values(self, x, y):
        ctx = self.ctx
        lam = self.cd.lam
        fp = (3 * x - 2 * (lam + 1)) * x + lam
        dxdy = 2 * y / fp
        ey = ctx.exp(y)
        if not self.exact:
            return [ey * v * dxdy for v in _curve_form_values(x, y)]
        return [ey * (gx(x, y) * dxdy + gy(x, y) + g(x, y)) for _, g, gx, gy in self.gens]

    def begin(self, path):
        return self.tracker.copy()

    def evaluator(self, piece, state):
        def ev(nodes):
            order = sorted(range(len(nodes)), key=lambda k: nodes[k].s)
            tr = state.copy()
            out = [None] * len(nodes)
            for k in order:
                nd = nodes[k]
                tr.advance(nd.z, nd.anchor, nd.delta)
                out[k] = self._values(tr.roots()[self.sheet], nd.z)
            return out

        return ev

    def advance(self, piece, state):
        tr = state.copy()
        end = piece.b if isinstance(piece, Segment) else piece.end
        for sub in (piece.split(math.pi / 16) if isinstance(piece, Arc) else [piece]):
            tr.advance(sub.b if isinstance(sub, Segment) else sub.end)
        return tr


@dataclass(frozen=True)
class CurveCycles:
    """Cycles on U: two collapsed loops and two differences of decay chains.

    The chains start at p = (R, x_k(R)) and follow y = R e^(i theta), theta from 0
    to -pi, pi, 3 pi, then the ray to y = -infinity (tilted by ``tilt``).  One
    turn around every branch value permutes the three sheets cyclically, so the
    three chains end in the three rapid-decay sectors.
    """

    loops: tuple
    chains: tuple
    radius: float
    sheet: int
    start_roots: tuple

    def as_dict(self) -> dict:
        return {"base_y": self.radius, "base_x": {"re": complex(self.start_roots[self.sheet]).real,
                                                   "im": complex(self.start_roots[self.sheet]).imag},
                "loops": [p.as_dict() for p in self.loops], "chains": [p.as_dict() for p in self.chains]}


CHAIN_SWEEPS = (-math.pi, math.pi, 3 * math.pi)


def curve_cycles(cd: CriticalData, radius_factor: float = 1.5, tilt: float = 0.0) -> CurveCycles:
    """gamma_1, gamma_2 around the branch pairs (0, 1), (1, lam); chains eta_1..3 in the y-plane.

    The chain circle has radius ``radius_factor`` times the largest |branch value|
    (at least 1).  ``tilt`` rotates the final rays inside the decay half-plane.
    """
    ctx = cd.ctx
    lam = cd.lam
    roots = [lam * 0, lam * 0 + 1, lam]
    rad = detour_radius(roots)
    loop1 = PathSpec(tuple(straight_with_detours(roots[0], roots[1], roots, ctx, rad)), label="gamma_1")
    loop2 = PathSpec(tuple(straight_with_detours(roots[1], roots[2], roots, ctx, rad)), label="gamma_2")
    big = max([1.0] + [float(abs(q)) for q in cd.singular_points])
    rr = radius_factor * big
    start_roots = tuple(_cubic_roots(cd, cnum(ctx, rr)))
    sheet = max(range(3), key=lambda k: float(ctx.re(start_roots[k])))
    chains = []
    for i, sweep in enumerate(CHAIN_SWEEPS):
        arc = Arc(cnum(ctx, 0), rr, 0.0, sweep + tilt, ctx)
        direction = arc.end / abs(arc.end)
        chains.append(PathSpec((arc, DecayRay(arc.end, direction, rate=0.9 * math.cos(tilt), degree=1.0)),
                               label=f"eta_{i + 1}"))
    return CurveCycles((loop1, loop2), tuple(chains), rr, sheet, start_roots)


def _cubic_roots(cd: CriticalData, y):
    """Roots of x^3 - (lam+1) x^2 + lam x - y^2, polished by Newton in the context."""
    import numpy as np

    lam = cd.lam
    approx = np.roots([1, -complex(lam + 1), complex(lam), -complex(y * y)])
    tr = FiberTracker(cd)
    out = []
    for a in approx:
        x, _ = tr._newton(cnum(cd.ctx, complex(a)), y * y)
        out.append(x)
    return out


def _chain_tracker(cd: CriticalData, cycles: CurveCycles) -> FiberTracker:
    from .transport import _Sheet

    y0 = cnum(cd.ctx, cycles.radius)
    return FiberTracker(cd, y=y0, sheets=[_Sheet(x) for x in cycles.start_roots])


def _curve_integrals(cd, cycles: CurveCycles, settings, exact=False):
    rows, errs = [], []
    for loop in cycles.loops:
        integ = CurveIntegrand(cd, sign=1, loop=True, exact=exact)
        v, e = integrate(integ, loop, settings, scalar=False)
        rows.append(v)
        errs.append(e)
    tracker = _chain_tracker(cd, cycles)
    chain_vals = []
    for ch in cycles.chains:
        integ = ChainIntegrand(cd, tracker, cycles.sheet, exact=exact)
        chain_vals.append(integrate(integ, ch, settings, scalar=False))
    for i in range(2):
        (a, ea), (b, eb) = chain_vals[i + 1], chain_vals[i]
        rows.append([x - y for x, y in zip(a, b)])
        errs.append(ea + eb)
    return rows, errs


def direct_curve_period(cd: CriticalData, settings: QuadratureSettings | None = None,
                        cycles: CurveCycles | None = None) -> PeriodMatrix:
    """4x4 matrix (cycles gamma_1..gamma_4) x (dx/y, x dx/y, dx, x dx) of int e^y omega."""
    if cd.exceptional:
        raise ValueError("direct-curve mode is implemented for the generic case")
    ctx = cd.ctx
    settings = settings or QuadratureSettings(precision=precision_name(ctx))
    cycles = cycles or curve_cycles(cd)
    rows, errs = _curve_integrals(cd, cycles, settings)
    err = [[e] * 4 for e in errs]
    return make_period_matrix(rows, ["gamma_1", "gamma_2", "gamma_3", "gamma_4"], list(CURVE_FORMS), err,
                              1, {"cycles": cycles.as_dict()})


def stokes_residuals(cd: CriticalData, settings=None, cycles=None) -> dict:
    """Pairings of the 4 cycles with e^y (dg + g dy) for the 8 generators g."""
    ctx = cd.ctx
    settings = settings or QuadratureSettings(precision=precision_name(ctx))
    cycles = cycles or curve_cycles(cd)
    rows, errs = _curve_integrals(cd, cycles, settings, exact=True)
    names = [g[0] for g in exact_form_generators()]
    return {"generators": names, "values": rows, "errors": errs,
            "max_abs": max(float(abs(v)) for row in rows for v in row)}


# ---------------------------------------------------------------------------
# Rank-1 oracles
# ---------------------------------------------------------------------------

def rank1_oracles(ctx, exponents, points, base=0, settings: QuadratureSettings | None = None) -> dict:
    """One rank-1 regular connection d + sum s_i dy/(y - l_i) three ways.

    ``engine`` is the product formula, ``selberg`` the Selberg-type closed form
    times Delta (logs continued along the same paths), ``quad`` and ``quad_eta``
    the quadrature determinants in the omega and eta bases.
    """
    from .connection import rank_one
    from .product_formula import continued_logs, regular_period_det, selberg_rank1_det

    conn = rank_one(points, exponents, ctx)
    base = cnum(ctx, base)
    paths = line_paths(conn, base)
    pts = list(conn.points)
    logs = [continued_logs(ctx, pts, paths[j], skip=(j,)) for j in range(len(pts))]
    s = [cnum(ctx, v) for v in exponents]
    delta = vandermonde(pts, 1)
    out = {
        "engine": regular_period_det(conn, paths),
        "selberg": selberg_rank1_det(ctx, s, pts, lambda j, i: logs[j][i]) * delta,
        "delta": delta,
    }
    om = period_matrix_regular(conn, FormBasis("omega", tuple(pts)), paths, base, settings)
    et = period_matrix_regular(conn, FormBasis("eta", tuple(pts)), paths, base, settings)
    out["quad"], out["quad_error"] = om.normalized_det(), om.det_error
    out["quad_eta"], out["quad_eta_error"] = et.normalized_det(), et.det_error
    return out
