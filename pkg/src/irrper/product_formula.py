"""Closed-form side: tame symbols, Gamma factors, the regular product formula,
the Vandermonde basis change, the rank-1 Selberg-type determinant and the
rank-1 irregular determinant.

Large values are handled through complex logarithms: functions named
``log_*`` return a logarithm (any branch), the plain versions exponentiate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .connection import AdmissibilityError, LogConnection, admissibility, eigenvalues, trace
from .curve import CriticalData
from .numeric import gamma, is_double, lanczos_loggamma
from .paths import Arc, DecayRay, PathSpec, Segment


@dataclass(frozen=True)
class SymbolValue:
    value: complex
    path_label: str
    log: complex = None

    def __post_init__(self):
        if self.value == 0:
            raise ArithmeticError("tame symbol vanished")


def log_gamma(ctx, z):
    """log Gamma(z); the branch only matters modulo 2 pi i."""
    if is_double(ctx):
        z = complex(z)
        if z.real >= 0.5:
            return lanczos_loggamma(z)
        return complex(ctx.log(gamma(ctx, z)))
    return ctx.loggamma(z)


def continued_logs(ctx, points, path: PathSpec | None, start=None, end=None, skip=()):
    """log(z - q) at the end of ``path`` for every q (except indices in ``skip``),
    continued from the principal branch at the path start.

    Without a path the principal logarithm at ``end`` is returned.
    """
    if path is None:
        return [None if i in skip else ctx.log(end - q) for i, q in enumerate(points)]
    z = path.start
    logs = [None if i in skip else ctx.log(z - q) for i, q in enumerate(points)]
    for piece in path.elementary(math.pi / 16):
        if isinstance(piece, DecayRay):
            raise ValueError("continued_logs needs a finite path")
        znew = piece.b if isinstance(piece, Segment) else piece.end
        for i, q in enumerate(points):
            if i in skip:
                continue
            logs[i] = logs[i] + ctx.log((znew - q) / (z - q))
        z = znew
    return logs


def _traces(conn: LogConnection):
    return [trace(b) for b in conn.residues]


def log_tame_symbol(conn: LogConnection, index, path: PathSpec | None = None):
    """log of (nabla, y - q_i) along ``path`` (a path from the base point to q_i),
    or of (nabla, 1/y) when ``index == "inf"``.
    """
    ctx = conn.ctx
    b = _traces(conn)
    pts = list(conn.points)
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if p == q:
                raise ValueError("coincident singular points")
    if index == "inf":
        if path is None:
            return ctx.mpf(0) * 1j
        finite = PathSpec(tuple(p for p in path.pieces if not isinstance(p, DecayRay)))
        far = finite.end
        logs = continued_logs(ctx, pts, finite)
        lx = ctx.log(far)
        acc = 0
        for bj, lj, q in zip(b, logs, pts):
            k = ctx.nint(ctx.im(lj - lx - ctx.log(1 - q / far)) / (2 * ctx.pi))
            acc = acc + bj * 2j * ctx.pi * k
        return acc
    i = index
    if path is None:
        logs = continued_logs(ctx, pts, None, end=pts[i], skip=(i,))
    else:
        if abs(path.end - pts[i]) > 1e-12 * (1 + abs(pts[i])):
            raise ValueError("tame-symbol path must end at the singular point")
        logs = continued_logs(ctx, pts, path, skip=(i,))
    acc = 0
    for j, (bj, lj) in enumerate(zip(b, logs)):
        if j != i and bj != 0:
            acc = acc + bj * lj
    return acc + 0j if is_double(ctx) else acc


def tame_symbol(conn: LogConnection, index, path: PathSpec | None = None) -> SymbolValue:
    lg = log_tame_symbol(conn, index, path)
    label = path.label if path is not None else "principal"
    return SymbolValue(conn.ctx.exp(lg), label, lg)


def log_gamma_factor(conn: LogConnection, index):
    ctx = conn.ctx
    if index == "inf":
        mat = [[-v for v in row] for row in conn.residue_at_infinity()]
    else:
        mat = conn.residues[index]
    eig = eigenvalues(mat, ctx)
    for e in eig:
        if ctx.re(e) <= 0:
            raise AdmissibilityError(f"eigenvalue {e} has non-positive real part at {index}")
    return sum(log_gamma(ctx, e) for e in eig)


def gamma_factor(conn: LogConnection, index):
    """prod Gamma(eigenvalues of Res) (finite points) or of -Res_inf at infinity."""
    return conn.ctx.exp(log_gamma_factor(conn, index))


def gamma_of_eigenvalues(ctx, eigs):
    acc = 1
    for e in eigs:
        acc = acc * gamma(ctx, e)
    return acc


def log_regular_period_det(conn: LogConnection, paths, infinity_path: PathSpec | None = None, check=True):
    """log of the product formula
    prod_i T_i * T_inf^-1 * prod_i Gamma_i * Gamma_inf^-1 (omega-basis, D-normalised)."""
    if check:
        rep = admissibility(conn)
        bad = [p for p in rep.points if not p.positive]
        if bad or any(float(conn.ctx.re(e)) >= 0 for e in rep.infinity.eigenvalues):
            raise AdmissibilityError("residue eigenvalues violate positivity")
    if len(paths) != conn.n:
        raise ValueError("one path per singular point")
    acc = 0
    for i, path in enumerate(paths):
        acc = acc + log_tame_symbol(conn, i, path) + log_gamma_factor(conn, i)
    acc = acc - log_tame_symbol(conn, "inf", infinity_path) - log_gamma_factor(conn, "inf")
    return acc


def regular_period_det(conn: LogConnection, paths, infinity_path=None, check=True):
    return conn.ctx.exp(log_regular_period_det(conn, paths, infinity_path, check))


def vandermonde(points, rank: int = 1):
    """(prod_{i<j} (l_i - l_j))^rank."""
    acc = 1
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = pts[i] - pts[j]
            if d == 0:
                raise ValueError("repeated points in Vandermonde determinant")
            acc = acc * d
    return acc**rank


def vandermonde_correction(points, rank: int = 1):
    return vandermonde(points, rank)


def selberg_rank1_det(ctx, s, points, branch=None):
    """Gamma(s_1)..Gamma(s_n)/Gamma(s) prod_{i<j}(l_j - l_i) prod_i prod_{j!=i} (l_j - l_i)^{s_i - 1}.

    ``branch(j, i)`` returns log(l_j - l_i) continued along the path to l_j;
    the default is the principal logarithm.
    """
    n = len(points)
    for sv in s:
        if ctx.re(sv) <= 0:
            raise ValueError("exponents need positive real part")
    if branch is None:
        def branch(j, i):
            return ctx.log(points[j] - points[i])
    acc = 0
    for sv in s:
        acc = acc + log_gamma(ctx, sv)
    acc = acc - log_gamma(ctx, sum(s))
    prod = 1
    for i in range(n):
        for j in range(i + 1, n):
            prod = prod * (points[j] - points[i])
    for i in range(n):
        for j in range(n):
            if j != i:
                acc = acc + (s[i] - 1) * branch(j, i)
    return ctx.exp(acc) * prod


@dataclass(frozen=True)
class IrregularRank1Spec:
    coefficients: tuple  # a_0..a_d of F
    exponents: tuple
    points: tuple

    def __post_init__(self):
        if len(self.exponents) != len(self.points):
            raise ValueError("one exponent per point")
        for sv in self.exponents:
            if complex(sv).real <= 0:
                raise ValueError("exponents need positive real part")

    @property
    def degree(self) -> int:
        for k in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[k] != 0:
                return k
        return 0

    @property
    def s(self):
        return sum(self.exponents)

    def F(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc


def irregular_rank1_det(ctx, spec: IrregularRank1Spec, branch=None):
    """(2pi)^((d-1)/2) prod Gamma(s_i) (d a_d)^(-s-(d-1)/2) (-1)^(ds + d(d-1)/4)
    prod_i prod_{j!=i} (l_i - l_j)^(s_i - 1) prod_{i<j}(l_j - l_i)
    prod_i exp F(l_i) prod_{F'(u)=0} exp F(u), principal branches by default."""
    d = spec.degree
    if d == 0:
        raise ValueError("F of degree 0: use the regular product formula")
    a_d = spec.coefficients[d]
    s = spec.s
    pts = list(spec.points)
    if branch is None:
        def branch(i, j):
            return ctx.log(pts[i] - pts[j])
    acc = (ctx.mpf(d - 1) / 2) * ctx.log(2 * ctx.pi)
    for sv in spec.exponents:
        acc = acc + log_gamma(ctx, sv)
    acc = acc + (-s - ctx.mpf(d - 1) / 2) * ctx.log(d * a_d)
    acc = acc + 1j * ctx.pi * (d * s + ctx.mpf(d * (d - 1)) / 4)
    n = len(pts)
    for i in range(n):
        for j in range(n):
            if j != i:
                acc = acc + (spec.exponents[i] - 1) * branch(i, j)
    for x in pts:
        acc = acc + spec.F(x)
    if d >= 2:
        deriv = [k * spec.coefficients[k] for k in range(1, d + 1)]
        for u in ctx.polyroots(list(reversed(deriv))):
            acc = acc + spec.F(u)
    prod = 1
    for i in range(n):
        for j in range(i + 1, n):
            prod = prod * (pts[j] - pts[i])
    return ctx.exp(acc) * prod


# ---------------------------------------------------------------------------
# Printed closed forms for the regularised connection (golden formulas)
# ---------------------------------------------------------------------------

def _pow(ctx, z, e):
    return ctx.exp(e * ctx.log(z))


def golden_tame_table(cd: CriticalData, m: int) -> dict:
    """The six printed tame symbols of the regularised connection (principal powers)."""
    ctx = cd.ctx
    s1, s2, c1, c2 = cd.s1, cd.s2, cd.c1, cd.c2
    h = ctx.mpf(5) / 2
    e = 2 * (m + 1)
    return {
        "-s1": _pow(ctx, 2 * s1, h) * _pow(ctx, c1 - c2, h) * (s1 + m) ** e,
        "s1": _pow(ctx, -2 * s1, h) * _pow(ctx, c1 - c2, h) * (-s1 + m) ** e,
        "-s2": _pow(ctx, 2 * s2, h) * _pow(ctx, c2 - c1, h) * (s2 + m) ** e,
        "s2": _pow(ctx, -2 * s2, h) * _pow(ctx, c2 - c1, h) * (-s2 + m) ** e,
        "-m": _pow(ctx, m * m - c1, h) * _pow(ctx, m * m - c2, h),
        "inf": ctx.mpf(1),
    }


def log_golden_D(cd: CriticalData, m: int):
    """log of the printed D_(m) = 2^6 pi^2 c1^(5/2) c2^(5/2) (c1 - c2)
    (m^2-c1)^(2(m+1)+5/2) (m^2-c2)^(2(m+1)+5/2) Gamma(m+1)^2 / (Gamma(m+1+14/3) Gamma(m+1+16/3))."""
    ctx = cd.ctx
    c1, c2 = cd.c1, cd.c2
    h = ctx.mpf(5) / 2
    e = 2 * (m + 1) + h
    acc = 6 * ctx.log(2) + 2 * ctx.log(ctx.pi) + h * ctx.log(c1) + h * ctx.log(c2) + ctx.log(c1 - c2)
    acc = acc + e * ctx.log(m * m - c1) + e * ctx.log(m * m - c2)
    acc = acc + 2 * log_gamma(ctx, m + 1)
    acc = acc - log_gamma(ctx, m + 1 + ctx.mpf(14) / 3) - log_gamma(ctx, m + 1 + ctx.mpf(16) / 3)
    return acc


def golden_delta(cd: CriticalData, m: int):
    """The printed Vandermonde value -4 s1 s2 (c2 - c1)^2 (m^2 - c1)(m^2 - c2)."""
    c1, c2 = cd.c1, cd.c2
    return -4 * cd.s1 * cd.s2 * (c2 - c1) ** 2 * (m * m - c1) * (m * m - c2)


def golden_delta_sigma(cd: CriticalData):
    return 4 * cd.s1 * cd.s2 * (cd.c2 - cd.c1) ** 2


def golden_rank1_pushforward(cd: CriticalData):
    """Printed period of d + dy + varpi: 4 s1 s2 (c1 - c2)^2."""
    return 4 * cd.s1 * cd.s2 * (cd.c1 - cd.c2) ** 2
