"""Double-exponential (tanh-sinh) quadrature along piecewise complex paths.

Each elementary piece is mapped to (-1, 1) and integrated with the tanh-sinh
rule; nodes are generated together with their exact offsets from the nearer
endpoint, so integrands with algebraic endpoint singularities can evaluate
``z - endpoint`` without cancellation.  Decay rays are truncated where a
polynomial-times-exponential envelope drops below the tolerance; the envelope
value of the discarded tail is added to the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numeric import DOUBLE, get_context, is_double, precision_name
from .paths import Arc, DecayRay, PathSpec, Segment


class QuadratureError(RuntimeError):
    """Raised when a piece does not converge within the allowed depth."""


DEFAULT_TOL = {"double": 1e-10, "extended": 1e-25}


@dataclass(frozen=True)
class QuadratureSettings:
    tol: float | None = None
    max_level: int = 10
    min_level: int = 3
    tail_fraction: float = 1e-2
    precision: str | None = None
    strict: bool = True

    def __post_init__(self):
        if self.tol is not None and not (0 < self.tol <= 1e-4):
            raise ValueError(f"tolerance must lie in (0, 1e-4], got {self.tol}")
        if self.max_level < self.min_level:
            raise ValueError("max_level must be >= min_level")

    @property
    def ctx(self):
        return get_context(self.precision)

    @property
    def rtol(self) -> float:
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOL[precision_name(self.ctx)]


@dataclass(frozen=True)
class Node:
    """Quadrature node: z = anchor + delta, with ``s`` the parameter in (0, 1)."""

    s: object
    z: object
    anchor: object
    delta: object
    dz: object  # dz/dt * weight


class _Rule:
    """tanh-sinh abscissae for one precision, cached per level."""

    def __init__(self, ctx, min_offset):
        self.ctx = ctx
        self.min_offset = min_offset
        lo = math.log(-math.log(min_offset) * 2 / math.pi)
        self.tmax = max(lo, 1.0)
        self.cut = -math.log(min_offset)
        self._cache = {}

    def level(self, k):
        """(s_lo, s_hi, weight) for the nodes new at level k (h = 2^-k)."""
        if k in self._cache:
            return self._cache[k]
        ctx = self.ctx
        h = ctx.mpf(1) / 2**k
        nmax = int(self.tmax * 2**k) + 1
        out = []
        half_pi = ctx.pi / 2
        for j in range(-nmax, nmax + 1):
            if k > 0 and j % 2 == 0:
                continue
            t = j * h
            sh = half_pi * ctx.sinh(t)
            if abs(sh) > self.cut:
                continue
            e = ctx.exp(-abs(sh))
            ch = (1 / e + e) / 2
            small = e / (2 * ch)  # (1 - |u|)/2 computed without cancellation
            big = 1 - small
            if small < self.min_offset:
                continue
            w = half_pi * ctx.cosh(t) / (ch * ch) / 2
            s_lo, s_hi = (small, big) if sh < 0 else (big, small)
            out.append((s_lo, s_hi, w))
        self._cache[k] = out
        return out


_RULES = {}


def rule_for(ctx) -> _Rule:
    key = id(ctx), getattr(ctx, "prec", 53)
    if key not in _RULES:
        if is_double(ctx):
            min_off = 1e-290
        else:
            min_off = ctx.mpf(10) ** (-int(8 * ctx.dps))
        _RULES[key] = _Rule(ctx, min_off)
    return _RULES[key]


def _nodes(piece, raw):
    """Map (s_lo, s_hi, w) triples onto a segment or arc."""
    out = []
    if isinstance(piece, Segment):
        a, b = piece.a, piece.b
        d = b - a
        for s_lo, s_hi, w in raw:
            if s_lo <= s_hi:
                delta = d * s_lo
                out.append(Node(s_lo, a + delta, a, delta, d * w))
            else:
                delta = -d * s_hi
                out.append(Node(s_lo, b + delta, b, delta, d * w))
    elif isinstance(piece, Arc):
        for s_lo, s_hi, w in raw:
            z = piece.point(s_lo)
            out.append(Node(s_lo, z, z, 0 * z, piece.derivative(s_lo) * w))
    else:
        raise TypeError(piece)
    return out


def _norm(vec):
    return max((abs(v) for v in vec), default=0)


def tanh_sinh_piece(evaluate, piece, ctx, tol, settings: QuadratureSettings):
    """Integrate a vector-valued integrand over one segment or arc.

    ``evaluate(nodes)`` receives a list of :class:`Node` and returns one value
    vector (list) per node.  Returns (values, error_estimate, levels_used).
    """
    rule = rule_for(ctx)
    total = None
    prev = None
    h = 1
    err = math.inf
    mass = 0.0
    for k in range(settings.max_level + 1):
        nodes = _nodes(piece, rule.level(k))
        vals = evaluate(nodes) if nodes else []
        part = None
        for nd, v in zip(nodes, vals):
            if part is None:
                part = [0] * len(v)
            adz = float(abs(nd.dz))
            for i, vi in enumerate(v):
                part[i] += vi * nd.dz
                mass += float(abs(vi)) * adz
        if total is None:
            total = part or [0]
            h = ctx.mpf(1)
            est = [x * h for x in total]
        else:
            total = [x + y for x, y in zip(total, part)] if part else total
            h = ctx.mpf(1) / 2**k
            est = [x * h for x in total]
        if prev is not None:
            err = float(_norm([x - y for x, y in zip(est, prev)]))
            # relative to the integral of |f| so cancelling integrands still converge
            scale = max(float(_norm(est)), mass * float(h))
            if k >= settings.min_level and err <= tol * max(scale, 1e-300):
                return est, err, k
        prev = est
    if settings.strict:
        raise QuadratureError(f"tanh-sinh did not converge on {piece}: error {err:.3g}")
    return prev, err, settings.max_level


def _ray_length(ray: DecayRay, tol: float) -> tuple[float, float]:
    """Truncation length R and the relative envelope bound of the discarded tail."""
    a = abs(complex(ray.a))
    base = 1 + a

    def env(s):
        return (1 + s / base) ** ray.degree * math.exp(-ray.rate * s)

    r = 1.0
    while env(r) / ray.rate * (1 + ray.degree / max(ray.rate * r, 1e-300)) > tol:
        r *= 1.25
    tail = env(r) / ray.rate * (1 + ray.degree / (ray.rate * r))
    return r, tail


class PointIntegrand:
    """Wrap ``f(z)`` (or ``f(z, anchor, delta)`` when ``offsets``) as a path integrand."""

    def __init__(self, f, offsets: bool = False, size: int | None = None):
        self.f = f
        self.offsets = offsets

    def begin(self, path):
        return None

    def evaluator(self, piece, state):
        f, off = self.f, self.offsets

        def ev(nodes):
            out = []
            for nd in nodes:
                v = f(nd.z, nd.anchor, nd.delta) if off else f(nd.z)
                out.append(list(v) if isinstance(v, (list, tuple)) else [v])
            return out

        return ev

    def advance(self, piece, state):
        return state


def integrate(integrand, path: PathSpec, settings: QuadratureSettings | None = None, scalar=None):
    """Integrate ``integrand`` along ``path``.

    ``integrand`` is either a plain function of z or an object with the
    ``begin/evaluator/advance`` protocol of :class:`PointIntegrand`.
    Returns ``(value, error_estimate)``; value is a scalar when the integrand
    is scalar, otherwise a list.
    """
    settings = settings or QuadratureSettings()
    ctx = settings.ctx
    tol = settings.rtol
    if callable(integrand) and not hasattr(integrand, "evaluator"):
        integrand = PointIntegrand(integrand)
    state = integrand.begin(path)
    total = None
    err = 0.0
    pieces = path.elementary()
    for idx, piece in enumerate(pieces):
        if isinstance(piece, DecayRay):
            probe = integrand.evaluator(Segment(piece.a, piece.a), state)
            head = probe([Node(ctx.mpf(0), piece.a, piece.a, 0 * piece.a, 1)])[0]
            scale = max(float(_norm(head)), 1e-300)
            rlen, tail = _ray_length(piece, tol * settings.tail_fraction)
            end = piece.a + piece.direction * rlen
            seg = Segment(piece.a, end)
            vals, e, _ = tanh_sinh_piece(integrand.evaluator(seg, state), seg, ctx, tol, settings)
            e += 10 * tail * scale
        else:
            vals, e, _ = tanh_sinh_piece(integrand.evaluator(piece, state), piece, ctx, tol, settings)
            if idx + 1 < len(pieces):
                state = integrand.advance(piece, state)
        total = vals if total is None else [x + y for x, y in zip(total, vals)]
        err += e
    if scalar is None:
        scalar = isinstance(integrand, PointIntegrand) and len(total) == 1
    return (total[0] if scalar else total), err
