"""Piecewise paths in the complex plane with classified endpoints.

A :class:`PathSpec` is a chain of elementary pieces (straight segments,
circular arcs and at most one terminal decay ray).  Paths between points are
straight segments with semicircular detours around poles that come too close;
the detour radius is a quarter of the minimal pairwise distance of the poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .numeric import cnum


@dataclass(frozen=True)
class RegularPoint:
    kind: str = field(default="regular", init=False)


@dataclass(frozen=True)
class SingularPoint:
    location: complex
    exponent: complex
    kind: str = field(default="singular", init=False)

    def __post_init__(self):
        if complex(self.exponent).real <= 0:
            raise ValueError(f"endpoint exponent {self.exponent} must have positive real part")


@dataclass(frozen=True)
class DecayEnd:
    direction: complex
    kind: str = field(default="decay", init=False)


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    @property
    def start(self):
        return self.a

    @property
    def end(self):
        return self.b

    def point(self, u):
        """u in [0, 1]."""
        return self.a + (self.b - self.a) * u

    def derivative(self, u=None):
        return self.b - self.a

    def length(self) -> float:
        return float(abs(self.b - self.a))

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)

    def as_dict(self):
        return {"type": "segment", "a": _cj(self.a), "b": _cj(self.b)}


@dataclass(frozen=True)
class Arc:
    """center + radius * exp(i (theta0 + sweep u)), u in [0, 1]."""

    center: complex
    radius: float
    theta0: float
    sweep: float
    ctx: object = field(default=None, repr=False, compare=False)

    def _exp(self, t):
        ctx = self.ctx
        if ctx is None:
            return complex(math.cos(t), math.sin(t))
        return ctx.expj(t)

    @property
    def start(self):
        return self.point(0)

    @property
    def end(self):
        return self.point(1)

    def point(self, u):
        return self.center + self.radius * self._exp(self.theta0 + self.sweep * u)

    def derivative(self, u):
        return 1j * self.sweep * self.radius * self._exp(self.theta0 + self.sweep * u)

    def length(self) -> float:
        return abs(float(self.radius * self.sweep))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta0 + self.sweep, -self.sweep, self.ctx)

    def split(self, max_sweep: float = math.pi / 4) -> list:
        k = max(1, math.ceil(abs(float(self.sweep)) / max_sweep - 1e-12))
        step = self.sweep / k
        return [Arc(self.center, self.radius, self.theta0 + i * step, step, self.ctx) for i in range(k)]

    def as_dict(self):
        return {"type": "arc", "center": _cj(self.center), "radius": float(self.radius),
                "theta0": float(self.theta0), "sweep": float(self.sweep)}


@dataclass(frozen=True)
class DecayRay:
    """a + direction * s, s in [0, oo); integrable because the weight decays.

    ``rate`` is a lower bound for -Re(F'(z) * direction) along the ray and
    ``degree`` the polynomial growth of the remaining integrand; both enter the
    truncation bound.
    """

    a: complex
    direction: complex
    rate: float = 1.0
    degree: float = 0.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("decay ray needs a positive decay rate")

    @property
    def start(self):
        return self.a

    @property
    def end(self):
        return math.inf

    def point_at(self, s):
        return self.a + self.direction * s

    def length(self) -> float:
        return math.inf

    def as_dict(self):
        return {"type": "decay_ray", "a": _cj(self.a), "direction": _cj(self.direction),
                "rate": self.rate, "degree": self.degree}


def _cj(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


@dataclass(frozen=True)
class PathSpec:
    pieces: tuple
    start_class: object = RegularPoint()
    end_class: object = RegularPoint()
    label: str = ""

    def __post_init__(self):
        for p, q in zip(self.pieces, self.pieces[1:]):
            if isinstance(p, DecayRay):
                raise ValueError("a decay ray must be the last piece")
            if abs(complex(p.end) - complex(q.start)) > 1e-9 * (1 + abs(complex(p.end))):
                raise ValueError(f"pieces of {self.label!r} do not join: {p.end} vs {q.start}")
        if isinstance(self.end_class, DecayEnd) and not isinstance(self.pieces[-1], DecayRay):
            raise ValueError("decay end class needs a terminal decay ray")

    @property
    def start(self):
        return self.pieces[0].start

    @property
    def end(self):
        return self.pieces[-1].end

    @property
    def closed(self) -> bool:
        e = self.end
        return not isinstance(self.pieces[-1], DecayRay) and abs(complex(e) - complex(self.start)) < 1e-12

    def elementary(self, max_sweep: float = math.pi / 4) -> list:
        """Pieces with arcs split into sub-arcs of bounded sweep."""
        out = []
        for p in self.pieces:
            out.extend(p.split(max_sweep) if isinstance(p, Arc) else [p])
        return out

    def then(self, other: "PathSpec", label: str = "") -> "PathSpec":
        return PathSpec(self.pieces + other.pieces, self.start_class, other.end_class,
                        label or f"{self.label}*{other.label}")

    def reversed(self) -> "PathSpec":
        if isinstance(self.pieces[-1], DecayRay):
            raise ValueError("cannot reverse a path ending on a decay ray")
        return PathSpec(tuple(p.reversed() for p in reversed(self.pieces)), self.end_class,
                        self.start_class, f"-{self.label}")

    def as_dict(self) -> dict:
        def cls(c):
            d = {"kind": c.kind}
            if isinstance(c, SingularPoint):
                d.update(location=_cj(c.location), exponent=_cj(c.exponent))
            elif isinstance(c, DecayEnd):
                d.update(direction=_cj(c.direction))
            return d

        return {"label": self.label, "start": cls(self.start_class), "end": cls(self.end_class),
                "pieces": [p.as_dict() for p in self.pieces]}


def detour_radius(poles) -> float:
    """A quarter of the minimal pairwise distance between poles."""
    pts = [complex(p) for p in poles]
    if len(pts) < 2:
        return 0.25
    return 0.25 * min(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1:])


def straight_with_detours(a, b, poles, ctx, radius: float | None = None) -> list:
    """Pieces of the segment a -> b, bypassing every pole closer than ``radius``.

    A pole lying on the segment is bypassed counterclockwise (it stays on the
    left); a pole next to the segment is bypassed on the side the segment
    already passes.  Poles equal to an endpoint are ignored.
    """
    radius = detour_radius(poles) if radius is None else radius
    za, zb = complex(a), complex(b)
    length = abs(zb - za)
    if length == 0:
        return []
    direction = (zb - za) / length
    hits = []
    for q in poles:
        zq = complex(q)
        if abs(zq - za) < 1e-12 * (1 + abs(zq)) or abs(zq - zb) < 1e-12 * (1 + abs(zq)):
            continue
        rel = (zq - za) / direction
        along, h = rel.real, rel.imag
        if abs(h) < radius and radius < along < length - radius:
            hits.append((along, h, q))
        elif abs(h) < radius and 0 < along < length:
            raise ValueError(f"pole {zq} too close to an endpoint of {za} -> {zb} for a detour")
    hits.sort(key=lambda t: t[0])
    pieces = []
    cur = a
    for along, h, q in hits:
        w = math.sqrt(radius * radius - h * h)
        zq = complex(q)
        entry = zq + direction * complex(-w, -h)
        exit_ = zq + direction * complex(w, -h)
        th_in = math.atan2((entry - zq).imag, (entry - zq).real)
        th_out = math.atan2((exit_ - zq).imag, (exit_ - zq).real)
        sweep = (th_out - th_in) % (2 * math.pi)
        if abs(h) > 1e-14 * (1 + abs(zq)) and h < 0:
            # Pole to the right of the direction of travel: short way round keeps it there.
            sweep -= 2 * math.pi
        if abs(h) > 1e-14 * (1 + abs(zq)) and h > 0 and sweep > math.pi:
            sweep -= 2 * math.pi
        entry_c = cnum(ctx, entry)
        pieces.append(Segment(cur, entry_c))
        arc = Arc(q, radius, th_in, sweep, ctx)
        pieces.append(arc)
        cur = arc.end
    pieces.append(Segment(cur, b))
    return pieces


def path_to_point(p, target, poles, ctx, exponent=None, label="", radius=None) -> PathSpec:
    """Path from the base point ``p`` to ``target`` (a pole when ``exponent`` is given)."""
    end = SingularPoint(complex(target), complex(exponent)) if exponent is not None else RegularPoint()
    return PathSpec(tuple(straight_with_detours(p, target, poles, ctx, radius)), RegularPoint(), end, label)


def path_to_infinity(p, direction, poles, ctx, rate=1.0, degree=0.0, label="", radius=None,
                     reach: float | None = None) -> PathSpec:
    """Straight path from p in ``direction`` past every pole, then a decay ray."""
    d = complex(direction) / abs(complex(direction))
    far = reach
    if far is None:
        far = max([abs(complex(q) - complex(p)) for q in poles] + [1.0]) + 2 * (radius or detour_radius(poles))
    target = cnum(ctx, complex(p) + d * far)
    pieces = straight_with_detours(p, target, poles, ctx, radius)
    dcx = cnum(ctx, d)
    return PathSpec(tuple(pieces) + (DecayRay(target, dcx, rate, degree),), RegularPoint(), DecayEnd(d), label)


def circle(center, radius, ctx, start_angle: float = 0.0, turns: int = 1, label="loop") -> PathSpec:
    # full turn in working precision so the loop closes exactly
    two_pi = 2 * (ctx.pi if ctx is not None else math.pi)
    arc = Arc(center, radius, start_angle, two_pi * turns, ctx)
    return PathSpec((arc,), RegularPoint(), RegularPoint(), label)


def polyline(points, ctx, poles=(), label="") -> PathSpec:
    pieces = []
    for a, b in zip(points, points[1:]):
        pieces.extend(straight_with_detours(cnum(ctx, a), cnum(ctx, b), poles, ctx) if poles else
                      [Segment(cnum(ctx, a), cnum(ctx, b))])
    return PathSpec(tuple(pieces), RegularPoint(), RegularPoint(), label)
