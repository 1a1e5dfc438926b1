"""Flat sections of dual connections along paths.

Two independent evaluators are provided:

* ODE transport of dPhi/dy = A(y)^T Phi (embedded Runge-Kutta, binary64), and
* for the trace-zero pushforward, algebraic branch tracking of the fibre
  x_k(y) of the double cover; the dual flat sections are the evaluations
  (v1(x_k(y)), v2(x_k(y))) on two of the three sheets.

Scalar factors prod (y - q)^{s_q} exp(F(y)) are carried by continued logarithms
that start from the principal branch at the base point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .curve import CriticalData
from .numeric import is_double
from .paths import Arc, DecayRay, PathSpec, Segment


class TrackingError(RuntimeError):
    """Branch tracking could not separate the fibre roots."""


# ---------------------------------------------------------------------------
# Continued logarithms
# ---------------------------------------------------------------------------

class LogTracker:
    """log(y - q) for several q, continued along straight chords.

    ``diffs`` keeps y - q, computed from exact offsets whenever the current point
    was given as ``anchor + delta`` with ``anchor == q``.
    """

    def __init__(self, ctx, points, start, logs=None, diffs=None):
        self.ctx = ctx
        self.points = list(points)
        self.y = start
        self.diffs = list(diffs) if diffs is not None else [start - q for q in self.points]
        self.logs = list(logs) if logs is not None else [ctx.log(d) for d in self.diffs]

    def copy(self) -> "LogTracker":
        return LogTracker(self.ctx, self.points, self.y, self.logs, self.diffs)

    def advance(self, y, anchor=None, delta=None):
        ctx = self.ctx
        logs, diffs = [], []
        for q, lg, old in zip(self.points, self.logs, self.diffs):
            diff = delta if (delta is not None and anchor == q) else y - q
            logs.append(lg + ctx.log(diff / old))
            diffs.append(diff)
        self.logs, self.diffs = logs, diffs
        self.y = y
        return self


# ---------------------------------------------------------------------------
# Fibre tracking
# ---------------------------------------------------------------------------

@dataclass
class _Sheet:
    x: object
    q: object = None  # branch value for local mode
    xc: object = None
    xi: object = None


class FiberTracker:
    """The three roots of x^3 - (lam+1) x^2 + lam x - y^2 followed along chords.

    Far from the branch values +-s_i the roots are advanced with an Euler
    predictor and Newton polishing.  Inside a disc around a branch value q the
    two colliding sheets are carried in the local coordinate xi = x - x_c and
    predicted with the Puiseux ratio (delta'/delta)^(1/e), e = 2 (generic) or
    3 (exceptional).
    """

    STEP = 0.2
    LOCAL = 0.3

    def __init__(self, cd: CriticalData, y=None, sheets=None):
        ctx = cd.ctx
        self.cd = cd
        self.ctx = ctx
        lam = cd.lam
        self.lam = lam
        self.bps = list(cd.singular_points)
        self.e = 3 if cd.exceptional else 2
        self.rho = []
        for i, q in enumerate(self.bps):
            others = [abs(q - r) for j, r in enumerate(self.bps) if j != i]
            self.rho.append(self.LOCAL * min(others) if others else self.LOCAL)
        self.xcs = [cd.critical_point_of(q) for q in self.bps]
        self.eps = float(ctx.eps)
        if sheets is None:
            zero = ctx.mpf(0) * lam
            self.y = zero
            self.sheets = [_Sheet(zero), _Sheet(zero + 1), _Sheet(lam + zero)]
            self.local = None
            self.delta = None
        else:
            self.y = y
            self.sheets = sheets
            self.local = None
            self.delta = None
        self.steps = 0

    def copy(self) -> "FiberTracker":
        t = FiberTracker.__new__(FiberTracker)
        t.__dict__.update(self.__dict__)
        t.sheets = [_Sheet(s.x, s.q, s.xc, s.xi) for s in self.sheets]
        return t

    # cubic helpers
    def _g(self, x, y2):
        return ((x - (self.lam + 1)) * x + self.lam) * x - y2

    def _gp(self, x):
        return (3 * x - 2 * (self.lam + 1)) * x + self.lam

    def _newton(self, x, y2, iters=40):
        scale = 1 + abs(x)
        for _ in range(iters):
            d = self._g(x, y2) / self._gp(x)
            x = x - d
            if abs(d) <= 4 * self.eps * scale:
                return x, True
        return x, abs(d) <= 1e3 * self.eps * scale

    def _local_newton(self, xi, a, rhs, iters=40):
        for _ in range(iters):
            h = (a + xi) * xi * xi - rhs
            hp = (2 * a + 3 * xi) * xi
            if hp == 0:
                return xi, False
            d = h / hp
            xi = xi - d
            if abs(d) <= 4 * self.eps * abs(xi):
                return xi, True
        return xi, abs(d) <= 1e3 * self.eps * abs(xi)

    def _nearest(self, y):
        best = None
        for i, q in enumerate(self.bps):
            d = abs(y - q)
            if best is None or d < best[1]:
                best = (i, d)
        return best

    def _enter_local(self, i):
        q, xc = self.bps[i], self.xcs[i]
        delta = self.y - q
        order = sorted(range(3), key=lambda k: abs(self.sheets[k].x - xc))
        for k in order[: self.e]:
            s = self.sheets[k]
            s.q, s.xc, s.xi = q, xc, s.x - xc
        self.local = i
        self.delta = delta

    def _leave_local(self):
        for s in self.sheets:
            if s.q is not None:
                s.x = s.xc + s.xi
                s.q = s.xc = s.xi = None
        self.local = None
        self.delta = None

    def _regular_step(self, y_new) -> bool:
        y2 = y_new * y_new
        h = y_new - self.y
        new = []
        for s in self.sheets:
            pred = s.x + 2 * self.y * h / self._gp(s.x)
            x, ok = self._newton(pred, y2)
            if not ok:
                return False
            new.append((pred, x))
        for k, (pred, x) in enumerate(new):
            sep = min(abs(pred - p2) for j, (p2, _) in enumerate(new) if j != k)
            if abs(x - pred) > 0.25 * sep:
                return False
        for s, (_, x) in zip(self.sheets, new):
            s.x = x
        self.y = y_new
        return True

    def _local_step(self, y_new, delta_new) -> bool:
        i = self.local
        q, xc = self.bps[i], self.xcs[i]
        ratio = delta_new / self.delta
        root = ratio ** (self.ctx.mpf(1) / self.e)
        a = 3 * xc - (self.lam + 1)
        rhs = delta_new * (2 * q + delta_new)
        y2 = y_new * y_new
        updates = []
        for s in self.sheets:
            if s.q is not None:
                pred = s.xi * root
                xi, ok = self._local_newton(pred, a, rhs)
                if not ok or abs(xi - pred) > 0.3 * abs(pred):
                    return False
                updates.append((s, xi))
            else:
                h = y_new - self.y
                pred = s.x + 2 * self.y * h / self._gp(s.x)
                x, ok = self._newton(pred, y2)
                if not ok:
                    return False
                updates.append((s, x))
        for s, v in updates:
            if s.q is not None:
                s.xi = v
                s.x = s.xc + v
            else:
                s.x = v
        self.y = y_new
        self.delta = delta_new
        return True

    def advance(self, y, anchor=None, delta=None) -> "FiberTracker":
        """Move to ``y`` along the straight chord from the current point.

        When ``anchor`` is a branch value and ``delta = y - anchor`` is given
        exactly, the final approach uses ``delta`` without cancellation.
        """
        ctx = self.ctx
        target_local = None
        if anchor is not None and delta is not None:
            for i, q in enumerate(self.bps):
                if anchor == q:
                    target_local = (i, delta)
        skip_enter = False
        for _ in range(200000):
            if self.local is None and self.y == y:
                return self
            if self.local is not None:
                i = self.local
                q = self.bps[i]
                dt = target_local[1] if (target_local and target_local[0] == i) else y - q
                if dt == self.delta:
                    return self
                if abs(dt) >= self.rho[i] and abs(self.delta) >= 0.999 * self.rho[i]:
                    self._leave_local()
                    continue
                ratio = dt / self.delta
                inward = abs(ratio) < 1 and abs(ctx.im(ratio)) <= 1e-6 * abs(ratio) and ctx.re(ratio) > 0
                if inward:
                    lim = 0.1 if abs(self.delta) > 0.01 * self.rho[i] else 0.0
                    if abs(ratio) >= lim:
                        step_d = dt
                    else:
                        step_d = self.delta * lim
                else:
                    remaining = dt - self.delta
                    cap = 0.3 * abs(self.delta)
                    if abs(remaining) <= cap:
                        step_d = dt
                    else:
                        step_d = self.delta + remaining * (cap / abs(remaining))
                    if abs(step_d) > self.rho[i]:
                        # leaving the disc: take at least one regular step before re-entering
                        self._leave_local()
                        skip_enter = True
                        continue
                tries = 0
                while True:
                    ynew = y if step_d is dt else q + step_d
                    if self._local_step(ynew, step_d):
                        break
                    tries += 1
                    if tries > 60:
                        raise TrackingError(f"local tracking failed near {q}")
                    step_d = self.delta + (step_d - self.delta) / 2
                self.steps += 1
                continue
            i, d = self._nearest(self.y)
            if d < self.rho[i] * 0.999 and not skip_enter:
                self._enter_local(i)
                continue
            remaining = y - self.y
            if remaining == 0:
                return self
            hmax = self.STEP * d
            frac = 1 if abs(remaining) <= hmax else hmax / abs(remaining)
            tries = 0
            while True:
                ynew = y if frac == 1 else self.y + remaining * frac
                if self._regular_step(ynew):
                    break
                frac = frac / 2
                tries += 1
                if tries > 60:
                    raise TrackingError(f"regular tracking failed at y = {self.y}")
            self.steps += 1
            skip_enter = False
        raise TrackingError("too many tracking steps")

    def roots(self) -> list:
        return [s.x for s in self.sheets]

    def values(self) -> list:
        """(v1, v2) on each sheet, using the local coordinate where active."""
        lam = self.lam
        k1 = (lam + 1) / 3
        k2 = (lam * lam + 1) / 3
        out = []
        for s in self.sheets:
            if s.q is not None:
                v1 = (s.xc - k1) + s.xi
                v2 = (s.xc * s.xc - k2) + s.xi * (2 * s.xc + s.xi)
            else:
                v1 = s.x - k1
                v2 = s.x * s.x - k2
            out.append((v1, v2))
        return out

    def frame(self, sheets=(0, 1)) -> list:
        """V(y) = [[v1(x_a), v1(x_b)], [v2(x_a), v2(x_b)]]."""
        vals = self.values()
        a, b = sheets
        return [[vals[a][0], vals[b][0]], [vals[a][1], vals[b][1]]]


def inv2(m):
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]


def mul2(a, b):
    n, k, p = len(a), len(b), len(b[0])
    return [[sum(a[i][l] * b[l][j] for l in range(k)) for j in range(p)] for i in range(n)]


def det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


class FiberModel:
    """Dual flat sections of the trace-zero pushforward by sheet evaluation."""

    def __init__(self, cd: CriticalData, form=None):
        self.cd = cd
        self.form = form

    def tracker(self) -> FiberTracker:
        return FiberTracker(self.cd)

    def tracker_at(self, p, path: PathSpec | None = None) -> FiberTracker:
        """Tracker continued from the fibre base y = 0 to ``p``: along ``path``, or along
        the straight chord with the standard detours around branch values on it."""
        from .paths import polyline

        t = self.tracker()
        if path is None:
            try:
                path = polyline([0 * p, p], self.cd.ctx, self.cd.singular_points)
            except ValueError:  # branch value too close to an end for a detour
                t.advance(p)
                return t
        follow_path(t, path)
        return t


def follow_path(tracker, path: PathSpec, upto=None):
    """Advance ``tracker`` along all pieces of ``path`` (chords of sub-arcs)."""
    for piece in path.elementary(math.pi / 16):
        if isinstance(piece, Segment):
            tracker.advance(piece.b)
        elif isinstance(piece, Arc):
            tracker.advance(piece.end)
        elif isinstance(piece, DecayRay):
            raise ValueError("cannot follow a decay ray to its end")
    return tracker


# ---------------------------------------------------------------------------
# Continuation of dual flat sections
# ---------------------------------------------------------------------------

def _ode_piece(conn, piece, state, rtol, atol):
    r = conn.rank
    if isinstance(piece, Segment):
        z0, dz = complex(piece.a), complex(piece.b - piece.a)

        def zp(s):
            return z0 + dz * s, dz
    else:
        c, rad, th0, sw = complex(piece.center), float(piece.radius), float(piece.theta0), float(piece.sweep)

        def zp(s):
            e = cmath.exp(1j * (th0 + sw * s))
            return c + rad * e, 1j * sw * rad * e

    pts = [complex(q) for q in conn.points]
    res = [np.array([[complex(v) for v in row] for row in b]) for b in conn.residues]
    irr = [complex(c) for c in conn.irregular]

    def rhs(s, u):
        z, d = zp(s)
        a = np.zeros((r, r), dtype=complex)
        for q, b in zip(pts, res):
            a += b / (z - q)
        fp = sum(k * irr[k] * z ** (k - 1) for k in range(1, len(irr)))
        if fp:
            a += fp * np.eye(r)
        m = u.reshape(r, -1)
        return (a.T @ m * d).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), state.ravel(), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"ODE transport failed: {sol.message}")
    return sol.y[:, -1].reshape(state.shape)


def continue_ode(conn, path: PathSpec, initial, rtol=1e-12):
    """Transport ``initial`` (vector or r x r matrix) along ``path`` by the dual
    flat-section ODE.  Returns (final, error_estimate); binary64 only."""
    state = np.array([[complex(v) for v in row] for row in initial]) if isinstance(initial[0], (list, tuple)) \
        else np.array([complex(v) for v in initial]).reshape(-1, 1)
    scale = float(np.max(np.abs(state))) or 1.0

    def run(rt):
        s = state.copy()
        for piece in path.elementary():
            if isinstance(piece, DecayRay):
                raise ValueError("ODE transport needs a finite path")
            s = _ode_piece(conn, piece, s, rt, rt * scale * 1e-3)
        return s

    fine = run(rtol)
    coarse = run(rtol * 100)
    err = float(np.max(np.abs(fine - coarse)))
    out = fine if isinstance(initial[0], (list, tuple)) else fine[:, 0]
    return out, err


def scalar_factor(conn, logs: LogTracker, y):
    """prod (y - q)^{shift_q} exp(F(y)) from continued logarithms."""
    ctx = conn.ctx
    acc = 0
    for s, lg in zip(conn.scalar_shifts, logs.logs):
        if s != 0:
            acc = acc + s * lg
    if conn.irregular:
        acc = acc + conn.irregular_value(y)
    return ctx.exp(acc)


def continue_fiber(conn, path: PathSpec, initial, base_tracker: FiberTracker | None = None):
    """Transport ``initial`` along ``path`` using branch tracking for the fibre part
    and continued logarithms for the scalar part.  Returns (final, error_estimate)."""
    if conn.fiber is None and conn.rank != 1:
        raise ValueError("branch-tracking transport needs a connection with a fibre model")
    ctx = conn.ctx
    start = path.start
    logs = LogTracker(ctx, conn.points, start)
    s0 = scalar_factor(conn, logs, start)
    for piece in path.elementary(math.pi / 16):
        logs.advance(piece.end if not isinstance(piece, Segment) else piece.b)
    end = logs.y
    s1 = scalar_factor(conn, logs, end)
    ratio = s1 / s0
    if conn.rank == 1:
        vec = initial if not isinstance(initial[0], (list, tuple)) else [initial[0][0]]
        return [ratio * vec[0]], float(ctx.eps) * abs(ratio * vec[0]) * 10
    t = base_tracker.copy() if base_tracker is not None else conn.fiber.tracker_at(start)
    v0 = t.frame()
    follow_path(t, path)
    v1 = t.frame()
    trans = mul2(v1, inv2(v0))
    if isinstance(initial[0], (list, tuple)):
        out = mul2(trans, initial)
        out = [[ratio * v for v in row] for row in out]
    else:
        out = [ratio * (trans[i][0] * initial[0] + trans[i][1] * initial[1]) for i in range(2)]
    mag = max(abs(v) for v in (sum(out, []) if isinstance(out[0], list) else out))
    return out, float(ctx.eps) * 1e3 * float(mag)


def continue_solution(conn, path: PathSpec, initial, method: str = "auto"):
    """Parallel transport of a dual flat section; ``method`` in {auto, ode, fiber}."""
    if method == "auto":
        method = "fiber" if (conn.fiber is not None or conn.rank == 1) else "ode"
    if method == "ode":
        return continue_ode(conn, path, initial)
    if method == "fiber":
        return continue_fiber(conn, path, initial)
    raise ValueError(method)


def loop_monodromy(conn, center, radius, method: str = "ode", start_angle: float = 0.3):
    """Monodromy matrix of the dual flat sections around a counterclockwise circle."""
    from .paths import circle

    inside = [q for q in conn.points if abs(complex(q) - complex(center)) < radius]
    if len(inside) > 1:
        raise ValueError(f"{len(inside)} singular points inside the loop")
    for q in conn.points:
        if abs(abs(complex(q) - complex(center)) - radius) < 1e-9 * (1 + radius):
            raise ValueError("loop passes through a singular point")
    ctx = conn.ctx
    path = circle(center, radius, ctx, start_angle)
    ident = [[ctx.mpf(1) if i == j else ctx.mpf(0) for j in range(conn.rank)] for i in range(conn.rank)]
    if method == "ode":
        m, err = continue_ode(conn, path, ident)
        return m, err
    if method == "fiber":
        base = conn.fiber.tracker_at(path.start) if conn.fiber is not None else None
        out, err = continue_fiber(conn, path, ident, base)
        return out, err
    raise ValueError(method)


def eig_numpy(m):
    return np.linalg.eigvals(np.array([[complex(v) for v in row] for row in m], dtype=complex))
