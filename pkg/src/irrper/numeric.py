"""Precision contexts and a few scalar special functions.

Two arithmetic modes are supported:

``double``
    binary64, backed by :data:`mpmath.fp` (Python floats / complex).
``extended``
    multiprecision, backed by a private :class:`mpmath.MPContext` (40 digits
    by default), so that changing its precision never leaks into user code
    that uses the global ``mpmath.mp``.

Every numerical routine in the package takes a ``ctx`` argument obtained from
:func:`get_context` and only uses the small common API of the two mpmath
contexts (``exp``, ``log``, ``sqrt``, ``mpc``, ``pi``, ...).
"""

from __future__ import annotations

import cmath
import math
import os
from functools import lru_cache

import mpmath

DOUBLE = "double"
EXTENDED = "extended"
PRECISIONS = (DOUBLE, EXTENDED)
EXTENDED_DPS = 40
ENV_PRECISION = "IRRPER_PRECISION"


def default_precision() -> str:
    mode = os.environ.get(ENV_PRECISION, DOUBLE).strip().lower()
    if mode not in PRECISIONS:
        raise ValueError(f"{ENV_PRECISION}={mode!r}: expected one of {PRECISIONS}")
    return mode


@lru_cache(maxsize=None)
def _extended(dps: int):
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


def get_context(precision: str | None = None, dps: int = EXTENDED_DPS):
    """Return the mpmath context for ``precision`` (``None`` -> environment default)."""
    precision = precision or default_precision()
    if precision == DOUBLE:
        return mpmath.fp
    if precision == EXTENDED:
        return _extended(dps)
    raise ValueError(f"unknown precision mode {precision!r}")


def is_double(ctx) -> bool:
    return ctx is mpmath.fp


def precision_name(ctx) -> str:
    return DOUBLE if is_double(ctx) else EXTENDED


def epsilon(ctx) -> float:
    return float(ctx.eps)


def to_complex(z) -> complex:
    return complex(z)


def cnum(ctx, z):
    """Coerce ``z`` (python number, string ``"a+bi"`` or mpmath number) into ``ctx``."""
    if isinstance(z, str):
        z = parse_complex(z)
    if is_double(ctx):
        return complex(z)
    if isinstance(z, complex):
        return ctx.mpc(z.real, z.imag)
    return ctx.mpc(z)


def parse_complex(text: str) -> complex:
    """Parse ``"2"``, ``"2+0i"``, ``"0.5-0.866i"`` or ``"(1+2j)"``."""
    s = text.strip().replace(" ", "").strip("()").replace("i", "j")
    if s.endswith("j") and s[:-1] in ("", "+", "-"):
        s = s[:-1] + "1j"
    return complex(s)


def kahan_sum(terms):
    """Compensated summation; works for floats, complex and mpmath numbers."""
    total = 0
    comp = 0
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


# Lanczos approximation, g = 7, n = 9 (binary64 accurate to ~1e-15).
_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _lanczos_log(z: complex) -> complex:
    z = z - 1
    x = _LANCZOS[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def lanczos_loggamma(z) -> complex:
    """log Gamma(z) for Re z >= 1/2, continuous along the positive real direction."""
    z = complex(z)
    if z.real < 0.5:
        raise ValueError("lanczos_loggamma needs Re z >= 1/2; use lanczos_gamma for reflection")
    # Shift small arguments up so the log branch stays continuous.
    shift = 0j
    while z.real < 8.0:
        shift -= cmath.log(z)
        z += 1
    return _lanczos_log(z) + shift


def lanczos_gamma(z) -> complex:
    """Gamma(z) in binary64 via Lanczos, with the reflection formula for Re z < 1/2."""
    z = complex(z)
    if z.real < 0.5:
        if z == round(z.real) and z.real <= 0:
            raise ValueError(f"Gamma has a pole at {z}")
        return math.pi / (cmath.sin(math.pi * z) * lanczos_gamma(1 - z))
    if z.imag == 0 and z.real == round(z.real) and z.real < 171:
        return complex(math.factorial(int(z.real) - 1))
    return cmath.exp(lanczos_loggamma(z))


def gamma(ctx, z):
    if is_double(ctx):
        return lanczos_gamma(z)
    return ctx.gamma(z)


def loggamma(ctx, z):
    """log Gamma with the principal-on-the-right branch (Re z >= 1/2 in double mode)."""
    if is_double(ctx):
        return lanczos_loggamma(z)
    return ctx.loggamma(z)


def arg_change(ctx, a, b, center):
    """Argument increment of ``(w - center)`` along the straight segment ``a -> b``.

    The segment must avoid ``center``; the increment then lies in (-pi, pi).
    """
    return ctx.im(ctx.log((b - center) / (a - center)))
