import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrper.connection import rank_one
from irrper.paths import PathSpec, Segment, circle, path_to_infinity, path_to_point, polyline
from irrper.quadrature import PointIntegrand, QuadratureSettings, integrate
from irrper.transport import LogTracker, eig_numpy, loop_monodromy

pts = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def test_polynomial_segment(fp):
    v, e = integrate(lambda z: z * z, polyline([0, 1], fp))
    assert abs(v - 1 / 3) < 1e-13 and e < 1e-8


def test_residue_on_circle(fp):
    v, _ = integrate(lambda z: 1 / z, circle(0, 1, fp))
    assert abs(v - 2j * math.pi) < 1e-12


def test_residue_extended(mp):
    v, e = integrate(lambda z: 1 / z, circle(0, 1, mp), QuadratureSettings(precision="extended"))
    assert abs(v - 2j * mp.pi) < 1e-25


def test_endpoint_singularity(fp):
    path = path_to_point(0.0, 1.0, [1.0], fp, exponent=0.5)

    def f(z, anchor, delta):
        # exact offset from the singular end avoids 1 - z rounding to zero
        gap = -delta if anchor == 1.0 else 1 - z
        return 1 / cmath.sqrt(gap)

    v, _ = integrate(PointIntegrand(f, offsets=True), path, scalar=True)
    assert abs(v - 2) < 1e-9


def test_decay_ray(fp):
    path = path_to_infinity(0.0, -1.0, [], fp)
    v, e = integrate(lambda z: cmath.exp(z), path)
    assert abs(v + 1) < 1e-10


@settings(max_examples=15)
@given(st.lists(pts, min_size=2, max_size=4))
def test_path_independence(wps):
    from mpmath import fp

    if any(abs(a - b) < 1e-3 for a, b in zip(wps, wps[1:])):
        return
    path = polyline(wps, fp)
    v, _ = integrate(lambda z: 3 * z * z - 2j * z + 1, path)
    F = lambda z: z**3 - 1j * z * z + z  # noqa: E731
    assert abs(v - (F(wps[-1]) - F(wps[0]))) < 1e-10 * (1 + abs(F(wps[-1])) + abs(F(wps[0])))


def test_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSettings(tol=0.1)
    with pytest.raises(ValueError):
        QuadratureSettings(max_level=2, min_level=3)
    assert QuadratureSettings(precision="extended").rtol < 1e-20


def test_path_must_join(fp):
    with pytest.raises(ValueError):
        PathSpec((Segment(0, 1), Segment(2, 3)))


def test_log_tracker_winds(fp):
    tr = LogTracker(fp, [0], 1.0)
    for k in range(1, 9):
        tr.advance(cmath.exp(2j * math.pi * k / 8))
    assert abs(tr.logs[0] - 2j * math.pi) < 1e-14


@settings(max_examples=10)
@given(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_rank1_monodromy(s):
    from mpmath import fp

    conn = rank_one([0.0], [s], fp)
    mono, _ = loop_monodromy(conn, 0.0, 0.5)
    assert abs(complex(mono[0][0]) - cmath.exp(2j * math.pi * s)) < 1e-8 * max(1, abs(cmath.exp(2j * math.pi * s)))


def test_eig_numpy():
    ev = sorted(eig_numpy([[2, 0], [1, 3]]), key=lambda z: z.real)
    assert abs(ev[0] - 2) < 1e-14 and abs(ev[1] - 3) < 1e-14
