import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrper.curve import critical_data, exceptional_root
from irrper.period import (
    FormBasis,
    approx_sequence,
    closed_form_P,
    curve_cycles,
    direct_curve_period,
    engine_limit_P,
    engine_log_det,
    exceptional_pipeline,
    exceptional_regularized,
    generic_factors,
    make_period_matrix,
    period_matrix_regular,
    pushforward_period,
    richardson,
    stokes_residuals,
)
from irrper.quadrature import QuadratureSettings

from strategies import generic_lambda

cell = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@settings(max_examples=30)
@given(st.lists(st.lists(cell, min_size=3, max_size=3), min_size=3, max_size=3), st.sampled_from([(0, 1), (0, 2), (1, 2)]))
def test_column_swap_flips_sign(rows, ij):
    pm = make_period_matrix(rows, ["a", "b", "c"], ["x", "y", "z"], [[0.0] * 3 for _ in range(3)])
    sw = pm.permuted_columns(*ij)
    assert abs(sw.det + pm.det) <= 1e-9 * (1 + abs(pm.det)) + 1e-12 * max(abs(v) for r in rows for v in r) ** 3
    assert sw.col_labels[ij[0]] == pm.col_labels[ij[1]]


def test_richardson_polynomial_in_inverse_m(fp):
    ms = [10, 12, 15, 20, 25, 30]
    vals = [2 + 3 / m - 5 / m**2 for m in ms]
    ext = richardson(ms, vals, fp)
    assert abs(ext.limit - 2) < 1e-10
    assert ext.monotone


def test_quadrature_matches_engine_m10(mp):
    cd = critical_data(2, mp)
    conn = exceptional_regularized if cd.exceptional else None
    from irrper.period import generic_regularized

    conn = generic_regularized(cd, 10)
    pts = tuple(conn.points)
    pm = period_matrix_regular(conn, FormBasis("omega", pts), settings=QuadratureSettings(tol=1e-20, precision="extended"))
    assert abs(pm.normalized_det() / mp.exp(engine_log_det(conn)) - 1) < 1e-15


def test_generic_limit_is_derived_value(mp):
    cd = critical_data(2, mp)
    recs, ext = approx_sequence(cd, (20, 25, 30, 35, 40, 50, 60, 70, 80))
    assert abs(ext.limit / engine_limit_P(cd) - 1) < 1e-4
    assert ext.error / abs(ext.limit) < 1e-4
    assert all(set(r.factors) == {"power", "half_integral", "gamma"} for r in recs)


@pytest.mark.xfail(strict=True, reason="the printed generic limit differs from the product-formula limit")
def test_generic_limit_printed(mp):
    cd = critical_data(2, mp)
    _, ext = approx_sequence(cd, (20, 25, 30, 35, 40, 50, 60, 70, 80))
    assert abs(ext.limit / closed_form_P(cd) - 1) < 1e-4


def test_derived_limit_in_printed_terms(mp):
    # (s1 s2)^3 (c1 - c2)^6 versus c1^(3/2) c2^(3/2)/(c1 - c2)^3: the ratio is (c1 - c2)^9 up to sign
    cd = critical_data(2, mp)
    r = engine_limit_P(cd) / closed_form_P(cd) / (cd.c1 - cd.c2) ** 9
    assert abs(abs(r) - 1) < 1e-30


def test_gamma_factor_slow(mp):
    cd = critical_data(2, mp)
    f = generic_factors(cd, 80)
    assert abs(f["power"] - 1) < 1e-2 and abs(f["half_integral"] - 1) < 1e-2
    # 2 Gamma(m+1) - Gamma(m+1+14/3) - Gamma(m+1+16/3) decays like m^-10, not 1
    assert abs(f["gamma"] - 0.692) < 1e-3


@pytest.mark.parametrize("sign", [1, -1])
def test_exceptional_limit(mp, sign):
    cd = critical_data(exceptional_root(mp, sign), mp)
    out = exceptional_pipeline(cd, (30, 40, 50, 60, 70, 80))
    ext = out["extrapolation"]
    assert abs(ext.limit / out["target"] + 1) < 1e-4
    assert abs(out["tame_at_minus_m"] - out["printed_tame_at_minus_m"]) < 1e-10 * abs(out["printed_tame_at_minus_m"])


@settings(max_examples=20)
@given(generic_lambda())
def test_pushforward_printed_is_product_in_closed_form(lam):
    from mpmath import fp

    cd = critical_data(lam, fp)
    pp = pushforward_period(cd)
    # printed pushforward = rank-1 part times printed limit, up to the sign of c1^(3/2) c2^(3/2)
    r = pp["product_of_printed"] / pp["printed"]
    assert min(abs(r - 1), abs(r + 1)) < 1e-8


def test_direct_curve_double(fp):
    cd = critical_data(2, fp)
    pm = direct_curve_period(cd, QuadratureSettings(tol=1e-10))
    assert abs(pm.det / (-64 * math.pi**2 / 9) - 1) < 1e-7
    sk = stokes_residuals(cd, QuadratureSettings(tol=1e-10))
    assert sk["max_abs"] < 1e-8


@pytest.mark.parametrize("lam", [3, -2, 0.5 + 1j])
def test_direct_curve_det_independent_of_lambda(fp, lam):
    cd = critical_data(lam, fp)
    a = direct_curve_period(cd, QuadratureSettings(tol=1e-10))
    b = direct_curve_period(cd, QuadratureSettings(tol=1e-10), curve_cycles(cd, 2.1, 0.3))
    assert abs(a.det / b.det - 1) < 1e-7
    assert abs(a.det / (-64 * math.pi**2 / 9) - 1) < 1e-7
