import warnings

import pytest
from hypothesis import given

from irrper.curve import (
    ConditioningWarning,
    CurveParams,
    DegenerateCurveError,
    critical_data,
    discriminant_factor,
    exceptional_root,
    identity_residuals,
    rapid_decay_sectors,
)

from strategies import generic_lambda


@given(generic_lambda())
def test_printed_identities(lam):
    res = identity_residuals(critical_data(lam))
    assert res["fprime"] < 1e-12
    assert res["sqrt"] < 1e-14
    assert res["product"] < 1e-12
    assert res["difference"] < 1e-10


@given(generic_lambda())
def test_companion_product_is_L_squared(lam):
    # the third root satisfies (x1 - x3)^2 = L, so the product is L^2, not L^2/16
    res = identity_residuals(critical_data(lam))
    assert res["companion_exact"] < 1e-10
    assert res["companion"] == pytest.approx(15 / 16, abs=1e-9)


@given(generic_lambda())
def test_critical_points(lam):
    cd = critical_data(lam)
    f = cd.params.f
    assert abs(f(cd.x3) - cd.c1) <= 1e-9 * max(1, abs(cd.c1))
    assert abs(f(cd.x4) - cd.c2) <= 1e-9 * max(1, abs(cd.c2))
    assert abs(cd.x1 + cd.x2 - 2 * (lam + 1) / 3) < 1e-12 * (1 + abs(lam))


@pytest.mark.parametrize("lam", [0, 1, 1 + 1e-14])
def test_degenerate(lam):
    with pytest.raises(DegenerateCurveError):
        critical_data(lam)


def test_conditioning_warning():
    with pytest.warns(ConditioningWarning):
        CurveParams.from_lambda(1e-4)
    with pytest.warns(ConditioningWarning):
        CurveParams.from_lambda(exceptional_root(__import__("mpmath").fp, 1) + 1e-5)


@pytest.mark.parametrize("sign", [1, -1])
def test_exceptional_snap(fp, sign):
    lam = exceptional_root(fp, sign)
    assert abs(discriminant_factor(lam)) < 1e-15
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cd = critical_data(lam + 1e-12, fp)
    assert cd.exceptional
    assert cd.lam == lam
    assert cd.x1 == cd.x2
    assert abs(cd.c1 - (2 * lam - 1) / 9) < 1e-15


def test_exact_values_lambda_2(mp):
    cd = critical_data(2, mp)
    assert abs(cd.x1 - (1 - 1 / mp.sqrt(3))) < 1e-35
    assert abs(cd.c1 - 2 / (3 * mp.sqrt(3))) < 1e-35
    assert abs(cd.c2 + 2 / (3 * mp.sqrt(3))) < 1e-35


def test_sign_flip_and_swap(fp):
    cd = critical_data(2, fp)
    f = cd.with_signs(-1, 1)
    assert f.s1 == -cd.s1 and f.branch.s1_sign == -1
    sw = cd.swapped()
    assert (sw.x1, sw.c1, sw.s1) == (cd.x2, cd.c2, cd.s2)
    assert sw.branch.swapped


def test_sectors():
    secs = rapid_decay_sectors()
    assert secs
