import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from irrper import numeric


def test_default_precision_env(monkeypatch):
    monkeypatch.delenv("IRRPER_PRECISION", raising=False)
    assert numeric.default_precision() == "double"
    monkeypatch.setenv("IRRPER_PRECISION", "extended")
    assert numeric.default_precision() == "extended"
    assert not numeric.is_double(numeric.get_context())
    monkeypatch.setenv("IRRPER_PRECISION", "quad")
    with pytest.raises(ValueError):
        numeric.default_precision()


def test_contexts():
    assert numeric.get_context("double") is mpmath.fp
    mp = numeric.get_context("extended")
    assert mp.dps >= 30
    assert numeric.precision_name(mp) == "extended"
    with pytest.raises(ValueError):
        numeric.get_context("half")


@pytest.mark.parametrize("text,value", [("2", 2), ("2+0i", 2), ("0.5-1.5i", 0.5 - 1.5j), ("-i", -1j), ("1e-3+2j", 1e-3 + 2j)])
def test_parse_complex(text, value):
    assert numeric.parse_complex(text) == value


def test_parse_complex_rejects():
    with pytest.raises(ValueError):
        numeric.parse_complex("two")


@given(st.complex_numbers(min_magnitude=0.05, max_magnitude=30, allow_nan=False, allow_infinity=False))
def test_lanczos_gamma_matches_mpmath(z):
    if z.real < 0.5 and abs(z.imag) < 0.05 and abs(z.real - round(z.real)) < 0.05:
        return  # near a pole
    ref = complex(mpmath.gamma(z))
    got = numeric.lanczos_gamma(z)
    assert abs(got - ref) <= 1e-12 * abs(ref)


def test_gamma_both_contexts(fp, mp):
    assert abs(numeric.gamma(fp, 0.5) - math.sqrt(math.pi)) < 1e-14
    assert abs(numeric.gamma(mp, mp.mpf(1) / 3) - mpmath.gamma(mpmath.mpf(1) / 3)) < 1e-14


def test_kahan_sum():
    terms = [1.0, 1e-16, 1e-16, -1.0]
    assert numeric.kahan_sum(terms) == pytest.approx(2e-16, rel=1e-6)
