"""Hypothesis strategies shared by the property tests."""

from hypothesis import assume
from hypothesis import strategies as st

from irrper.curve import discriminant_factor

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def generic_lambda(draw):
    lam = complex(draw(coord), draw(coord))
    assume(abs(lam) <= 10 and abs(lam) > 1e-2 and abs(lam - 1) > 1e-2)
    assume(abs(discriminant_factor(lam)) > 1e-2)
    return lam
