"""Shared hypothesis strategies."""

from gmpy2 import mpq
from hypothesis import strategies as st


def rationals(bound: int = 1000, min_value=None, max_value=None, positive=False):
    """Strategy of gmpy2 rationals with bounded numerator and denominator."""
    num = st.integers(1 if positive else -bound, bound)
    den = st.integers(1, bound)
    out = st.builds(mpq, num, den)
    if min_value is not None:
        out = out.filter(lambda q: q >= min_value)
    if max_value is not None:
        out = out.filter(lambda q: q <= max_value)
    return out
