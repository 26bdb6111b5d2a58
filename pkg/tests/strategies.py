"""Hypothesis strategies shared by the property tests."""

import numpy as np
from hypothesis import strategies as st

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


@st.composite
def cmats(draw, max_cond: float = 50.0):
    vals = [complex(draw(finite), draw(finite)) for _ in range(4)]
    m = np.array(vals, dtype=complex).reshape(2, 2)
    if np.linalg.cond(m) > max_cond:
        m = m + 3.0 * np.eye(2)
    from hypothesis import assume

    assume(np.linalg.cond(m) <= max_cond)
    return m


@st.composite
def f1_params(draw):
    a = draw(st.floats(-0.9, 3.0))
    beta = draw(st.floats(-1 - a + 0.1, 5.0))
    b = draw(st.floats(0.2, 3.0)) * draw(st.sampled_from([-1, 1]))
    return dict(alpha=a, beta=beta, b=b)


@st.composite
def f2_params(draw):
    return dict(alpha=draw(st.floats(-0.9, 3.0)), b=draw(st.floats(0.05, 0.95)) * draw(st.sampled_from([-1, 1])))


@st.composite
def f3_params(draw):
    return dict(beta=draw(st.floats(0.05, 10.0)))


family_params = st.one_of(
    f1_params().map(lambda p: ("F1", p)),
    f2_params().map(lambda p: ("F2", p)),
    f3_params().map(lambda p: ("F3", p)),
)
