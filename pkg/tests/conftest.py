import numpy as np
import pytest
from hypothesis import strategies as st

from stonecover.metric import validate_space
from oracles import random_integer_metric


@st.composite
def integer_spaces(draw, min_n=1, max_n=7, high=6):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return validate_space(random_integer_metric(n, rng, 1, high))


@st.composite
def float_spaces(draw, min_n=1, max_n=7, dim=2):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.sampled_from([1.0, 2.0, float("inf")]))
    rng = np.random.default_rng(seed)
    from stonecover.metric import lp_space
    return lp_space(rng.uniform(0, 4, size=(n, dim)), p)


@pytest.fixture
def line4():
    from stonecover.metric import line_space
    return line_space([0, 1, 2, 3])
