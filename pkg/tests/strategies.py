import numpy as np
from hypothesis import strategies as st

from chainscope import GapMatrix


@st.composite
def gap_matrices(draw, min_n=1, max_n=6):
    """Small gap matrices on the lattice k/8, so zero gaps and ties both occur."""
    n = draw(st.integers(min_n, max_n))
    cells = draw(st.lists(st.integers(0, 8), min_size=n * n, max_size=n * n))
    return GapMatrix.from_array(np.array(cells, dtype=float).reshape(n, n) / 8)


@st.composite
def real_gap_matrices(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    cells = draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=n * n, max_size=n * n))
    return GapMatrix.from_array(np.array(cells).reshape(n, n))


eps_values = st.sampled_from([0.05, 0.13, 0.26, 0.4, 0.55, 0.8, 1.01])
