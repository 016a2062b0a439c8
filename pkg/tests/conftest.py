from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from timeinfo import OperatorKernel, ProcessChain, TimeMomentSet

# Reference values computed with mpmath at 30 digits.
LOG2_3 = 1.584962500721156      # H(1/3, 1/3, 1/3)
H_THIRD = 0.9182958340544895    # H(1/3, 2/3)
H_POINT2 = 0.7219280948873623   # H(0.2, 0.8)
NEG_LOG2_POINT2 = 2.321928094887362


def two_stage(source, rows, realized=None, labels=None):
    """Consistent two-stage chain: the target is the pushforward of ``source``."""
    src = TimeMomentSet(0, tuple((f"x{i + 1}", p) for i, p in enumerate(source)))
    rows = np.asarray(rows, dtype=float)
    pushed = np.asarray(source) @ rows
    labels = labels or [f"y{j + 1}" for j in range(rows.shape[1])]
    tgt = TimeMomentSet(1, tuple((labels[j], pushed[j]) for j in range(len(labels))))
    return ProcessChain([src, tgt], [OperatorKernel(rows)], realized)


@pytest.fixture
def merge_chain():
    return two_stage([1 / 3, 1 / 3, 1 / 3], [[1, 0], [0, 1], [0, 1]], realized=["x2", "y2"])


@pytest.fixture
def branch_chain():
    """Singleton source branching with alpha = 0.2; y1 occurred."""
    return two_stage([1.0], [[0.2, 0.8]], realized=["x1", "y1"])


@pytest.fixture
def identity_chain():
    return two_stage([0.5, 0.5], np.eye(2), realized=["x1", "y1"])


@st.composite
def distributions(draw, min_size=1, max_size=8):
    n = draw(st.integers(min_size, max_size))
    w = draw(st.lists(st.integers(1, 50), min_size=n, max_size=n))
    total = sum(w)
    return [v / total for v in w]


@st.composite
def rational_distributions(draw, min_size=1, max_size=6):
    n = draw(st.integers(min_size, max_size))
    w = draw(st.lists(st.integers(1, 30), min_size=n, max_size=n))
    return [Fraction(v, sum(w)) for v in w]


@st.composite
def stochastic_rows(draw, n, m, sparse=True):
    rows = []
    for _ in range(n):
        w = draw(st.lists(st.integers(0 if sparse else 1, 20), min_size=m, max_size=m))
        if sum(w) == 0:
            w[draw(st.integers(0, m - 1))] = 1
        rows.append([v / sum(w) for v in w])
    return np.array(rows)


@st.composite
def segments(draw, max_arity=6):
    """A source distribution and a general kernel out of it."""
    src = draw(distributions(1, max_arity))
    m = draw(st.integers(1, max_arity))
    rows = draw(stochastic_rows(len(src), m))
    return src, rows
