import numpy as np
import pytest

from thmm.instance import Instance
from thmm.moments import DiscreteMatrixMeasure, Interval, moments_from_measure, random_hausdorff_sequence


def two_atom_measure():
    """Unit weights at 1/4 and 3/4 on [0, 1]."""
    return DiscreteMatrixMeasure(Interval(0.0, 1.0), [0.25, 0.75], np.ones((2, 1, 1)))


def single_atom_measure(t0=0.5, w=1.0):
    return DiscreteMatrixMeasure(Interval(0.0, 1.0), [t0], np.full((1, 1, 1), w))


def fixture_seq(m):
    return moments_from_measure(two_atom_measure(), m)


def fixture_inst(m):
    return Instance(fixture_seq(m))


def random_inst(q, m, a=0.0, b=1.0, seed=0):
    _, seq = random_hausdorff_sequence(q, m, Interval(a, b), seed)
    return Instance(seq)


@pytest.fixture
def measure():
    return two_atom_measure()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
