import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thmm.blockkit import (
    adj,
    get_block,
    make_shift,
    make_truncations,
    make_v,
    shift_resolvent,
    signature_matrices,
)

orders = st.integers(min_value=1, max_value=6)
sizes = st.integers(min_value=1, max_value=3)
points = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def test_shift_smallest_cases():
    assert np.array_equal(make_shift(0, 1), [[0]])
    assert np.array_equal(make_shift(1, 1), [[0, 0], [1, 0]])


def test_shift_block_placement():
    T = make_shift(2, 2)
    assert T.shape == (6, 6)
    for k in range(3):
        for l in range(3):
            expect = np.eye(2) if k == l + 1 else np.zeros((2, 2))
            assert np.array_equal(get_block(T, k, l, 2), expect)


@given(orders, sizes)
def test_shift_is_nilpotent(j, q):
    T = make_shift(j, q)
    assert np.any(np.linalg.matrix_power(T, j))
    assert not np.any(np.linalg.matrix_power(T, j + 1))


def test_shift_rejects_bad_sizes():
    with pytest.raises(ValueError):
        make_shift(-1, 1)
    with pytest.raises(ValueError):
        make_shift(1, 0)


def test_truncations_smallest():
    L1, L2 = make_truncations(1, 1)
    assert np.array_equal(L1, [[0], [1]])
    assert np.array_equal(L2, [[1], [0]])


def test_truncations_reject_order_zero():
    with pytest.raises(ValueError):
        make_truncations(0, 2)


def test_truncation_products_give_shifts():
    L1, L2 = make_truncations(2, 1)
    assert np.array_equal(L1 @ adj(L2), make_shift(2, 1))
    assert np.array_equal(adj(L2) @ L1, make_shift(1, 1))


@given(orders, sizes)
def test_truncation_shift_relations(j, q):
    T = make_shift(j, q)
    Tp = make_shift(j - 1, q)
    L1, L2 = make_truncations(j, q)
    I = np.eye(j * q)
    assert np.array_equal(adj(L1) @ L1, I)
    assert np.array_equal(adj(L2) @ L2, I)
    assert np.array_equal(adj(L1) @ T, adj(L2))
    assert np.array_equal(T @ L2, L1)
    assert np.array_equal(adj(L1) @ T @ L2, I)
    assert np.array_equal(adj(L1) @ T @ L1, Tp)
    assert np.array_equal(adj(L2) @ T @ L2, Tp)
    assert np.array_equal(T @ L1, L1 @ Tp)
    assert np.array_equal(adj(T) @ L2, L2 @ adj(Tp))


def test_shift_resolvent_small():
    z = 0.3 - 0.7j
    assert np.allclose(shift_resolvent(1, 1, z), [[1, 0], [z, 1]], atol=0)
    assert np.array_equal(shift_resolvent(3, 2, 0.0), np.eye(8))


def test_shift_resolvent_matches_dense_solve():
    R = shift_resolvent(3, 1, 2.0)
    oracle = np.linalg.solve(np.eye(4) - 2.0 * make_shift(3, 1), np.eye(4))
    assert R[3, 0] == 8
    assert np.allclose(R, oracle, rtol=0, atol=1e-13)


@given(orders, sizes, points)
def test_shift_resolvent_inverts(j, q, z):
    R = shift_resolvent(j, q, z)
    err = np.abs((np.eye((j + 1) * q) - z * make_shift(j, q)) @ R - np.eye((j + 1) * q)).max()
    assert err <= 1e-13 * (1 + abs(z) ** (j + 1))


@settings(max_examples=40)
@given(orders, sizes, points)
def test_resolvent_commutes_with_truncation(j, q, z):
    L1, L2 = make_truncations(j, q)
    R, Rp = shift_resolvent(j, q, z), shift_resolvent(j - 1, q, z)
    scale = 1e-13 * (1 + abs(z) ** j)
    assert np.abs(R @ L1 - L1 @ Rp).max() <= scale
    assert np.abs(adj(R) @ L2 - L2 @ adj(Rp)).max() <= scale


def test_make_v():
    assert np.array_equal(make_v(0, 2), np.eye(2))
    assert np.array_equal(make_v(2, 1), [[1], [0], [0]])
    _, L2 = make_truncations(3, 1)
    assert np.array_equal(L2 @ make_v(2, 1), make_v(3, 1))


def test_signature_q1():
    J, Jf = signature_matrices(1)
    assert np.array_equal(J, [[0, -1j], [1j, 0]])
    assert np.array_equal(Jf, [[0, 1], [1, 0]])


@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_signatures_are_hermitian_involutions(q):
    J, Jf = signature_matrices(q)
    for M in (J, Jf):
        assert np.array_equal(M @ M, np.eye(2 * q))
        assert np.array_equal(adj(M), M)


def test_cached_matrices_are_read_only():
    T = make_shift(2, 1)
    with pytest.raises(ValueError):
        T[0, 0] = 1
