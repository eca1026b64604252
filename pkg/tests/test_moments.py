import numpy as np
import pytest
from conftest import fixture_seq, single_atom_measure, two_atom_measure
from hypothesis import given, settings
from hypothesis import strategies as st

from thmm.blockkit import is_hermitian
from thmm.moments import (
    DiscreteMatrixMeasure,
    InsufficientMomentsError,
    Interval,
    MomentSequence,
    check_solvability,
    hankel,
    hankel_matrix,
    is_positive_definite,
    moments_from_measure,
    random_hausdorff_sequence,
    transform_moments,
    u_vectors,
)


def scal(s):
    return np.real(np.asarray(s)[:, 0, 0])


def test_interval_order():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)


def test_single_atom_moments():
    s = moments_from_measure(single_atom_measure(), 2).s
    assert np.allclose(scal(s), [1, 0.5, 0.25], atol=0)


def test_two_atom_moments():
    s = moments_from_measure(two_atom_measure(), 4).s
    assert np.allclose(scal(s), [2, 1, 5 / 8, 7 / 16, 41 / 128], rtol=0, atol=1e-15)


def test_empty_measure_has_zero_moments():
    mu = DiscreteMatrixMeasure(Interval(0, 1), [], np.zeros((0, 2, 2)))
    assert not np.any(mu.moments(3))


@pytest.mark.parametrize("t,W", [
    ([1.5], np.ones((1, 1, 1))),
    ([0.2, 0.2], np.ones((2, 1, 1))),
    ([0.2], -np.ones((1, 1, 1))),
    ([0.2], np.array([[[1, 1], [0, 1]]])),
])
def test_measure_validation(t, W):
    with pytest.raises(ValueError):
        DiscreteMatrixMeasure(Interval(0, 1), t, W)


def test_sequence_rejects_non_hermitian():
    s = np.zeros((2, 2, 2), dtype=complex)
    s[1, 0, 1] = 1.0
    with pytest.raises(ValueError):
        MomentSequence(Interval(0, 1), s)


def test_parity_and_order():
    assert fixture_seq(3).parity == "even" and fixture_seq(3).n == 1
    assert fixture_seq(4).parity == "odd" and fixture_seq(4).n == 2


def test_transforms_on_fixture():
    seq = fixture_seq(4)
    assert np.allclose(scal(transform_moments(seq, 3).s)[:3], [1, 3 / 8, 3 / 16], atol=1e-15)
    assert scal(transform_moments(seq, 4).s)[0] == pytest.approx(1.0)
    assert scal(transform_moments(seq, 2).s)[0] == pytest.approx(3 / 8)
    assert transform_moments(seq, 2).m == 2
    assert transform_moments(seq, 3).m == 3


@pytest.mark.parametrize("r", [2, 3, 4])
def test_transforms_match_perturbed_measure(r):
    mu, seq = random_hausdorff_sequence(2, 5, Interval(-1.0, 2.0), 11)
    ts = transform_moments(seq, r)
    direct = mu.perturbed(r).moments(ts.m)
    assert np.allclose(ts.s, direct, atol=1e-12)


def test_transform_needs_enough_moments():
    with pytest.raises(InsufficientMomentsError):
        transform_moments(fixture_seq(1), 2)


def test_hankel_layout():
    b = hankel(fixture_seq(3), 1)
    assert np.allclose(b.H, [[2, 1], [1, 5 / 8]])
    assert np.linalg.det(b.H).real == pytest.approx(0.25)
    assert np.allclose(b.Htilde, [[1, 5 / 8], [5 / 8, 7 / 16]])
    assert np.allclose(b.Y, [[1.0]])


def test_single_atom_hankel_is_singular():
    H = hankel(moments_from_measure(single_atom_measure(), 2), 1).H
    assert np.allclose(H, [[1, 0.5], [0.5, 0.25]])
    assert not is_positive_definite(H)


def test_hankel_needs_moments():
    with pytest.raises(InsufficientMomentsError):
        hankel_matrix(fixture_seq(2).s, 3)


def test_u_vectors_on_fixture():
    rec = u_vectors(fixture_seq(3), 1)
    assert np.allclose(rec.u.ravel(), [-2, -1])
    assert np.allclose(rec.u1.ravel(), [0, -2])
    assert np.allclose(rec.u3.ravel(), [2, -1])
    assert np.allclose(rec.u4, rec.u)


def test_u2_depends_linearly_on_z():
    rec = u_vectors(fixture_seq(3), 1)
    z = 0.3 + 0.1j
    assert np.allclose(rec.u2(z) - rec.u2(0), z * np.array([[2], [0]]))


def test_verdict_fixture():
    v = check_solvability(fixture_seq(2))
    assert v.pd and v.parity == "odd" and v.failures == []
    mins = dict(v.min_eigs)
    assert mins["H_2,0"] == pytest.approx(3 / 8)


def test_verdict_single_atom_names_block():
    v = check_solvability(moments_from_measure(single_atom_measure(), 2))
    assert not v.pd
    assert "H_1,1" in v.failures


def test_verdict_even_case_blocks():
    v = check_solvability(fixture_seq(3))
    assert v.pd
    assert set(dict(v.min_eigs)) == {"H_3,1", "H_4,1"}
    assert v.assumptions["H1tilde"] is True


def test_generator_examples():
    _, seq = random_hausdorff_sequence(1, 2, Interval(0, 1), 42)
    assert check_solvability(seq).pd
    _, seq = random_hausdorff_sequence(2, 5, Interval(-1, 2), 7)
    assert all(is_hermitian(s) for s in seq.s)
    assert check_solvability(seq).pd


def test_generator_is_deterministic():
    a = random_hausdorff_sequence(1, 2, Interval(0, 1), 42)
    b = random_hausdorff_sequence(1, 2, Interval(0, 1), 42)
    assert np.array_equal(a[1].s, b[1].s)
    assert np.array_equal(a[0].t, b[0].t)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 7), st.integers(0, 10_000),
       st.sampled_from([(0.0, 1.0), (-1.0, 2.0), (0.5, 3.0)]))
def test_generated_sequences_are_positive_definite(q, m, seed, ab):
    mu, seq = random_hausdorff_sequence(q, m, Interval(*ab), seed)
    assert seq.m == m and seq.q == q
    assert all(ab[0] < t < ab[1] for t in mu.t)
    assert check_solvability(seq).pd


def test_stieltjes_and_inner_product():
    from thmm.polynomial import MatrixPolynomial

    mu = two_atom_measure()
    z = 2j
    assert mu.stieltjes(z)[0, 0] == pytest.approx(1 / (0.25 - z) + 1 / (0.75 - z))
    one = MatrixPolynomial.identity(1)
    assert mu.inner(one, one)[0, 0] == pytest.approx(2.0)


def test_inner_product_by_coefficients():
    from thmm.polynomial import MatrixPolynomial

    mu, seq = random_hausdorff_sequence(2, 6, Interval(-1.0, 2.0), 5)
    rng = np.random.default_rng(0)
    A = rng.standard_normal((4, 2, 2)) + 1j * rng.standard_normal((4, 2, 2))
    B = rng.standard_normal((4, 2, 2)) + 1j * rng.standard_normal((4, 2, 2))
    H = hankel(seq, 3).H
    row = np.hstack(list(A))
    col = np.vstack([b.conj().T for b in B])
    assert np.allclose(mu.inner(MatrixPolynomial(A), MatrixPolynomial(B)), row @ H @ col, atol=1e-9)


@pytest.mark.parametrize("ab", [(0.0, 1.0), (0.5, 3.0), (-2.0, 0.0), (-3.0, -0.5)])
def test_shifted_hankel_definite_off_zero(ab):
    _, seq = random_hausdorff_sequence(2, 5, Interval(*ab), 1)
    Ht = hankel(seq, 2).Htilde
    eig = np.linalg.eigvalsh(Ht)
    assert np.all(eig > 0) or np.all(eig < 0)
    assert check_solvability(seq).assumptions["H1tilde"] is True


def test_verdict_odd_assumptions():
    v = check_solvability(fixture_seq(2))
    assert v.parity == "odd"
    assert v.assumptions["Gamma"] is True and v.assumptions["Gamma_diff"] is True
    assert v.assumptions_ok
