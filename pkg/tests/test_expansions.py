import numpy as np
import pytest
from conftest import fixture_inst, random_inst
from hypothesis import given, settings
from hypothesis import strategies as st

from thmm.blockkit import adj
from thmm.expansions import (
    compare,
    even_entries_dense,
    extract_at_a,
    extract_at_zero,
    general_even_coefficient,
    series_even_at_a,
    series_even_at_zero,
    series_odd_at_a,
    series_odd_at_zero,
)
from thmm.omp import first_kind, second_kind
from thmm.resolvent import V_even, V_odd, U_even, U_odd, odd_coupling, residual

seeds = st.integers(0, 5000)
intervals = st.sampled_from([(0.0, 1.0), (-1.0, 2.0), (0.5, 3.0)])


def test_even_at_zero_fixture():
    inst = fixture_inst(3)
    series = series_even_at_zero(inst)
    assert len(series) == inst.n + 3
    assert np.array_equal(series.coeffs[0][:1, :1], np.eye(1))
    assert max(compare(series, extract_at_zero(inst))) <= 1e-10


@pytest.mark.parametrize("m", [3, 5, 7])
def test_top_coefficient_has_single_block(m):
    inst = random_inst(2, m, -1.0, 2.0, seed=m)
    top = series_even_at_zero(inst).coeffs[-1]
    q = inst.q
    assert not np.any(top[:q, :q]) and not np.any(top[q:, :])
    assert np.any(top[:q, q:])


@pytest.mark.parametrize("m", [5, 7, 9])
def test_general_even_form_through_order_n(m):
    inst = random_inst(1, m, 0.0, 1.0, seed=1)
    ext = extract_at_zero(inst)
    for j in range(2, inst.n + 1):
        assert residual(general_even_coefficient(inst, j), ext[j]) <= 1e-9


def test_odd_at_zero_fixture():
    inst = fixture_inst(2)
    series = series_odd_at_zero(inst)
    cp = odd_coupling(inst)
    assert len(series) == inst.n + 2
    assert np.array_equal(series.coeffs[0], cp.CD)
    assert np.allclose(series.coeffs[0][1:, :1], cp.N)
    assert max(compare(series, extract_at_zero(inst))) <= 1e-10


def test_even_at_a_leading_terms():
    inst = random_inst(2, 5, -1.0, 2.0, seed=8)
    a, q, n = inst.a, inst.q, inst.n
    series = series_even_at_a(inst)
    P1, Q1 = first_kind(inst, 1, n + 1), second_kind(inst, 1, n + 1)
    C0 = series.coeffs[0]
    assert np.allclose(C0[:q, :q], np.eye(q))
    assert np.allclose(C0[q:, q:], np.eye(q))
    assert not np.any(C0[q:, :q])
    assert np.allclose(C0[:q, q:], -adj(Q1(a)) @ np.linalg.inv(adj(P1(a))))


def test_even_at_a_order_n_plus_one_corner():
    # The second-kind polynomial of the second family has degree n+1, so this corner is not zero.
    inst = random_inst(2, 5, -1.0, 2.0, seed=8)
    q, n, a = inst.q, inst.n, inst.a
    corner = series_even_at_a(inst).coeffs[n + 1][:q, :q]
    Q2a = second_kind(inst, 2, n)(a)
    assert np.allclose(corner, -inst.seq.s[0] @ np.linalg.inv(adj(Q2a)), atol=1e-10)
    assert residual(corner, extract_at_a(inst)[n + 1][:q, :q]) <= 1e-10


def test_odd_at_a_fixture():
    inst = fixture_inst(2)
    series = series_odd_at_a(inst)
    q = inst.q
    assert len(series) == inst.n + 2
    assert not np.any(series.coeffs[-1][:q, :])
    assert max(compare(series, extract_at_a(inst))) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 2), st.integers(1, 3), seeds, intervals)
def test_all_series_match_extraction(q, n, seed, ab):
    even = random_inst(q, 2 * n + 1, *ab, seed=seed)
    odd = random_inst(q, 2 * n, *ab, seed=seed)
    assert max(compare(series_even_at_zero(even), extract_at_zero(even))) <= 1e-9
    assert max(compare(series_even_at_a(even), extract_at_a(even))) <= 1e-9
    assert max(compare(series_odd_at_zero(odd), extract_at_zero(odd))) <= 1e-9
    assert max(compare(series_odd_at_a(odd), extract_at_a(odd))) <= 1e-9


def test_series_evaluate_reproduces_matrices():
    even, odd = random_inst(2, 5, seed=2), random_inst(2, 4, seed=2)
    for z in (0.3, 1 + 1j, -2j):
        assert residual(series_even_at_zero(even).evaluate(z), V_even(even, z).M) <= 1e-10
        assert residual(series_odd_at_zero(odd).evaluate(z), V_odd(odd, z).M) <= 1e-10
        assert residual(series_even_at_a(even).evaluate(z), U_even(even, z).M) <= 1e-10
        assert residual(series_odd_at_a(odd).evaluate(z), U_odd(odd, z).M) <= 1e-10


@pytest.mark.parametrize("ab", [(0.0, 1.0), (-1.0, 2.0)])
def test_dense_entry_formulas(ab):
    inst = random_inst(2, 5, *ab, seed=6)
    for z in (0.4 + 0.3j, 2.5, -0.7j):
        assert residual(even_entries_dense(inst, z), V_even(inst, z).M) <= 1e-9


def test_sources_are_labelled():
    series = series_even_at_zero(random_inst(1, 7, seed=0))
    assert series.sources[0] == "A0" and series.sources[-1] == "A_{n+2}"
    assert "extraction" in series.sources
