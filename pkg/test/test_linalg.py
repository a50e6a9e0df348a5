#!/usr/bin/env python3
"""
Tests for exact rational scalars, sparse matrices, Bareiss rank and linear solving.
"""

from fractions import Fraction

import pytest
from eliot import start_action
from hypothesis import given, settings
from hypothesis import strategies as st

from fano_mck.algebra.linalg import (
    LinearSolution,
    SparseMatrix,
    format_rational,
    rank,
    rat_arith,
    solve_columns,
    solve_linear,
)
from fano_mck.errors import DimensionMismatchError


small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def matrices(draw, max_rows: int = 5, max_cols: int = 5):
    n_rows = draw(st.integers(min_value=1, max_value=max_rows))
    n_cols = draw(st.integers(min_value=1, max_value=max_cols))
    rows = draw(
        st.lists(
            st.lists(st.one_of(st.just(Fraction(0)), small_rationals), min_size=n_cols, max_size=n_cols),
            min_size=n_rows,
            max_size=n_rows,
        )
    )
    return SparseMatrix.from_dense(rows)


@st.composite
def sparse_matrices(draw, max_size: int = 50, max_entries: int = 150):
    n_rows = draw(st.integers(min_value=1, max_value=max_size))
    n_cols = draw(st.integers(min_value=1, max_value=max_size))
    positions = st.tuples(st.integers(0, n_rows - 1), st.integers(0, n_cols - 1))
    entries = draw(st.dictionaries(positions, small_rationals.filter(bool), max_size=max_entries))
    return SparseMatrix(n_rows, n_cols, entries)


class TestRationals:
    """Canonical rationals and division-by-zero error values."""

    def test_canonical_form(self):
        with start_action(action_type="test_canonical_form"):
            assert rat_arith(2, 4, "div").value == Fraction(1, 2)
            assert format_rational(Fraction(-6, 4)) == "-3/2"
            assert format_rational(Fraction(0, 7)) == "0"
            assert format_rational(Fraction(18)) == "18"
            assert rat_arith(Fraction(1, 3), Fraction(1, 6), "add").value == Fraction(1, 2)

    def test_division_by_zero_is_an_error_value(self):
        result = rat_arith(1, 0, "div")
        assert not result.ok
        assert result.value is None
        assert "division by zero" in result.error_message


class TestSparseMatrix:
    """Rank and solving over Q."""

    def test_rank_of_small_examples(self):
        with start_action(action_type="test_rank_of_small_examples"):
            assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1
            assert rank(SparseMatrix.identity(3)) == 3
            assert rank(SparseMatrix(4, 4)) == 0
            assert rank(SparseMatrix.from_dense([[0, 1, 1], [1, 0, 1], [1, 1, 0]])) == 3
            assert rank(SparseMatrix.from_dense([[Fraction(1, 2), Fraction(1, 3)], [3, 2]])) == 1

    def test_zero_entries_are_not_stored(self):
        m = SparseMatrix.from_dense([[0, 1], [0, 0]])
        assert m.entries == {(0, 1): Fraction(1)}
        assert m.shape == (2, 2)

    def test_solve_unique(self):
        solution = solve_linear(SparseMatrix.from_dense([[2, 1], [1, 3]]), [3, 5])
        assert isinstance(solution, LinearSolution)
        assert solution.consistent and solution.unique
        assert solution.values == [Fraction(4, 5), Fraction(7, 5)]

    def test_solve_inconsistent(self):
        solution = solve_linear(SparseMatrix.from_dense([[1, 1], [1, 1]]), [1, 2])
        assert not solution.consistent
        assert solution.values is None
        assert solution.rank == 1

    def test_solve_underdetermined_sets_free_variables_to_zero(self):
        solution = solve_linear(SparseMatrix.from_dense([[1, 1, 0]]), [2])
        assert solution.consistent and not solution.unique
        assert solution.values == [2, 0, 0]

    def test_solve_columns(self):
        solutions = solve_columns(SparseMatrix.identity(2), [[1, 0], [0, 1]])
        assert [s.values for s in solutions] == [[1, 0], [0, 1]]

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            solve_linear(SparseMatrix.identity(2), [1, 2, 3])
        with pytest.raises(DimensionMismatchError):
            SparseMatrix.identity(2).apply([1])

    def test_keyed_rows(self):
        m = SparseMatrix.from_keyed_rows([{(0, 1): 1}, {(1, 0): 2, (0, 1): 1}])
        assert m.shape == (2, 2)
        assert rank(m) == 2


class TestRankProperties:
    """Rank invariances under transpose, row permutation and row scaling."""

    @given(matrices())
    def test_rank_equals_rank_of_transpose(self, m):
        assert rank(m) == rank(m.transpose())

    @given(matrices(), st.randoms(use_true_random=False))
    def test_rank_invariant_under_row_permutation(self, m, random):
        order = list(range(m.n_rows))
        random.shuffle(order)
        assert rank(m.permute_rows(order)) == rank(m)

    @given(matrices(), st.integers(min_value=0, max_value=4), small_rationals.filter(bool))
    def test_rank_invariant_under_row_scaling(self, m, row, factor):
        row = row % m.n_rows
        assert rank(m.scale_row(row, factor)) == rank(m)

    @given(matrices())
    def test_rank_agrees_with_elimination(self, m):
        solution = solve_linear(m, [0] * m.n_rows)
        assert solution.consistent
        assert solution.rank == rank(m)

    @given(matrices(), st.lists(small_rationals, min_size=5, max_size=5))
    def test_solutions_solve(self, m, x):
        rhs = m.apply(x[: m.n_cols])
        solution = solve_linear(m, rhs)
        assert solution.consistent
        assert m.apply(solution.values) == rhs


@pytest.mark.slow
class TestLargeSparseRank:
    """Rank on sparse matrices up to 50 x 50."""

    @settings(max_examples=60)
    @given(sparse_matrices())
    def test_rank_equals_rank_of_transpose(self, m):
        with start_action(action_type="test_large_rank_transpose", shape=m.shape, entries=len(m.entries)) as action:
            r = rank(m)
            action.add_success_fields(rank=r)
            assert r == rank(m.transpose())
            assert r <= min(m.shape)

    @settings(max_examples=60)
    @given(sparse_matrices())
    def test_rank_agrees_with_elimination(self, m):
        solution = solve_linear(m, [0] * m.n_rows)
        assert solution.consistent
        assert solution.rank == rank(m)

    @settings(max_examples=40)
    @given(sparse_matrices(max_size=25), small_rationals.filter(bool))
    def test_stacked_multiples_keep_the_rank(self, m, factor):
        entries = dict(m.entries)
        entries.update({(r + m.n_rows, c): value * factor for (r, c), value in m.entries.items()})
        stacked = SparseMatrix(2 * m.n_rows, m.n_cols, entries)
        assert rank(stacked) == rank(m)
        assert rank(stacked.transpose()) == rank(m)
