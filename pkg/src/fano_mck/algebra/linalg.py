"""Exact rational scalars and sparse linear algebra over Q.

Rank uses fraction-free (Bareiss) elimination on integer-scaled rows with
leftmost-nonzero pivoting; solving uses Gauss-Jordan over ``Fraction``.
"""

from fractions import Fraction
from math import lcm
from typing import Hashable, Iterable, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict

from fano_mck.errors import DimensionMismatchError

Rational = Fraction
Scalar = Union[int, Fraction]
RationalOp = Literal["add", "sub", "mul", "div"]


def format_rational(value: Scalar) -> str:
    """Serialize a rational as ``"p/q"`` (or ``"p"`` when q = 1)."""
    return str(Fraction(value))


class RationalResult(BaseModel):
    """Result of a scalar operation; division by zero is an error value, not an exception."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: Optional[Fraction] = None
    error_message: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error_message is None


def rat_arith(a: Scalar, b: Scalar, op: RationalOp) -> RationalResult:
    """Apply ``op`` to two rationals, returning the canonical reduced result."""
    x, y = Fraction(a), Fraction(b)
    if op == "add":
        return RationalResult(value=x + y)
    if op == "sub":
        return RationalResult(value=x - y)
    if op == "mul":
        return RationalResult(value=x * y)
    if op == "div":
        if y == 0:
            return RationalResult(error_message=f"division by zero: {format_rational(x)} / 0")
        return RationalResult(value=x / y)
    return RationalResult(error_message=f"unknown operation {op!r}")


class SparseMatrix:
    """Immutable sparse matrix over Q keyed by (row, column); zero entries are never stored."""

    __slots__ = ("n_rows", "n_cols", "_entries")

    def __init__(self, n_rows: int, n_cols: int, entries: Optional[dict[tuple[int, int], Scalar]] = None):
        if n_rows < 0 or n_cols < 0:
            raise DimensionMismatchError(f"negative shape {n_rows}x{n_cols}")
        cleaned: dict[tuple[int, int], Fraction] = {}
        for (r, c), value in (entries or {}).items():
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise DimensionMismatchError(f"entry ({r}, {c}) outside {n_rows}x{n_cols}")
            value = Fraction(value)
            if value != 0:
                cleaned[(r, c)] = value
        self.n_rows = n_rows
        self.n_cols = n_cols
        self._entries = cleaned

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[Scalar]]) -> "SparseMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        entries = {}
        for r, row in enumerate(rows):
            if len(row) != n_cols:
                raise DimensionMismatchError("ragged dense matrix")
            for c, value in enumerate(row):
                entries[(r, c)] = value
        return cls(n_rows, n_cols, entries)

    @classmethod
    def identity(cls, size: int) -> "SparseMatrix":
        return cls(size, size, {(i, i): 1 for i in range(size)})

    @classmethod
    def from_keyed_rows(
        cls, rows: Sequence[dict[Hashable, Scalar]], columns: Optional[Sequence[Hashable]] = None
    ) -> "SparseMatrix":
        """Build a matrix whose columns are the (sorted) union of the row keys, or ``columns`` if given."""
        if columns is None:
            columns = sorted({key for row in rows for key in row})
        position = {key: c for c, key in enumerate(columns)}
        entries = {}
        for r, row in enumerate(rows):
            for key, value in row.items():
                if key not in position:
                    raise DimensionMismatchError(f"row key {key!r} is not a column")
                entries[(r, position[key])] = value
        return cls(len(rows), len(columns), entries)

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def get(self, r: int, c: int) -> Fraction:
        return self._entries.get((r, c), Fraction(0))

    def row_dicts(self) -> list[dict[int, Fraction]]:
        rows: list[dict[int, Fraction]] = [{} for _ in range(self.n_rows)]
        for (r, c), value in self._entries.items():
            rows[r][c] = value
        return rows

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[Fraction(0)] * self.n_cols for _ in range(self.n_rows)]
        for (r, c), value in self._entries.items():
            dense[r][c] = value
        return dense

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.n_cols, self.n_rows, {(c, r): v for (r, c), v in self._entries.items()})

    def permute_rows(self, order: Sequence[int]) -> "SparseMatrix":
        if sorted(order) != list(range(self.n_rows)):
            raise DimensionMismatchError("row order is not a permutation")
        new_index = {old: new for new, old in enumerate(order)}
        return SparseMatrix(self.n_rows, self.n_cols, {(new_index[r], c): v for (r, c), v in self._entries.items()})

    def scale_row(self, row: int, factor: Scalar) -> "SparseMatrix":
        return SparseMatrix(
            self.n_rows,
            self.n_cols,
            {(r, c): (v * factor if r == row else v) for (r, c), v in self._entries.items()},
        )

    def apply(self, vector: Sequence[Scalar]) -> list[Fraction]:
        if len(vector) != self.n_cols:
            raise DimensionMismatchError(f"vector of length {len(vector)} against {self.n_cols} columns")
        result = [Fraction(0)] * self.n_rows
        for (r, c), value in self._entries.items():
            result[r] += value * vector[c]
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __repr__(self) -> str:
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={len(self._entries)})"


def _integral_row(row: dict[int, Fraction]) -> dict[int, int]:
    scale = lcm(*(value.denominator for value in row.values()))
    return {c: int(value * scale) for c, value in row.items()}


def rank(m: SparseMatrix) -> int:
    """Exact rank over Q by Bareiss elimination with leftmost-nonzero pivoting."""
    rows = [_integral_row(row) for row in m.row_dicts() if row]
    previous_pivot = 1
    result = 0
    while rows:
        column = min(min(row) for row in rows)
        pivot_index = next(i for i, row in enumerate(rows) if column in row)
        pivot_row = rows.pop(pivot_index)
        pivot = pivot_row[column]
        reduced = []
        for row in rows:
            factor = row.get(column, 0)
            updated = {}
            for c in row.keys() | pivot_row.keys():
                value = (pivot * row.get(c, 0) - factor * pivot_row.get(c, 0)) // previous_pivot
                if value:
                    updated[c] = value
            if updated:
                reduced.append(updated)
        rows = reduced
        previous_pivot = pivot
        result += 1
    return result


class LinearSolution(BaseModel):
    """Outcome of ``solve_linear``: one exact solution, or an inconsistency report."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    consistent: bool
    values: Optional[list[Fraction]] = None
    unique: bool = False
    rank: int = 0


def solve_linear(m: SparseMatrix, rhs: Sequence[Scalar]) -> LinearSolution:
    """Solve ``m x = rhs`` exactly; free variables are set to zero."""
    if len(rhs) != m.n_rows:
        raise DimensionMismatchError(f"rhs of length {len(rhs)} against {m.n_rows} rows")
    remaining = [(row, Fraction(b)) for row, b in zip(m.row_dicts(), rhs)]
    pivots: list[tuple[int, dict[int, Fraction], Fraction]] = []
    while True:
        live = [item for item in remaining if item[0]]
        if not live:
            break
        column = min(min(row) for row, _ in live)
        index = next(i for i, (row, _) in enumerate(remaining) if column in row)
        pivot_row, pivot_rhs = remaining.pop(index)
        scale = pivot_row[column]
        pivot_row = {c: v / scale for c, v in pivot_row.items()}
        pivot_rhs = pivot_rhs / scale
        remaining = [_eliminate(row, b, column, pivot_row, pivot_rhs) for row, b in remaining]
        pivots = [(c, *_eliminate(row, b, column, pivot_row, pivot_rhs)) for c, row, b in pivots]
        pivots.append((column, pivot_row, pivot_rhs))
    if any(b != 0 for _, b in remaining):
        return LinearSolution(consistent=False, rank=len(pivots))
    values = [Fraction(0)] * m.n_cols
    for column, _, b in pivots:
        values[column] = b
    return LinearSolution(consistent=True, values=values, unique=len(pivots) == m.n_cols, rank=len(pivots))


def _eliminate(
    row: dict[int, Fraction], b: Fraction, column: int, pivot_row: dict[int, Fraction], pivot_rhs: Fraction
) -> tuple[dict[int, Fraction], Fraction]:
    factor = row.get(column)
    if not factor:
        return row, b
    updated = dict(row)
    for c, value in pivot_row.items():
        new_value = updated.get(c, 0) - factor * value
        if new_value:
            updated[c] = new_value
        else:
            updated.pop(c, None)
    return updated, b - factor * pivot_rhs


def solve_columns(m: SparseMatrix, columns: Iterable[Sequence[Scalar]]) -> list[LinearSolution]:
    """Solve ``m x = c`` for each right-hand side ``c``."""
    return [solve_linear(m, column) for column in columns]
