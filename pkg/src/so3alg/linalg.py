"""Dense exact linear algebra over the rationals.

Matrices are small (desk scale), so a plain list-of-lists representation with
``fractions.Fraction`` entries is used throughout.  Elimination uses
first-nonzero pivoting, so every derived basis (kernels, images, cokernel
complements) is deterministic for a given input.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction

__all__ = ["Q", "QMatrix"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational scalar: {x!r}")


class QMatrix:
    """An immutable-by-convention rows x cols matrix of Fractions."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] | None = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[Q(0)] * cols for _ in range(rows)]
        else:
            if len(data) != rows:
                raise ValueError("row count mismatch")
            self.data = []
            for r in data:
                if len(r) != cols:
                    raise ValueError("column count mismatch")
                self.data.append([_frac(x) for x in r])

    # -- constructors -------------------------------------------------

    @staticmethod
    def identity(n: int) -> "QMatrix":
        m = QMatrix(n, n)
        for i in range(n):
            m.data[i][i] = Q(1)
        return m

    @staticmethod
    def zero(rows: int, cols: int) -> "QMatrix":
        return QMatrix(rows, cols)

    @staticmethod
    def from_rows(rows: Iterable[Sequence]) -> "QMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return QMatrix(0, 0)
        return QMatrix(len(rows), len(rows[0]), rows)

    @staticmethod
    def column(vec: Sequence) -> "QMatrix":
        return QMatrix(len(vec), 1, [[x] for x in vec])

    @staticmethod
    def diagonal(entries: Sequence) -> "QMatrix":
        n = len(entries)
        m = QMatrix(n, n)
        for i, x in enumerate(entries):
            m.data[i][i] = _frac(x)
        return m

    def copy(self) -> "QMatrix":
        return QMatrix(self.rows, self.cols, [row[:] for row in self.data])

    # -- basics --------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols}, {self.data})"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in add")
        return QMatrix(
            self.rows,
            self.cols,
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.data, other.data)
            ],
        )

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return self + other.scale(Q(-1))

    def scale(self, k) -> "QMatrix":
        k = _frac(k)
        return QMatrix(self.rows, self.cols, [[k * x for x in row] for row in self.data])

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch in mul: {self.cols} vs {other.rows}")
        out = QMatrix(self.rows, other.cols)
        for i in range(self.rows):
            ri = self.data[i]
            oi = out.data[i]
            for k in range(self.cols):
                a = ri[k]
                if a == 0:
                    continue
                rk = other.data[k]
                for j in range(other.cols):
                    if rk[j] != 0:
                        oi[j] += a * rk[j]
        return out

    def transpose(self) -> "QMatrix":
        return QMatrix(
            self.cols, self.rows, [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return QMatrix(
            self.rows,
            self.cols + other.cols,
            [r1 + r2 for r1, r2 in zip(self.data, other.data)],
        )

    def vstack(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.cols:
            raise ValueError("col mismatch in vstack")
        return QMatrix(self.rows + other.rows, self.cols, [r[:] for r in self.data] + [r[:] for r in other.data])

    def col(self, j: int) -> list[Fraction]:
        return [self.data[i][j] for i in range(self.rows)]

    def apply(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum((self.data[i][j] * _frac(vec[j]) for j in range(self.cols)), Q(0)) for i in range(self.rows)]

    # -- elimination ---------------------------------------------------

    def rref(self) -> tuple["QMatrix", list[int]]:
        """Reduced row echelon form with first-nonzero pivoting.

        Returns (R, pivot_columns).
        """
        m = self.copy()
        pivots: list[int] = []
        r = 0
        for c in range(m.cols):
            if r == m.rows:
                break
            # first nonzero entry in column c at or below row r
            pr = next((i for i in range(r, m.rows) if m.data[i][c] != 0), None)
            if pr is None:
                continue
            m.data[r], m.data[pr] = m.data[pr], m.data[r]
            pv = m.data[r][c]
            m.data[r] = [x / pv for x in m.data[r]]
            for i in range(m.rows):
                if i != r and m.data[i][c] != 0:
                    f = m.data[i][c]
                    m.data[i] = [x - f * y for x, y in zip(m.data[i], m.data[r])]
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "QMatrix":
        """Basis of the null space, as columns of the returned matrix."""
        R, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        out = QMatrix(self.cols, len(free))
        for k, fc in enumerate(free):
            out.data[fc][k] = Q(1)
            for r, pc in enumerate(pivots):
                out.data[pc][k] = -R.data[r][fc]
        return out

    def column_space_basis(self) -> list[int]:
        """Indices of a deterministic basis among the columns."""
        return self.rref()[1]

    def cokernel_data(self) -> tuple["QMatrix", int]:
        """Projection onto a complement of the column space.

        Returns (P, d) where P is d x rows and P @ self == 0, with P of full
        row rank d = rows - rank(self); P restricted to the chosen complement
        coordinates is the identity-like quotient map.
        """
        # Row-reduce the transpose: rows of self^T span the column space.
        Rt, pivots = self.transpose().rref()
        comp = [i for i in range(self.rows) if i not in pivots]
        d = len(comp)
        P = QMatrix(d, self.rows)
        # quotient coordinates: e_i for i in comp; for pivot coordinates
        # subtract their expression in terms of the column space.
        # For v in Q^rows, class of v = coords of v after reducing modulo the
        # row space of Rt: use the rref rows to eliminate pivot coordinates.
        for k, i in enumerate(comp):
            P.data[k][i] = Q(1)
        rank = len(pivots)
        for r in range(rank):
            pc = pivots[r]
            # e_{pc} is congruent to -sum over free coords of Rt.data[r][free]
            for k, i in enumerate(comp):
                P.data[k][pc] = -Rt.data[r][i]
        return P, d

    def solve(self, b: Sequence) -> list[Fraction] | None:
        """One solution of self @ x = b, or None if inconsistent."""
        aug = self.hstack(QMatrix.column([_frac(x) for x in b]))
        R, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [Q(0)] * self.cols
        for r, c in enumerate(pivots):
            x[c] = R.data[r][self.cols]
        return x

    def solve_matrix(self, B: "QMatrix") -> "QMatrix | None":
        """Solve self @ X = B for X, or None if inconsistent."""
        cols = []
        for j in range(B.cols):
            x = self.solve(B.col(j))
            if x is None:
                return None
            cols.append(x)
        return QMatrix(self.cols, B.cols, [[cols[j][i] for j in range(B.cols)] for i in range(self.cols)])

    def inverse(self) -> "QMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        aug = self.hstack(QMatrix.identity(self.rows))
        R, pivots = aug.rref()
        if pivots[: self.rows] != list(range(self.rows)):
            raise ValueError("matrix is singular")
        return QMatrix(
            self.rows, self.rows, [row[self.rows :] for row in R.data]
        )

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows
