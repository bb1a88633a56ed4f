"""
Exact integer/rational linear algebra and dense integer polynomials.

Everything here is pure and immutable; values are plain Python ints so
intermediate growth never overflows.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class IntVector:
    """Integer lattice vector."""

    entries: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if not self.entries:
            raise ValueError("IntVector needs at least one entry")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __neg__(self) -> "IntVector":
        return IntVector(tuple(-x for x in self.entries))

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, index: int) -> int:
        return self.entries[index]


@dataclass(frozen=True)
class IntMatrix:
    """Integer matrix stored row-major."""

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"Invalid shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"Expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} "
                f"matrix, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("Ragged rows")
        return cls(len(rows), width, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        columns = [tuple(c) for c in columns]
        height = len(columns[0]) if columns else (rows or 0)
        if any(len(c) != height for c in columns):
            raise ValueError("Columns of unequal length")
        return cls(
            height,
            len(columns),
            tuple(columns[j][i] for i in range(height) for j in range(len(columns))),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> List[Tuple[int, ...]]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(
            len(rows), len(cols), tuple(self[i, j] for i in rows for j in cols)
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(self.columns())

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)


@dataclass(frozen=True)
class RatVector:
    """Rational vector with a common positive denominator, kept in lowest terms."""

    numerators: Tuple[int, ...]
    denominator: int = 1

    def __post_init__(self):
        nums = tuple(int(x) for x in self.numerators)
        den = int(self.denominator)
        if den == 0:
            raise ValueError("RatVector denominator must be nonzero")
        if den < 0:
            nums, den = tuple(-x for x in nums), -den
        g = gcd(den, *nums)
        if g > 1:
            nums, den = tuple(x // g for x in nums), den // g
        object.__setattr__(self, "numerators", nums)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_fractions(cls, values: Iterable[Fraction]) -> "RatVector":
        values = [Fraction(v) for v in values]
        den = 1
        for v in values:
            den = den * v.denominator // gcd(den, v.denominator)
        return cls(tuple(int(v * den) for v in values), den)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def scaled_dot(self, x: Sequence[int]) -> int:
        """Numerator of ``self . x``, i.e. ``denominator * (self . x)``."""
        return sum(a * b for a, b in zip(self.numerators, x))

    def dot(self, x: Sequence[int]) -> Fraction:
        return Fraction(self.scaled_dot(x), self.denominator)

    def to_fractions(self) -> List[Fraction]:
        return [Fraction(n, self.denominator) for n in self.numerators]


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, coefficient of x^k at index k."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs) if coeffs else (0,))

    @classmethod
    def one(cls) -> "IntPolynomial":
        return cls((1,))

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports 0."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __call__(self, x: int) -> int:
        value = 0
        for c in reversed(self.coeffs):
            value = value * x + c
        return value

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return poly_mul(self, other)

    def __pow__(self, k: int) -> "IntPolynomial":
        return poly_pow(self, k)

    def reversed(self) -> "IntPolynomial":
        return IntPolynomial(tuple(reversed(self.coeffs)))

    def to_list(self) -> List[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------

def det(M: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if M.rows != M.cols:
        raise ValueError(f"Determinant needs a square matrix, got {M.rows}x{M.cols}")
    return det_rows(M.to_rows())


def det_rows(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss determinant of a square matrix given as a list of rows."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    if any(len(r) != n for r in a):
        raise ValueError("Determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            factor = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def rank(M: IntMatrix) -> int:
    return rank_rows(M.to_rows())


def rank_rows(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank by integer elimination with row-content reduction."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    n, width = len(a), len(a[0])
    r = 0
    for c in range(width):
        pivot_row = next((i for i in range(r, n) if a[i][c] != 0), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        pivot = a[r][c]
        for i in range(r + 1, n):
            factor = a[i][c]
            if factor == 0:
                continue
            new_row = [a[i][j] * pivot - a[r][j] * factor for j in range(width)]
            g = gcd(*new_row)
            a[i] = [x // g for x in new_row] if g > 1 else new_row
        r += 1
        if r == n:
            break
    return r


def solve_unit_rhs(rows: Sequence[Sequence[int]]) -> Optional[RatVector]:
    """
    Solve ``rows . a = 1`` exactly for a square system.

    Args:
        rows: d integer points of length d

    Returns:
        The unique solution as a RatVector, or None when the system is singular
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("solve_unit_rhs needs a square system")
    a = [[Fraction(x) for x in r] + [Fraction(1)] for r in rows]
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot_row is None:
            return None
        a[c], a[pivot_row] = a[pivot_row], a[c]
        pivot = a[c][c]
        row_c = [x / pivot for x in a[c]]
        a[c] = row_c
        for i in range(n):
            if i != c and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [x - factor * y for x, y in zip(a[i], row_c)]
    return RatVector.from_fractions(a[i][n] for i in range(n))


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def poly_mul(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Exact convolution product."""
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return IntPolynomial(tuple(out))


def poly_pow(a: IntPolynomial, k: int) -> IntPolynomial:
    """a^k by square-and-multiply; a^0 = 1."""
    if k < 0:
        raise ValueError(f"Exponent must be nonnegative, got {k}")
    result = IntPolynomial.one()
    base = a
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def is_palindromic(a: IntPolynomial) -> bool:
    return a.coeffs == tuple(reversed(a.coeffs))


def is_unimodal(a: IntPolynomial) -> bool:
    """Coefficients weakly increase, then weakly decrease."""
    c = a.coeffs
    i = 0
    while i + 1 < len(c) and c[i] <= c[i + 1]:
        i += 1
    while i + 1 < len(c) and c[i] >= c[i + 1]:
        i += 1
    return i == len(c) - 1


def series_coeffs(h: IntPolynomial, d: int, N: int) -> List[int]:
    """
    Coefficients S(0..N) of h(x) / (1 - x)^d.

    Args:
        h: Numerator polynomial
        d: Exponent of the denominator, at least 1
        N: Last index to compute

    Returns:
        List of N + 1 integers
    """
    if d < 1:
        raise ValueError(f"Denominator exponent must be >= 1, got {d}")
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    return [
        sum(h.coeffs[j] * comb(n - j + d - 1, d - 1) for j in range(min(n, h.degree) + 1))
        for n in range(N + 1)
    ]


def series_numerator(S: Sequence[int], d: int) -> IntPolynomial:
    """Inverse of series_coeffs: the degree <= d numerator of sum S(n) x^n times (1 - x)^d."""
    if len(S) < d + 1:
        raise ValueError(f"Need at least {d + 1} series terms, got {len(S)}")
    return IntPolynomial(tuple(
        sum((-1) ** i * comb(d, i) * S[j - i] for i in range(j + 1))
        for j in range(d + 1)
    ))
