"""Exact integer and rational linear algebra.

Matrices hold Python ``int`` or ``fractions.Fraction`` entries and act on
column vectors.  Lattices are sets of column vectors in ``Z^n``; a
:class:`LatticeBasis` stores its generators as integer tuples.

The lattice routines (Hermite and Smith normal forms, saturated kernels,
unimodular completion, positive points) never round.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Sequence, Union

Scalar = Union[int, Fraction]

__all__ = [
    "LatticeBasis",
    "LatticeError",
    "Matrix",
    "hnf",
    "kernel_lattice",
    "parse_rational",
    "positive_lattice_point",
    "rational_str",
    "snf",
    "solve_rational",
    "unimodular_completion",
]


class LatticeError(ValueError):
    """Raised when a lattice basis violates a precondition."""


def _norm(x) -> Scalar:
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _norm(Fraction(x))
    if isinstance(x, float):
        if not x.is_integer():
            raise TypeError(f"inexact entry {x!r}")
        return int(x)
    # numpy integers and friends
    return _norm(Fraction(x))


def parse_rational(s) -> Scalar:
    """Parse ``"p/q"``, ``"p"`` or an int into a normalized exact scalar."""
    return _norm(Fraction(s) if isinstance(s, str) else s)


def rational_str(x: Scalar) -> str:
    x = _norm(x)
    return str(x)


class Matrix:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        data = tuple(tuple(_norm(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols required for a matrix without rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        self.nrows = len(data)
        self.ncols = ncols
        self._rows = data

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(((1 if i == j else 0) for j in range(n)) for i in range(n)) if n else cls((), 0)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls((tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "Matrix":
        """The matrix unit E_ij (0-based indices)."""
        return cls(((1 if (a, b) == (i, j) else 0) for b in range(n)) for a in range(n))

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def rows(self) -> tuple:
        return self._rows

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._rows]

    def transpose(self) -> "Matrix":
        return Matrix(self.columns(), self.nrows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self._rows for x in r)

    # arithmetic -------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix((tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix((tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols)

    def __neg__(self) -> "Matrix":
        return Matrix((tuple(-a for a in r) for r in self._rows), self.ncols)

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            return NotImplemented
        c = _norm(c)
        return Matrix((tuple(c * a for a in r) for r in self._rows), self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix(
                (tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self._rows),
                other.ncols,
            )
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(_norm(sum((a * b for a, b in zip(r, vec)), 0)) for r in self._rows)

    def __pow__(self, e: int) -> "Matrix":
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.nrows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def _check_same(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def commutes_with(self, other: "Matrix") -> bool:
        return self @ other == other @ self

    def is_nilpotent(self) -> bool:
        if not self.is_square():
            return False
        return self.nrows == 0 or (self ** self.nrows).is_zero()

    # exact elimination --------------------------------------------------------
    def _echelon(self):
        """Fraction row echelon form; returns (rows, pivot columns, sign of swaps)."""
        a = [[Fraction(x) for x in r] for r in self._rows]
        pivots = []
        sign = 1
        r = 0
        for c in range(self.ncols):
            p = next((i for i in range(r, self.nrows) if a[i][c] != 0), None)
            if p is None:
                continue
            if p != r:
                a[r], a[p] = a[p], a[r]
                sign = -sign
            for i in range(r + 1, self.nrows):
                if a[i][c] != 0:
                    f = a[i][c] / a[r][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return a, pivots, sign

    def rank(self) -> int:
        return len(self._echelon()[1])

    def det(self) -> Scalar:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        a, pivots, sign = self._echelon()
        if len(pivots) < n:
            return 0
        d = Fraction(sign)
        for i in range(n):
            d *= a[i][i]
        return _norm(d)

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self._rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                raise ZeroDivisionError("singular matrix")
            a[c], a[p] = a[p], a[c]
            piv = a[c][c]
            a[c] = [x / piv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return Matrix((r[n:] for r in a), n)

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self._rows], dtype=float).reshape(self.shape)

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self._rows]

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r})"


def solve_rational(m: Matrix, b: Sequence) -> Optional[tuple]:
    """One exact solution x of ``m @ x = b``, or None if inconsistent.

    Free variables are set to zero.
    """
    if len(b) != m.nrows:
        raise ValueError("right-hand side length mismatch")
    aug = Matrix((tuple(r) + (bi,) for r, bi in zip(m.rows(), b)), m.ncols + 1)
    a, pivots, _ = aug._echelon()
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [Fraction(0)] * m.ncols
    for i in reversed(range(len(pivots))):
        c = pivots[i]
        s = a[i][m.ncols] - sum(a[i][j] * x[j] for j in range(c + 1, m.ncols))
        x[c] = s / a[i][c]
    return tuple(_norm(v) for v in x)


# ---------------------------------------------------------------------------
# integer normal forms


def _row_sub(a: list, i: int, k: int, q: int) -> None:
    if q:
        ri, rk = a[i], a[k]
        for j in range(len(ri)):
            ri[j] -= q * rk[j]


def hnf(m: Matrix) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u @ m == h``.  ``h`` is in
    row echelon form with positive pivots; entries above a pivot lie in
    ``[0, pivot)``.  Zero rows collect at the bottom.
    """
    if not m.is_integral():
        raise TypeError("hnf needs an integer matrix")
    rows, cols = m.shape
    a = m.tolist()
    u = Matrix.identity(rows).tolist()
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(a[i][c]), i))
            if p != r:
                a[r], a[p] = a[p], a[r]
                u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    _row_sub(a, i, r, q)
                    _row_sub(u, i, r, q)
                    if a[i][c]:
                        done = False
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            _row_sub(a, i, r, q)
            _row_sub(u, i, r, q)
        r += 1
    return Matrix(a, cols), Matrix(u, rows)


def snf(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``(s, u, v)`` with ``u @ m @ v == s``.

    ``s`` is diagonal with nonnegative entries, each dividing the next.
    """
    if not m.is_integral():
        raise TypeError("snf needs an integer matrix")
    rows, cols = m.shape
    a = m.tolist()
    u = Matrix.identity(rows).tolist()
    v = Matrix.identity(cols).tolist()

    def col_sub(mat, j, k, q):
        # column j -= q * column k
        if q:
            for r_ in mat:
                r_[j] -= q * r_[k]

    def col_swap(mat, j, k):
        for r_ in mat:
            r_[j], r_[k] = r_[k], r_[j]

    for t in range(min(rows, cols)):
        while True:
            cands = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
            if not cands:
                break
            _, pi, pj = min(cands)
            if pi != t:
                a[t], a[pi] = a[pi], a[t]
                u[t], u[pi] = u[pi], u[t]
            if pj != t:
                col_swap(a, t, pj)
                col_swap(v, t, pj)
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    _row_sub(a, i, t, q)
                    _row_sub(u, i, t, q)
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_sub(a, j, t, q)
                    col_sub(v, j, t, q)
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            _row_sub(a, t, bad, -1)
            _row_sub(u, t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return Matrix(a, cols), Matrix(u, rows), Matrix(v, cols)


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class LatticeBasis:
    """Generators of a sublattice of ``Z^ambient_rank``."""

    ambient_rank: int
    vectors: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in b) for b in self.vectors)
        for b in vecs:
            if len(b) != self.ambient_rank:
                raise LatticeError(f"vector {b} does not live in Z^{self.ambient_rank}")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def full(cls, n: int) -> "LatticeBasis":
        return cls(n, Matrix.identity(n).rows())

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def matrix(self) -> Matrix:
        """Basis vectors as the columns of an ``n x rank`` matrix."""
        return Matrix.from_columns(self.vectors, self.ambient_rank)

    def is_independent(self) -> bool:
        return self.rank == 0 or self.matrix().rank() == self.rank

    def is_saturated(self) -> bool:
        if not self.is_independent():
            return False
        if self.rank == 0:
            return True
        s, _, _ = snf(Matrix(self.vectors, self.ambient_rank))
        return all(s[i, i] == 1 for i in range(self.rank))

    def coordinates(self, vec: Sequence[int]) -> Optional[tuple]:
        """Rational coordinates of ``vec`` in this basis, or None outside the span."""
        if self.rank == 0:
            return () if all(x == 0 for x in vec) else None
        return solve_rational(self.matrix(), tuple(vec))

    def __contains__(self, vec) -> bool:
        coords = self.coordinates(vec)
        return coords is not None and all(isinstance(c, int) for c in coords)

    def combination(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.ambient_rank
        for c, b in zip(coeffs, self.vectors):
            for i, x in enumerate(b):
                out[i] += c * x
        return tuple(out)

    def to_json(self) -> dict:
        return {"ambient_rank": self.ambient_rank, "basis": [list(b) for b in self.vectors]}

    @classmethod
    def from_json(cls, data: dict) -> "LatticeBasis":
        return cls(int(data["ambient_rank"]), tuple(tuple(b) for b in data["basis"]))


def _row_hnf_basis(vectors: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    if not vectors:
        return ()
    h, _ = hnf(Matrix(vectors, n))
    return tuple(r for r in h.rows() if any(r))


def kernel_lattice(m: Matrix) -> LatticeBasis:
    """Saturated basis of ``{a in Z^n : m @ a == 0}`` in row Hermite form."""
    n = m.ncols
    rows = []
    for r in m.rows():
        den = lcm(*(Fraction(x).denominator for x in r)) if r else 1
        rows.append([int(x * den) for x in r])
    if not rows:
        return LatticeBasis.full(n)
    h, u = hnf(Matrix(rows, n).transpose())
    rank = sum(1 for r in h.rows() if any(r))
    kern = [u.row(i) for i in range(rank, n)]
    return LatticeBasis(n, _row_hnf_basis(kern, n))


def unimodular_completion(s: LatticeBasis) -> Matrix:
    """Integer ``A`` with ``det A == 1`` whose last ``rank`` columns are the basis of ``s``.

    The complementary columns are canonicalized: Hermite form among
    themselves, then reduced modulo ``s`` against the pivots of a Hermite
    basis taken from the last coordinate backwards.
    """
    n, r = s.ambient_rank, s.rank
    if r == 0:
        return Matrix.identity(n)
    if not s.is_independent():
        raise LatticeError("basis vectors are linearly dependent")
    bt = s.matrix()
    h, u = hnf(bt)
    top = Matrix((h.row(i) for i in range(r)), r)
    if top != Matrix.identity(r):
        raise LatticeError("lattice is not saturated")
    w = u.inverse()
    comp = [w.col(j) for j in range(r, n)]
    if comp:
        comp = list(_row_hnf_basis(comp, n))
    basis = [list(b) for b in s.vectors]
    a = Matrix.from_columns(list(comp) + basis, n)
    if a.det() == -1:
        if comp:
            comp[0] = tuple(-x for x in comp[0])
        else:
            basis[0] = [-x for x in basis[0]]
    # reduce the complement modulo s using a Hermite basis read from the right
    rev = _row_hnf_basis([tuple(reversed(b)) for b in s.vectors], n)
    red = [tuple(reversed(b)) for b in rev]
    reduced = []
    for c in comp:
        c = list(c)
        for b in red:
            p = max(i for i in range(n) if b[i])
            q = c[p] // b[p]
            if q:
                c = [x - q * y for x, y in zip(c, b)]
        reduced.append(tuple(c))
    a = Matrix.from_columns(reduced + [tuple(b) for b in basis], n)
    assert a.det() == 1
    return a


def _fm_bounds(ineqs, var, values):
    lo = hi = None
    for coeffs, rhs in ineqs:
        c = coeffs[var]
        if c == 0:
            continue
        rest = rhs - sum(coeffs[j] * values[j] for j in range(var))
        bound = rest / c
        if c > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)
    return lo, hi


def _normalize_ineq(coeffs, rhs):
    scale = next((abs(c) for c in coeffs if c != 0), None)
    if scale is None:
        return coeffs, rhs
    return tuple(c / scale for c in coeffs), rhs / scale


def positive_lattice_point(s: LatticeBasis) -> Optional[tuple[int, ...]]:
    """A vector of ``s`` with every coordinate >= 1, or None.

    Feasibility of ``B @ x >= 1`` over the rationals is decided by
    Fourier-Motzkin elimination; the rational witness is scaled to a primitive
    integer vector, which lies in ``s`` because ``s`` is saturated.
    """
    n, r = s.ambient_rank, s.rank
    if n == 0:
        return ()
    if r == 0:
        return None
    ineqs = {
        _normalize_ineq(tuple(Fraction(b[j]) for b in s.vectors), Fraction(1)) for j in range(n)
    }
    stages = []
    for var in reversed(range(r)):
        cur = sorted(ineqs)
        stages.append(cur)
        pos = [q for q in cur if q[0][var] > 0]
        neg = [q for q in cur if q[0][var] < 0]
        nxt = {q for q in cur if q[0][var] == 0}
        for pc, pr in pos:
            for nc, nr in neg:
                fp, fn = 1 / pc[var], -1 / nc[var]
                coeffs = tuple(fp * x + fn * y for x, y in zip(pc, nc))
                nxt.add(_normalize_ineq(coeffs, fp * pr + fn * nr))
        ineqs = nxt
    if any(rhs > 0 for _, rhs in ineqs):
        return None
    values = [Fraction(0)] * r
    for var, stage in zip(range(r), reversed(stages)):
        lo, hi = _fm_bounds(stage, var, values)
        if lo is not None:
            values[var] = lo
        elif hi is not None:
            values[var] = min(hi, Fraction(0))
    x = [sum(v * b[j] for v, b in zip(values, s.vectors)) for j in range(n)]
    den = lcm(*(xi.denominator for xi in x))
    ints = [int(xi * den) for xi in x]
    g = gcd(*ints)
    ints = [xi // g for xi in ints]
    assert all(xi >= 1 for xi in ints)
    return tuple(ints)
