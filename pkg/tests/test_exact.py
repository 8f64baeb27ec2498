import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canext.exact import (
    LatticeBasis,
    LatticeError,
    Matrix,
    hnf,
    kernel_lattice,
    positive_lattice_point,
    snf,
    solve_rational,
    unimodular_completion,
)


def int_matrices(max_dim=6, lo=-9, hi=9):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def is_row_hnf(h: Matrix) -> bool:
    last_pivot = -1
    seen_zero = False
    for i, row in enumerate(h.rows()):
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        p = nz[0]
        if p <= last_pivot or row[p] <= 0:
            return False
        if any(not (0 <= h[r, p] < row[p]) for r in range(i)):
            return False
        last_pivot = p
    return True


# -- examples ------------------------------------------------------------------


def test_hnf_examples():
    h, u = hnf(Matrix([[2, 0], [0, 3]]))
    assert h == Matrix([[2, 0], [0, 3]])
    assert u == Matrix.identity(2)
    assert hnf(Matrix([[0, 1], [1, 0]]))[0] == Matrix.identity(2)
    assert hnf(Matrix([[2, 4], [1, 3]]))[0] == Matrix([[1, 1], [0, 2]])


def test_snf_examples():
    assert snf(Matrix.identity(3))[0] == Matrix.identity(3)
    assert snf(Matrix([[2, 4], [1, 3]]))[0] == Matrix([[1, 0], [0, 2]])
    assert snf(Matrix([[1, 1]]))[0] == Matrix([[1, 0]])


def test_snf_against_minor_gcds():
    # d1 * ... * dk equals the gcd of the k x k minors
    from math import gcd

    m = Matrix([[12, 6, 4], [3, 9, 6], [2, 16, 14]])
    s, _, _ = snf(m)
    assert [s[i, i] for i in range(3)] == [1, 10, 30]
    g1 = gcd(*[x for r in m.rows() for x in r])
    assert s[0, 0] == g1
    assert s[0, 0] * s[1, 1] * s[2, 2] == abs(m.det())


def test_kernel_lattice_examples():
    assert kernel_lattice(Matrix([[0, 0]])).vectors == ((1, 0), (0, 1))
    (b,) = kernel_lattice(Matrix([[1, 2]])).vectors
    assert b in ((-2, 1), (2, -1))
    assert kernel_lattice(Matrix([[1, -1]])).vectors == ((1, 1),)
    assert kernel_lattice(Matrix([[1, 0], [0, 1]])).vectors == ()


def test_kernel_lattice_rational_entries():
    m = Matrix([[Fraction(1, 2), Fraction(-1, 3)]])
    assert kernel_lattice(m).vectors == ((2, 3),)


@pytest.mark.parametrize(
    "basis, expected",
    [
        (((1, 0), (0, 1)), None),
        (((1, 1),), Matrix([[1, 1], [0, 1]])),
        (((2, 1),), Matrix([[1, 2], [0, 1]])),
        (((1, 2),), Matrix([[1, 1], [1, 2]])),
    ],
)
def test_unimodular_completion_examples(basis, expected):
    s = LatticeBasis(2, basis)
    a = unimodular_completion(s)
    assert a.det() == 1
    if expected is not None:
        assert a == expected
    k = 2 - s.rank
    assert_same_lattice(LatticeBasis(2, tuple(a.col(j) for j in range(k, 2))), s)


def test_unimodular_completion_rejects_bad_input():
    with pytest.raises(LatticeError):
        unimodular_completion(LatticeBasis(2, ((2, 2),)))
    with pytest.raises(LatticeError):
        unimodular_completion(LatticeBasis(2, ((1, 1), (2, 2))))


def test_positive_lattice_point_examples():
    assert positive_lattice_point(LatticeBasis(2, ((1, 1),))) == (1, 1)
    assert positive_lattice_point(LatticeBasis(2, ((-2, 1),))) is None
    assert positive_lattice_point(LatticeBasis.full(2)) == (1, 1)
    assert positive_lattice_point(LatticeBasis(3, ())) is None


def test_solve_rational():
    m = Matrix([[1, 2], [3, 4]])
    assert solve_rational(m, (5, 6)) == (-4, Fraction(9, 2))
    assert solve_rational(Matrix([[1, 1], [2, 2]]), (1, 3)) is None


def test_matrix_basics():
    m = Matrix([[1, 2], [3, 4]])
    assert m.det() == -2
    assert m @ m.inverse() == Matrix.identity(2)
    assert m**-1 == m.inverse()
    assert (m @ (1, 1)) == (3, 7)
    with pytest.raises(ValueError):
        Matrix([[1, 2], [3]])


# -- properties -----------------------------------------------------------------


def assert_same_lattice(a: LatticeBasis, b: LatticeBasis):
    assert a.rank == b.rank
    assert all(v in b for v in a.vectors)
    assert all(v in a for v in b.vectors)


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_hnf_property(rows):
    m = Matrix(rows)
    h, u = hnf(m)
    assert abs(u.det()) == 1
    assert u @ m == h
    assert is_row_hnf(h)


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_snf_property(rows):
    m = Matrix(rows)
    s, u, v = snf(m)
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    assert u @ m @ v == s
    diag = [s[i, i] for i in range(min(s.shape))]
    assert all(s[i, j] == 0 for i in range(s.nrows) for j in range(s.ncols) if i != j)
    assert all(x >= 0 for x in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)


@settings(max_examples=60, deadline=None)
@given(int_matrices(max_dim=3, lo=-3, hi=3))
def test_kernel_lattice_brute_force(rows):
    m = Matrix(rows)
    lat = kernel_lattice(m)
    assert lat.is_saturated()
    for b in lat.vectors:
        assert not any(m @ b)
    for a in itertools.product(range(-4, 5), repeat=m.ncols):
        assert (not any(m @ a)) == (a in lat)


def saturated_lattices(max_n=4):
    return int_matrices(max_dim=max_n, lo=-3, hi=3).map(lambda rows: kernel_lattice(Matrix(rows)))


@settings(max_examples=100, deadline=None)
@given(saturated_lattices())
def test_unimodular_completion_property(s):
    n, r = s.ambient_rank, s.rank
    a = unimodular_completion(s)
    assert a.det() == 1
    assert_same_lattice(LatticeBasis(n, tuple(a.col(j) for j in range(n - r, n))), s)


@settings(max_examples=100, deadline=None)
@given(saturated_lattices(max_n=3))
def test_positive_lattice_point_property(s):
    x = positive_lattice_point(s)
    if x is not None:
        assert x in s
        assert all(c >= 1 for c in x)
    else:
        for coeffs in itertools.product(range(-6, 7), repeat=s.rank):
            assert not all(c >= 1 for c in s.combination(coeffs))
