"""Equations for the closure of one sheet ``C(h)`` of the local system.

Pipeline for a fiber vector ``h``: stabilizer lattice ``S``, adapted
coordinates ``A`` and matrices ``M_j``, inverse polynomials ``p_s``, the
polynomial equations in ``v`` and the twisted binomial equations in
``(t, v)``.  Boundary behaviour (limit sets and arcs) and numeric
verification live here as well.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .exact import LatticeBasis, Matrix, kernel_lattice, parse_rational, positive_lattice_point, unimodular_completion
from .monodromy import (
    MonodromyModel,
    NumericPoint,
    _check_commuting,
    exp_nilpotent_numeric,
    exp_poly_vector,
    orbit_equal,
    orbit_vector_numeric,
    sample_sheet,
)
from .poly import Binomial, MultiPoly, substitute, toric_ideal_binomials, var_names

__all__ = [
    "DependentDirections",
    "InvalidRelation",
    "LimitSet",
    "ResidualReport",
    "SheetPresentation",
    "TwistedBinomial",
    "adapted_coordinates",
    "arc_point",
    "boundary_contact",
    "components_through_point",
    "equations_A",
    "equations_B",
    "inverse_polynomials",
    "limit_set",
    "present_sheet",
    "sample_parameters",
    "stabilizer_lattice",
    "verify_point",
    "verify_points",
    "verify_sheet",
]


class DependentDirections(ValueError):
    """The vectors ``M_1 h, ..., M_k h`` are linearly dependent."""


class InvalidRelation(ValueError):
    """An arc exponent vector is not a positive relation ``sum a_j N_j h = 0``."""


def _fiber(h) -> tuple:
    return tuple(parse_rational(x) for x in h)


# ---------------------------------------------------------------------------
# lattice data


def stabilizer_lattice(model: MonodromyModel, h: Sequence) -> LatticeBasis:
    """Saturated basis of ``{a in Z^n : sum a_j N_j h = 0}``."""
    h = _fiber(h)
    if len(h) != model.d:
        raise ValueError(f"fiber vector must have length {model.d}")
    cols = [n @ h for n in model.N]
    return kernel_lattice(Matrix.from_columns(cols, model.d))


def adapted_coordinates(model: MonodromyModel, S: LatticeBasis) -> tuple[Matrix, list[Matrix], int]:
    """``(A, [M_1..M_n], k)`` with ``M_j = sum_i A[i, j] N_i``."""
    A = unimodular_completion(S)
    n = model.n
    k = n - S.rank
    M = []
    for j in range(n):
        acc = Matrix.zeros(model.d, model.d)
        for i in range(n):
            if A[i, j]:
                acc = acc + model.N[i] * A[i, j]
        M.append(acc)
    return A, M, k


def boundary_contact(S: LatticeBasis) -> Optional[tuple[int, ...]]:
    """Positive vector of ``S``; present exactly when the closure meets the origin."""
    return positive_lattice_point(S)


# ---------------------------------------------------------------------------
# inverse of the orbit map


def _top_multi_index(M: Sequence[Matrix], h: tuple) -> tuple[int, ...]:
    """Lexicographically greatest ``alpha`` of maximal length with ``M^alpha h != 0``."""
    k = len(M)
    layer = {(0,) * k: h}
    last = layer
    while layer:
        nxt = {}
        for alpha, vec in layer.items():
            for s in range(k):
                beta = tuple(a + (i == s) for i, a in enumerate(alpha))
                if beta in nxt:
                    continue
                w = M[s] @ vec
                if any(w):
                    nxt[beta] = w
        if nxt:
            last = nxt
        layer = nxt
    return max(last)


def _mat_power_vec(M: Sequence[Matrix], alpha: Sequence[int], vec: tuple) -> tuple:
    for m, a in zip(M, alpha):
        for _ in range(a):
            vec = m @ vec
    return vec


def _mat_power(M: Sequence[Matrix], alpha: Sequence[int], d: int) -> Matrix:
    out = Matrix.identity(d)
    for m, a in zip(M, alpha):
        out = out @ (m**a)
    return out


def _inverse(M: list[Matrix], h: tuple, variables: tuple[str, ...], alpha=None) -> list[MultiPoly]:
    k = len(M)
    if k == 0:
        return []
    d = len(h)
    if alpha is None:
        alpha = _top_multi_index(M, h)
    if alpha[-1] == 0:
        j = max(i for i in range(k) if alpha[i])
        perm = list(range(k))
        perm[j], perm[-1] = perm[-1], perm[j]
        sub = _inverse([M[i] for i in perm], h, variables, tuple(alpha[i] for i in perm))
        out = [None] * k
        for pos, i in enumerate(perm):
            out[i] = sub[pos]
        return out
    beta = alpha[:-1] + (alpha[-1] - 1,)
    mbh = _mat_power_vec(M, beta, h)
    u = M[-1] @ mbh
    i = next(idx for idx, x in enumerate(u) if x)
    ui = Fraction(u[i])
    # (M^beta v)_i = (M^beta h)_i - sum_{s<k} w_s (M_s M^beta h)_i - w_k u_i
    c = [-Fraction((M[s] @ mbh)[i]) / ui for s in range(k - 1)]
    row = _mat_power(M, beta, d).row(i)
    vs = MultiPoly.gens(variables)
    lin = MultiPoly.constant(variables, Fraction(mbh[i]))
    for a, v in zip(row, vs):
        if a:
            lin = lin - v * a
    ell = lin / ui
    if k == 1:
        return [ell]
    rest = [M[s] + M[-1] * c[s] for s in range(k - 1)]
    sub = _inverse(rest, h, variables)
    # v' = exp(ell(v) M_k) v
    shifted = exp_poly_vector([M[-1]], [-ell], list(vs), variables)
    assignment = dict(zip(variables, shifted))
    ps = [substitute(q, assignment) for q in sub]
    last = ell
    for cs, q in zip(c, ps):
        if cs:
            last = last + q * cs
    return ps + [last]


def inverse_polynomials(M: Sequence[Matrix], h: Sequence, variables: Optional[Sequence[str]] = None) -> list[MultiPoly]:
    """Polynomials ``p_s(v)`` with ``p_s(exp(-sum w_j M_j) h) = w_s`` identically."""
    h = _fiber(h)
    M = list(M)
    variables = tuple(variables) if variables is not None else var_names("v", len(h))
    if not M:
        return []
    vecs = [m @ h for m in M]
    if Matrix.from_columns(vecs, len(h)).rank() < len(M):
        raise DependentDirections("M_1 h, ..., M_k h are linearly dependent")
    _check_commuting(M)
    return _inverse(M, h, variables)


# ---------------------------------------------------------------------------
# equations


def equations_A(M: Sequence[Matrix], h: Sequence, p: Sequence[MultiPoly], variables: Optional[Sequence[str]] = None) -> list[MultiPoly]:
    """Components of ``v - exp(-sum_s p_s(v) M_s) h``; identically zero ones are kept."""
    h = _fiber(h)
    if variables is None:
        variables = p[0].variables if p else var_names("v", len(h))
    variables = tuple(variables)
    image = exp_poly_vector(list(M), list(p), h, variables)
    return [v - q for v, q in zip(MultiPoly.gens(variables), image)]


@dataclass(frozen=True)
class TwistedBinomial:
    """``t^beta_plus exp(-2 pi i lam_plus(v)) - t^beta_minus exp(-2 pi i lam_minus(v))``."""

    beta_plus: tuple[int, ...]
    beta_minus: tuple[int, ...]
    lam_plus: MultiPoly
    lam_minus: MultiPoly

    def terms(self, t: Sequence[complex], v: Sequence[complex]) -> tuple[complex, complex]:
        a = cmath.exp(-2j * cmath.pi * complex(self.lam_plus.evaluate(v)))
        b = cmath.exp(-2j * cmath.pi * complex(self.lam_minus.evaluate(v)))
        for tj, p, m in zip(t, self.beta_plus, self.beta_minus):
            if p:
                a *= tj**p
            if m:
                b *= tj**m
        return a, b

    def evaluate(self, t: Sequence[complex], v: Sequence[complex]) -> complex:
        a, b = self.terms(t, v)
        return a - b

    def residual(self, t: Sequence[complex], v: Sequence[complex]) -> float:
        """``|a - b| / max(1, |a|, |b|)`` for the two terms ``a``, ``b``."""
        a, b = self.terms(t, v)
        return abs(a - b) / max(1.0, abs(a), abs(b))

    def to_json(self) -> dict:
        return {
            "beta_plus": list(self.beta_plus),
            "beta_minus": list(self.beta_minus),
            "lam_plus": self.lam_plus.to_text(),
            "lam_minus": self.lam_minus.to_text(),
        }

    @classmethod
    def from_json(cls, data, variables) -> "TwistedBinomial":
        return cls(
            tuple(data["beta_plus"]),
            tuple(data["beta_minus"]),
            MultiPoly.parse(data["lam_plus"], variables),
            MultiPoly.parse(data["lam_minus"], variables),
        )


def toric_exponents(A: Matrix, k: int) -> Matrix:
    """Rows ``j = 1..n``, columns ``i = k+1..n`` of ``A``: the monomial map of the torus factor."""
    return Matrix((A.row(j)[k:] for j in range(A.nrows)), A.ncols - k)


def equations_B(
    A: Matrix,
    k: int,
    p: Sequence[MultiPoly],
    toric: Sequence[Binomial],
    variables: Optional[Sequence[str]] = None,
) -> list[TwistedBinomial]:
    """Twist each toric binomial by ``x_j = t_j exp(-2 pi i sum_{s<=k} a_js p_s(v))``."""
    if variables is None:
        if not p:
            raise ValueError("variables are required when k = 0")
        variables = p[0].variables
    variables = tuple(variables)
    n = A.nrows
    twists = []
    for j in range(n):
        acc = MultiPoly(variables)
        for s in range(k):
            if A[j, s]:
                acc = acc + p[s] * A[j, s]
        twists.append(acc)

    def lam(beta):
        acc = MultiPoly(variables)
        for b, tw in zip(beta, twists):
            if b:
                acc = acc + tw * b
        return acc

    return [TwistedBinomial(b.beta_plus, b.beta_minus, lam(b.beta_plus), lam(b.beta_minus)) for b in toric]


# ---------------------------------------------------------------------------
# presentation and verification


@dataclass(frozen=True)
class ResidualReport:
    """Largest residual of each equation over the checked points.

    Polynomial equations report absolute values; twisted binomials report
    ``|a - b| / max(1, |a|, |b|)`` for their two terms ``a`` and ``b``.
    """

    eqA: tuple[float, ...]
    eqB: tuple[float, ...]
    tol: float
    points: int = 1
    failing_points: tuple[int, ...] = ()

    @property
    def max_eqA(self) -> float:
        return max(self.eqA, default=0.0)

    @property
    def max_eqB(self) -> float:
        return max(self.eqB, default=0.0)

    @property
    def max_residual(self) -> float:
        return max(self.max_eqA, self.max_eqB)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "points": self.points,
            "max_residual": self.max_residual,
            "max_eqA": self.max_eqA,
            "max_eqB": self.max_eqB,
            "eqA": [{"residual": r, "pass": r <= self.tol} for r in self.eqA],
            "eqB": [{"residual": r, "pass": r <= self.tol} for r in self.eqB],
            "failing_points": list(self.failing_points),
        }


@dataclass(frozen=True)
class SheetPresentation:
    """Local equations of the closure of ``C(h)``."""

    h: tuple
    S: LatticeBasis
    k: int
    A: Matrix
    M: tuple[Matrix, ...]
    p: tuple[MultiPoly, ...]
    eqA: tuple[MultiPoly, ...]
    toric: tuple[Binomial, ...]
    eqB: tuple[TwistedBinomial, ...]
    variables: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.A.nrows

    @property
    def d(self) -> int:
        return len(self.h)

    @property
    def contact(self) -> Optional[tuple[int, ...]]:
        return boundary_contact(self.S)

    @cached_property
    def _packed_A(self):
        return kernels.PackedPolys(self.eqA, self.d)

    @cached_property
    def _packed_lams(self):
        return kernels.PackedPolys([b.lam_plus for b in self.eqB] + [b.lam_minus for b in self.eqB], self.d)

    @cached_property
    def _betas(self):
        bp = np.array([b.beta_plus for b in self.eqB], dtype=np.int64).reshape(len(self.eqB), self.n)
        bm = np.array([b.beta_minus for b in self.eqB], dtype=np.int64).reshape(len(self.eqB), self.n)
        return bp, bm

    def residuals(self, t, v, impl=None) -> tuple[np.ndarray, np.ndarray]:
        """Complex residuals of every equation at a batch of points.

        ``t`` is ``(P, n)`` and ``v`` is ``(P, d)``; returns arrays of shape
        ``(P, d)`` and ``(P, e)``.
        """
        t = np.atleast_2d(np.asarray(t, dtype=np.complex128))
        v = np.atleast_2d(np.asarray(v, dtype=np.complex128))
        ra = self._packed_A(v, impl)
        e = len(self.eqB)
        lams = self._packed_lams(v, impl)
        bp, bm = self._betas
        rb = kernels.twisted_residuals(bp, bm, lams[:, :e], lams[:, e:], t, impl)
        return ra, rb

    def to_json(self) -> dict:
        return {
            "h": [str(x) for x in self.h],
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "S": [list(b) for b in self.S.vectors],
            "A": self.A.tolist(),
            "M": [m.to_strings() for m in self.M],
            "variables": list(self.variables),
            "p": [{"text": q.to_text(), "terms": q.to_json()} for q in self.p],
            "eqA": [{"text": q.to_text(), "terms": q.to_json(), "zero": q.is_zero()} for q in self.eqA],
            "toric": [b.to_json() for b in self.toric],
            "eqB": [b.to_json() for b in self.eqB],
            "contact": list(self.contact) if self.contact is not None else None,
        }

    @classmethod
    def from_json(cls, data) -> "SheetPresentation":
        variables = tuple(data["variables"])
        n = int(data["n"])
        d = int(data["d"])

        def poly(entry):
            return MultiPoly.parse(entry["terms"] if "terms" in entry else entry["text"], variables)

        return cls(
            h=tuple(parse_rational(x) for x in data["h"]),
            S=LatticeBasis(n, tuple(tuple(b) for b in data["S"])),
            k=int(data["k"]),
            A=Matrix(data["A"], n),
            M=tuple(Matrix([[parse_rational(x) for x in r] for r in m], d) for m in data["M"]),
            p=tuple(poly(q) for q in data["p"]),
            eqA=tuple(poly(q) for q in data["eqA"]),
            toric=tuple(Binomial.from_json(b) for b in data["toric"]),
            eqB=tuple(TwistedBinomial.from_json(b, variables) for b in data["eqB"]),
            variables=variables,
        )


def present_sheet(model: MonodromyModel, h: Sequence) -> SheetPresentation:
    """Run the full pipeline for one fiber vector."""
    h = _fiber(h)
    variables = var_names("v", model.d)
    S = stabilizer_lattice(model, h)
    A, M, k = adapted_coordinates(model, S)
    p = inverse_polynomials(M[:k], h, variables)
    eqA = equations_A(M[:k], h, p, variables)
    toric = toric_ideal_binomials(toric_exponents(A, k))
    eqB = equations_B(A, k, p, toric, variables)
    return SheetPresentation(h, S, k, A, tuple(M), tuple(p), tuple(eqA), tuple(toric), tuple(eqB), variables)


def verify_points(pres: SheetPresentation, points: Sequence[NumericPoint], tol: float = 1e-9, impl=None) -> ResidualReport:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if not points:
        raise ValueError("no points to verify")
    t = np.array([p.t for p in points], dtype=np.complex128).reshape(len(points), pres.n)
    v = np.array([p.v for p in points], dtype=np.complex128).reshape(len(points), pres.d)
    ra, rb = pres.residuals(t, v, impl)
    ra, rb = np.abs(ra), np.abs(rb)
    worst = np.maximum(ra.max(axis=1, initial=0.0), rb.max(axis=1, initial=0.0))
    return ResidualReport(
        tuple(float(x) for x in ra.max(axis=0, initial=0.0)) if ra.shape[1] else (),
        tuple(float(x) for x in rb.max(axis=0, initial=0.0)) if rb.shape[1] else (),
        tol,
        len(points),
        tuple(int(i) for i in np.nonzero(worst > tol)[0]),
    )


def verify_point(pres: SheetPresentation, pt: NumericPoint, tol: float = 1e-9) -> ResidualReport:
    """Residual of every equation at one point, with a pass flag per equation."""
    return verify_points(pres, [pt], tol)


def sample_parameters(n: int, count: int, seed: int = 42) -> np.ndarray:
    """``count`` points of the upper half-space with ``Re z in [0, 1)``, ``Im z in [0.5, 3]``."""
    rng = np.random.default_rng(seed)
    re = rng.random((count, n))
    im = rng.uniform(0.5, 3.0, (count, n))
    return re + 1j * im


def verify_sheet(
    model: MonodromyModel, pres: SheetPresentation, samples: int = 100, seed: int = 42, tol: float = 1e-9
) -> tuple[ResidualReport, list[NumericPoint]]:
    """Sample the sheet of ``pres.h`` and check every equation there."""
    zs = sample_parameters(model.n, samples, seed)
    pts = [sample_sheet(model, pres.h, z) for z in zs]
    return verify_points(pres, pts, tol), pts


# ---------------------------------------------------------------------------
# boundary


@dataclass(frozen=True)
class LimitSet:
    """Points of the closure of ``C(h)`` over the origin.

    When ``contact`` is set this is the image of ``w -> exp(-sum w_j N_j) h``,
    an embedded affine space of dimension ``k``; otherwise it is empty.
    """

    h: tuple
    contact: Optional[tuple[int, ...]]
    dimension: Optional[int]
    N: tuple[Matrix, ...] = field(repr=False, default=())
    M: tuple[Matrix, ...] = field(repr=False, default=())
    p: tuple[MultiPoly, ...] = field(repr=False, default=())

    @property
    def is_empty(self) -> bool:
        return self.contact is None

    def point(self, w: Sequence) -> tuple:
        """``exp(-sum w_j N_j) h``; exact for rational ``w``, complex otherwise."""
        if self.is_empty:
            raise ValueError("empty limit set")
        w = list(w)
        if len(w) != len(self.N):
            raise ValueError(f"expected {len(self.N)} parameters")
        if all(isinstance(x, (int, Fraction)) for x in w):
            variables = ("_s",)
            scalars = [MultiPoly.constant(variables, x) for x in w]
            return tuple(q.constant_term() for q in exp_poly_vector(self.N, scalars, self.h, variables))
        d = len(self.h)
        x = np.zeros((d, d), dtype=complex)
        for wj, nj in zip(w, self.N):
            x = x + complex(wj) * nj.to_float()
        return tuple(exp_nilpotent_numeric(-x) @ np.array([complex(float(c)) for c in self.h]))

    def adapted_point(self, w: Sequence) -> np.ndarray:
        """``exp(-sum_{s<=k} w_s M_s) h`` in floating point."""
        d = len(self.h)
        x = np.zeros((d, d), dtype=complex)
        for ws, ms in zip(w, self.M):
            x = x + complex(ws) * ms.to_float()
        return exp_nilpotent_numeric(-x) @ np.array([complex(float(c)) for c in self.h])

    def recover(self, v: Sequence[complex]) -> np.ndarray:
        """Adapted parameters ``w_s = p_s(v)``."""
        return np.array([complex(q.evaluate([complex(x) for x in v])) for q in self.p], dtype=complex)

    def distance(self, v: Sequence[complex]) -> float:
        """Distance from ``v`` to the point of the limit set it projects to."""
        if self.is_empty:
            return float("inf")
        w = self.recover(v)
        return float(np.linalg.norm(self.adapted_point(w) - np.asarray(v, dtype=complex)))

    def contains(self, v: Sequence[complex], tol: float = 1e-6) -> bool:
        return self.distance(v) <= tol

    def to_json(self) -> dict:
        return {
            "h": [str(x) for x in self.h],
            "contact": list(self.contact) if self.contact is not None else None,
            "empty": self.is_empty,
            "dimension": self.dimension,
            "description": None if self.is_empty else "image of w -> exp(-(w1*N1 + ... + wn*Nn)) h over t = 0",
        }


def limit_set(model: MonodromyModel, h: Sequence) -> LimitSet:
    h = _fiber(h)
    S = stabilizer_lattice(model, h)
    contact = boundary_contact(S)
    if contact is None:
        return LimitSet(h, None, None, model.N)
    A, M, k = adapted_coordinates(model, S)
    p = inverse_polynomials(M[:k], h)
    return LimitSet(h, contact, k, model.N, tuple(M[:k]), tuple(p))


def arc_point(model: MonodromyModel, h: Sequence, a: Sequence[int], w: Sequence[complex], t: complex) -> NumericPoint:
    """``(t^a_j exp(2 pi i w_j))_j`` with fiber ``exp(-sum w_j N_j) h``."""
    h = _fiber(h)
    a = tuple(int(x) for x in a)
    if len(a) != model.n or any(x < 1 for x in a):
        raise InvalidRelation(f"arc exponents must be {model.n} positive integers")
    rel = [sum((aj * x for aj, x in zip(a, col)), 0) for col in zip(*[n @ h for n in model.N])]
    if any(rel):
        raise InvalidRelation("sum a_j N_j h is not zero")
    t = complex(t)
    if abs(t) >= 1:
        raise ValueError("arc parameter must satisfy |t| < 1")
    ts = tuple((t**aj if t else 0j) * cmath.exp(2j * cmath.pi * complex(wj)) for aj, wj in zip(a, w))
    return NumericPoint(ts, tuple(orbit_vector_numeric(model, h, w)))


def _enumeration_order(d: int, bound: int):
    pts = itertools.product(range(-bound, bound + 1), repeat=d)
    return sorted(pts, key=lambda x: (max(map(abs, x), default=0), sum(map(abs, x)), tuple(-c for c in x)))


def components_through_point(
    model: MonodromyModel, pt: NumericPoint, h_bound: int = 5, orbit_bound: int = 10, tol: float = 1e-6
) -> list[tuple[int, ...]]:
    """Orbit representatives ``h`` (``max|h_i| <= h_bound``) whose limit set contains ``pt``."""
    if h_bound < 1 or orbit_bound < 1:
        raise ValueError("bounds must be positive")
    if any(x != 0 for x in pt.t):
        raise ValueError("point must lie over the origin")
    v = np.array(pt.v, dtype=complex)
    reps: list[tuple[int, ...]] = []
    for h in _enumeration_order(model.d, h_bound):
        S = stabilizer_lattice(model, h)
        if boundary_contact(S) is None:
            continue
        lim = limit_set(model, h)
        if not lim.contains(v, tol):
            continue
        if any(orbit_equal(model, r, h, orbit_bound) for r in reps):
            continue
        reps.append(tuple(h))
    return reps
