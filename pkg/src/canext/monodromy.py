"""Local unipotent monodromy: validation, logarithms, orbit map and sheet samples."""

from __future__ import annotations

import cmath
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

import numpy as np

from .exact import Matrix, parse_rational
from .poly import MultiPoly, var_names

__all__ = [
    "DimensionMismatch",
    "DomainError",
    "ModelError",
    "MonodromyModel",
    "NotCommuting",
    "NotNilpotent",
    "NotUnipotent",
    "NumericPoint",
    "exp_action_poly",
    "exp_nilpotent",
    "log_unipotent",
    "model_from_json",
    "model_from_logs",
    "orbit_equal",
    "sample_sheet",
    "validate_model",
]


class ModelError(ValueError):
    """Base class for invalid monodromy input."""


class NotUnipotent(ModelError):
    def __init__(self, index: int):
        super().__init__(f"T{index} is not unipotent")
        self.index = index


class NotNilpotent(ModelError):
    def __init__(self, index: Optional[int] = None):
        super().__init__("matrix is not nilpotent" if index is None else f"N{index} is not nilpotent")
        self.index = index


class NotCommuting(ModelError):
    def __init__(self, i: int, j: int):
        super().__init__(f"monodromy matrices {i} and {j} do not commute")
        self.pair = (i, j)


class DimensionMismatch(ModelError):
    pass


class DomainError(ValueError):
    """Raised when a numeric argument leaves the domain of a map."""


def _nilpotent_series(m: Matrix, coeff) -> Matrix:
    """sum_{k>=0} coeff(k) m^k for nilpotent m (terminates at m^d = 0)."""
    d = m.nrows
    total = Matrix.zeros(d, d)
    power = Matrix.identity(d)
    k = 0
    while not power.is_zero():
        c = coeff(k)
        if c:
            total = total + power * c
        k += 1
        power = power @ m
    return total


def log_unipotent(t: Matrix) -> Matrix:
    """``N = -log T = sum_{m>=1} (id - T)^m / m``."""
    if not t.is_square():
        raise DimensionMismatch("monodromy matrix must be square")
    d = t.nrows
    x = Matrix.identity(d) - t
    if not x.is_nilpotent():
        raise NotUnipotent(1)
    return _nilpotent_series(x, lambda k: Fraction(1, k) if k else 0)


def exp_nilpotent(m: Matrix) -> Matrix:
    """Exact exponential of a nilpotent rational matrix."""
    if not m.is_nilpotent():
        raise NotNilpotent()
    return _nilpotent_series(m, lambda k: Fraction(1, factorial(k)))


@dataclass(frozen=True)
class MonodromyModel:
    """Commuting unipotent monodromy ``T_j`` and their logarithms ``N_j = -log T_j``."""

    T: tuple[Matrix, ...]
    N: tuple[Matrix, ...]
    r: Optional[int] = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.N)

    @property
    def d(self) -> int:
        return self.N[0].nrows if self.N else 0

    def is_integral(self) -> bool:
        return all(t.is_integral() for t in self.T)

    def to_json(self) -> dict:
        out = {"n": self.n, "d": self.d}
        if self.is_integral():
            out["T"] = [t.tolist() for t in self.T]
        out["N"] = [m.to_strings() for m in self.N]
        if self.r is not None:
            out["r"] = self.r
        return out


def _check_shapes(mats: Sequence[Matrix]) -> int:
    if not mats:
        raise DimensionMismatch("at least one monodromy matrix is required")
    d = mats[0].nrows
    for m in mats:
        if not m.is_square() or m.nrows != d:
            raise DimensionMismatch(f"expected {d}x{d} matrices, got {m.shape}")
    return d


def _check_commuting(mats: Sequence[Matrix]) -> None:
    for i, j in itertools.combinations(range(len(mats)), 2):
        if not mats[i].commutes_with(mats[j]):
            raise NotCommuting(i + 1, j + 1)


def validate_model(T: Sequence, r: Optional[int] = None) -> MonodromyModel:
    """Check unipotence and commutation of integer monodromy; compute logarithms."""
    mats = [m if isinstance(m, Matrix) else Matrix(m) for m in T]
    d = _check_shapes(mats)
    for i, m in enumerate(mats):
        if not m.is_integral():
            raise ModelError(f"T{i + 1} has non-integer entries")
        if not (Matrix.identity(d) - m).is_nilpotent():
            raise NotUnipotent(i + 1)
    _check_commuting(mats)
    return MonodromyModel(tuple(mats), tuple(log_unipotent(m) for m in mats), r)


def model_from_logs(N: Sequence, T: Optional[Sequence] = None, r: Optional[int] = None) -> MonodromyModel:
    """Build a model from nilpotent logarithms, checking ``T`` when also given."""
    logs = [m if isinstance(m, Matrix) else Matrix(m) for m in N]
    d = _check_shapes(logs)
    for i, m in enumerate(logs):
        if not m.is_nilpotent():
            raise NotNilpotent(i + 1)
    _check_commuting(logs)
    mono = tuple(exp_nilpotent(-m) for m in logs)
    if T is not None:
        given = validate_model(T, r)
        if given.d != d or given.T != mono:
            raise ModelError("T and N are inconsistent")
    return MonodromyModel(mono, tuple(logs), r)


def model_from_json(data) -> MonodromyModel:
    """Parse ``{"n", "d", "T" | "N"}``; rational entries may be ``"p/q"`` strings."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise ModelError("model JSON must be an object")
    r = data.get("r")
    T = data.get("T")
    N = data.get("N")
    if T is None and N is None:
        raise ModelError("model JSON needs 'T' or 'N'")
    try:
        if N is not None:
            N = [Matrix([[parse_rational(x) for x in row] for row in m]) for m in N]
            model = model_from_logs(N, T, r)
        else:
            model = validate_model([Matrix(m) for m in T], r)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed matrix data: {exc}") from exc
    if "n" in data and int(data["n"]) != model.n:
        raise DimensionMismatch(f"declared n={data['n']} but {model.n} matrices given")
    if "d" in data and int(data["d"]) != model.d:
        raise DimensionMismatch(f"declared d={data['d']} but matrices are {model.d}x{model.d}")
    return model


# ---------------------------------------------------------------------------
# symbolic orbit map


def _apply(m: Matrix, vec: Sequence[MultiPoly], variables) -> list[MultiPoly]:
    out = []
    for row in m.rows():
        acc = MultiPoly(variables)
        for a, p in zip(row, vec):
            if a:
                acc = acc + p * a
        out.append(acc)
    return out


def exp_poly_vector(
    mats: Sequence[Matrix], scalars: Sequence[MultiPoly], h: Sequence, variables: Sequence[str]
) -> list[MultiPoly]:
    """``exp(-sum_s scalars[s] * mats[s]) h`` for commuting nilpotent ``mats``.

    The scalars are polynomials; ``h`` may hold numbers or polynomials.  The
    series stops once the power vanishes.
    """
    variables = tuple(variables)
    cur = [x if isinstance(x, MultiPoly) else MultiPoly.constant(variables, x) for x in h]
    total = list(cur)
    k = 0
    while any(cur):
        k += 1
        nxt = [MultiPoly(variables) for _ in h]
        for m, s in zip(mats, scalars):
            if m.is_zero() or not s:
                continue
            mv = _apply(m, cur, variables)
            nxt = [a + s * b for a, b in zip(nxt, mv)]
        cur = [p * Fraction(-1, k) for p in nxt]
        total = [a + b for a, b in zip(total, cur)]
    return total


def exp_action_poly(M: Sequence[Matrix], h: Sequence, variables: Optional[Sequence[str]] = None) -> list[MultiPoly]:
    """Coordinates of ``exp(-(w1 M1 + ... + wk Mk)) h`` as polynomials in ``w``."""
    M = list(M)
    _check_commuting(M)
    variables = tuple(variables) if variables is not None else var_names("w", len(M))
    if len(variables) != len(M):
        raise ValueError("one variable per matrix is required")
    ws = MultiPoly.gens(variables)
    return exp_poly_vector(M, ws, h, variables)


# ---------------------------------------------------------------------------
# numerics


@dataclass(frozen=True)
class NumericPoint:
    """A point ``(t, v)`` of ``Delta^n x C^d`` in complex double precision."""

    t: tuple[complex, ...]
    v: tuple[complex, ...]

    def __post_init__(self):
        t = tuple(complex(x) for x in self.t)
        v = tuple(complex(x) for x in self.v)
        if not all(cmath.isfinite(x) for x in t + v):
            raise DomainError("numeric point has non-finite entries")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    def distance(self, other: "NumericPoint") -> float:
        a = np.array(self.t + self.v)
        b = np.array(other.t + other.v)
        return float(np.linalg.norm(a - b))

    def to_json(self) -> dict:
        return {
            "t": [[x.real, x.imag] for x in self.t],
            "v": [[x.real, x.imag] for x in self.v],
        }

    @classmethod
    def from_json(cls, data) -> "NumericPoint":
        def c(x):
            return complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)

        return cls(tuple(c(x) for x in data["t"]), tuple(c(x) for x in data["v"]))


def exp_nilpotent_numeric(x: np.ndarray) -> np.ndarray:
    """Finite exponential series of a nilpotent complex matrix."""
    d = x.shape[0]
    out = np.eye(d, dtype=complex)
    term = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        term = term @ x / k
        out = out + term
    return out


def orbit_vector_numeric(model: MonodromyModel, h: Sequence, w: Sequence[complex]) -> np.ndarray:
    """``exp(-sum w_j N_j) h`` in complex floating point."""
    d = model.d
    x = np.zeros((d, d), dtype=complex)
    for wj, nj in zip(w, model.N):
        x = x + complex(wj) * nj.to_float()
    return exp_nilpotent_numeric(-x) @ np.array([complex(float(c)) for c in h])


def sample_sheet(model: MonodromyModel, h: Sequence, z: Sequence[complex]) -> NumericPoint:
    """The image of ``(z, h)`` under ``z -> (exp(2 pi i z), exp(-sum z_j N_j) h)``."""
    z = [complex(x) for x in z]
    if len(z) != model.n:
        raise ValueError(f"expected {model.n} coordinates, got {len(z)}")
    if len(h) != model.d:
        raise ValueError(f"fiber vector must have length {model.d}")
    if any(x.imag <= 0 for x in z):
        raise DomainError("sheet parameters need positive imaginary part")
    t = tuple(cmath.exp(2j * cmath.pi * x) for x in z)
    v = orbit_vector_numeric(model, h, z)
    return NumericPoint(t, tuple(v))


def orbit_equal(model: MonodromyModel, h0: Sequence, h1: Sequence, bound: int = 10) -> bool:
    """Search ``a`` with ``max|a_j| <= bound`` and ``T^a h0 == h1``.

    ``False`` only means no such ``a`` exists within the bound.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    h0 = tuple(parse_rational(x) for x in h0)
    h1 = tuple(parse_rational(x) for x in h1)
    if h0 == h1:
        return True
    # T^a h0 = exp(-sum a_j N_j) h0 is a polynomial in a
    orbit = exp_action_poly(model.N, h0, var_names("a", model.n))
    diff = [p - c for p, c in zip(orbit, h1)]
    rng = range(-bound, bound + 1)
    for a in itertools.product(rng, repeat=model.n):
        if all(q.evaluate(a) == 0 for q in diff):
            return True
    return False
