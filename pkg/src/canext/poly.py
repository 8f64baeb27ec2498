"""Sparse multivariate polynomials over Q, Groebner bases and toric ideals."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exact import Matrix, kernel_lattice

__all__ = [
    "Binomial",
    "GREVLEX",
    "LEX",
    "MonomialOrder",
    "MultiPoly",
    "buchberger",
    "normal_form",
    "s_polynomial",
    "substitute",
    "toric_ideal_binomials",
    "var_names",
]

Exps = tuple[int, ...]


def var_names(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(count))


@dataclass(frozen=True)
class MonomialOrder:
    """Term order: ``grevlex``, ``lex`` or ``block`` elimination.

    ``block`` compares the first ``block`` variables by grevlex and breaks
    ties with grevlex on the remaining ones.
    """

    kind: str = "grevlex"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, e: Exps):
        if self.kind == "lex":
            return e
        if self.kind == "grevlex":
            return _grevlex_key(e)
        return (_grevlex_key(e[: self.block]), _grevlex_key(e[self.block :]))


def _grevlex_key(e: Exps):
    return (sum(e), tuple(-x for x in reversed(e)))


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class MultiPoly:
    """Polynomial with exact rational coefficients over named variables.

    Terms map exponent tuples to nonzero :class:`~fractions.Fraction`
    coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Optional[Mapping[Exps, object]] = None):
        self.variables = tuple(variables)
        nv = len(self.variables)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nv or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for variables {self.variables}")
            c = _frac(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, variables) -> "MultiPoly":
        return cls(variables)

    @classmethod
    def constant(cls, variables, c) -> "MultiPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> "MultiPoly":
        variables = tuple(variables)
        i = variables.index(name)
        return cls(variables, {tuple(int(j == i) for j in range(len(variables))): 1})

    @classmethod
    def monomial(cls, variables, exps: Exps, c=1) -> "MultiPoly":
        return cls(variables, {tuple(exps): c})

    @classmethod
    def gens(cls, variables) -> tuple["MultiPoly", ...]:
        variables = tuple(variables)
        return tuple(cls.var(variables, v) for v in variables)

    # basic queries ----------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list[tuple[Exps, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading(self, order: MonomialOrder = GREVLEX) -> tuple[Exps, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    def monic(self, order: MonomialOrder = GREVLEX) -> "MultiPoly":
        _, c = self.leading(order)
        return self * (1 / c)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.variables, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.variables, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly(self.variables)
            return MultiPoly(self.variables, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "MultiPoly":
        return self * (1 / _frac(c))

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exps: Exps, c) -> "MultiPoly":
        return MultiPoly(
            self.variables,
            {tuple(a + b for a, b in zip(e, exps)): v * c for e, v in self.terms.items()},
        )

    # variables --------------------------------------------------------------
    def embed(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over a superset of the variables (by name)."""
        variables = tuple(variables)
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, x in zip(idx, e):
                ne[i] = x
            out[tuple(ne)] = c
        return MultiPoly(variables, out)

    def restrict(self, variables: Sequence[str]) -> "MultiPoly":
        """Drop variables that do not occur; fails if a dropped one occurs."""
        variables = tuple(variables)
        keep = [self.variables.index(v) for v in variables]
        drop = [i for i in range(len(self.variables)) if i not in keep]
        out = {}
        for e, c in self.terms.items():
            if any(e[i] for i in drop):
                raise ValueError("polynomial involves a dropped variable")
            out[tuple(e[i] for i in keep)] = c
        return MultiPoly(variables, out)

    # evaluation -------------------------------------------------------------
    def evaluate(self, point: Union[Mapping[str, object], Sequence]):
        """Evaluate at a point; exact for exact inputs, complex for complex ones."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.variables]
        point = list(point)
        if len(point) != len(self.variables):
            raise ValueError("point has the wrong number of coordinates")
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def __call__(self, *point):
        return self.evaluate(point)

    def exponent_array(self):
        import numpy as np

        nv = len(self.variables)
        if not self.terms:
            return np.zeros((0, nv), dtype=np.int64)
        return np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), nv)

    def coeff_array(self):
        import numpy as np

        return np.array([complex(float(c)) for c in self.terms.values()], dtype=np.complex128)

    # text and JSON ------------------------------------------------------------
    def to_text(self, order: MonomialOrder = GREVLEX) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms(order):
            factors = []
            for name, k in zip(self.variables, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    __str__ = to_text

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables!r}, {self.to_text()!r})"

    def to_json(self, order: MonomialOrder = GREVLEX) -> list[dict]:
        return [{"coeff": str(c), "exps": list(e)} for e, c in self.sorted_terms(order)]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], variables: Sequence[str]) -> "MultiPoly":
        return cls(variables, {tuple(t["exps"]): Fraction(str(t["coeff"])) for t in data})

    @classmethod
    def parse(cls, source, variables: Sequence[str]) -> "MultiPoly":
        """Parse canonical text (``"-2/3*v1^2*v2 + 1"``) or the JSON term list."""
        if not isinstance(source, str):
            return cls.from_json(source, variables)
        return _parse_text(source, tuple(variables))


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")


def _parse_text(text: str, variables: tuple[str, ...]) -> MultiPoly:
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if s[0] not in "+-":
        s = "+" + s
    pieces = _TERM_SPLIT.split(s)
    # split yields ['', sign, term, sign, term, ...]
    if pieces[0].strip():
        raise ValueError(f"cannot parse polynomial {text!r}")
    terms: dict = {}
    nv = len(variables)
    for sign, body in zip(pieces[1::2], pieces[2::2]):
        body = body.strip()
        if not body:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = Fraction(1)
        exps = [0] * nv
        for factor in body.split("*"):
            factor = factor.strip()
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            if name not in variables:
                raise ValueError(f"unknown variable {name!r} in {text!r}")
            exps[variables.index(name)] += int(power) if power else 1
        if sign == "-":
            coeff = -coeff
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff
    return MultiPoly(variables, terms)


def substitute(p: MultiPoly, assignment: Mapping[str, MultiPoly]) -> MultiPoly:
    """Compose ``p`` with polynomials for each of its variables."""
    used = [any(e[i] for e in p.terms) for i in range(len(p.variables))]
    missing = [v for v, u in zip(p.variables, used) if u and v not in assignment]
    if missing:
        raise KeyError(f"assignment misses {missing}")
    images = [assignment.get(v, 0) for v in p.variables]
    target = next((q.variables for q in images if isinstance(q, MultiPoly)), None)
    if target is None:
        raise ValueError("assignment needs at least one polynomial value")
    images = [q if isinstance(q, MultiPoly) else MultiPoly.constant(target, q) for q in images]
    powers: list[dict] = [{} for _ in images]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = images[i] ** k
        return cache[k]

    total = MultiPoly(target)
    for e, c in p.terms.items():
        term = MultiPoly.constant(target, c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Groebner bases


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(a, b))


def _reduce_terms(terms: dict, basis, order: MonomialOrder) -> dict:
    """Full reduction of a term dict by ``(lead_exps, lead_coeff, poly)`` triples."""
    p = dict(terms)
    rem = {}
    key = order.key
    while p:
        lm = max(p, key=key)
        c = p[lm]
        for le, lc, g in basis:
            if _divides(le, lm):
                shift = tuple(x - y for x, y in zip(lm, le))
                f = c / lc
                for e, gc in g.terms.items():
                    ne = tuple(x + y for x, y in zip(e, shift))
                    v = p.get(ne, 0) - f * gc
                    if v:
                        p[ne] = v
                    else:
                        p.pop(ne, None)
                break
        else:
            rem[lm] = p.pop(lm)
    return rem


def _lead_table(basis: Sequence[MultiPoly], order: MonomialOrder):
    out = []
    for g in basis:
        if g:
            e, c = g.leading(order)
            out.append((e, c, g))
    return out


def normal_form(p: MultiPoly, basis: Sequence[MultiPoly], order: MonomialOrder = GREVLEX) -> MultiPoly:
    """Remainder of multivariate division of ``p`` by ``basis``."""
    if not any(basis):
        raise ValueError("division basis must contain a nonzero polynomial")
    return MultiPoly(p.variables, _reduce_terms(p.terms, _lead_table(basis, order), order))


def s_polynomial(f: MultiPoly, g: MultiPoly, order: MonomialOrder = GREVLEX) -> MultiPoly:
    ef, cf = f.leading(order)
    eg, cg = g.leading(order)
    m = _lcm(ef, eg)
    return f.mul_term(tuple(a - b for a, b in zip(m, ef)), 1 / cf) - g.mul_term(
        tuple(a - b for a, b in zip(m, eg)), 1 / cg
    )


def _reduced(G: list[MultiPoly], order: MonomialOrder) -> list[MultiPoly]:
    G = [g.monic(order) for g in G if g]
    leads = [g.leading(order)[0] for g in G]
    keep = []
    for i, g in enumerate(G):
        li = leads[i]
        dominated = any(
            j != i and _divides(leads[j], li) and (leads[j] != li or j < i) for j in range(len(G))
        )
        if not dominated:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = _lead_table(keep[:i] + keep[i + 1 :], order)
        e, c = g.leading(order)
        tail = {x: y for x, y in g.terms.items() if x != e}
        tail = _reduce_terms(tail, others, order) if others else tail
        tail[e] = c
        out.append(MultiPoly(g.variables, tail).monic(order))
    out.sort(key=lambda q: order.key(q.leading(order)[0]), reverse=True)
    return out


def buchberger(gens: Sequence[MultiPoly], order: MonomialOrder = GREVLEX) -> list[MultiPoly]:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Output is monic and sorted by decreasing leading monomial, so it does not
    depend on the order of ``gens``.
    """
    G = []
    for g in gens:
        if g:
            g = g.monic(order)
            if g not in G:
                G.append(g)
    if not G:
        raise ValueError("buchberger needs a nonzero generator")
    leads = [g.leading(order)[0] for g in G]
    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}
    while pairs:
        i, j = min(pairs, key=lambda ij: (order.key(_lcm(leads[ij[0]], leads[ij[1]])), ij))
        pairs.discard((i, j))
        li, lj = leads[i], leads[j]
        if all(not (x and y) for x, y in zip(li, lj)):
            continue
        m = _lcm(li, lj)
        # chain criterion
        if any(
            k not in (i, j)
            and _divides(leads[k], m)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue
        s = s_polynomial(G[i], G[j], order)
        r = MultiPoly(s.variables, _reduce_terms(s.terms, _lead_table(G, order), order))
        if r:
            r = r.monic(order)
            G.append(r)
            leads.append(r.leading(order)[0])
            n = len(G) - 1
            pairs.update((k, n) for k in range(n))
    return _reduced(G, order)


# ---------------------------------------------------------------------------
# toric ideals


@dataclass(frozen=True)
class Binomial:
    """``x^beta_plus - x^beta_minus`` with disjoint supports."""

    beta_plus: Exps
    beta_minus: Exps

    def __post_init__(self):
        bp = tuple(int(x) for x in self.beta_plus)
        bm = tuple(int(x) for x in self.beta_minus)
        if len(bp) != len(bm):
            raise ValueError("exponent vectors of different length")
        if any(x < 0 for x in bp + bm):
            raise ValueError("negative exponent")
        if any(x and y for x, y in zip(bp, bm)):
            raise ValueError("binomial sides share a variable")
        object.__setattr__(self, "beta_plus", bp)
        object.__setattr__(self, "beta_minus", bm)

    @property
    def nvars(self) -> int:
        return len(self.beta_plus)

    def to_poly(self, variables: Optional[Sequence[str]] = None) -> MultiPoly:
        variables = variables or var_names("x", self.nvars)
        return MultiPoly(variables, {self.beta_plus: 1}) - MultiPoly(variables, {self.beta_minus: 1})

    def has_constant_side(self) -> bool:
        return not any(self.beta_plus) or not any(self.beta_minus)

    def evaluate(self, x: Sequence):
        a = b = 1
        for xi, p, m in zip(x, self.beta_plus, self.beta_minus):
            if p:
                a = a * xi**p
            if m:
                b = b * xi**m
        return a - b

    def to_json(self) -> dict:
        return {"beta_plus": list(self.beta_plus), "beta_minus": list(self.beta_minus)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Binomial":
        return cls(tuple(data["beta_plus"]), tuple(data["beta_minus"]))

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "Binomial":
        items = p.sorted_terms(GREVLEX)
        if len(items) != 2 or items[0][1] != 1 or items[1][1] != -1:
            raise ValueError(f"{p} is not a pure difference binomial")
        return cls(items[0][0], items[1][0])


def toric_ideal_binomials(exponents: Matrix) -> list[Binomial]:
    """Binomial generators of the closure of the image of ``u -> x``.

    ``exponents`` is ``n x m``; coordinate ``x_j`` is the monomial
    ``prod_i u_i^exponents[j, i]``.  The generators form the reduced grevlex
    Groebner basis of the toric ideal.
    """
    n, m = exponents.shape
    if m == 0:
        return [Binomial(tuple(int(i == j) for i in range(n)), (0,) * n) for j in range(n)]
    lattice = kernel_lattice(exponents.transpose())
    if lattice.rank == 0:
        return []
    ring = ("_t",) + var_names("x", n)
    gens = []
    for c in lattice.vectors:
        plus = (0,) + tuple(max(x, 0) for x in c)
        minus = (0,) + tuple(max(-x, 0) for x in c)
        gens.append(MultiPoly(ring, {plus: 1, minus: -1}))
    gens.append(MultiPoly(ring, {(1,) * (n + 1): 1, (0,) * (n + 1): -1}))
    G = buchberger(gens, MonomialOrder("block", 1))
    xs = var_names("x", n)
    out = []
    for g in G:
        if any(e[0] for e in g.terms):
            continue
        out.append(Binomial.from_poly(g.restrict(xs)))
    return out
