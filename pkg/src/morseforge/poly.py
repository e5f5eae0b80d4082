"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial of dimension n maps exponent tuples (one non-negative int per
variable) to nonzero rational coefficients; the zero polynomial is the empty
map.  All arithmetic is exact.  The canonical term order used for
serialization, printing and float evaluation is graded lexicographic:
ascending total degree, ties broken lexicographically on the exponent tuple.

A PolyMap bundles n-variate polynomials into a polynomial map R^m -> R^k;
composition of maps shares a power-product cache so that repeated monomial
images are computed once.

All values are immutable after construction and every operation is a pure
function, so instances are safe to share between threads.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Sequence, Tuple

from ._rat import Rat, rat, rat_str

Exponent = Tuple[int, ...]


class DimensionMismatch(ValueError):
    """Operands live in different ambient dimensions (or wrong arity)."""


def grlex_key(exps: Exponent):
    """Sort key realizing the graded lexicographic canonical order."""
    return (sum(exps), exps)


def _pairwise_sum(vals: List[float], lo: int, hi: int) -> float:
    """Pairwise (cascade) summation of vals[lo:hi] for deterministic,
    platform-stable float accumulation."""
    n = hi - lo
    if n == 0:
        return 0.0
    if n == 1:
        return vals[lo]
    mid = lo + n // 2
    return _pairwise_sum(vals, lo, mid) + _pairwise_sum(vals, mid, hi)


class MultiPoly:
    """Exact sparse multivariate polynomial."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        clean: Dict[Exponent, Rat] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for exps, coeff in items:
                exps = tuple(int(e) for e in exps)
                if len(exps) != self.dim:
                    raise DimensionMismatch(
                        f"exponent tuple {exps} has length {len(exps)}, expected {self.dim}"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = rat(coeff)
                if exps in clean:
                    c = clean[exps] + c
                if c:
                    clean[exps] = c
                elif exps in clean:
                    del clean[exps]
        self.terms = clean

    @classmethod
    def _raw(cls, dim: int, terms: Dict[Exponent, Rat]) -> "MultiPoly":
        # Internal fast path: terms are already validated and zero-free.
        p = object.__new__(cls)
        p.dim = dim
        p.terms = terms
        return p

    # ---------------------------------------------------------------- factories

    @classmethod
    def zero(cls, dim: int) -> "MultiPoly":
        return cls._raw(int(dim), {})

    @classmethod
    def constant(cls, dim: int, value) -> "MultiPoly":
        c = rat(value)
        if not c:
            return cls.zero(dim)
        return cls._raw(int(dim), {(0,) * int(dim): c})

    @classmethod
    def variable(cls, dim: int, index: int) -> "MultiPoly":
        if not 0 <= index < dim:
            raise IndexError(f"variable index {index} out of range for dim {dim}")
        exps = tuple(1 if i == index else 0 for i in range(dim))
        return cls._raw(int(dim), {exps: rat(1)})

    # ---------------------------------------------------------------- basic ops

    def _check_dim(self, other: "MultiPoly"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            v = out.get(exps)
            v = c if v is None else v + c
            if v:
                out[exps] = v
            elif exps in out:
                del out[exps]
        return MultiPoly._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = rat(other)
            if not c:
                return MultiPoly.zero(self.dim)
            return MultiPoly._raw(self.dim, {e: v * c for e, v in self.terms.items()})
        self._check_dim(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: Dict[Exponent, Rat] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(key)
                v = c1 * c2 if v is None else v + c1 * c2
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
        return MultiPoly._raw(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n > 1
            if base_needed:
                base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            if self.is_constant():
                return self.constant_value() == rat(other)
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.dim, rat(0))

    def total_degree(self) -> int:
        """Max total degree of any term; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: int) -> int:
        if not self.terms:
            return -1
        return max(e[var] for e in self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    # ------------------------------------------------------------------ calculus

    def partial(self, var: int) -> "MultiPoly":
        """Exact partial derivative with respect to variable var."""
        if not 0 <= var < self.dim:
            raise IndexError(f"variable index {var} out of range for dim {self.dim}")
        out: Dict[Exponent, Rat] = {}
        for exps, c in self.terms.items():
            e = exps[var]
            if e == 0:
                continue
            key = exps[:var] + (e - 1,) + exps[var + 1 :]
            out[key] = out.get(key, rat(0)) + c * e
        return MultiPoly._raw(self.dim, {e: c for e, c in out.items() if c})

    def antiderivative(self, var: int) -> "MultiPoly":
        """The unique anti-derivative in var with zero constant term."""
        if not 0 <= var < self.dim:
            raise IndexError(f"variable index {var} out of range for dim {self.dim}")
        out: Dict[Exponent, Rat] = {}
        for exps, c in self.terms.items():
            e = exps[var]
            key = exps[:var] + (e + 1,) + exps[var + 1 :]
            out[key] = c / (e + 1)
        return MultiPoly._raw(self.dim, out)

    # --------------------------------------------------------------- composition

    def compose(self, mapping, cache=None) -> "MultiPoly":
        """Exact substitution of variable i by mapping's i-th component.

        mapping may be a PolyMap or a sequence of MultiPoly sharing one
        dimension.  A dict may be passed as cache to share monomial power
        products across several compositions against the same mapping.
        """
        comps = mapping.components if isinstance(mapping, PolyMap) else tuple(mapping)
        if len(comps) != self.dim:
            raise DimensionMismatch(
                f"need {self.dim} substitution components, got {len(comps)}"
            )
        m = comps[0].dim
        for c in comps:
            if c.dim != m:
                raise DimensionMismatch("substitution components disagree in dimension")
        if cache is None:
            cache = {}
        acc: Dict[Exponent, Rat] = {}
        for exps, coeff in self.terms.items():
            img = _power_product(exps, comps, cache)
            for e2, c2 in img.terms.items():
                v = acc.get(e2)
                v = coeff * c2 if v is None else v + coeff * c2
                if v:
                    acc[e2] = v
                elif e2 in acc:
                    del acc[e2]
        return MultiPoly._raw(m, acc)

    def embed(self, new_dim: int, positions: Sequence[int]) -> "MultiPoly":
        """Reinterpret in a larger ambient space, sending variable i to
        variable positions[i]."""
        if len(positions) != self.dim:
            raise DimensionMismatch("positions must name every current variable")
        if len(set(positions)) != len(positions) or any(
            not 0 <= p < new_dim for p in positions
        ):
            raise ValueError(f"bad embedding positions {positions} for dim {new_dim}")
        out: Dict[Exponent, Rat] = {}
        for exps, c in self.terms.items():
            e = [0] * new_dim
            for i, p in enumerate(positions):
                e[p] = exps[i]
            out[tuple(e)] = c
        return MultiPoly._raw(int(new_dim), out)

    # ---------------------------------------------------------------- evaluation

    def eval_rational(self, xs: Sequence):
        """Exact value at a rational point."""
        if len(xs) != self.dim:
            raise DimensionMismatch(f"point has length {len(xs)}, expected {self.dim}")
        vals = [rat(x) for x in xs]
        pows = self._power_tables(vals, rat(1))
        total = rat(0)
        for exps, c in self.terms.items():
            t = c
            for i, e in enumerate(exps):
                if e:
                    t = t * pows[i][e]
            total = total + t
        return total

    def eval_float(self, xs: Sequence[float]) -> float:
        """Double-precision value; terms are accumulated in the canonical
        graded-lex order with pairwise summation, so the result is
        deterministic across platforms."""
        if len(xs) != self.dim:
            raise DimensionMismatch(f"point has length {len(xs)}, expected {self.dim}")
        vals = [float(x) for x in xs]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite evaluation point {xs}")
        pows = self._power_tables(vals, 1.0)
        contrib = []
        for exps in self.sorted_exponents():
            t = float(self.terms[exps])
            for i, e in enumerate(exps):
                if e:
                    t *= pows[i][e]
            contrib.append(t)
        return _pairwise_sum(contrib, 0, len(contrib))

    def _power_tables(self, vals, one):
        maxes = [0] * self.dim
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e > maxes[i]:
                    maxes[i] = e
        pows = []
        for i, v in enumerate(vals):
            table = [one]
            for _ in range(maxes[i]):
                table.append(table[-1] * v)
            pows.append(table)
        return pows

    # ------------------------------------------------------------- canonical form

    def sorted_exponents(self) -> List[Exponent]:
        return sorted(self.terms, key=grlex_key)

    def sorted_terms(self) -> List[Tuple[Exponent, Rat]]:
        return [(e, self.terms[e]) for e in self.sorted_exponents()]

    def to_obj(self) -> dict:
        """JSON-ready dict with terms in graded-lex order and rationals as
        decimal strings."""
        return {
            "dimension": self.dim,
            "terms": [
                {
                    "exponents": list(e),
                    "num": str(self.terms[e].numerator),
                    "den": str(self.terms[e].denominator),
                }
                for e in self.sorted_exponents()
            ],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "MultiPoly":
        dim = int(obj["dimension"])
        terms = [
            (tuple(int(x) for x in t["exponents"]), rat(int(t["num"]), int(t["den"])))
            for t in obj["terms"]
        ]
        return cls(dim, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = [rat_str(c)]
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i}")
                elif e > 1:
                    factors.append(f"x{i}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly(dim={self.dim}, {self})"


def _power_product(exps: Exponent, comps, cache) -> MultiPoly:
    """Image of the monomial x^exps under substitution, memoized so that each
    needed monomial is obtained from a predecessor by one multiplication."""
    got = cache.get(exps)
    if got is not None:
        return got
    j = next((i for i, e in enumerate(exps) if e), None)
    if j is None:
        res = MultiPoly.constant(comps[0].dim, 1)
    else:
        prev = exps[:j] + (exps[j] - 1,) + exps[j + 1 :]
        res = _power_product(prev, comps, cache) * comps[j]
    cache[exps] = res
    return res


class PolyMap:
    """Polynomial map R^domain_dim -> R^(number of components)."""

    __slots__ = ("domain_dim", "components")

    def __init__(self, components: Iterable[MultiPoly], domain_dim: int | None = None):
        comps = tuple(components)
        if not comps:
            raise ValueError("a PolyMap needs at least one component")
        dd = comps[0].dim if domain_dim is None else int(domain_dim)
        for c in comps:
            if c.dim != dd:
                raise DimensionMismatch("components disagree with the domain dimension")
        self.domain_dim = dd
        self.components = comps

    @property
    def codomain_dim(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, n: int) -> "PolyMap":
        return cls([MultiPoly.variable(n, i) for i in range(n)])

    def compose(self, other: "PolyMap") -> "PolyMap":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        if self.domain_dim != other.codomain_dim:
            raise DimensionMismatch(
                f"cannot compose: inner map has codomain {other.codomain_dim}, "
                f"outer expects {self.domain_dim}"
            )
        cache: dict = {}
        return PolyMap(
            [c.compose(other.components, cache) for c in self.components],
            other.domain_dim,
        )

    def is_identity(self) -> bool:
        return self.codomain_dim == self.domain_dim and all(
            c == MultiPoly.variable(self.domain_dim, i)
            for i, c in enumerate(self.components)
        )

    def eval_rational(self, xs: Sequence):
        return tuple(c.eval_rational(xs) for c in self.components)

    def eval_float(self, xs: Sequence[float]):
        return tuple(c.eval_float(xs) for c in self.components)

    def jacobian(self) -> List[List[MultiPoly]]:
        """Matrix of partials, row i = gradient of component i."""
        return [
            [c.partial(j) for j in range(self.domain_dim)] for c in self.components
        ]

    def __eq__(self, other):
        return (
            isinstance(other, PolyMap)
            and self.domain_dim == other.domain_dim
            and self.components == other.components
        )

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"PolyMap({self.domain_dim} -> {self.codomain_dim}; {comps})"

    def to_obj(self) -> dict:
        return {
            "domain_dim": self.domain_dim,
            "components": [c.to_obj() for c in self.components],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "PolyMap":
        return cls(
            [MultiPoly.from_obj(c) for c in obj["components"]],
            int(obj["domain_dim"]),
        )


def compose_map(a: PolyMap, b: PolyMap) -> PolyMap:
    """Componentwise composition a o b."""
    return a.compose(b)


def gradient(p: MultiPoly) -> PolyMap:
    """The gradient of p as a PolyMap."""
    return PolyMap([p.partial(i) for i in range(p.dim)])
