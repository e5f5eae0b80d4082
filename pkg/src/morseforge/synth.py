"""Top-level constructions.

synthesize: given a finite point set X in R^n, produce a polynomial P whose
critical points are exactly X, all strict local minima, by pulling the plane
Morse polynomial back through the coordinate change:

    Q(x) = f(x1, x2) + 1/2 sum_{i>2} x_i^2,     P = Q o F.

build_saddle_field: the companion vector field with stable equilibria at the
axis images, saddles at interleaved midpoints, and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import exactmat
from ._rat import Rat, rat
from .coord_change import CoordChange, PointSet, build_coord_change
from .morse_scalar import AlphaSpec, MorsePair, build_pair
from .poly import MultiPoly, PolyMap


@dataclass
class SynthesisResult:
    """The synthesized polynomial with every intermediate object for audit."""

    input: PointSet
    change: CoordChange
    morse: MorsePair
    q: MultiPoly
    p_poly: MultiPoly
    grad_field: PolyMap
    _hessian_cache: Dict[Tuple, List[List[Rat]]] = field(default_factory=dict)
    _second_partials: Optional[List[List[MultiPoly]]] = None

    @property
    def dimension(self) -> int:
        return self.input.dimension

    def degree_audit(self) -> dict:
        return {
            "deg_f": self.morse.f.total_degree(),
            "deg_forward": [c.total_degree() for c in self.change.forward.components],
            "deg_p": self.p_poly.total_degree(),
            "terms_p": self.p_poly.num_terms(),
        }


def synthesize(xs: PointSet) -> SynthesisResult:
    change = build_coord_change(xs)
    spec = AlphaSpec(change.axis_images)
    morse = build_pair(spec)
    n = xs.dimension

    q = morse.f.embed(n, (0, 1))
    half = rat(1, 2)
    for i in range(2, n):
        q = q + MultiPoly.variable(n, i) ** 2 * half

    p_poly = q.compose(change.forward)
    grad_field = PolyMap([-p_poly.partial(i) for i in range(n)], n)
    return SynthesisResult(
        input=xs,
        change=change,
        morse=morse,
        q=q,
        p_poly=p_poly,
        grad_field=grad_field,
    )


def _second_partials(result: SynthesisResult) -> List[List[MultiPoly]]:
    if result._second_partials is None:
        n = result.dimension
        firsts = [result.p_poly.partial(i) for i in range(n)]
        rows = []
        for i in range(n):
            rows.append(
                [firsts[i].partial(j) if j >= i else rows[j][i] for j in range(n)]
            )
        result._second_partials = rows
    return result._second_partials


def hessian_at(result: SynthesisResult, x) -> List[List[Rat]]:
    """Exact Hessian of P at a rational point via symbolic second partials.

    The pullback identity J^T H_Q J is deliberately not used here; it serves
    as an independent oracle in the tests."""
    pt = tuple(rat(c) for c in x)
    cached = result._hessian_cache.get(pt)
    if cached is not None:
        return cached
    rows = _second_partials(result)
    h = [[entry.eval_rational(pt) for entry in row] for row in rows]
    result._hessian_cache[pt] = h
    return h


def hessian_minors_at(result: SynthesisResult, x) -> List[Rat]:
    return exactmat.leading_principal_minors(hessian_at(result, x))


def gradient_field(result: SynthesisResult) -> PolyMap:
    """The descent field -grad P."""
    return result.grad_field


def transported_hessian(result: SynthesisResult, x) -> List[List[Rat]]:
    """Oracle: J^T H_Q J with J the Jacobian of F at x.  At a critical point
    this must equal the symbolic Hessian of P exactly."""
    pt = tuple(rat(c) for c in x)
    n = result.dimension
    jac_polys = result.change.forward.jacobian()
    j = [[entry.eval_rational(pt) for entry in row] for row in jac_polys]
    fx = result.change.forward.eval_rational(pt)
    q = result.q
    hq = [
        [q.partial(i).partial(jj).eval_rational(fx) for jj in range(n)]
        for i in range(n)
    ]
    jt = exactmat.transpose(j)
    return exactmat.mat_mul(jt, exactmat.mat_mul(hq, j))


@dataclass(frozen=True)
class SaddleField:
    """Vector field (gamma(x1), -x2, ..., -xn) in the transformed frame.

    stable_set holds the axis images (attractors), saddle_set the strictly
    interleaved midpoints.  pullback is the same field conjugated back to the
    original coordinates through the coordinate change."""

    gamma: MultiPoly
    field: PolyMap
    stable_set: Tuple[Rat, ...]
    saddle_set: Tuple[Rat, ...]
    change: CoordChange
    pullback: PolyMap


def build_saddle_field(xs: PointSet) -> SaddleField:
    change = build_coord_change(xs)
    n = xs.dimension
    stable = tuple(sorted(change.axis_images))
    saddles = tuple(
        (a + b) / 2 for a, b in zip(stable, stable[1:])
    )

    x = MultiPoly.variable(1, 0)
    gamma = MultiPoly.constant(1, -1)
    for r in stable:
        gamma = gamma * (x - MultiPoly.constant(1, r))
    for r in saddles:
        gamma = gamma * (x - MultiPoly.constant(1, r))

    comps = [gamma.embed(n, (0,))]
    for j in range(1, n):
        comps.append(-MultiPoly.variable(n, j))
    fld = PolyMap(comps, n)

    # conjugate back: h(x) = J_{F^-1}(F(x)) . g(F(x)), polynomial since both
    # F and its inverse are
    jac_inv = change.inverse.jacobian()
    cache: dict = {}
    jac_inv_at_f = [
        [entry.compose(change.forward.components, cache) for entry in row]
        for row in jac_inv
    ]
    g_at_f = [c.compose(change.forward.components, cache) for c in fld.components]
    pull_comps = []
    for i in range(n):
        acc = MultiPoly.zero(n)
        for j in range(n):
            acc = acc + jac_inv_at_f[i][j] * g_at_f[j]
        pull_comps.append(acc)
    pullback = PolyMap(pull_comps, n)

    return SaddleField(
        gamma=gamma,
        field=fld,
        stable_set=stable,
        saddle_set=saddles,
        change=change,
        pullback=pullback,
    )


def saddle_jacobian_at(sf: SaddleField, x1) -> List[List[Rat]]:
    """Exact Jacobian of the transformed field at (x1, 0, ..., 0); diagonal
    with entries (gamma'(x1), -1, ..., -1)."""
    n = sf.field.domain_dim
    jac = sf.field.jacobian()
    pt = tuple([rat(x1)] + [rat(0)] * (n - 1))
    return [[entry.eval_rational(pt) for entry in row] for row in jac]
