"""Independent numeric verification layer.

Everything here treats the synthesized objects as claims under test:
finite-difference checks against the symbolic gradient, Newton searches for
critical points the construction says cannot exist, eigenvalue sign counts,
and RK4 integration of the descent flow with convergence classification.

Newton runs in two phases: a fast float phase over the whole seed grid, then
an exact-arithmetic polish of the few deduplicated candidates.  Expanded
polynomial evaluation in floats has a cancellation noise floor far above the
1e-12 residual target, so the final residual is evaluated exactly (rational
arithmetic at the float iterate) and only then compared against the target.

The flow integrator is classical fixed-step RK4 with a local safeguard: a
step whose result leaves the 10x inflated box, goes non-finite, or increases
the Lyapunov value beyond half the per-step tolerance is redone as two half
steps, recursively up to max_halvings.  A trajectory is classified diverged
only when the safeguard bottoms out still outside the guard box or non-finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import exactmat
from ._rat import rat
from .numeric import CompiledJacobian, CompiledMap, CompiledPoly, compile_jacobian, compile_map
from .poly import MultiPoly, PolyMap


# --------------------------------------------------------------------- boxes


@dataclass(frozen=True)
class BoxSpec:
    """Axis-aligned search box with the rule that produced it recorded."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    derivation: str = "explicit"

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have equal length")
        if not all(lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("box must satisfy lower < upper componentwise")

    @classmethod
    def from_points(cls, points, inflate: float = 2.0, margin: float = 1.0) -> "BoxSpec":
        pts = np.asarray([[float(c) for c in p] for p in points], dtype=float)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        center = (lo + hi) / 2
        half = (hi - lo) / 2
        return cls(
            tuple(center - inflate * half - margin),
            tuple(center + inflate * half + margin),
            derivation=f"bounding box of {len(pts)} points, inflated x{inflate} plus margin {margin}",
        )

    @property
    def dim(self) -> int:
        return len(self.lower)

    def inflated(self, factor: float):
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        c = (lo + hi) / 2
        h = (hi - lo) / 2
        return c - factor * h, c + factor * h

    def grid(self, per_axis: int) -> np.ndarray:
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def sample(self, num: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(num, self.dim))

    def to_obj(self) -> dict:
        return {
            "lower": list(self.lower),
            "upper": list(self.upper),
            "derivation": self.derivation,
        }


def default_box(points) -> BoxSpec:
    return BoxSpec.from_points(points)


# ------------------------------------------------------- finite differences


def fd_gradient_check(p: MultiPoly, x: Sequence[float], h: float) -> float:
    """Max over components of the relative deviation between the symbolic
    partial and the central difference at x.  Non-finite intermediates are
    reported as inf, never raised."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = [float(c) for c in x]
    worst = 0.0
    for i in range(p.dim):
        try:
            sym = p.partial(i).eval_float(x)
            xp = list(x)
            xm = list(x)
            xp[i] += h
            xm[i] -= h
            fd = (p.eval_float(xp) - p.eval_float(xm)) / (2 * h)
        except (OverflowError, ValueError):
            return math.inf
        if not (math.isfinite(sym) and math.isfinite(fd)):
            return math.inf
        rel = abs(sym - fd) / max(1.0, abs(sym), abs(fd))
        worst = max(worst, rel)
    return worst


def fd_gradient_check_batch(p: MultiPoly, pts: np.ndarray, h: float) -> np.ndarray:
    """Vectorized variant: one relative-error value per row of pts."""
    cp = CompiledPoly(p)
    parts = [CompiledPoly(p.partial(i)) for i in range(p.dim)]
    pts = np.asarray(pts, dtype=float)
    worst = np.zeros(len(pts))
    for i in range(p.dim):
        shift = np.zeros(p.dim)
        shift[i] = h
        sym = parts[i](pts)
        fd = (cp(pts + shift) - cp(pts - shift)) / (2 * h)
        rel = np.abs(sym - fd) / np.maximum.reduce([np.ones(len(pts)), np.abs(sym), np.abs(fd)])
        rel = np.where(np.isfinite(sym) & np.isfinite(fd), rel, np.inf)
        worst = np.maximum(worst, rel)
    return worst


# ----------------------------------------------------------- Newton search


@dataclass(frozen=True)
class NewtonConfig:
    residual_tol: float = 1e-12
    coarse_tol: float = 1e-6
    dedup_tol: float = 1e-8
    max_iter: int = 100
    polish_iter: int = 10


@dataclass
class NewtonResult:
    points: List[np.ndarray]
    seeds_used: int
    abandoned: int
    singular: int


def _dedup(points: np.ndarray, tol: float) -> List[np.ndarray]:
    reps: List[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - r) > tol for r in reps):
            reps.append(p)
    return reps


def _polish_exact(grad: PolyMap, jac_c: CompiledJacobian, x0: np.ndarray, cfg: NewtonConfig):
    """Newton refinement with the gradient evaluated exactly at the float
    iterate; accepts only if the exact residual norm reaches the target."""
    x = np.array(x0, dtype=float)
    for attempt in range(cfg.polish_iter + 1):
        exact_pt = [rat(float(c)) for c in x]
        g = np.array(
            [float(comp.eval_rational(exact_pt)) for comp in grad.components]
        )
        if not np.isfinite(g).all():
            return None
        if np.linalg.norm(g) < cfg.residual_tol:
            return x
        if attempt == cfg.polish_iter:
            return None
        jac = jac_c(x[None, :])[0]
        try:
            step = np.linalg.solve(jac, g)
        except np.linalg.LinAlgError:
            return None
        if not np.isfinite(step).all():
            return None
        x = x - step
    return None


def newton_search(
    grad: PolyMap,
    box: BoxSpec,
    seeds_per_axis: int,
    cfg: Optional[NewtonConfig] = None,
) -> NewtonResult:
    """Newton iteration on grad = 0 from a uniform seed grid over box.

    Converged points are deduplicated at cfg.dedup_tol and certified by the
    exact-residual polish before being reported."""
    if seeds_per_axis < 2:
        raise ValueError("seeds_per_axis must be >= 2")
    cfg = cfg or NewtonConfig()
    gc = compile_map(grad)
    jc = compile_jacobian(grad)
    seeds = box.grid(seeds_per_axis)
    guard_lo, guard_hi = box.inflated(10.0)

    x = seeds.copy()
    abandoned = 0
    singular = 0
    candidates: List[np.ndarray] = []
    for _ in range(cfg.max_iter):
        if len(x) == 0:
            break
        g = gc(x)
        finite = np.isfinite(g).all(axis=1) & np.isfinite(x).all(axis=1)
        inside = ((x >= guard_lo) & (x <= guard_hi)).all(axis=1)
        gn = np.linalg.norm(np.where(finite[:, None], g, np.inf), axis=1)
        conv = finite & inside & (gn < cfg.coarse_tol)
        if conv.any():
            candidates.extend(x[conv])
        lost = ~(finite & inside)
        abandoned += int(lost.sum())
        keep = ~(conv | lost)
        x = x[keep]
        g = g[keep]
        if len(x) == 0:
            break
        jac = jc(x)
        dets = np.linalg.det(jac)
        good = np.isfinite(dets) & (np.abs(dets) > 1e-300)
        singular += int((~good).sum())
        x, g, jac = x[good], g[good], jac[good]
        if len(x) == 0:
            break
        x = x - np.linalg.solve(jac, g[..., None])[..., 0]
    abandoned += len(x)  # hit the iteration cap without settling

    points: List[np.ndarray] = []
    if candidates:
        for rep in _dedup(np.asarray(candidates), cfg.dedup_tol):
            polished = _polish_exact(grad, jc, rep, cfg)
            if polished is not None:
                points.append(polished)
        points = _dedup(np.asarray(points), cfg.dedup_tol) if points else []
    return NewtonResult(
        points=points,
        seeds_used=len(seeds),
        abandoned=abandoned,
        singular=singular,
    )


# ------------------------------------------------------- eigenvalue signs


def eigen_signs(matrix, tol: float) -> Tuple[int, int, int]:
    """Counts of (positive, negative, ambiguous) eigenvalues; symmetric input
    uses the symmetric solver, general input the real parts."""
    m = np.asarray([[float(e) for e in row] for row in matrix], dtype=float)
    if np.allclose(m, m.T, rtol=1e-12, atol=1e-12):
        w = np.linalg.eigvalsh(m)
    else:
        w = np.linalg.eigvals(m).real
    pos = int((w > tol).sum())
    neg = int((w < -tol).sum())
    return pos, neg, len(w) - pos - neg


# ------------------------------------------------------------ flow tracing


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 1e-3
    t_max: float = 200.0
    grad_tol: float = 1e-6
    point_tol: float = 1e-3
    check_every: int = 25
    max_halvings: int = 40
    lyap_step_tol: float = 1e-9

    def __post_init__(self):
        if self.dt <= 0 or self.t_max <= 0:
            raise ValueError("dt and t_max must be positive")


@dataclass
class FlowTrace:
    start: Tuple[float, ...]
    steps: int
    end: Tuple[float, ...]
    classified: str  # converged_to | max_time_reached | diverged
    converged_index: Optional[int]
    final_grad_norm: float
    max_step_increase: float

    def to_obj(self) -> dict:
        return {
            "start": list(self.start),
            "steps": self.steps,
            "end": list(self.end),
            "classified": self.classified,
            "converged_index": self.converged_index,
            "final_grad_norm": self.final_grad_norm,
            "max_step_increase": self.max_step_increase,
        }


def _rk4(f: Callable, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _step_guarded(f, x, dt, lo, hi, depth, max_depth, lyap, lyap_tol):
    """Advance every row by dt; returns (new_x, diverged_mask)."""
    with np.errstate(over="ignore", invalid="ignore"):
        prop = _rk4(f, x, dt)
        ok = np.isfinite(prop).all(axis=1)
        ok &= ((prop >= lo) & (prop <= hi)).all(axis=1)
        hard_bad = ~ok
        if lyap is not None and ok.any():
            inc = lyap(prop) - lyap(x)
            ok &= ~(np.isfinite(inc) & (inc > 0.5 * lyap_tol))
    bad = ~ok
    diverged = np.zeros(len(x), dtype=bool)
    if bad.any():
        if depth >= max_depth:
            # only guard/finiteness violations count as divergence; a
            # Lyapunov wiggle at the halving floor is evaluation noise
            diverged = bad & hard_bad
            prop[diverged] = x[diverged]
        else:
            sub = x[bad]
            h1, d1 = _step_guarded(f, sub, dt / 2, lo, hi, depth + 1, max_depth, lyap, lyap_tol)
            h2, d2 = _step_guarded(f, h1, dt / 2, lo, hi, depth + 1, max_depth, lyap, lyap_tol)
            prop[bad] = h2
            dv = d1 | d2
            idx = np.flatnonzero(bad)
            diverged[idx[dv]] = True
    return prop, diverged


STATUS_ACTIVE, STATUS_CONVERGED, STATUS_TIMEOUT, STATUS_DIVERGED = 0, 1, 2, 3


@dataclass
class BatchFlowResult:
    starts: np.ndarray
    ends: np.ndarray
    status: np.ndarray  # STATUS_* per trajectory
    conv_idx: np.ndarray
    steps: np.ndarray
    final_grad_norm: np.ndarray
    max_step_increase: np.ndarray

    @property
    def fraction_converged(self) -> float:
        return float((self.status == STATUS_CONVERGED).mean())

    @property
    def num_diverged(self) -> int:
        return int((self.status == STATUS_DIVERGED).sum())

    @property
    def num_timeout(self) -> int:
        return int((self.status == STATUS_TIMEOUT).sum())

    def traces(self) -> List[FlowTrace]:
        names = {
            STATUS_CONVERGED: "converged_to",
            STATUS_TIMEOUT: "max_time_reached",
            STATUS_DIVERGED: "diverged",
        }
        out = []
        for i in range(len(self.starts)):
            st = int(self.status[i])
            out.append(
                FlowTrace(
                    start=tuple(self.starts[i]),
                    steps=int(self.steps[i]),
                    end=tuple(self.ends[i]),
                    classified=names.get(st, "max_time_reached"),
                    converged_index=int(self.conv_idx[i]) if st == STATUS_CONVERGED else None,
                    final_grad_norm=float(self.final_grad_norm[i]),
                    max_step_increase=float(self.max_step_increase[i]),
                )
            )
        return out


def integrate_batch(
    field,
    starts: np.ndarray,
    box: BoxSpec,
    targets,
    cfg: Optional[FlowConfig] = None,
    lyap=None,
) -> BatchFlowResult:
    """Integrate many trajectories of the compiled field at once.

    targets are the points convergence is classified against; lyap, when
    given, is a compiled scalar whose per-step increase is both guarded
    against and recorded."""
    cfg = cfg or FlowConfig()
    fc = field if isinstance(field, CompiledMap) else compile_map(field)
    lc = None
    if lyap is not None:
        lc = lyap if isinstance(lyap, CompiledPoly) else CompiledPoly(lyap)
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    B, n = starts.shape
    tg = np.asarray([[float(c) for c in t] for t in targets], dtype=float)
    lo, hi = box.inflated(10.0)

    x = starts.copy()
    status = np.full(B, STATUS_ACTIVE, dtype=np.int64)
    conv_idx = np.full(B, -1, dtype=np.int64)
    steps = np.zeros(B, dtype=np.int64)
    gnorm = np.full(B, np.nan)
    max_inc = np.zeros(B)

    active = np.arange(B)
    xa = starts.copy()
    total = int(round(cfg.t_max / cfg.dt))

    def classify(idx, pts):
        """Mark converged trajectories among idx; returns the local keep mask."""
        g = fc(pts)
        gn = np.linalg.norm(g, axis=1)
        gnorm[idx] = gn
        if len(tg):
            d = np.linalg.norm(pts[:, None, :] - tg[None, :, :], axis=2)
            nearest = d.argmin(axis=1)
            mind = d[np.arange(len(pts)), nearest]
        else:
            nearest = np.zeros(len(pts), dtype=np.int64)
            mind = np.full(len(pts), np.inf)
        conv = np.isfinite(gn) & (gn < cfg.grad_tol) & (mind < cfg.point_tol)
        status[idx[conv]] = STATUS_CONVERGED
        conv_idx[idx[conv]] = nearest[conv]
        return ~conv

    keep0 = classify(active, xa)  # seeds already at a target converge in 0 steps
    active, xa = active[keep0], xa[keep0]

    for step in range(1, total + 1):
        if len(active) == 0:
            break
        before = lc(xa) if lc is not None else None
        xa, div = _step_guarded(
            fc, xa, cfg.dt, lo, hi, 0, cfg.max_halvings, lc, cfg.lyap_step_tol
        )
        steps[active] = step
        x[active] = xa
        if lc is not None:
            inc = lc(xa) - before
            ok = np.isfinite(inc) & ~div
            np.maximum.at(max_inc, active[ok], inc[ok])
        if div.any():
            status[active[div]] = STATUS_DIVERGED
            active, xa = active[~div], xa[~div]
            if len(active) == 0:
                break
        if step % cfg.check_every == 0 or step == total:
            keep = classify(active, xa)
            active, xa = active[keep], xa[keep]

    status[status == STATUS_ACTIVE] = STATUS_TIMEOUT
    return BatchFlowResult(
        starts=starts,
        ends=x,
        status=status,
        conv_idx=conv_idx,
        steps=steps,
        final_grad_norm=gnorm,
        max_step_increase=max_inc,
    )


def integrate_flow(
    field,
    start: Sequence[float],
    dt: float,
    t_max: float,
    box: BoxSpec,
    targets,
    lyap=None,
    **cfg_overrides,
) -> FlowTrace:
    """Classical RK4 trace of a single trajectory."""
    cfg = FlowConfig(dt=dt, t_max=t_max, **cfg_overrides)
    res = integrate_batch(field, np.asarray([start], dtype=float), box, targets, cfg, lyap)
    return res.traces()[0]


def basin_sample(
    field,
    targets,
    box: BoxSpec,
    num_seeds: int,
    seed: int,
    cfg: Optional[FlowConfig] = None,
    lyap=None,
) -> BatchFlowResult:
    """Integrate num_seeds reproducible uniform seeds; fraction_converged on
    the result is the fraction classified converged to a target."""
    rng = np.random.default_rng(seed)
    starts = box.sample(num_seeds, rng)
    return integrate_batch(field, starts, box, targets, cfg, lyap)


# ------------------------------------------------------------ certification


@dataclass
class PointCert:
    point: Tuple
    residues: Tuple
    gradient_zero: bool
    minors: List
    passed: bool

    def to_obj(self) -> dict:
        from ._rat import rat_str

        return {
            "point": [rat_str(c) for c in self.point],
            "residues": [rat_str(r) for r in self.residues],
            "gradient_zero": self.gradient_zero,
            "minors": [rat_str(m) for m in self.minors],
            "passed": self.passed,
        }


@dataclass
class SpuriousSearch:
    seeds_used: int
    converged_points: List[List[float]]
    all_within_tol: bool
    tol: float
    abandoned: int = 0

    def to_obj(self) -> dict:
        return {
            "seeds_used": self.seeds_used,
            "converged_points": [list(p) for p in self.converged_points],
            "all_within_tol_of_X": self.all_within_tol,
            "tol": self.tol,
            "abandoned": self.abandoned,
        }


@dataclass
class CertReport:
    per_point: List[PointCert]
    spurious: SpuriousSearch
    box: BoxSpec
    overall_pass: bool

    def to_obj(self) -> dict:
        return {
            "per_point": [p.to_obj() for p in self.per_point],
            "spurious_search": self.spurious.to_obj(),
            "box": self.box.to_obj(),
            "overall_pass": self.overall_pass,
        }


def certify(
    points,
    grad_map: PolyMap,
    hessian_at: Callable,
    box: Optional[BoxSpec] = None,
    seeds_per_axis: Optional[int] = None,
    newton_cfg: Optional[NewtonConfig] = None,
    spurious_tol: float = 1e-6,
) -> CertReport:
    """Exact certification at the claimed critical points plus a numeric
    search for critical points anywhere else in the box.  Failures become
    report entries; nothing raises."""
    per = []
    for pt in points:
        pt = tuple(rat(c) for c in pt)
        residues = grad_map.eval_rational(pt)
        zero = all(r == 0 for r in residues)
        minors = exactmat.leading_principal_minors(hessian_at(pt))
        per.append(
            PointCert(
                point=pt,
                residues=residues,
                gradient_zero=zero,
                minors=minors,
                passed=zero and all(m > 0 for m in minors),
            )
        )
    if box is None:
        box = default_box(points)
    if seeds_per_axis is None:
        # roughly 2000 seeds total regardless of dimension
        seeds_per_axis = max(2, int(round(2000 ** (1.0 / box.dim))))
    search = newton_search(grad_map, box, seeds_per_axis, newton_cfg)
    ref = np.asarray([[float(c) for c in p] for p in points], dtype=float)
    all_within = all(
        np.linalg.norm(ref - np.asarray(p), axis=1).min() <= spurious_tol
        for p in search.points
    )
    spurious = SpuriousSearch(
        seeds_used=search.seeds_used,
        converged_points=[[float(c) for c in p] for p in search.points],
        all_within_tol=all_within,
        tol=spurious_tol,
        abandoned=search.abandoned,
    )
    return CertReport(
        per_point=per,
        spurious=spurious,
        box=box,
        overall_pass=all(p.passed for p in per) and all_within,
    )
