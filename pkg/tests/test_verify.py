import math

import numpy as np
import pytest

from morseforge._rat import rat
from morseforge.coord_change import PointSet
from morseforge.morse_scalar import AlphaSpec, build_pair, grad_f, hessian_f
from morseforge.poly import MultiPoly, PolyMap
from morseforge.synth import build_saddle_field, synthesize
from morseforge.verify import (
    BoxSpec,
    FlowConfig,
    NewtonConfig,
    basin_sample,
    certify,
    default_box,
    eigen_signs,
    fd_gradient_check,
    fd_gradient_check_batch,
    integrate_flow,
    newton_search,
)


def x(dim=1, i=0):
    return MultiPoly.variable(dim, i)


class TestBox:
    def test_from_points_inflates_and_pads(self):
        box = BoxSpec.from_points([[0.0, 0.0], [1.0, 0.0]])
        assert box.lower == (-1.5, -1.0)
        assert box.upper == (2.5, 1.0)

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            BoxSpec(lower=(0.0,), upper=(0.0,))

    def test_grid_count(self):
        box = BoxSpec(lower=(0.0, 0.0), upper=(1.0, 1.0))
        assert box.grid(5).shape == (25, 2)

    def test_samples_stay_inside(self):
        box = BoxSpec(lower=(-2.0, 1.0), upper=(-1.0, 3.0))
        pts = box.sample(100, np.random.default_rng(0))
        assert ((pts >= box.lower) & (pts <= box.upper)).all()


class TestFiniteDifferences:
    def test_quadratic_exact_to_roundoff(self):
        assert fd_gradient_check(x() ** 2, [1.0], 1e-6) <= 1e-9

    def test_requires_positive_h(self):
        with pytest.raises(ValueError):
            fd_gradient_check(x(), [0.0], 0.0)

    def test_batch_matches_single(self):
        p = x(2, 0) ** 3 + x(2, 0) * x(2, 1)
        pts = np.array([[0.3, -0.7], [1.1, 0.4]])
        batch = fd_gradient_check_batch(p, pts, 1e-6)
        singles = [fd_gradient_check(p, pt, 1e-6) for pt in pts]
        assert np.allclose(batch, singles, rtol=1e-6, atol=1e-12)


class TestNewton:
    def test_quadratic_bowl(self):
        p = x(2, 0) ** 2 * rat(1, 2) + x(2, 1) ** 2 * rat(1, 2)
        grad = PolyMap([p.partial(0), p.partial(1)])
        box = BoxSpec(lower=(-1.0, -1.0), upper=(1.0, 1.0))
        res = newton_search(grad, box, seeds_per_axis=5)
        assert len(res.points) == 1
        assert np.linalg.norm(res.points[0]) <= 1e-12

    def test_finds_all_minima_from_perturbed_seeds(self):
        res = synthesize(PointSet(2, [["-1/2", 0], ["1/2", "1/4"]]))
        grad = PolyMap([res.p_poly.partial(0), res.p_poly.partial(1)])
        box = default_box(res.input.points)
        found = newton_search(grad, box, seeds_per_axis=10,
                              cfg=NewtonConfig(max_iter=20))
        targets = np.array([[-0.5, 0.0], [0.5, 0.25]])
        for t in targets:
            assert min(np.linalg.norm(p - t) for p in found.points) <= 1e-6

    def test_rejects_tiny_grid(self):
        grad = PolyMap([x(2, 0), x(2, 1)])
        box = BoxSpec(lower=(-1.0, -1.0), upper=(1.0, 1.0))
        with pytest.raises(ValueError):
            newton_search(grad, box, seeds_per_axis=1)


class TestEigenSigns:
    def test_positive_definite(self):
        assert eigen_signs([[3, -2], [-2, 2]], 1e-9) == (2, 0, 0)

    def test_indefinite(self):
        assert eigen_signs([[1, 0], [0, -1]], 1e-9) == (1, 1, 0)

    def test_negative_identity(self):
        assert eigen_signs([[-1, 0, 0], [0, -1, 0], [0, 0, -1]], 1e-9) == (0, 3, 0)

    def test_near_zero_is_ambiguous(self):
        assert eigen_signs([[1e-12]], 1e-9) == (0, 0, 1)


class TestFlow:
    def test_linear_decay_rate(self):
        # dx/dt = -x from (1, 1): |x(1)| = e^-1 within 1 percent
        fld = PolyMap([-x(2, 0), -x(2, 1)])
        box = BoxSpec(lower=(-2.0, -2.0), upper=(2.0, 2.0))
        trace = integrate_flow(fld, [1.0, 1.0], dt=1e-3, t_max=1.0,
                               box=box, targets=[])
        assert trace.classified == "max_time_reached"
        expected = math.exp(-1.0)
        for c in trace.end:
            assert abs(c - expected) <= 0.01 * expected

    def test_convergence_to_target(self):
        fld = PolyMap([-x(2, 0), -x(2, 1)])
        box = BoxSpec(lower=(-2.0, -2.0), upper=(2.0, 2.0))
        trace = integrate_flow(fld, [1.0, -1.0], dt=1e-2, t_max=50.0,
                               box=box, targets=[(0.0, 0.0)])
        assert trace.classified == "converged_to"
        assert trace.converged_index == 0

    def test_saddle_field_generic_start(self):
        sf = build_saddle_field(PointSet(2, [[-1, 0], [1, 0]]))
        box = BoxSpec(lower=(-2.0, -1.0), upper=(2.0, 1.0))
        targets = [(-1.0, 0.0), (1.0, 0.0)]
        trace = integrate_flow(sf.field, [0.1, 0.5], dt=1e-2, t_max=100.0,
                               box=box, targets=targets)
        assert trace.classified == "converged_to"
        assert trace.converged_index == 1

    def test_saddle_field_separatrix_start(self):
        # the stable manifold of the saddle at 0 is the x1 = 0 line
        sf = build_saddle_field(PointSet(2, [[-1, 0], [1, 0]]))
        box = BoxSpec(lower=(-2.0, -1.0), upper=(2.0, 1.0))
        trace = integrate_flow(sf.field, [0.0, 0.5], dt=1e-2, t_max=100.0,
                               box=box, targets=[(-1.0, 0.0), (1.0, 0.0)])
        assert trace.classified == "max_time_reached"
        assert abs(trace.end[0]) <= 1e-12
        assert abs(trace.end[1]) <= 1e-3

    def test_basin_sample_full_convergence(self):
        sf = build_saddle_field(PointSet(2, [[-1, 0], [1, 0]]))
        box = BoxSpec(lower=(-2.0, -1.0), upper=(2.0, 1.0))
        res = basin_sample(sf.field, [(-1.0, 0.0), (1.0, 0.0)], box,
                           num_seeds=200, seed=3,
                           cfg=FlowConfig(dt=1e-2, t_max=200.0))
        assert res.num_diverged == 0
        assert res.fraction_converged >= 0.99

    def test_basin_sample_is_reproducible(self):
        fld = PolyMap([-x(2, 0), -x(2, 1)])
        box = BoxSpec(lower=(-1.0, -1.0), upper=(1.0, 1.0))
        a = basin_sample(fld, [(0.0, 0.0)], box, num_seeds=20, seed=7,
                         cfg=FlowConfig(dt=1e-2, t_max=30.0))
        b = basin_sample(fld, [(0.0, 0.0)], box, num_seeds=20, seed=7,
                         cfg=FlowConfig(dt=1e-2, t_max=30.0))
        assert np.array_equal(a.starts, b.starts)
        assert np.array_equal(a.status, b.status)

    def test_lyapunov_tracking(self):
        res = synthesize(PointSet(2, [[0, 0]]))
        box = default_box(res.input.points)
        out = basin_sample(res.grad_field, res.input.points, box,
                           num_seeds=50, seed=1,
                           cfg=FlowConfig(dt=1e-2, t_max=100.0),
                           lyap=res.p_poly)
        assert float(out.max_step_increase.max()) <= 1e-9


class TestCertify:
    def test_plane_pair_passes(self):
        pair = build_pair(AlphaSpec(["-1/2", "1/2"]))
        pts = [(r, rat(0)) for r in pair.roots]
        report = certify(
            points=pts,
            grad_map=grad_f(pair),
            hessian_at=lambda p: hessian_f(pair, p),
            seeds_per_axis=30,
        )
        assert report.overall_pass
        assert len(report.per_point) == 2
        for cert in report.per_point:
            assert cert.gradient_zero
            assert all(m > 0 for m in cert.minors)
        assert report.spurious.all_within_tol

    def test_report_serializes(self):
        import json

        pair = build_pair(AlphaSpec([0]))
        report = certify(
            points=[(rat(0), rat(0))],
            grad_map=grad_f(pair),
            hessian_at=lambda p: hessian_f(pair, p),
            seeds_per_axis=20,
        )
        json.dumps(report.to_obj())
