"""Completion machinery: Miquel cells, fills, hypercubes, seeds."""

import numpy as np
import pytest

from moebiusnets import (
    CompletionError,
    ConformalPoint,
    GeometryError,
    InitialData,
    circular_quad_completion,
    complete_cell_3d,
    cross_ratio,
    fill_lattice,
    fill_pair_lattice,
    hypercube_fill,
    lift,
    nets_from_frames,
    point_on_circle,
    project,
    projective_distance,
    random_spin_versor,
    seed_grid,
    seed_random_circular,
    sphere_through,
    verify_net,
)
from moebiusnets.cauchy import _concircular_residual


def unit_cube_points(alg):
    corners = {
        "p": [0, 0, 0], "p1": [1, 0, 0], "p2": [0, 1, 0], "p3": [0, 0, 1],
        "p12": [1, 1, 0], "p13": [1, 0, 1], "p23": [0, 1, 1],
    }
    return {k: lift(alg, v) for k, v in corners.items()}


class TestMiquelCell:
    def test_unit_cube(self, alg3):
        c = unit_cube_points(alg3)
        v, residual = complete_cell_3d(c["p"], c["p1"], c["p2"], c["p3"], c["p12"], c["p13"], c["p23"])
        assert np.allclose(project(v), [1, 1, 1], atol=1e-10)
        assert residual < 1e-10

    def test_moebius_equivariance(self, alg3):
        rng = np.random.default_rng(0)
        c = unit_cube_points(alg3)
        target = lift(alg3, [1, 1, 1])
        for _ in range(50):
            phi = random_spin_versor(alg3, rng, 4)
            moved = {k: ConformalPoint(phi.apply(p.mv).grade(1), validate=False) for k, p in c.items()}
            v, _ = complete_cell_3d(
                moved["p"], moved["p1"], moved["p2"], moved["p3"],
                moved["p12"], moved["p13"], moved["p23"],
            )
            assert projective_distance(v.mv, phi.apply(target.mv)) < 1e-8

    def test_deleted_vertex_recovery(self, pair_net_3d):
        pts = pair_net_3d.f
        v, _ = complete_cell_3d(
            pts[(0, 0, 0)], pts[(1, 0, 0)], pts[(0, 1, 0)], pts[(0, 0, 1)],
            pts[(1, 1, 0)], pts[(1, 0, 1)], pts[(0, 1, 1)],
        )
        assert projective_distance(v.mv, pts[(1, 1, 1)].mv) < 1e-8

    def test_non_concircular_face_rejected(self, alg3):
        c = unit_cube_points(alg3)
        c["p12"] = lift(alg3, [1, 1, 0.2])  # break the bottom face
        with pytest.raises(CompletionError):
            complete_cell_3d(c["p"], c["p1"], c["p2"], c["p3"], c["p12"], c["p13"], c["p23"])

    def test_flat_cell_ambiguous(self, alg3):
        # all seven points in one plane: the configuration degenerates
        flat = {
            "p": [0, 0, 0], "p1": [1, 0, 0], "p2": [0, 1, 0], "p3": [-1, 1, 0],
            "p12": [1, 1, 0], "p13": [0.4, 0.9165151389911680, 0], "p23": [-1.2, 0.4, 0],
        }
        pts = {k: lift(alg3, v) for k, v in flat.items()}
        with pytest.raises(CompletionError):
            complete_cell_3d(pts["p"], pts["p1"], pts["p2"], pts["p3"], pts["p12"], pts["p13"], pts["p23"])


class TestQuadCompletion:
    def test_parallelogram_projection_on_square(self, alg3):
        a, b, c = lift(alg3, [1, 0, 0]), lift(alg3, [0, 1, 0]), lift(alg3, [0, 0, 0])
        d = circular_quad_completion(a, b, c, 0.0)
        assert np.allclose(project(d), [1, 1, 0], atol=1e-12)

    def test_offset_stays_on_circle(self, alg3):
        rng = np.random.default_rng(1)
        pts = [lift(alg3, rng.normal(size=3)) for _ in range(3)]
        circle = sphere_through(pts)
        for offset in (-0.4, 0.0, 0.3):
            d = circular_quad_completion(pts[0], pts[1], pts[2], offset)
            assert circle.incidence_residual(d.mv) < 1e-10

    def test_point_on_circle_quads(self, alg3):
        a, b, c = lift(alg3, [1, 0, 0.2]), lift(alg3, [0, 1, -0.1]), lift(alg3, [0, 0, 0])
        for u in (0.15, 0.5, 0.85):
            d = point_on_circle(a, b, c, u)
            quad = [c, a, d, b]
            assert _concircular_residual(quad) < 1e-12
            # the arc avoids c, so the quad closes in cyclic order
            dv = cross_ratio(c.mv, a.mv, d.mv, b.mv)
            assert dv.real < 0  # cyclic order gives a negative real cross ratio


class TestFillLattice:
    def test_two_dimensional_returns_input(self, alg3):
        init = seed_random_circular(2, 3, (4, 4), 7)
        net, report = fill_lattice(init)
        for t, p in init.points.items():
            assert net.f[t].mv == p.mv
        assert report.max_cell_residual() == 0.0

    def test_three_dimensional_fill(self):
        init = seed_random_circular(3, 3, (5, 5, 5), 42)
        net, report = fill_lattice(init)
        assert report.max_cell_residual() < 1e-8
        vreport = verify_net(net, fill_report=report)
        assert vreport.passed, vreport.first_failure()

    def test_missing_subnet_vertex_rejected(self, alg3):
        init = seed_random_circular(3, 3, (3, 3, 3), 1)
        del init.points[(0, 2, 2)]
        with pytest.raises(GeometryError):
            fill_lattice(init)

    def test_corrupted_face_rejected(self, alg3):
        init = seed_random_circular(3, 3, (3, 3, 3), 1)
        init.points[(2, 2, 0)] = lift(alg3, [2.1, 2.2, 0.3])
        with pytest.raises(GeometryError):
            fill_lattice(init)

    def test_determinism_bit_identical(self):
        a = seed_random_circular(3, 3, (4, 4, 4), 99)
        b = seed_random_circular(3, 3, (4, 4, 4), 99)
        assert all(np.array_equal(a.points[t].mv.coeffs, b.points[t].mv.coeffs) for t in a.points)
        na, _ = fill_lattice(a)
        nb, _ = fill_lattice(b)
        assert all(np.array_equal(na.f[t].mv.coeffs, nb.f[t].mv.coeffs) for t in na.f)


class TestFillPairLattice:
    def test_euclidean_mode_flagged(self):
        init = seed_random_circular(3, 3, (3, 3, 3), 3)
        net, report = fill_pair_lattice(init)
        assert net.euclidean
        assert net.frames is not None and net.edge_spheres is not None
        vreport = verify_net(net, fill_report=report)
        assert vreport.passed, vreport.first_failure()

    def test_pair_data_round_trip(self, pair_net_2d):
        # restrict a generic pair to its 2-dimensional Cauchy data and refill
        net = pair_net_2d
        lat = net.lattice
        init = InitialData(
            2, 3, lat.extents,
            points=dict(net.f),
            hat_points=dict(net.fhat),
            frame_origin=net.frames[(0, 0)],
        )
        rebuilt, report = fill_pair_lattice(init)
        for t in lat.vertices():
            assert projective_distance(rebuilt.f[t].mv, net.f[t].mv) < 1e-8
            assert projective_distance(rebuilt.fhat[t].mv, net.fhat[t].mv) < 1e-8
        assert not rebuilt.euclidean

    def test_inconsistent_hat_rejected(self, alg3, pair_net_2d):
        net = pair_net_2d
        hat = dict(net.fhat)
        hat[(1, 0)] = lift(alg3, [5.0, -3.0, 2.0])  # break one edge quadruple
        init = InitialData(2, 3, net.lattice.extents, points=dict(net.f), hat_points=hat)
        with pytest.raises(GeometryError):
            fill_pair_lattice(init)


class TestHypercube:
    def test_three_cube_from_faces_matches_miquel(self, alg3):
        rng = np.random.default_rng(2)
        phi = random_spin_versor(alg3, rng, 4)
        cube = unit_cube_points(alg3)
        keymap = {
            "p": (0, 0, 0), "p1": (1, 0, 0), "p2": (0, 1, 0), "p3": (0, 0, 1),
            "p12": (1, 1, 0), "p13": (1, 0, 1), "p23": (0, 1, 1),
        }
        data = {
            keymap[k]: ConformalPoint(phi.apply(p.mv).grade(1), validate=False)
            for k, p in cube.items()
        }
        net, report = hypercube_fill(3, 2, data)
        expect = phi.apply(lift(alg3, [1, 1, 1]).mv)
        assert projective_distance(net.f[(1, 1, 1)].mv, expect) < 1e-8

    def test_four_cube_consistency(self):
        init = seed_random_circular(4, 3, (2, 2, 2, 2), 3)
        net, report = hypercube_fill(4, 2, init.points)
        assert report.max_discrepancy() < 1e-8
        assert len(report.discrepancies) >= 1  # the top vertex is multiply determined

    def test_i_one_needs_parameters(self, alg3):
        pts = {(0, 0): lift(alg3, [0, 0, 0]), (1, 0): lift(alg3, [1, 0, 0]), (0, 1): lift(alg3, [0, 1, 0])}
        with pytest.raises(GeometryError):
            hypercube_fill(2, 1, pts)
        for u in (0.25, 0.5, 0.75):
            net, _ = hypercube_fill(2, 1, pts, face_parameters=u)
            quad = [net.f[(0, 0)], net.f[(1, 0)], net.f[(1, 1)], net.f[(0, 1)]]
            assert _concircular_residual(quad) < 1e-12

    def test_missing_cell_data_rejected(self, alg3):
        pts = {(0, 0): lift(alg3, [0, 0, 0]), (1, 0): lift(alg3, [1, 0, 0])}
        with pytest.raises(GeometryError):
            hypercube_fill(2, 1, pts, face_parameters=0.5)


class TestSeeds:
    def test_grid_seed_projects_to_grid(self):
        frames = seed_grid(3, 3, (1.0, 1.0, 1.0), (3, 3, 3))
        net = nets_from_frames(frames)
        for t in net.lattice.vertices():
            assert np.allclose(project(net.f[t]), np.array(t, float), atol=1e-12)

    def test_grid_seed_guards(self):
        with pytest.raises(ValueError):
            seed_grid(3, 3, (1.0, 0.0, 1.0), (2, 2, 2))
        with pytest.raises(ValueError):
            seed_grid(4, 3, (1.0,) * 4, (2, 2, 2, 2))

    def test_random_seed_faces_concircular(self):
        init = seed_random_circular(3, 3, (4, 4, 4), 0)
        assert init.validate() < 1e-12

    def test_random_pair_net_generic(self, pair_net_3d):
        assert not pair_net_3d.euclidean
        report = verify_net(pair_net_3d)
        assert report.passed, report.first_failure()
