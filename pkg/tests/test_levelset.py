import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algdomain import _kernels, levelset, poly2d
from algdomain.errors import LevelSetError
from algdomain.geometry import ShapeSpec
from algdomain.levelset import (bifurcation_points, check_loop, hamiltonian, segmentation_points,
                                trace)
from algdomain.poly2d import Poly2
from oracles import circle_circle_crossings

UNIT = poly2d.circle((0.0, 0.0), 1.0)


def test_hamiltonian_on_unit_circle():
    assert np.allclose(hamiltonian(UNIT, (1.0, 0.0)), (0.0, 2.0))


@given(st.tuples(st.floats(-3, 3), st.floats(-3, 3)))
def test_hamiltonian_orthogonal_and_isometric(x):
    p = ShapeSpec("two-overlapping-circles").polynomial()
    h, g = hamiltonian(p, x), poly2d.gradient(p, x)
    assert abs(h @ g) <= 1e-12 * (1 + g @ g)
    assert np.hypot(*h) == pytest.approx(np.hypot(*g), rel=1e-14)


def test_quarter_circle_both_directions():
    r = trace(UNIT, (1.0, 0.0), [(0.0, 1.0)], 1)
    assert r.terminated_by == "target" and r.hit_target == 0
    assert r.arclength == pytest.approx(np.pi / 2, abs=1e-4)
    assert np.allclose(r.polyline[-1], (0.0, 1.0), atol=1e-8)
    r = trace(UNIT, (1.0, 0.0), [(0.0, -1.0)], -1)
    assert r.terminated_by == "target" and r.polyline[-2][1] < 0


def test_full_period_closes():
    r = trace(UNIT, (1.0, 0.0), None, 1, max_len=2 * np.pi)
    assert r.terminated_by == "length"
    assert np.hypot(*(r.polyline[-1] - (1.0, 0.0))) < 1e-5


@pytest.mark.parametrize("kind", ["ellipse", "two-overlapping-circles", "disk-with-missing-sector"])
def test_traced_points_on_level_set(kind):
    p = ShapeSpec(kind).polynomial()
    r = trace(p, (0.0, 0.0), None, 1, max_len=2.0)
    assert np.max(np.abs(p(r.polyline))) < 1e-8


def test_start_point_refined_or_rejected():
    r = trace(UNIT, (1.0 + 1e-4, 0.0), [(0.0, 1.0)])
    assert abs(UNIT(r.polyline[0])) < 1e-10
    # the gradient vanishes at the center, so Newton cannot move
    with pytest.raises(LevelSetError):
        trace(UNIT, (0.0, 0.0))
    with pytest.raises(ValueError):
        trace(UNIT, (1.0, 0.0), direction=0)


def test_leaving_the_bound():
    line = poly2d.line((0.0, 0.0), (1.0, 0.0))
    r = trace(line, (0.0, 0.0), None, 1, bound=2.0)
    assert r.terminated_by == "bound"


def test_stagnation_at_a_crossing():
    cross = Poly2.from_terms({(1, 1): 1.0})  # xy: two lines through the origin
    r = trace(cross, (0.5, 0.0), None, 1)
    assert r.stagnated and np.hypot(*r.polyline[-1]) < 0.01


@pytest.mark.parametrize("kind", ["circle-through-origin", "ellipse"])
def test_check_loop_closes_for_smooth_curves(kind):
    p = ShapeSpec(kind).polynomial()
    loop = check_loop(p)
    assert loop is not None and np.max(np.abs(p(loop))) < 1e-8
    assert np.hypot(*(loop[-1] - loop[0])) < 2e-3


def test_check_loop_empty_on_overlapping_circles(overlap_poly):
    assert check_loop(overlap_poly) is None


def test_check_loop_needs_origin_on_level_set():
    with pytest.raises(LevelSetError):
        check_loop(UNIT)


def test_overlap_bifurcation_points_are_circle_crossings(overlap_graph):
    bifs = overlap_graph[0]
    # unit circles centred at (1, 0) and (1.6, 0); the origin is already on the boundary
    want = circle_circle_crossings(1.0, 1.6, 1.0, 1.0)
    got = sorted((b.x, b.y) for b in bifs)
    assert len(got) == 2
    assert np.allclose(got, sorted(want), atol=1e-6)


def test_smooth_ellipse_has_no_bifurcation():
    assert bifurcation_points(ShapeSpec("ellipse").polynomial()) == []


def test_lemniscate_has_one_crossing():
    # Bernoulli lemniscate (x^2 + y^2)^2 - 2 (x^2 - y^2), shifted so the crossing sits at (1, 0.5)
    x = Poly2.from_terms({(1, 0): 1.0, (0, 0): -1.0})
    y = Poly2.from_terms({(0, 1): 1.0, (0, 0): -0.5})
    r2 = x * x + y * y
    p = r2 * r2 + (x * x).scale(-2.0) + (y * y).scale(2.0)
    bifs = bifurcation_points(p)
    assert len(bifs) == 1 and np.allclose(bifs[0].position, (1.0, 0.5), atol=1e-6)


@pytest.mark.parametrize("c", [0.1, 10.0])
def test_bifurcation_points_scale_invariant(overlap_poly, c):
    a = bifurcation_points(overlap_poly)
    b = bifurcation_points(overlap_poly.scale(c))
    assert np.allclose([q.position for q in a], [q.position for q in b], atol=1e-8)


def test_escalation_finds_split_crossings(overlap_poly):
    # lift the level set slightly so the crossings stop being exact zeros
    c = np.array(overlap_poly.coeffs)
    c[0] = 2e-5
    p = Poly2(overlap_poly.degree, c)
    assert bifurcation_points(p) == []
    assert len(bifurcation_points(p, escalate=True)) == 2


def test_four_segmentation_points_per_crossing(overlap_graph):
    bifs, segs, _ = overlap_graph
    for i, b in enumerate(bifs):
        own = [s for s in segs if s.parent == i]
        assert [s.local for s in own] == [0, 1, 2, 3]
        for s in own:
            assert np.hypot(s.x - b.x, s.y - b.y) == pytest.approx(s.radius, abs=1e-12)


def test_segmentation_points_on_level_set(overlap_poly, overlap_graph):
    segs = overlap_graph[1]
    assert max(abs(overlap_poly(s.position)) for s in segs) < 1e-8


def test_segmentation_symmetric_about_crossing():
    p = Poly2.from_terms({(1, 1): 1.0, (1, 0): -1.0, (0, 1): -1.0, (0, 0): 1.0})  # (x-1)(y-1)
    bifs = bifurcation_points(p)
    segs = segmentation_points(p, bifs)
    rel = np.array([s.position - bifs[0].position for s in segs])
    for v in rel:
        assert np.min(np.hypot(*(rel + v).T)) < 1e-6


def test_segmentation_radius_grows_until_four_zeros():
    p = Poly2.from_terms({(1, 1): 1.0, (1, 0): -1.0, (0, 1): -1.0, (0, 0): 1.0})
    segs = segmentation_points(p, bifurcation_points(p), r_ini=0.05)
    assert all(s.radius == 0.05 for s in segs)
    # far from the unit circle no radius up to 1000 * r_ini reaches the level set
    fake = [levelset.BifurcationPoint(80.0, 80.0)]
    with pytest.raises(LevelSetError):
        segmentation_points(UNIT, fake, r_ini=0.05, r_step=0.5)


@given(st.floats(0.01, 1.5))
def test_sign_change_count_is_even(r):
    p = ShapeSpec("two-overlapping-circles").polynomial()
    ex, ey, c, deg = _kernels.poly_arrays(p)
    th = _kernels.backend.circle_zeros(ex, ey, c, deg, 1.0, 0.3, r, 1000, 1e-12, 200)
    assert len(th) % 2 == 0


def test_export_json_and_svg(overlap_graph):
    bifs, segs, graph = overlap_graph
    import json
    d = json.loads(levelset.to_json(bifs, segs))
    assert len(d["bifurcation_points"]) == 2 and len(d["segmentation_points"]) == 8
    svg = levelset.to_svg([a.polyline for a in graph.arcs if a.polyline is not None], bifs, segs)
    assert svg.count("<circle") == 10
