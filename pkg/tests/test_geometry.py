import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fatcast.errors import DegenerateCut, DegenerateInput, InvalidPolyhedron
from fatcast.geometry import (ConvexPolyhedron, Plane, build_hull, clip, diameter, edge_lengths, face_area,
                              plane_basis, validate_general_position, volume)
from fatcast.genlab import perturb_general_position, sphere_points

import oracles


def euler(P):
    return len(P.vertices) - len(P.edges) + len(P.facets)


def facet_with_normal(P, n):
    return int(np.argmax(P.normals @ np.asarray(n, dtype=float)))


# -- construction --------------------------------------------------------

def test_unit_tetra_counts(unit_tetra):
    assert len(unit_tetra.facets) == 4
    assert len(unit_tetra.edges) == 6
    assert all(len(f) == 3 for f in unit_tetra.facets)


def test_cube_merges_to_quads(cube):
    assert len(cube.facets) == 6
    assert len(cube.edges) == 12
    assert sorted(len(f) for f in cube.facets) == [4] * 6
    assert euler(cube) == 2


def test_sphere_hull_is_simplicial():
    rng = np.random.default_rng(3)
    P = build_hull(sphere_points(100, rng))
    assert all(len(f) == 3 for f in P.facets)
    # recount edges from the loops instead of trusting P.edges
    undirected = {tuple(sorted((f[i], f[(i + 1) % 3]))) for f in P.facets for i in range(3)}
    assert len(undirected) == 3 * len(P.facets) // 2
    assert len(P.facets) == 2 * len(P.vertices) - 4


def test_all_input_points_satisfy_facets():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(200, 3))
    P = build_hull(pts)
    assert (pts @ P.normals.T - P.offsets).max() <= 1e-9 * P.scale


def test_facets_are_counterclockwise_from_outside(cube):
    for loop, n in zip(cube.facets, cube.normals):
        a, b, c = cube.vertices[list(loop[:3])]
        assert np.cross(b - a, c - b) @ n > 0


@pytest.mark.parametrize("pts", [
    [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (2, 3, 0)],
    [(0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 3, 3)],
    [(0, 0, 0), (1, 0, 0), (0, 1, 0)],
])
def test_degenerate_hull_rejected(pts):
    with pytest.raises(DegenerateInput):
        build_hull(np.array(pts, dtype=float))


def test_from_facets_rejects_nonconvex():
    # a cube loop set with one vertex pushed inward
    verts = np.array(list(itertools.product((-1.0, 1.0), repeat=3)))
    P = build_hull(verts)
    bad = P.vertices.copy()
    bad[0] *= 0.5
    with pytest.raises(InvalidPolyhedron):
        ConvexPolyhedron.from_facets(bad, P.facets)


# -- measurement ---------------------------------------------------------

def test_cube_measures(cube):
    assert volume(cube) == pytest.approx(8.0, rel=1e-12)
    assert all(face_area(cube, f) == pytest.approx(4.0) for f in range(6))
    assert diameter(cube) == pytest.approx(2 * math.sqrt(3))
    assert np.allclose(edge_lengths(cube), 2.0)


def test_unit_tetra_measures(unit_tetra):
    assert volume(unit_tetra) == pytest.approx(1 / 6, rel=1e-12)
    base = facet_with_normal(unit_tetra, (0, 0, -1))
    assert face_area(unit_tetra, base) == pytest.approx(0.5)
    slanted = facet_with_normal(unit_tetra, (1, 1, 1))
    assert face_area(unit_tetra, slanted) == pytest.approx(math.sqrt(3) / 2)


def test_diameter_matches_pairwise_oracle():
    rng = np.random.default_rng(11)
    P = build_hull(rng.normal(size=(80, 3)))
    v = P.vertices
    brute = max(np.linalg.norm(a - b) for a, b in itertools.combinations(v, 2))
    assert diameter(P) == pytest.approx(brute, rel=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_volume_matches_monte_carlo(seed):
    rng = np.random.default_rng(100 + seed)
    pts = sphere_points(500, rng) if seed == 0 else rng.normal(size=(40, 3))
    P = build_hull(pts)
    est, se = oracles.mc_volume(pts, seed=seed)
    assert abs(P.volume - est) < 3 * se


# -- invariance under rigid motion and scaling ---------------------------

_cloud = st.integers(min_value=0, max_value=10_000)


@settings(max_examples=25, deadline=None)
@given(seed=_cloud, scale=st.floats(min_value=0.05, max_value=20.0))
def test_rigid_motion_and_scale(seed, scale):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(int(rng.integers(6, 40)), 3))
    P = build_hull(pts)
    Rm = oracles.random_rotation(rng)
    shift = rng.normal(size=3) * 10
    Q = build_hull(pts @ Rm.T + shift)
    assert Q.volume == pytest.approx(P.volume, rel=1e-9)
    assert sorted(Q.facet_areas) == pytest.approx(sorted(P.facet_areas), rel=1e-9)
    assert diameter(Q) == pytest.approx(diameter(P), rel=1e-9)
    S = build_hull(pts * scale)
    assert S.volume == pytest.approx(P.volume * scale ** 3, rel=1e-9)
    assert sorted(S.facet_areas) == pytest.approx(sorted(P.facet_areas * scale ** 2), rel=1e-9)
    assert diameter(S) == pytest.approx(diameter(P) * scale, rel=1e-9)
    assert euler(P) == euler(Q) == euler(S) == 2


def test_transformed_matches_rebuild(cube):
    rng = np.random.default_rng(2)
    Rm = oracles.random_rotation(rng)
    Q = cube.transformed(Rm, np.array([1.0, 2.0, 3.0]))
    assert Q.volume == pytest.approx(8.0)
    assert np.allclose(np.sort(Q.offsets - Q.normals @ np.array([1.0, 2.0, 3.0])), 1.0)


def test_plane_basis_is_right_handed():
    rng = np.random.default_rng(0)
    for n in sphere_points(20, rng):
        u, w = plane_basis(n)
        assert np.allclose(np.cross(u, w), n)
        assert abs(u @ n) < 1e-12 and abs(w @ n) < 1e-12


def test_plane_requires_unit_normal():
    with pytest.raises(ValueError):
        Plane(np.array([0.0, 0.0, 2.0]), 0.0)


# -- clipping ------------------------------------------------------------

def test_cube_cut_at_equator(cube):
    cut = clip(cube, Plane(np.array([0.0, 0.0, 1.0]), 0.0))
    assert cut.p1.volume == pytest.approx(4.0)
    assert cut.p2.volume == pytest.approx(4.0)
    assert cut.c_area == pytest.approx(4.0)
    assert len(cut.c_polygon) == 4
    assert np.allclose(np.abs(cut.c_polygon[:, :2]), 1.0)
    assert np.allclose(cut.p1.normals[cut.base1], -cut.p2.normals[cut.base2])
    for half in (cut.p1, cut.p2):
        assert len(half.facets) == 6 and euler(half) == 2


def test_cut_through_tetra_edge_contains_it(unit_tetra):
    # plane through (0,0,0), (1,0,0) and the midpoint of (0,1,0)-(0,0,1)
    a, b, m = np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 0.5, 0.5])
    n = np.cross(b - a, m - a)
    plane = Plane.through(n / np.linalg.norm(n), a)
    cut = clip(unit_tetra, plane)
    C = cut.c_polygon
    has = lambda p: np.min(np.linalg.norm(C - p, axis=1)) < 1e-12
    assert has(a) and has(b) and has(m)
    assert cut.p1.volume == pytest.approx(cut.p2.volume)
    assert cut.p1.volume + cut.p2.volume == pytest.approx(1 / 6)


def test_larger_half_is_p1(cube):
    cut = clip(cube, Plane(np.array([0.0, 0.0, 1.0]), 0.5))
    assert cut.p1.volume == pytest.approx(6.0)
    assert cut.p2.volume == pytest.approx(2.0)
    assert cut.p1_side == -1


def test_tie_break_uses_smallest_vertex(cube):
    # (-1,-1,-1) is lexicographically smallest and lies below z = 0
    cut = clip(cube, Plane(np.array([0.0, 0.0, 1.0]), 0.0))
    assert cut.p1.vertices.min(axis=0)[2] == pytest.approx(-1.0)
    assert cut.p1_side == -1


@pytest.mark.parametrize("offset", [5.0, -5.0, 1.0, -1.0])
def test_plane_missing_interior_is_degenerate(cube, offset):
    with pytest.raises(DegenerateCut):
        clip(cube, Plane(np.array([0.0, 0.0, 1.0]), offset))


def test_cut_additivity_random():
    rng = np.random.default_rng(8)
    for _ in range(30):
        P = build_hull(rng.normal(size=(int(rng.integers(5, 60)), 3)))
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        point = rng.dirichlet(np.ones(len(P.vertices))) @ P.vertices
        cut = clip(P, Plane(n, float(n @ point)))
        assert cut.p1.volume + cut.p2.volume == pytest.approx(P.volume, rel=1e-9)
        assert cut.p1.volume >= cut.p2.volume
        assert euler(cut.p1) == euler(cut.p2) == 2


# -- general position ----------------------------------------------------

def test_cube_not_general_position(cube):
    rep = validate_general_position(cube)
    assert not rep.passed
    assert rep.coplanarity_margin <= rep.tol


def test_tetra_general_position(unit_tetra):
    rep = validate_general_position(unit_tetra)
    assert rep.passed
    n = unit_tetra.normals
    dets = [abs(np.linalg.det(n[list(t)])) for t in itertools.combinations(range(4), 3)]
    assert rep.parallel_margin == pytest.approx(min(dets), rel=1e-9)
    assert rep.exhaustive_margin is not None and rep.exhaustive_margin > rep.tol


def test_three_facets_parallel_to_line_detected():
    # triangular prism: the three side normals are all perpendicular to z
    tri = [(0, 0), (2, 0), (0.5, 1.5)]
    pts = [(x, y, z) for x, y in tri for z in (0.0, 1.0)]
    rep = validate_general_position(build_hull(np.array(pts, dtype=float)))
    assert rep.parallel_margin < 1e-9
    assert not rep.passed


def test_perturbed_cube_general_position(cube):
    Q = perturb_general_position(cube, 1e-3, seed=0)
    rep = validate_general_position(Q)
    assert rep.passed
    assert len(Q.facets) >= 12
