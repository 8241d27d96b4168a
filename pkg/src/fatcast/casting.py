"""Castability of a convex polyhedron through one of its facets.

A pull direction ``d`` frees the polyhedron from its mold through facet F
when ``n_G . d <= 0`` for every other facet G.  Directions are parameterized
on the affine chart ``n_F . d = 1`` as ``d = n_F + x u + y w``, which turns
the problem into a two-variable feasibility question.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NotCastable
from .geometry import ConvexPolyhedron, plane_basis

INFEASIBLE = "infeasible"
WEAK = "weakly-feasible"
STRONG = "strongly-feasible"

DEFAULT_TOL = 1e-9
# half-width of the chart window; |x| = 1e6 is within 1e-6 rad of grazing the facet plane
CHART_BOX = 1e6


@dataclass(frozen=True, eq=False)
class DirectionRegion:
    """Feasible pull directions for one base facet.

    ``a``/``c`` hold the chart constraints ``a_i . x <= c_i``, one per facet
    in ``constraint_facets``.  Witnesses are 3-D directions on the chart
    (``n_F . d = 1``); recession rays are 3-D unit vectors in the facet plane.
    """

    facet: int
    normal: np.ndarray
    u: np.ndarray
    w: np.ndarray
    constraint_facets: tuple
    a: np.ndarray
    c: np.ndarray
    status: str
    witness: np.ndarray | None
    interior_witness: np.ndarray | None
    margin: float
    recession_rays: tuple
    polygon: np.ndarray | None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE

    @property
    def strongly_feasible(self) -> bool:
        return self.status == STRONG

    def lift(self, xy) -> np.ndarray:
        return self.normal + xy[0] * self.u + xy[1] * self.w

    def to_chart(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        d = d / (d @ self.normal)
        return np.array([d @ self.u, d @ self.w])


def _clip_polygon(poly: np.ndarray, a: np.ndarray, b: float) -> np.ndarray | None:
    val = poly @ a - b
    inside = val <= 0.0
    if inside.all():
        return poly
    if not inside.any():
        return None
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        if inside[i]:
            out.append(poly[i])
        if inside[i] != inside[j]:
            t = val[i] / (val[i] - val[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out)


def _polygon_centroid(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cr = x * ys - xs * y
    area = cr.sum() / 2.0
    if abs(area) < 1e-300 or len(poly) < 3:
        return poly.mean(axis=0)
    cx = ((x + xs) * cr).sum() / (6.0 * area)
    cy = ((y + ys) * cr).sum() / (6.0 * area)
    return np.array([cx, cy])


def recession_cone(a: np.ndarray, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Extreme rays of the 2-D cone ``{v : a_i . v <= 0}``.

    Returns two canonical orthogonal rays for the whole plane, an empty list
    when the cone is just the origin, and otherwise the two boundary rays
    (equal when the cone is a single ray).
    """
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    norms = np.linalg.norm(a, axis=1)
    a = a[norms > tol]
    if len(a) == 0:
        return [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    unit = a / np.linalg.norm(a, axis=1)[:, None]
    perp = np.vstack([np.column_stack([-unit[:, 1], unit[:, 0]]), np.column_stack([unit[:, 1], -unit[:, 0]])])
    ok = (perp @ unit.T <= tol).all(axis=1)
    cand = perp[ok]
    if len(cand) == 0:
        return []
    ang = np.sort(np.unique(np.round(np.arctan2(cand[:, 1], cand[:, 0]), 12)))
    if len(ang) == 1:
        r = np.array([np.cos(ang[0]), np.sin(ang[0])])
        return [r, r]
    gaps = np.diff(np.append(ang, ang[0] + 2 * np.pi))
    k = int(np.argmax(gaps))
    start, end = ang[(k + 1) % len(ang)], ang[k]
    return [np.array([np.cos(start), np.sin(start)]), np.array([np.cos(end), np.sin(end)])]


def cone_bisector(a: np.ndarray, rays: list[np.ndarray], tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """A deterministic direction inside the recession cone (angular bisector of its extreme rays)."""
    if not rays:
        return None
    s = rays[0] + rays[1]
    if np.linalg.norm(s) > 1e-9:
        return s / np.linalg.norm(s)
    # boundary rays are opposite: the cone is a half-plane or a line
    r = rays[0]
    for v in (np.array([-r[1], r[0]]), np.array([r[1], -r[0]])):
        if (np.asarray(a).reshape(-1, 2) @ v <= tol).all():
            return v
    return r


def _bfs_order(P: ConvexPolyhedron, F: int, facets) -> list[int]:
    wanted = set(facets)
    seen = {F}
    order = []
    queue = deque([F])
    while queue:
        f = queue.popleft()
        for g in P.facet_neighbors[f]:
            if g not in seen:
                seen.add(g)
                queue.append(g)
                if g in wanted:
                    order.append(g)
    order.extend(sorted(wanted - set(order)))
    return order


def direction_lp(P: ConvexPolyhedron, F: int, tol: float = DEFAULT_TOL, facets=None,
                 basis=None) -> DirectionRegion:
    """Solve the pull-direction program for base facet ``F``.

    ``facets`` restricts the constraints to a subset of facets (default: all
    facets but F); ``basis`` fixes the in-plane chart axes ``(u, w)``.
    Constraints are added one at a time, nearest facets (by adjacency) first,
    clipping a window of the chart; the region is declared empty as soon as
    the window is.
    """
    nF = P.normals[F]
    u, w = plane_basis(nF) if basis is None else (np.asarray(basis[0], float), np.asarray(basis[1], float))
    if facets is None:
        facets = [g for g in range(len(P.facets)) if g != F]
    cons = _bfs_order(P, F, [g for g in facets if g != F])
    N = P.normals[cons] if cons else np.zeros((0, 3))
    a = np.column_stack([N @ u, N @ w]) if cons else np.zeros((0, 2))
    c = -(N @ nF) if cons else np.zeros(0)

    poly = np.array([[-CHART_BOX, -CHART_BOX], [CHART_BOX, -CHART_BOX],
                     [CHART_BOX, CHART_BOX], [-CHART_BOX, CHART_BOX]])
    for i in range(len(cons)):
        poly = _clip_polygon(poly, a[i], c[i] + tol)
        if poly is None:
            break

    def make(status, witness=None, interior=None, margin=-np.inf, rays=(), polygon=None):
        return DirectionRegion(F, nF, u, w, tuple(cons), a, c, status, witness, interior,
                               margin, tuple(rays), polygon)

    if poly is None:
        return make(INFEASIBLE)

    x = _polygon_centroid(poly)
    d = nF + x[0] * u + x[1] * w
    margin = float((-(N @ d)).min() / np.linalg.norm(d)) if cons else 1.0
    rays2 = recession_cone(a, tol)
    rays = [r[0] * u + r[1] * w for r in rays2]
    if margin > tol:
        return make(STRONG, d, d, margin, rays, poly)
    return make(WEAK, d, None, margin, rays, poly)


def _cone_certificates(normals: np.ndarray, candidates) -> np.ndarray:
    """Facets whose normal is a strictly positive combination of 3 candidate normals.

    Such a facet cannot be a casting face: any ``d`` with ``n_F . d > 0``
    has ``n_G . d > 0`` for one of the three.
    """
    blocked = np.zeros(len(normals), dtype=bool)
    rows = [(f, *tri) for f, cand in candidates for tri in itertools.combinations(cand, 3)]
    if not rows:
        return blocked
    R = np.array(rows)
    t = normals[R[:, 0]]
    p, q, r = normals[R[:, 1]], normals[R[:, 2]], normals[R[:, 3]]
    qr, rp, pq = np.cross(q, r), np.cross(r, p), np.cross(p, q)
    det = np.einsum("ij,ij->i", p, qr)
    ok = np.abs(det) > 1e-12
    # Cramer's rule for t = l1 p + l2 q + l3 r
    lam = np.column_stack([np.einsum("ij,ij->i", t, qr), np.einsum("ij,ij->i", t, rp),
                           np.einsum("ij,ij->i", t, pq)])[ok] / det[ok, None]
    good = (lam > 1e-9 * np.abs(lam).max(axis=1, keepdims=True)).all(axis=1)
    blocked[R[ok][good, 0]] = True
    return blocked


def blocked_facets(P: ConvexPolyhedron) -> np.ndarray:
    """Cheap infeasibility certificates from nearby facets; ``False`` means undecided."""
    nb = P.facet_neighbors
    blocked = _cone_certificates(P.normals, [(f, nb[f]) for f in range(len(P.facets))])
    rest = np.flatnonzero(~blocked)
    if len(rest):
        vf = P.vertex_facets
        ring = []
        for f in rest:
            cand = sorted({g for v in P.facets[f] for g in vf[v]} - {f})
            if len(cand) > len(nb[f]):
                ring.append((int(f), cand))
        blocked |= _cone_certificates(P.normals, ring)
    return blocked


def thickness(P: ConvexPolyhedron, F: int) -> float:
    """Largest distance from a vertex to the plane of facet ``F``."""
    return float((P.offsets[F] - P.vertices @ P.normals[F]).max())


def check_lemma2(P: ConvexPolyhedron, F: int, tol: float = DEFAULT_TOL, region=None) -> bool:
    """Volume bound for a castable facet: V <= area(F) * thickness(F)."""
    region = direction_lp(P, F, tol) if region is None else region
    if not region.feasible:
        raise NotCastable(f"facet {F} is not castable")
    return bool(P.volume <= P.facet_areas[F] * thickness(P, F) + tol * P.volume)


@dataclass(frozen=True, eq=False)
class CastVerdict:
    facet: int
    castable_weak: bool
    castable_strong: bool
    strictness: str
    witness: np.ndarray | None
    thickness: float
    area: float
    lemma2_ok: bool | None

    @property
    def castable(self) -> bool:
        return self.castable_strong if self.strictness == "strong" else self.castable_weak

    def to_dict(self) -> dict:
        return {
            "facet": self.facet,
            "castable_weak": self.castable_weak,
            "castable_strong": self.castable_strong,
            "witness": None if self.witness is None else [float(x) for x in self.witness],
            "thickness": self.thickness,
            "area": self.area,
            "lemma2_ok": self.lemma2_ok,
        }


def castable_faces(P: ConvexPolyhedron, strictness: str = "weak", tol: float = DEFAULT_TOL,
                   only=None) -> list[CastVerdict]:
    """One verdict per facet (or per facet in ``only``)."""
    if strictness not in ("weak", "strong"):
        raise ValueError("strictness must be 'weak' or 'strong'")
    facets = range(len(P.facets)) if only is None else only
    blocked = blocked_facets(P)
    heights = (P.offsets[:, None] - P.normals @ P.vertices.T).max(axis=1)
    out = []
    for f in facets:
        h = float(heights[f])
        area = float(P.facet_areas[f])
        if blocked[f]:
            out.append(CastVerdict(f, False, False, strictness, None, h, area, None))
            continue
        region = direction_lp(P, f, tol)
        ok = None
        if region.feasible:
            ok = bool(P.volume <= area * h + tol * P.volume)
            if not ok:
                raise AssertionError(f"volume bound violated on castable facet {f}")
        out.append(CastVerdict(f, region.feasible, region.strongly_feasible, strictness,
                               region.witness, h, area, ok))
    return out
