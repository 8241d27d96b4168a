"""Convex polyhedron kernel: hull construction, validation, measurement, clipping."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateCut, DegenerateInput, InvalidPolyhedron

DEFAULT_TOL = 1e-9
# adjacent hull triangles whose normals differ by less than this angle become one facet
MERGE_ANGLE = 1e-7


@dataclass(frozen=True, eq=False)
class Plane:
    """The plane ``{p : normal . p = offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(3)
        if not np.all(np.isfinite(n)) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("plane normal must be a finite unit vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, normal, point) -> "Plane":
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(n, float(n @ np.asarray(point, dtype=float)))

    def signed_distance(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.normal - self.offset

    def to_dict(self) -> dict:
        return {"normal": self.normal.tolist(), "offset": self.offset}


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def _newell(pts: np.ndarray) -> np.ndarray:
    return np.cross(pts, np.roll(pts, -1, axis=0)).sum(axis=0)


def plane_basis(normal) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal ``(u, w)`` spanning the plane orthogonal to ``normal``, with ``u x w = normal``."""
    n = np.asarray(normal, dtype=float)
    axis = np.zeros(3)
    axis[np.argmin(np.abs(n))] = 1.0
    u = np.cross(n, axis)
    u /= np.linalg.norm(u)
    w = np.cross(n, u)
    return u, w


@dataclass(frozen=True, eq=False)
class ConvexPolyhedron:
    """Immutable convex polyhedron.

    ``facets`` are vertex-index loops, counterclockwise seen from outside.
    ``normals``/``offsets`` describe each facet plane as ``n . x = c`` with
    ``n`` the outward unit normal.  ``edges`` holds ``(i, j, f, g)`` with
    ``i < j``; ``f`` traverses the edge as ``i -> j`` and ``g`` as ``j -> i``.
    """

    vertices: np.ndarray
    facets: tuple
    normals: np.ndarray
    offsets: np.ndarray
    edges: tuple

    @classmethod
    def from_facets(cls, vertices, facets, normals=None, tol: float = DEFAULT_TOL,
                    validate: bool = True) -> "ConvexPolyhedron":
        """Build from vertex coordinates and oriented facet loops.

        Unused vertices are dropped.  ``normals`` may supply exact facet
        normals (used by clipping, where fragments inherit the parent plane);
        otherwise Newell normals of the loops are used.
        """
        verts, loops, _ = _compact(vertices, facets)
        if not np.all(np.isfinite(verts)):
            raise InvalidPolyhedron("non-finite vertex coordinates")
        if len(loops) < 4:
            raise InvalidPolyhedron("a polyhedron needs at least 4 facets")

        sizes = np.array([len(loop) for loop in loops])
        if sizes.min() < 3 or any(len(set(loop)) != len(loop) for loop in loops):
            raise InvalidPolyhedron("facet loops must be simple with at least 3 vertices")
        flat = np.fromiter(itertools.chain.from_iterable(loops), dtype=int, count=int(sizes.sum()))
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        succ = np.arange(len(flat)) + 1
        succ[starts + sizes - 1] = starts
        pts = verts[flat]
        if normals is not None:
            nrm = np.asarray(normals, dtype=float).reshape(-1, 3)
            nrm = nrm / np.linalg.norm(nrm, axis=1)[:, None]
        else:
            nrm = np.add.reduceat(np.cross(pts, pts[succ]), starts, axis=0)
            length = np.linalg.norm(nrm, axis=1)
            if (length == 0.0).any():
                raise InvalidPolyhedron(f"facet {int(np.argmin(length))} has zero area")
            nrm = nrm / length[:, None]
        owner = np.repeat(np.arange(len(loops)), sizes)
        off = np.add.reduceat(np.einsum("ij,ij->i", pts, nrm[owner]), starts) / sizes

        directed = {}
        for k, loop in enumerate(loops):
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if (a, b) in directed:
                    raise InvalidPolyhedron(f"edge {a}->{b} used twice with the same orientation")
                directed[(a, b)] = k
        edges = []
        for (a, b), f in directed.items():
            if (b, a) not in directed:
                raise InvalidPolyhedron(f"edge {a}-{b} is not shared by two facets")
            if a < b:
                edges.append((a, b, f, directed[(b, a)]))
        edges.sort()

        poly = cls(_readonly(verts), tuple(loops), _readonly(nrm), _readonly(off), tuple(edges))
        if validate:
            poly.check(tol)
        return poly

    def check(self, tol: float = DEFAULT_TOL) -> None:
        """Raise InvalidPolyhedron unless Euler, planarity and convexity hold."""
        V, E, F = len(self.vertices), len(self.edges), len(self.facets)
        if V - E + F != 2:
            raise InvalidPolyhedron(f"Euler relation fails: V-E+F = {V - E + F}")
        eps = tol * self.scale
        slack = self.offsets[:, None] - self.normals @ self.vertices.T
        if slack.min() < -eps:
            raise InvalidPolyhedron("not convex: a vertex lies outside a facet plane")
        for k, loop in enumerate(self.facets):
            if np.abs(slack[k, list(loop)]).max() > eps:
                raise InvalidPolyhedron(f"facet {k} is not planar")

    @cached_property
    def scale(self) -> float:
        """Length scale used to make tolerances relative (at least 1)."""
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return max(1.0, float(np.linalg.norm(span)))

    @cached_property
    def _fan(self) -> tuple[np.ndarray, np.ndarray]:
        tris, owner = [], []
        for k, loop in enumerate(self.facets):
            for i in range(1, len(loop) - 1):
                tris.append((loop[0], loop[i], loop[i + 1]))
                owner.append(k)
        return np.array(tris), np.array(owner)

    @cached_property
    def facet_areas(self) -> np.ndarray:
        tris, owner = self._fan
        v = self.vertices
        cr = np.cross(v[tris[:, 1]] - v[tris[:, 0]], v[tris[:, 2]] - v[tris[:, 0]])
        contrib = 0.5 * np.einsum("ij,ij->i", cr, self.normals[owner])
        return _readonly(np.bincount(owner, weights=contrib, minlength=len(self.facets)))

    @cached_property
    def volume(self) -> float:
        tris, _ = self._fan
        v = self.vertices - self.vertices.mean(axis=0)
        return float(np.einsum("ij,ij->i", v[tris[:, 0]], np.cross(v[tris[:, 1]], v[tris[:, 2]])).sum() / 6.0)

    @cached_property
    def centroid(self) -> np.ndarray:
        """Volume centroid (an interior point)."""
        tris, _ = self._fan
        ref = self.vertices.mean(axis=0)
        v = self.vertices - ref
        a, b, c = v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]]
        vol = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
        return _readonly(ref + (vol[:, None] * (a + b + c) / 4.0).sum(axis=0) / vol.sum())

    @cached_property
    def facet_neighbors(self) -> tuple:
        """Edge-adjacent facets of every facet."""
        nb = [[] for _ in self.facets]
        for _, _, f, g in self.edges:
            nb[f].append(g)
            nb[g].append(f)
        return tuple(tuple(sorted(set(x))) for x in nb)

    @cached_property
    def vertex_facets(self) -> tuple:
        inc = [[] for _ in range(len(self.vertices))]
        for k, loop in enumerate(self.facets):
            for v in loop:
                inc[v].append(k)
        return tuple(tuple(x) for x in inc)

    def transformed(self, matrix=None, shift=None) -> "ConvexPolyhedron":
        """Image under ``x -> matrix @ x + shift`` (matrix must preserve orientation)."""
        m = np.eye(3) if matrix is None else np.asarray(matrix, dtype=float)
        t = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        return ConvexPolyhedron.from_facets(self.vertices @ m.T + t, self.facets)

    def __repr__(self):
        return f"ConvexPolyhedron(V={len(self.vertices)}, E={len(self.edges)}, F={len(self.facets)})"


def _compact(vertices, facets):
    verts = np.asarray(vertices, dtype=float).reshape(-1, 3)
    used = sorted({int(i) for loop in facets for i in loop})
    remap = {old: new for new, old in enumerate(used)}
    loops = [tuple(remap[int(i)] for i in loop) for loop in facets]
    return verts[used], loops, remap


def build_hull(points, tol: float = DEFAULT_TOL) -> ConvexPolyhedron:
    """Convex hull of a 3-D point set, coplanar hull triangles merged into facets."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 4:
        raise DegenerateInput("need at least 4 points in 3-D")
    if not np.all(np.isfinite(pts)):
        raise DegenerateInput("non-finite coordinates")
    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    if sv[2] <= tol * sv[0]:
        raise DegenerateInput("points are coplanar or collinear")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateInput(str(exc)) from exc

    eq = hull.equations
    span = max(1.0, float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))))
    parent = list(range(len(hull.simplices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for t, nbrs in enumerate(hull.neighbors):
        for s in nbrs:
            if s > t and np.linalg.norm(eq[t, :3] - eq[s, :3]) < MERGE_ANGLE \
                    and abs(eq[t, 3] - eq[s, 3]) < tol * span:
                parent[find(s)] = find(t)

    groups: dict[int, list] = {}
    for t, tri in enumerate(hull.simplices):
        a, b, c = (int(x) for x in tri)
        if np.cross(pts[b] - pts[a], pts[c] - pts[a]) @ eq[t, :3] < 0:
            b, c = c, b
        groups.setdefault(find(t), []).append((a, b, c))

    loops = []
    for tris in groups.values():
        directed = {(x, y) for a, b, c in tris for x, y in ((a, b), (b, c), (c, a))}
        nxt = {}
        for x, y in directed:
            if (y, x) not in directed:
                if x in nxt:
                    raise InvalidPolyhedron("merged facet boundary is not a simple loop")
                nxt[x] = y
        start = min(nxt)
        loop = [start]
        while nxt[loop[-1]] != start:
            loop.append(nxt[loop[-1]])
            if len(loop) > len(nxt):
                raise InvalidPolyhedron("merged facet boundary is not a simple loop")
        if len(loop) != len(nxt):
            raise InvalidPolyhedron("merged facet boundary has several components")
        loops.append(tuple(loop))
    loops.sort(key=lambda lp: min(lp))
    return ConvexPolyhedron.from_facets(pts, loops, tol=tol)


def volume(P: ConvexPolyhedron) -> float:
    return P.volume


def face_area(P: ConvexPolyhedron, facet: int) -> float:
    return float(P.facet_areas[facet])


def edge_lengths(P: ConvexPolyhedron) -> np.ndarray:
    e = np.array([(i, j) for i, j, _, _ in P.edges])
    return np.linalg.norm(P.vertices[e[:, 0]] - P.vertices[e[:, 1]], axis=1)


def diameter(P: ConvexPolyhedron) -> float:
    v = P.vertices
    best = 0.0
    for start in range(0, len(v), 512):
        block = v[start:start + 512]
        d2 = ((block[:, None, :] - v[None, :, :]) ** 2).sum(axis=2)
        best = max(best, float(d2.max()))
    return float(np.sqrt(best))


# ---------------------------------------------------------------------------
# general position

@dataclass(frozen=True)
class GeneralPositionReport:
    coplanarity_margin: float
    parallel_margin: float
    exhaustive_margin: float | None
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "coplanarity_margin": self.coplanarity_margin,
            "parallel_margin": self.parallel_margin,
            "exhaustive_margin": self.exhaustive_margin,
            "tol": self.tol,
            "passed": self.passed,
        }


def _coplanarity_margin(P: ConvexPolyhedron) -> float:
    """Smallest tetrahedron volume spanned by a facet triangle and a fourth vertex, over diam^3."""
    v = P.vertices
    tri = np.array([loop[:3] for loop in P.facets])
    area = 0.5 * np.linalg.norm(np.cross(v[tri[:, 1]] - v[tri[:, 0]], v[tri[:, 2]] - v[tri[:, 0]]), axis=1)
    dist = np.abs(P.offsets[:, None] - P.normals @ v.T)
    dist[np.arange(len(tri))[:, None], tri] = np.inf
    vols = dist * (area / 3.0)[:, None]
    return float(vols.min() / diameter(P) ** 3)


def _parallel_margin(normals: np.ndarray) -> float:
    """Smallest |det| over all facet-normal triples (zero iff three planes share a line direction)."""
    n = np.asarray(normals)
    m = len(n)
    best = np.inf
    for i in range(m - 2):
        c = np.cross(n[i], n[i + 1:])
        d = np.abs(c @ n[i + 2:].T)
        # keep k > j only
        d[np.tril_indices(d.shape[0], -1, d.shape[1])] = np.inf
        best = min(best, float(d.min()))
    return best


def _exhaustive_margin(P: ConvexPolyhedron) -> float:
    v = P.vertices
    quads = np.array(list(itertools.combinations(range(len(v)), 4)))
    a = v[quads[:, 0]]
    vols = np.abs(np.linalg.det(np.stack([v[quads[:, 1]] - a, v[quads[:, 2]] - a, v[quads[:, 3]] - a], axis=1))) / 6.0
    return float(vols.min() / diameter(P) ** 3)


def validate_general_position(P: ConvexPolyhedron, tol: float = DEFAULT_TOL,
                              exhaustive: bool | None = None) -> GeneralPositionReport:
    """Check that no 4 vertices are coplanar and no 3 facet planes are parallel to a line.

    The coplanarity test runs against facet planes; with ``exhaustive`` (the
    default when V <= 20) every 4-subset of vertices is tested as well.
    """
    cop = _coplanarity_margin(P)
    par = _parallel_margin(P.normals)
    if exhaustive is None:
        exhaustive = len(P.vertices) <= 20
    ex = _exhaustive_margin(P) if exhaustive else None
    passed = cop > tol and par > tol and (ex is None or ex > tol)
    return GeneralPositionReport(cop, par, ex, tol, passed)


# ---------------------------------------------------------------------------
# clipping

@dataclass(frozen=True, eq=False)
class CutResult:
    """Both halves of a plane cut.

    ``p1`` is the larger half.  The mutual face C is facet ``base1`` of ``p1``
    and facet ``base2`` of ``p2``.  ``c_loop1[k]`` and ``c_loop2[k]`` are the
    local indices of the same point of C in each half, listed in ``p1``'s
    orientation.  ``origin1``/``origin2`` give the facet of the original
    polyhedron each facet came from (-1 for C).
    """

    plane: Plane
    p1: ConvexPolyhedron
    p2: ConvexPolyhedron
    base1: int
    base2: int
    c_loop1: tuple
    c_loop2: tuple
    origin1: tuple
    origin2: tuple
    p1_side: int

    @property
    def c_polygon(self) -> np.ndarray:
        return self.p1.vertices[list(self.c_loop1)]

    @property
    def c_area(self) -> float:
        return face_area(self.p1, self.base1)


def clip(P: ConvexPolyhedron, plane: Plane, tol: float = DEFAULT_TOL) -> CutResult:
    """Cut ``P`` by ``plane`` into two convex halves sharing the face C."""
    n, c = plane.normal, plane.offset
    V = P.vertices
    s = V @ n - c
    eps = tol * P.scale
    side = np.where(s > eps, 1, np.where(s < -eps, -1, 0))
    if not (side > 0).any() or not (side < 0).any():
        raise DegenerateCut("plane does not cross the interior")

    points = [p for p in V]
    crossing: dict[tuple, int] = {}

    def cross_point(a, b):
        key = (min(a, b), max(a, b))
        if key not in crossing:
            t = s[a] / (s[a] - s[b])
            crossing[key] = len(points)
            points.append(V[a] + t * (V[b] - V[a]))
        return crossing[key]

    halves = {1: ([], [], []), -1: ([], [], [])}  # loops, normals, origins
    for f, loop in enumerate(P.facets):
        sf = side[list(loop)]
        if (sf >= 0).all():
            pieces = {1: list(loop)}
        elif (sf <= 0).all():
            pieces = {-1: list(loop)}
        else:
            pieces = {1: [], -1: []}
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if side[a] >= 0:
                    pieces[1].append(a)
                if side[a] <= 0:
                    pieces[-1].append(a)
                if side[a] * side[b] < 0:
                    p = cross_point(a, b)
                    pieces[1].append(p)
                    pieces[-1].append(p)
        for sgn, piece in pieces.items():
            loops, nrms, orig = halves[sgn]
            loops.append(tuple(piece))
            nrms.append(P.normals[f])
            orig.append(f)

    on_plane = [int(i) for i in np.flatnonzero(side == 0)] + sorted(crossing.values())
    pts = np.array(points)
    ring = pts[on_plane]
    u, w = plane_basis(n)
    rel = ring - ring.mean(axis=0)
    order = np.argsort(np.arctan2(rel @ w, rel @ u), kind="stable")
    c_neg = tuple(on_plane[i] for i in order)  # ccw about +n, outward for the negative side
    if len(c_neg) < 3:
        raise DegenerateCut("cross-section has fewer than 3 points")
    c_area = 0.5 * abs(_newell(pts[list(c_neg)]) @ n)
    if c_area <= tol * P.scale ** 2:
        raise DegenerateCut("cross-section area below tolerance")

    built = {}
    for sgn, (loops, nrms, orig) in halves.items():
        c_loop = c_neg if sgn < 0 else c_neg[::-1]
        all_loops = loops + [c_loop]
        all_normals = nrms + [n if sgn < 0 else -n]
        verts, local, remap = _compact(pts, all_loops)
        poly = ConvexPolyhedron.from_facets(verts, local, normals=all_normals, tol=tol, validate=False)
        try:
            poly.check(max(tol, 1e-7))
        except InvalidPolyhedron as exc:
            raise DegenerateCut(f"half polyhedron invalid: {exc}") from exc
        built[sgn] = (poly, len(local) - 1, remap, tuple(orig) + (-1,))

    vp, vn = built[1][0].volume, built[-1][0].volume
    if abs(vp - vn) <= 1e-12 * P.volume:
        lexmin = min((tuple(V[i]), i) for i in range(len(V)) if side[i] != 0)[1]
        first = int(side[lexmin])
    else:
        first = 1 if vp > vn else -1
    big, small = built[first], built[-first]
    c1 = c_neg if first < 0 else c_neg[::-1]
    return CutResult(
        plane=plane,
        p1=big[0], p2=small[0],
        base1=big[1], base2=small[1],
        c_loop1=tuple(big[2][g] for g in c1),
        c_loop2=tuple(small[2][g] for g in c1),
        origin1=big[3], origin2=small[3],
        p1_side=first,
    )
