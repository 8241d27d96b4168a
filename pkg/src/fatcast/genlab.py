"""Test polyhedra: sphere approximations, canonical solids, general-position perturbation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapExceeded, CenterOutside, DegenerateInput, PerturbationFailed
from .fatness import FatnessReport, annulus_at
from .geometry import ConvexPolyhedron, build_hull, edge_lengths, validate_general_position

log = logging.getLogger(__name__)

ORIGIN = np.zeros(3)


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int | None = None
    ratio: float | None = None
    seed: int = 0
    eps: float = 0.0
    cap: int | None = None

    def __post_init__(self):
        if self.kind not in ("sphere-hull", "platonic", "prism", "perturbed", "target-ratio"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.ratio is not None and self.ratio <= 1:
            raise ValueError("target ratio must exceed 1")
        if self.n is not None and self.n < 4 and self.kind == "sphere-hull":
            raise ValueError("need at least 4 points")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")


class Generated(NamedTuple):
    polyhedron: ConvexPolyhedron
    fatness: FatnessReport
    info: dict


def sphere_points(n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.normal(size=(n, 3))
    return x / np.linalg.norm(x, axis=1)[:, None]


def gen_sphere_hull(n: int, seed: int = 0, max_retries: int = 64) -> Generated:
    """Hull of ``n`` uniform unit-sphere points; fatness measured about the origin."""
    if n < 4:
        raise ValueError("need at least 4 points")
    for sub in range(max_retries):
        rng = np.random.default_rng([seed, sub])
        try:
            P = build_hull(sphere_points(n, rng))
            rep = annulus_at(P, ORIGIN)
        except Exception as exc:  # degenerate sample or origin outside the hull
            log.info("sphere hull seed %d/%d rejected: %s", seed, sub, exc)
            continue
        return Generated(P, rep, {"kind": "sphere-hull", "n": n, "seed": seed, "sub_seed": sub})
    raise DegenerateInput(f"no usable sample for seed {seed} after {max_retries} tries")


def _independent_worst(P: ConvexPolyhedron, limit: float) -> list[int]:
    order = np.argsort(P.offsets)
    chosen, taken = [], set()
    for f in order:
        if P.offsets[f] >= limit:
            break
        if f in taken:
            continue
        chosen.append(int(f))
        taken.add(int(f))
        taken.update(P.facet_neighbors[f])
    return chosen


def gen_with_target_ratio(ratio: float, seed: int = 0, cap: int = 800, eps: float | None = None,
                          start: int = 12) -> Generated:
    """Refine a sphere sample until its fatness ratio about the origin is at most ``ratio``.

    Each round adds, on the unit sphere, the normal directions of the facets
    closest to the origin (non-adjacent ones first); a round without
    improvement adds a uniform sample instead.  The result is perturbed into
    general position and re-checked.
    """
    if ratio <= 1:
        raise ValueError("target ratio must exceed 1")
    rng = np.random.default_rng(seed)
    pts = sphere_points(start, rng)
    best = np.inf
    stall = 0
    while True:
        P = build_hull(pts)
        m = float(P.offsets.min())
        r = 1.0 / m if m > 0 else np.inf  # origin not yet inside
        if r < best - 1e-12:
            best, stall = r, 0
        else:
            stall += 1
        e = eps if eps is not None else min(1e-3, 5e-3 * float(edge_lengths(P).min()))
        if r <= ratio * (1.0 - 4.0 * e):
            try:
                Q = perturb_general_position(P, e, seed, center=ORIGIN)
                rep = annulus_at(Q, ORIGIN)
            except PerturbationFailed as exc:
                log.info("perturbation failed at %d points: %s", len(pts), exc)
            else:
                best = min(best, rep.ratio)
                if rep.ratio <= ratio:
                    gp = validate_general_position(Q)
                    return Generated(Q, rep, {
                        "kind": "target-ratio", "target_ratio": ratio, "seed": seed, "cap": cap,
                        "eps": e, "points": len(Q.vertices),
                        "general_position_margins": gp.to_dict(),
                    })
        if len(pts) >= cap:
            raise CapExceeded(f"ratio {best:.9g} after {len(pts)} points, target {ratio}", best)
        if stall >= 3:
            extra = sphere_points(min(8, cap - len(pts)), rng)
            stall = 0
        else:
            limit = 1.0 / (ratio * (1.0 - 4.0 * e))
            worst = _independent_worst(P, limit) or [int(np.argmin(P.offsets))]
            extra = P.normals[worst[: cap - len(pts)]]
        pts = np.vstack([pts, extra])


def perturb_general_position(P: ConvexPolyhedron, eps: float, seed: int = 0, center=None,
                             retries: int = 10) -> ConvexPolyhedron:
    """Move every vertex along its ray from ``center`` by uniform(-eps, eps) and re-hull.

    Without a center, rays start at a seeded generic interior point near the
    centroid: rays from a center of symmetry keep antipodal vertex pairs on
    common lines, so any two such pairs would stay coplanar.
    """
    last = None
    for attempt in range(retries):
        rng = np.random.default_rng([seed, attempt])
        if center is None:
            c = 0.8 * P.centroid + 0.2 * (rng.dirichlet(np.ones(len(P.vertices))) @ P.vertices)
        else:
            c = np.asarray(center, dtype=float)
        rel = P.vertices - c
        unit = rel / np.linalg.norm(rel, axis=1)[:, None]
        step = rng.uniform(-eps, eps, size=len(rel)) if eps > 0 else np.zeros(len(rel))
        try:
            Q = build_hull(c + rel + step[:, None] * unit)
        except DegenerateInput as exc:
            last = str(exc)
            continue
        if len(Q.vertices) != len(P.vertices):
            last = f"vertex count changed {len(P.vertices)} -> {len(Q.vertices)}"
            continue
        report = validate_general_position(Q)
        if report.passed:
            return Q
        last = f"general position margins {report.coplanarity_margin:.3g}, {report.parallel_margin:.3g}"
    raise PerturbationFailed(f"no general-position perturbation after {retries} tries ({last})")


_PHI = (1 + 5 ** 0.5) / 2


def platonic(name: str) -> ConvexPolyhedron:
    if name == "tetrahedron":
        pts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    elif name == "cube":
        pts = list(itertools.product((-1, 1), repeat=3))
    elif name == "octahedron":
        pts = [s * e for e in np.eye(3) for s in (1, -1)]
    elif name == "icosahedron":
        pts = [p for a, b in itertools.product((1, -1), (_PHI, -_PHI))
               for p in ((0, a, b), (a, b, 0), (b, 0, a))]
    elif name == "dodecahedron":
        pts = list(itertools.product((1, -1), repeat=3))
        for a, b in itertools.product((1 / _PHI, -1 / _PHI), (_PHI, -_PHI)):
            pts += [(0, a, b), (a, b, 0), (b, 0, a)]
    else:
        raise ValueError(f"unknown solid {name!r}")
    return build_hull(np.array(pts, dtype=float))


PLATONIC = ("tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron")


def prism(polygon, height: float) -> ConvexPolyhedron:
    """Right prism over a convex polygon given as (k, 2) counterclockwise points."""
    poly = np.asarray(polygon, dtype=float)
    bottom = np.column_stack([poly, np.zeros(len(poly))])
    top = np.column_stack([poly, np.full(len(poly), float(height))])
    return build_hull(np.vstack([bottom, top]))


def random_prism(seed: int, k: int | None = None) -> tuple[ConvexPolyhedron, np.ndarray, float]:
    """Prism over a random convex polygon inscribed in the unit circle."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(3, 9)) if k is None else k
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, size=k))
        gaps = np.diff(np.append(ang, ang[0] + 2 * np.pi))
        if gaps.max() < np.pi - 1e-3 and gaps.min() > 1e-2:
            break
    poly = np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(0.5, 2.0)
    h = float(rng.uniform(0.2, 3.0))
    return prism(poly, h), poly, h


def manifest(P: ConvexPolyhedron, fatness: FatnessReport, spec: GenSpec, info: dict | None = None) -> dict:
    gp = validate_general_position(P)
    return {
        "spec": asdict(spec),
        "seed": spec.seed,
        "achieved_ratio": fatness.ratio,
        "fatness": fatness.to_dict(),
        "vertices": len(P.vertices),
        "facets": len(P.facets),
        "general_position_margins": gp.to_dict(),
        "info": info or {},
    }
