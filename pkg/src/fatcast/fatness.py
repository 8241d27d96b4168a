"""Concentric-sphere fatness of convex polyhedra and the fat-polyhedron size bounds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import CenterOutside
from .geometry import ConvexPolyhedron, diameter, edge_lengths

CONTAINMENT_TOL = 1e-9


@dataclass(frozen=True)
class FatnessReport:
    center: np.ndarray
    r_inner: float
    r_outer: float
    certified: bool

    @property
    def ratio(self) -> float:
        return self.r_outer / self.r_inner

    def to_dict(self) -> dict:
        return {
            "center": [float(x) for x in self.center],
            "r_inner": self.r_inner,
            "r_outer": self.r_outer,
            "ratio": self.ratio,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class LemmaBounds:
    """Size limits implied by fatness ratio ``R`` once the inner radius is 1."""

    ratio: float

    @property
    def l_star(self) -> float:
        return 2.0 * np.sqrt(self.ratio ** 2 - 1.0)

    @property
    def s_star(self) -> float:
        return np.pi * (self.ratio ** 2 - 1.0)

    @property
    def v_lo(self) -> float:
        return 4.0 * np.pi / 3.0

    @property
    def v_hi(self) -> float:
        return 4.0 * np.pi * self.ratio ** 3 / 3.0


def _radii(P: ConvexPolyhedron, center) -> tuple[float, float]:
    o = np.asarray(center, dtype=float)
    r_in = float((P.offsets - P.normals @ o).min())
    r_out = float(np.sqrt(((P.vertices - o) ** 2).sum(axis=1).max()))
    return r_in, r_out


def annulus_at(P: ConvexPolyhedron, center) -> FatnessReport:
    """Largest inner and smallest outer sphere about a fixed center."""
    o = np.array(center, dtype=float).reshape(3)
    r_in, r_out = _radii(P, o)
    if r_in <= 0:
        raise CenterOutside(f"center {o.tolist()} is not interior (facet distance {r_in:g})")
    o.flags.writeable = False
    return FatnessReport(o, r_in, r_out, certified=True)


def chebyshev_center(P: ConvexPolyhedron) -> np.ndarray:
    """Center of the largest inscribed ball: maximize t with n_f . x + t <= c_f."""
    A = np.hstack([P.normals, np.ones((len(P.normals), 1))])
    res = linprog(c=[0, 0, 0, -1], A_ub=A, b_ub=P.offsets,
                  bounds=[(None, None)] * 3 + [(0, None)], method="highs")
    if res.status != 0:
        return np.asarray(P.centroid)
    return res.x[:3]


def _polish(P: ConvexPolyhedron, start) -> np.ndarray | None:
    """Local solve of min a/b s.t. |v - O| <= a, b <= c_f - n_f . O, in units of the polyhedron scale."""
    s = P.scale
    V = P.vertices / s
    c = P.offsets / s
    o = np.asarray(start, dtype=float) / s
    r_in = float((c - P.normals @ o).min())
    r_out = float(np.sqrt(((V - o) ** 2).sum(axis=1).max()))
    if r_in <= 0:
        return None
    cons = [
        {"type": "ineq", "fun": lambda x: x[3] ** 2 - ((V - x[:3]) ** 2).sum(axis=1),
         "jac": lambda x: np.column_stack([2 * (V - x[:3]), np.full(len(V), 2 * x[3]), np.zeros(len(V))])},
        {"type": "ineq", "fun": lambda x: c - P.normals @ x[:3] - x[4],
         "jac": lambda x: np.column_stack([-P.normals, np.zeros(len(c)), -np.ones(len(c))])},
    ]
    res = minimize(lambda x: x[3] / x[4], np.r_[o, r_out, r_in],
                   jac=lambda x: np.array([0, 0, 0, 1 / x[4], -x[3] / x[4] ** 2]),
                   constraints=cons, method="SLSQP", bounds=[(None, None)] * 3 + [(0, None), (1e-12, None)],
                   options={"ftol": 1e-15, "maxiter": 200})
    return res.x[:3] * s if np.all(np.isfinite(res.x)) else None


def best_center(P: ConvexPolyhedron, iters: int = 200) -> FatnessReport:
    """Heuristic minimizer of R_o/R_i over centers.

    Stage one takes the inscribed-ball center; stage two runs a Nelder-Mead
    search on the ratio from there, and a constrained smooth solve of the
    epigraph form polishes the simplex result (the ratio is quasiconvex, so
    local optima are global).  The result is never worse than the centroid
    or the stage-one center.
    """
    scale = P.scale

    def ratio(x):
        r_in, r_out = _radii(P, x)
        return r_out / r_in if r_in > 0 else np.inf

    seeds = [np.asarray(P.centroid, dtype=float), chebyshev_center(P)]
    best = min(seeds, key=ratio)
    step = 0.05 * min(_radii(P, best)[0], scale)
    simplex = np.vstack([best, best + step * np.eye(3)])
    res = minimize(ratio, best, method="Nelder-Mead",
                   options={"maxiter": iters, "initial_simplex": simplex,
                            "xatol": 1e-10 * scale, "fatol": 1e-14})
    if ratio(res.x) < ratio(best):
        best = res.x
    polished = _polish(P, best)
    if polished is not None and ratio(polished) < ratio(best):
        best = polished
    rep = annulus_at(P, best)
    return FatnessReport(rep.center, rep.r_inner, rep.r_outer, certified=False)


@dataclass
class LemmaCheck:
    """Outcome of checking a polyhedron against the fat-polyhedron size bounds."""

    bounds: LemmaBounds
    max_edge: float
    max_area: float
    volume: float
    diameter: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        b = self.bounds
        return {
            "ratio": b.ratio, "l_star": b.l_star, "s_star": b.s_star,
            "v_lo": b.v_lo, "v_hi": b.v_hi,
            "max_edge": self.max_edge, "max_area": self.max_area,
            "volume": self.volume, "diameter": self.diameter,
            "passed": self.passed, "failures": list(self.failures),
        }


def check_lemma1(P: ConvexPolyhedron, report: FatnessReport, tol: float = 1e-9) -> LemmaCheck:
    """Compare edges, facet areas, volume and diameter of ``P`` (rescaled so R_i = 1)
    against the limits implied by the report's ratio."""
    k = 1.0 / report.r_inner
    b = LemmaBounds(report.ratio)
    edges = edge_lengths(P) * k
    areas = np.asarray(P.facet_areas) * k * k
    vol = P.volume * k ** 3
    diam = diameter(P) * k
    out = LemmaCheck(b, float(edges.max()), float(areas.max()), vol, diam)
    if out.max_edge > b.l_star + tol:
        out.failures.append(f"edge {out.max_edge:.9g} > l* = {b.l_star:.9g}")
    if out.max_area > b.s_star + tol:
        out.failures.append(f"facet area {out.max_area:.9g} > S* = {b.s_star:.9g}")
    if not b.v_lo - tol < vol < b.v_hi + tol:
        out.failures.append(f"volume {vol:.9g} outside ({b.v_lo:.9g}, {b.v_hi:.9g})")
    if diam > 2.0 * b.ratio + tol:
        out.failures.append(f"diameter {diam:.9g} > 2R = {2 * b.ratio:.9g}")
    return out
