"""Plane cuts into two castable halves, edge marking of the mutual face, chain diagnostic."""

from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .casting import CastVerdict, castable_faces, cone_bisector, direction_lp, recession_cone
from .errors import DegenerateCut, PreconditionFailed
from .fatness import FatnessReport
from .geometry import DEFAULT_TOL, ConvexPolyhedron, CutResult, Plane, clip, plane_basis

STRATEGIES = ("vertex-triple", "facet-parallel", "random")
MARK_ANGLE = 1e-7
THIN_SLAB = 1e-6


@dataclass(frozen=True)
class CutPlane:
    plane: Plane
    provenance: str

    def to_dict(self) -> dict:
        return {**self.plane.to_dict(), "provenance": self.provenance}


def _crosses(P: ConvexPolyhedron, n, c, tol) -> bool:
    s = P.vertices @ n - c
    eps = tol * P.scale
    return bool((s > eps).any() and (s < -eps).any())


def _facet_parallel(P, offsets, tol):
    dirs = []
    for n in P.normals:
        k = np.flatnonzero(np.abs(n) > 1e-12)[0]
        m = n if n[k] > 0 else -n
        if not any(np.linalg.norm(m - d) < 1e-9 for d in dirs):
            dirs.append(m)
    out = []
    for n in dirs:
        h = P.vertices @ n
        lo, hi = h.min(), h.max()
        for k in range(1, offsets + 1):
            c = lo + k * (hi - lo) / (offsets + 1)
            out.append(CutPlane(Plane(n, c), "facet-parallel"))
    return out


def _sampled_triples(V, total, rng):
    # distinct random triples until exhausted; facet planes among them get filtered by the caller
    seen = set()
    while len(seen) < total:
        t = tuple(sorted(rng.choice(V, size=3, replace=False).tolist()))
        if t not in seen:
            seen.add(t)
            yield t


def _vertex_triples(P, budget, rng, tol):
    V = len(P.vertices)
    total = math.comb(V, 3)
    if total <= budget:
        triples = itertools.combinations(range(V), 3)
    else:
        triples = _sampled_triples(V, total, rng)
    out = []
    for i, j, k in triples:
        a, b, c = P.vertices[[i, j, k]]
        n = np.cross(b - a, c - a)
        length = np.linalg.norm(n)
        if length <= tol * P.scale ** 2:
            continue
        n = n / length
        if _crosses(P, n, n @ a, tol):
            out.append(CutPlane(Plane(n, float(n @ a)), "vertex-triple"))
        if len(out) >= budget:
            break
    return out


def _random_planes(P, count, rng, tol):
    out = []
    while len(out) < count:
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        weights = rng.dirichlet(np.ones(len(P.vertices)))
        point = weights @ P.vertices
        if _crosses(P, n, n @ point, tol):
            out.append(CutPlane(Plane(n, float(n @ point)), "random"))
    return out


def candidate_planes(P: ConvexPolyhedron, strategy: str = "mixed", budget: int = 2000, seed: int = 0,
                     offsets: int = 7, tol: float = DEFAULT_TOL) -> list[CutPlane]:
    """Deterministic list of at most ``budget`` cutting planes.

    ``mixed`` takes the facet-parallel sweeps first, then fills half of the
    remaining budget with vertex triples and the rest with random planes.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(seed)
    if strategy == "facet-parallel":
        return _facet_parallel(P, offsets, tol)[:budget]
    if strategy == "vertex-triple":
        return _vertex_triples(P, budget, rng, tol)
    if strategy == "random":
        return _random_planes(P, budget, rng, tol)
    if strategy != "mixed":
        raise ValueError(f"unknown strategy {strategy!r}")
    out = _facet_parallel(P, offsets, tol)[:budget]
    rest = budget - len(out)
    if rest > 0:
        out += _vertex_triples(P, rest // 2, rng, tol) if rest // 2 else []
        out += _random_planes(P, budget - len(out), rng, tol)
    return out


@dataclass(frozen=True)
class EdgeMark:
    index: int
    a: np.ndarray
    b: np.ndarray
    length: float
    normal: np.ndarray  # outward in-plane normal of the edge, w.r.t. C seen from P_1
    marked: bool
    facet1: int
    facet2: int


@dataclass(frozen=True)
class EdgeMarking:
    edges: tuple

    @property
    def unmarked_count(self) -> int:
        return sum(not e.marked for e in self.edges)

    @property
    def marked_count(self) -> int:
        return sum(e.marked for e in self.edges)

    def to_dict(self) -> dict:
        return {
            "marked": [e.marked for e in self.edges],
            "lengths": [e.length for e in self.edges],
            "unmarked_count": self.unmarked_count,
        }


def _edge_facets(P: ConvexPolyhedron) -> dict:
    return {(i, j): (f, g) for i, j, f, g in P.edges}


def _other_facet(lookup, a, b, base):
    f, g = lookup[(min(a, b), max(a, b))]
    return g if f == base else f


def classify_edges(P: ConvexPolyhedron, cut: CutResult, tol: float = MARK_ANGLE) -> EdgeMarking:
    """Mark each edge of C whose two incident half-facets are pieces of one facet of ``P``."""
    e1, e2 = _edge_facets(cut.p1), _edge_facets(cut.p2)
    nC = cut.p1.normals[cut.base1]
    k = len(cut.c_loop1)
    out = []
    for i in range(k):
        a1, b1 = cut.c_loop1[i], cut.c_loop1[(i + 1) % k]
        a2, b2 = cut.c_loop2[i], cut.c_loop2[(i + 1) % k]
        f1 = _other_facet(e1, a1, b1, cut.base1)
        f2 = _other_facet(e2, a2, b2, cut.base2)
        o1, o2 = cut.origin1[f1], cut.origin2[f2]
        same_plane = np.linalg.norm(cut.p1.normals[f1] - cut.p2.normals[f2]) < tol \
            and abs(cut.p1.offsets[f1] - cut.p2.offsets[f2]) < DEFAULT_TOL * P.scale
        pa, pb = cut.p1.vertices[a1], cut.p1.vertices[b1]
        edge = pb - pa
        nrm = np.cross(edge, nC)
        nrm /= np.linalg.norm(nrm)
        out.append(EdgeMark(i, pa, pb, float(np.linalg.norm(edge)), nrm,
                            bool(o1 == o2 and o1 >= 0 and same_plane), f1, f2))
    return EdgeMarking(tuple(out))


@dataclass(frozen=True, eq=False)
class CutVerdict:
    cut: CutResult
    cast1: tuple
    cast2: tuple
    marking: EdgeMarking
    provenance: str = ""

    @property
    def two_castable(self) -> bool:
        return any(v.castable_weak for v in self.cast1) and any(v.castable_weak for v in self.cast2)

    @property
    def both_through_C(self) -> bool:
        return self.cast1[self.cut.base1].castable_weak and self.cast2[self.cut.base2].castable_weak

    def castable(self, half: int) -> list[CastVerdict]:
        return [v for v in (self.cast1 if half == 1 else self.cast2) if v.castable_weak]

    def to_dict(self) -> dict:
        c = self.cut
        return {
            "plane": c.plane.to_dict(),
            "provenance": self.provenance,
            "volumes": [c.p1.volume, c.p2.volume],
            "base_facets": [c.base1, c.base2],
            "two_castable": self.two_castable,
            "both_through_C": self.both_through_C,
            "castable_p1": [v.to_dict() for v in self.castable(1)],
            "castable_p2": [v.to_dict() for v in self.castable(2)],
            "marking": self.marking.to_dict(),
        }


def test_cut(P: ConvexPolyhedron, plane: Plane, tol: float = DEFAULT_TOL, provenance: str = "") -> CutVerdict:
    """Cut ``P`` and decide castability of both halves."""
    cut = clip(P, plane, tol)
    return CutVerdict(cut, tuple(castable_faces(cut.p1, tol=tol)), tuple(castable_faces(cut.p2, tol=tol)),
                      classify_edges(P, cut), provenance)


test_cut.__test__ = False  # not a pytest test despite the name


@dataclass
class SearchReport:
    budget: int
    strategies: str
    seed: int
    cuts_tested: int = 0
    skipped: int = 0
    witness: CutVerdict | None = None
    witness_index: int | None = None
    unmarked_histogram: Counter = field(default_factory=Counter)
    both_through_C: int = 0
    runtime_ms: float = 0.0
    verdicts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "budget": self.budget,
            "strategies": self.strategies,
            "seed": self.seed,
            "cuts_tested": self.cuts_tested,
            "skipped": self.skipped,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "witness_index": self.witness_index,
            "unmarked_histogram": {str(k): v for k, v in sorted(self.unmarked_histogram.items())},
            "both_through_C": self.both_through_C,
            "runtime_ms": self.runtime_ms,
        }


def search_two_castable(P: ConvexPolyhedron, budget: int = 2000, seed: int = 0, strategies: str = "mixed",
                        offsets: int = 7, tol: float = DEFAULT_TOL, stop_at_first: bool = True,
                        keep_verdicts: bool = False) -> SearchReport:
    """Try candidate cuts in order; the witness is the first 2-castable one."""
    t0 = time.perf_counter()
    report = SearchReport(budget, strategies, seed)
    for idx, cp in enumerate(candidate_planes(P, strategies, budget, seed, offsets, tol)):
        try:
            cut = clip(P, cp.plane, tol)
        except DegenerateCut:
            report.skipped += 1
            continue
        if min(cut.p1.volume, cut.p2.volume) < THIN_SLAB * P.volume:
            report.skipped += 1
            continue
        verdict = CutVerdict(cut, tuple(castable_faces(cut.p1, tol=tol)),
                             tuple(castable_faces(cut.p2, tol=tol)), classify_edges(P, cut), cp.provenance)
        report.cuts_tested += 1
        report.unmarked_histogram[verdict.marking.unmarked_count] += 1
        report.both_through_C += verdict.both_through_C
        if keep_verdicts:
            report.verdicts.append(verdict)
        if verdict.two_castable and report.witness is None:
            report.witness, report.witness_index = verdict, idx
            if stop_at_first:
                break
    report.runtime_ms = 1000.0 * (time.perf_counter() - t0)
    return report


@dataclass(frozen=True)
class ChainDiagnostic:
    direction: np.ndarray
    chain: tuple
    contiguous: bool
    chain_length: float
    max_edge: float
    marked_ok: bool
    chain_unmarked: bool
    unmarked_count: int
    max_unmarked_edge: float
    chords: dict

    @property
    def implied_ratio(self) -> float:
        """Smallest R with 2 sqrt(R^2 - 1) at least the longest unmarked edge."""
        return math.sqrt(1.0 + (self.max_unmarked_edge / 2.0) ** 2)

    def to_dict(self) -> dict:
        return {
            "direction": self.direction.tolist(),
            "chain": list(self.chain),
            "contiguous": self.contiguous,
            "chain_length": self.chain_length,
            "max_edge": self.max_edge,
            "marked_ok": self.marked_ok,
            "chain_unmarked": self.chain_unmarked,
            "unmarked_count": self.unmarked_count,
            "max_unmarked_edge": self.max_unmarked_edge,
            "implied_ratio": self.implied_ratio,
            "chords": {k: np.asarray(v).tolist() for k, v in self.chords.items()},
        }


def _cyclic_run(indices, k) -> bool:
    s = set(indices)
    if not s or len(s) == k:
        return True
    starts = [i for i in s if (i - 1) % k not in s]
    return len(starts) == 1


def chain_diagnostic(P: ConvexPolyhedron, cut: CutResult, fatness: FatnessReport,
                     tol: float = DEFAULT_TOL) -> ChainDiagnostic:
    """Recession direction of the marked-edge program of ``P_1`` and the chain of C edges facing it.

    Lengths are reported in units of the inner radius.
    """
    r1 = direction_lp(cut.p1, cut.base1, tol)
    r2 = direction_lp(cut.p2, cut.base2, tol)
    if not (r1.strongly_feasible and r2.strongly_feasible):
        raise PreconditionFailed("both halves must be strongly castable through the cut face")
    marking = classify_edges(P, cut)
    nC = cut.p1.normals[cut.base1]
    u, w = plane_basis(nC)
    marked_facets = [e.facet1 for e in marking.edges if e.marked]
    lp = direction_lp(cut.p1, cut.base1, tol, facets=marked_facets, basis=(u, w))
    v2 = cone_bisector(lp.a, recession_cone(lp.a, tol), tol)
    if v2 is None:
        raise PreconditionFailed("marked-edge program is bounded")
    v = v2[0] * u + v2[1] * w

    scale = 1.0 / fatness.r_inner
    dots = np.array([e.normal @ v for e in marking.edges])
    chain = tuple(int(i) for i in np.flatnonzero(dots > tol))
    lengths = np.array([e.length for e in marking.edges]) * scale
    unmarked = [i for i, e in enumerate(marking.edges) if not e.marked]

    O = np.asarray(fatness.center)
    o_proj = O - ((O - cut.c_polygon[0]) @ nC) * nC
    side = np.cross(nC, v)
    Q = o_proj + fatness.r_inner * side
    Rp = o_proj - fatness.r_inner * side

    def reach(p):
        gap = fatness.r_outer ** 2 - float((p - O) @ (p - O))
        return p + math.sqrt(max(gap, 0.0)) * v

    chords = {"Q": Q, "S": reach(Q), "R": Rp, "T": reach(Rp)}
    return ChainDiagnostic(
        direction=v,
        chain=chain,
        contiguous=_cyclic_run(chain, len(marking.edges)),
        chain_length=float(lengths[list(chain)].sum()) if chain else 0.0,
        max_edge=float(lengths[list(chain)].max()) if chain else 0.0,
        marked_ok=bool(all(dots[i] <= tol for i, e in enumerate(marking.edges) if e.marked)),
        chain_unmarked=all(not marking.edges[i].marked for i in chain),
        unmarked_count=len(unmarked),
        max_unmarked_edge=float(lengths[unmarked].max()) if unmarked else 0.0,
        chords=chords,
    )
