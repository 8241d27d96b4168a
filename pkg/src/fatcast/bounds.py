"""Numeric lower bounds on the fatness ratio of a 2-castable polyhedron.

Each case of the non-castability argument gives a relation in R (and the cut
height z0 for the last one); the bound is the root of that relation on (1, 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BRACKET = (1.0, 2.0)
ROOT_TOL = 1e-12
GRID_STEP = 1e-4
PUBLISHED_MATCH_TOL = 1e-6

PUBLISHED_VALUES = {
    "I": 1.240011810,
    "IIa": 1.137158043,
    "IIb-pos": 1.137158043,
    "IIb-neg": 1.07218989,
    "chain": 1.118033989,
    "theorem": 1.07218989,
}


@dataclass
class CaseBound:
    case: str
    relation: str
    root: float
    residual: float
    bracket: tuple = BRACKET
    iterations: int = 0
    trace: dict = field(default_factory=dict)

    @property
    def published_value(self) -> float:
        return PUBLISHED_VALUES[self.case]

    @property
    def matches_published(self) -> bool:
        return abs(self.root - self.published_value) <= PUBLISHED_MATCH_TOL

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "relation": self.relation,
            "root": self.root,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "published_value": self.published_value,
            "matches_published": self.matches_published,
            "trace": self.trace,
        }


def bisect(f, lo: float, hi: float, tol: float = ROOT_TOL, maxiter: int = 200) -> tuple[float, int]:
    """Root of an increasing function on [lo, hi] (``f(lo) <= 0 <= f(hi)``)."""
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise ValueError(f"bracket [{lo}, {hi}] does not enclose a root")
    if flo == 0:
        return lo, 0
    it = 0
    while hi - lo > tol and it < maxiter:
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), it


def secant(f, x0: float, x1: float, tol: float = 1e-14, maxiter: int = 100) -> float:
    """Derivative-free cross-check solver."""
    f0, f1 = f(x0), f(x1)
    for _ in range(maxiter):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0, x1, f1 = x1, f1, x2, f(x2)
        if abs(x1 - x0) < tol:
            break
    return x1


def golden_section(f, lo: float, hi: float, tol: float = 1e-13, maxiter: int = 200) -> float:
    """Minimizer of a unimodal function on [lo, hi]."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if hi - lo <= tol:
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def _cast_residual(volume_bound: float):
    # S(F) * h <= pi (R^2 - 1) * 2R must exceed pi * volume_bound
    return lambda R: 2.0 * R * (R * R - 1.0) - volume_bound


def _solve(case: str, relation: str, f) -> CaseBound:
    root, it = bisect(f, *BRACKET)
    cross = secant(f, *BRACKET)
    return CaseBound(case, relation, root, f(root), BRACKET, it,
                     {"method": "bisection", "secant_root": cross,
                      "residual_at_bracket": [f(BRACKET[0]), f(BRACKET[1])]})


def solve_case_I() -> CaseBound:
    """Whole polyhedron castable through a face."""
    return _solve("I", "2R(R^2-1) = 4/3", _cast_residual(4.0 / 3.0))


def solve_case_IIa() -> CaseBound:
    """Larger half castable through a face other than the cut face."""
    return _solve("IIa", "2R(R^2-1) = 2/3", _cast_residual(2.0 / 3.0))


def solve_case_IIb_pos() -> CaseBound:
    """Smaller half castable through a non-cut face, cut at z0 >= 0."""
    return _solve("IIb-pos", "2R(R^2-1) = 2/3", _cast_residual(2.0 / 3.0))


def cap_volume(z0, variant: str = "integral"):
    """Volume of the unit ball below height z0, divided by pi.

    ``"integral"`` is the exact value 2/3 + z0 - z0^3/3; ``"printed"`` is
    the form 2/3 + z0 - z0^3 kept for comparison.
    """
    z0 = np.asarray(z0, dtype=float)
    if variant == "integral":
        return 2.0 / 3.0 + z0 - z0 ** 3 / 3.0
    if variant == "printed":
        return 2.0 / 3.0 + z0 - z0 ** 3
    raise ValueError(f"unknown variant {variant!r}")


def negz_residual(R, z0, variant: str = "integral"):
    """Increasing in R for R > |z0|: 2 (R^2 - 1) sqrt(R^2 - z0^2) - cap_volume(z0)."""
    R = np.asarray(R, dtype=float)
    return 2.0 * (R * R - 1.0) * np.sqrt(R * R - np.asarray(z0) ** 2) - cap_volume(z0, variant)


def negz_root(z0, variant: str = "integral", tol: float = ROOT_TOL):
    """Vectorized bisection root in R of the residual for each z0 (bracket (1, 2))."""
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    lo = np.full_like(z0, BRACKET[0])
    hi = np.full_like(z0, BRACKET[1])
    at_lo = negz_residual(lo, z0, variant) >= 0
    while (hi - lo).max() > tol:
        mid = 0.5 * (lo + hi)
        below = negz_residual(mid, z0, variant) <= 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(at_lo, BRACKET[0], 0.5 * (lo + hi))


def negz_bound(z0, variant: str = "integral"):
    """Smallest R meeting both the slice-diameter condition and the volume relation at height z0."""
    z0 = np.asarray(z0, dtype=float)
    return np.maximum(negz_root(z0, variant), np.sqrt(1.0 + z0 ** 2))


def solve_case_IIb_neg(variant: str = "integral") -> CaseBound:
    """Smaller half castable through a non-cut face, cut at z0 < 0: minimize over z0."""
    grid = np.arange(-1.0, 0.0 + GRID_STEP / 2, GRID_STEP)
    values = negz_bound(grid, variant)
    k = int(np.argmin(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    z_star = golden_section(lambda z: float(negz_bound(z, variant)[0]), lo, hi)
    R_star = float(negz_bound(z_star, variant)[0])
    root_only = float(negz_root(z_star, variant)[0])
    f = lambda R: float(negz_residual(R, z_star, variant))
    rhs = "2/3+z0-z0^3/3" if variant == "integral" else "2/3+z0-z0^3"
    return CaseBound(
        "IIb-neg",
        f"min over z0 in [-1,0] of R: 2(R^2-1)sqrt(R^2-z0^2) = {rhs}, sqrt(R^2-z0^2) >= 1",
        R_star,
        f(R_star),
        BRACKET,
        0,
        {
            "variant": variant,
            "z0": z_star,
            "grid_min": float(values[k]),
            "grid_z0": float(grid[k]),
            "volume_root_at_z0": root_only,
            "diameter_residual": float(np.sqrt(R_star ** 2 - z_star ** 2) - 1.0),
            "binding": "both" if abs(root_only - R_star) < 1e-9 else "diameter" if root_only < R_star else "volume",
            "secant_root": secant(f, *BRACKET),
        },
    )


def chain_bound() -> CaseBound:
    """An unmarked edge longer than 1 needs 2 sqrt(R^2 - 1) > 1."""
    f = lambda R: 2.0 * math.sqrt(R * R - 1.0) - 1.0
    out = _solve("chain", "2sqrt(R^2-1) = 1", f)
    out.trace["closed_form"] = math.sqrt(5.0 / 4.0)
    return out


def all_cases(variant: str = "integral") -> list[CaseBound]:
    return [solve_case_I(), solve_case_IIa(), solve_case_IIb_pos(), solve_case_IIb_neg(variant), chain_bound()]


def theorem_constant(cases: list[CaseBound] | None = None) -> CaseBound:
    """The loosest case bound: below it no covered configuration is possible."""
    cases = all_cases() if cases is None else cases
    worst = min(cases, key=lambda b: b.root)
    return CaseBound("theorem", f"min over cases (attained by {worst.case})", worst.root,
                     worst.residual, worst.bracket, worst.iterations,
                     {"attained_by": worst.case, "roots": {b.case: b.root for b in cases}})


def negz_variants() -> dict[str, CaseBound]:
    """Both right-hand sides, with the one that reproduces the published constant flagged."""
    return {v: solve_case_IIb_neg(v) for v in ("integral", "printed")}
