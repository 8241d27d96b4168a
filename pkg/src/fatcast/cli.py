"""Command-line front end.

Exit codes: 0 success or witness found, 1 negative result, 2 unreadable
input, 3 invalid geometry, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bounds, plotting
from .casting import castable_faces, check_lemma2
from .errors import CapExceeded, CenterOutside, DegenerateInput, InvalidPolyhedron, OFFParseError, PerturbationFailed
from .fatness import annulus_at, best_center, check_lemma1
from .genlab import GenSpec, gen_sphere_hull, gen_with_target_ratio, manifest, platonic, random_prism
from .geometry import validate_general_position
from .offio import read_off, write_off
from .twocast import STRATEGIES, search_two_castable

SCHEMA_VERSION = 1

EXIT_OK, EXIT_NEGATIVE, EXIT_PARSE, EXIT_GEOMETRY, EXIT_USAGE = 0, 1, 2, 3, 64

log = logging.getLogger("fatcast")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _emit(report: dict, args) -> None:
    if getattr(args, "compact", False):
        print(json.dumps(report, separators=(",", ":")))
    else:
        print(json.dumps(report, indent=2))


def _report(command: str, args, results: dict, t0: float, digest: str | None = None) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "compact")}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "tool_version": __version__,
        "input_digest": digest,
        "config": config,
        "results": results,
        "runtime_ms": 1000.0 * (time.perf_counter() - t0),
    }


def _load(path):
    try:
        return read_off(path)
    except (OSError, OFFParseError) as exc:
        raise OFFParseError(f"{path}: {exc}") from exc


def _parse_center(text: str):
    if text == "auto":
        return None
    try:
        xyz = [float(x) for x in text.split(",")]
    except ValueError:
        xyz = []
    if len(xyz) != 3:
        raise UsageError(f"--center expects 'auto' or x,y,z, got {text!r}")
    return np.array(xyz)


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    center = _parse_center(args.center)
    P = _load(args.file)
    fat = best_center(P) if center is None else annulus_at(P, center)
    verdicts = castable_faces(P, tol=args.tol)
    lemma1 = check_lemma1(P, fat)
    lemma2 = {v.facet: check_lemma2(P, v.facet, args.tol) for v in verdicts if v.castable_weak}
    results = {
        "polyhedron": {"vertices": len(P.vertices), "edges": len(P.edges), "facets": len(P.facets),
                       "volume": P.volume},
        "fatness": fat.to_dict(),
        "general_position": validate_general_position(P).to_dict(),
        "cast_verdicts": [v.to_dict() for v in verdicts],
        "castable_weak": sum(v.castable_weak for v in verdicts),
        "castable_strong": sum(v.castable_strong for v in verdicts),
        "lemma1": lemma1.to_dict(),
        "lemma2": {str(k): v for k, v in lemma2.items()},
    }
    if args.figures:
        results["figures"] = [plotting.plot_normal_map(P, verdicts, Path(args.figures) / "normals.png")]
    _emit(_report("analyze", args, results, t0, _digest(args.file)), args)
    return EXIT_OK


def cmd_cut_search(args) -> int:
    t0 = time.perf_counter()
    if args.budget < 1:
        raise UsageError("--budget must be at least 1")
    P = _load(args.file)
    rep = search_two_castable(P, budget=args.budget, seed=args.seed, strategies=args.strategies,
                              offsets=args.offsets, tol=args.tol)
    results = {"input": str(args.file), **rep.to_dict()}
    if args.figures:
        figs = [plotting.plot_unmarked_histogram(rep.unmarked_histogram, Path(args.figures) / "unmarked.png")]
        if rep.witness is not None:
            figs.append(plotting.plot_cut_face(rep.witness, Path(args.figures) / "witness_face.png"))
        results["figures"] = figs
    _emit(_report("cut-search", args, results, t0, _digest(args.file)), args)
    return EXIT_OK if rep.witness is not None else EXIT_NEGATIVE


def cmd_bounds(args) -> int:
    t0 = time.perf_counter()
    variants = bounds.negz_variants()
    reproducing = [v for v, b in variants.items() if b.matches_published]
    negz = variants[reproducing[0]] if reproducing else variants["integral"]
    cases = [bounds.solve_case_I(), bounds.solve_case_IIa(), bounds.solve_case_IIb_pos(), negz, bounds.chain_bound()]
    theorem = bounds.theorem_constant(cases)
    if args.json:
        results = {"cases": [b.to_dict() for b in cases], "theorem": theorem.to_dict(),
                   "negz_variants": {k: b.to_dict() for k, b in variants.items()},
                   "reproducing_variant": reproducing}
        if args.figures:
            results["figures"] = [plotting.plot_negz_bound(Path(args.figures) / "negz_bound.png", cases)]
        _emit(_report("bounds", args, results, t0), args)
        return EXIT_OK
    print("case\trelation\troot\tresidual\tmatches_published")
    for b in cases:
        print(f"{b.case}\t{b.relation}\t{b.root:.10f}\t{b.residual:.2e}\t{str(b.matches_published).lower()}")
    print(f"# theorem constant {theorem.root:.10f} (attained by {theorem.trace['attained_by']})")
    for v, b in variants.items():
        print(f"# IIb-neg with {v} cap volume: {b.root:.10f} at z0 = {b.trace['z0']:.10f}"
              f" matches_published={str(b.matches_published).lower()}")
    if args.figures:
        print(f"# figure {plotting.plot_negz_bound(Path(args.figures) / 'negz_bound.png', cases)}")
    return EXIT_OK


def cmd_generate(args) -> int:
    t0 = time.perf_counter()
    out = Path(args.out)
    if args.kind == "target-ratio":
        if args.ratio is None:
            raise UsageError("--ratio is required for target-ratio")
        spec = GenSpec("target-ratio", ratio=args.ratio, seed=args.seed, cap=args.cap, eps=args.eps or 0.0)
        try:
            P, fat, info = gen_with_target_ratio(args.ratio, args.seed, args.cap, args.eps)
        except CapExceeded as exc:
            _emit(_report("generate", args, {"error": str(exc), "best_ratio": exc.best_ratio}, t0), args)
            return EXIT_NEGATIVE
    elif args.kind == "sphere-hull":
        spec = GenSpec("sphere-hull", n=args.n, seed=args.seed)
        P, fat, info = gen_sphere_hull(args.n, args.seed)
    elif args.kind == "platonic":
        spec = GenSpec("platonic", seed=args.seed)
        P = platonic(args.name)
        fat, info = annulus_at(P, P.centroid), {"name": args.name}
    else:
        spec = GenSpec("prism", seed=args.seed)
        P, poly, h = random_prism(args.seed)
        fat, info = best_center(P), {"height": h, "polygon": poly.tolist()}
    write_off(P, out)
    man = manifest(P, fat, spec, info)
    man_path = out.with_suffix(".json")
    man_path.write_text(json.dumps(man, indent=2))
    _emit(_report("generate", args, {"off": str(out), "manifest": str(man_path), **man}, t0), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fatcast", description="Castability analysis of fat convex polyhedra.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seeded=False):
        sp.add_argument("--compact", action="store_true", help="single-line JSON")
        if seeded:
            sp.add_argument("--seed", type=int, default=None)
            sp.add_argument("--strict", action="store_true", help="require an explicit --seed")

    a = sub.add_parser("analyze", help="fatness, per-facet castability and size bounds")
    a.add_argument("file")
    a.add_argument("--center", default="auto", help="'auto' or x,y,z")
    a.add_argument("--tol", type=float, default=1e-9)
    a.add_argument("--figures", default=None, help="directory for figures")
    common(a)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("cut-search", help="look for a plane cut into two castable halves")
    c.add_argument("file")
    c.add_argument("--budget", type=int, default=2000)
    c.add_argument("--strategies", default="mixed", choices=("mixed",) + STRATEGIES)
    c.add_argument("--offsets", type=int, default=7, help="sweep positions per facet direction")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--figures", default=None)
    common(c, seeded=True)
    c.set_defaults(func=cmd_cut_search)

    b = sub.add_parser("bounds", help="reproduce the case bounds on the fatness ratio")
    b.add_argument("--json", action="store_true", help="JSON report instead of the table")
    b.add_argument("--figures", default=None)
    common(b)
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("generate", help="write a test polyhedron as OFF plus a JSON manifest")
    g.add_argument("--kind", default="target-ratio", choices=("target-ratio", "sphere-hull", "platonic", "prism"))
    g.add_argument("--ratio", type=float, default=None)
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--name", default="cube")
    g.add_argument("--cap", type=int, default=800)
    g.add_argument("--eps", type=float, default=None)
    g.add_argument("--out", required=True)
    common(g, seeded=True)
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if hasattr(args, "seed"):
            if args.seed is None:
                if args.strict:
                    raise UsageError("--strict requires an explicit --seed")
                args.seed = 0
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fatcast: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OFFParseError as exc:
        print(f"fatcast: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidPolyhedron, DegenerateInput, CenterOutside, PerturbationFailed) as exc:
        print(f"fatcast: invalid geometry: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
