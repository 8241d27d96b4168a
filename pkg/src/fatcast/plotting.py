"""Figures written next to the CLI's text output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import bounds as _bounds  # noqa: E402
from .geometry import plane_basis  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}


def _save(fig, path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def plot_negz_bound(path, cases=None) -> str:
    """R needed at each cut height z0 < 0, for both cap-volume forms, with the case constants."""
    cases = _bounds.all_cases() if cases is None else cases
    z = np.linspace(-1.0, 0.0, 801)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for variant, style in (("integral", "-"), ("printed", "--")):
            ax.plot(z, _bounds.negz_root(z, variant), style, label=f"volume relation ({variant})")
        ax.plot(z, np.sqrt(1 + z ** 2), ":", color="k", label="slice diameter >= 2")
        levels: dict[float, list[str]] = {}
        for b in cases:
            levels.setdefault(round(b.root, 9), []).append(b.case)
        for root, names in levels.items():
            ax.axhline(root, lw=0.6, color="0.5")
            ax.text(-0.99, root, f" {', '.join(names)}: {root:.9f}", va="bottom", fontsize=7)
        ax.set_xlabel("cut height $z_0$")
        ax.set_ylabel("lower bound on $R$")
        ax.set_ylim(0.98, 1.3)
        ax.legend(loc="lower right")
        return _save(fig, path)


def plot_cut_face(verdict, path, title: str = "") -> str:
    """Mutual face of a cut, marked edges thin, unmarked edges thick."""
    cut = verdict.cut
    nC = cut.p1.normals[cut.base1]
    u, w = plane_basis(nC)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        for e in verdict.marking.edges:
            xs = [e.a @ u, e.b @ u]
            ys = [e.a @ w, e.b @ w]
            if e.marked:
                ax.plot(xs, ys, color="tab:blue", lw=1.0)
            else:
                ax.plot(xs, ys, color="tab:red", lw=3.0)
        ax.set_aspect("equal")
        ax.set_title(title or f"unmarked edges: {verdict.marking.unmarked_count}")
        return _save(fig, path)


def plot_normal_map(P, verdicts, path) -> str:
    """Facet normals in longitude/latitude, castable ones highlighted."""
    n = np.asarray(P.normals)
    lon = np.degrees(np.arctan2(n[:, 1], n[:, 0]))
    lat = np.degrees(np.arcsin(np.clip(n[:, 2], -1, 1)))
    ok = np.array([v.castable_weak for v in verdicts], dtype=bool)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.scatter(lon[~ok], lat[~ok], s=8, color="0.6", label="not castable")
        if ok.any():
            ax.scatter(lon[ok], lat[ok], s=20, color="tab:green", label="castable")
        ax.set_xlabel("longitude [deg]")
        ax.set_ylabel("latitude [deg]")
        ax.set_xlim(-180, 180)
        ax.set_ylim(-90, 90)
        ax.legend(loc="lower left")
        return _save(fig, path)


def plot_unmarked_histogram(hist: dict, path) -> str:
    keys = sorted(int(k) for k in hist)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        ax.bar(keys, [hist[k] for k in keys], color="tab:gray")
        ax.set_xlabel("unmarked edges on the cut face")
        ax.set_ylabel("cuts")
        ax.set_xticks(keys)
        return _save(fig, path)
