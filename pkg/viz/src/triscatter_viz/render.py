"""Deterministic figure rendering from a loaded dump set.

Four figure types mirror the standard presentation of a run: real-part
maps of the discrepancy and of the computed correction, the boundary
integral curves N(r), M(r), and the angular profile |xi(theta)| with the
diffraction windows marked.  Rendering is a pure function of the dumps:
fixed sizes, colour scales from data quantiles, no timestamps, and the
configuration hash stamped in the footer.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np

from .loader import DumpSet, MissingDumpError, discrepancy_support_stats

FIGURES = ("q-map", "xi-map", "norms", "profile")
_DPI = 150
_PNG_META = {"Software": None}  # strip the library/version text chunk


def _footer(fig, dumps: DumpSet, extra: str = ""):
    text = f"config {dumps.config_hash}"
    if extra:
        text += f"  |  {extra}"
    fig.text(0.01, 0.005, text, fontsize=6, color="0.4")


def _symmetric_scale(values: np.ndarray) -> float:
    finite = np.abs(values[np.isfinite(values)])
    if not len(finite):
        return 1.0
    s = float(np.quantile(finite, 0.995))
    return s if s > 0 else float(np.max(finite)) or 1.0


def _window_outlines(ax, dumps: DumpSet, r_max: float):
    r1, _ = dumps.cutoffs
    for c in dumps.window_centers_rad:
        for sgn in (-1.0, 1.0):
            a = c + sgn * dumps.window_halfangle_rad
            ax.plot([r1 * np.cos(a), r_max * np.cos(a)],
                    [r1 * np.sin(a), r_max * np.sin(a)],
                    color="0.25", lw=0.6, ls=":")


def render_q_map(dumps: DumpSet, out_dir: Path) -> Path:
    r = np.hypot(dumps.grid_x, dumps.grid_y)
    re_q = np.where(r <= dumps.disk_radius, dumps.discrepancy.real, np.nan)
    scale = _symmetric_scale(dumps.discrepancy.real[r <= dumps.disk_radius])
    fig, ax = plt.subplots(figsize=(6.4, 5.6), dpi=_DPI)
    pm = ax.pcolormesh(dumps.grid_x, dumps.grid_y, re_q, cmap="RdBu_r",
                       vmin=-scale, vmax=scale, shading="nearest")
    fig.colorbar(pm, ax=ax, label="Re Q")
    _window_outlines(ax, dumps, np.max(r))
    for radius in dumps.cutoffs:
        ax.add_patch(plt.Circle((0, 0), radius, fill=False, color="0.25", lw=0.6, ls="--"))
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("discrepancy source (real part)")
    stats = discrepancy_support_stats(dumps)
    _footer(fig, dumps, f"significant |Q| outside annulus+wedges: "
                        f"{100 * stats['fraction_outside']:.2f}%")
    path = out_dir / "q_map.png"
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_xi_map(dumps: DumpSet, out_dir: Path) -> Path:
    tri = mtri.Triangulation(dumps.xi_nodes[:, 0], dumps.xi_nodes[:, 1])
    scale = _symmetric_scale(dumps.xi_values.real)
    fig, ax = plt.subplots(figsize=(6.4, 5.6), dpi=_DPI)
    pm = ax.tripcolor(tri, dumps.xi_values.real, cmap="RdBu_r",
                      vmin=-scale, vmax=scale, shading="gouraud")
    fig.colorbar(pm, ax=ax, label="Re xi")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("correction field (real part)")
    _footer(fig, dumps)
    path = out_dir / "xi_map.png"
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_norms(dumps: DumpSet, out_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=_DPI)
    ax.plot(dumps.norm_radii, dumps.norm_n, "o-", color="tab:blue",
            label="N(r) = int |xi|^2 ds")
    ax.plot(dumps.norm_radii, dumps.norm_m, "s-", color="tab:orange",
            label="M(r) = int |(d/dr - i sqrt(E)) xi|^2 ds")
    ax.set_yscale("log")
    ax.set_xlabel("r")
    ax.set_ylabel("boundary integral")
    ax.set_title("radiation-condition audit")
    ax.grid(True, ls=":", lw=0.6, alpha=0.6)
    ax.legend(fontsize=8)
    _footer(fig, dumps)
    path = out_dir / "norms.png"
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_profile(dumps: DumpSet, out_dir: Path) -> Path:
    th_deg = np.rad2deg(dumps.profile_theta)
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=_DPI)
    ax.plot(th_deg, dumps.profile_abs, color="tab:blue", lw=1.0)
    half = np.rad2deg(dumps.window_halfangle_rad)
    for c in np.rad2deg(dumps.window_centers_rad):
        c = (c + 180.0) % 360.0 - 180.0
        ax.axvspan(c - half, c + half, color="tab:orange", alpha=0.18, lw=0)
        ax.axvline(c, color="tab:orange", lw=0.7, ls="--")
    ax.set_xlabel("theta (deg)")
    ax.set_ylabel("|xi(theta)|")
    ax.set_title("angular profile on the probe circle (windows shaded)")
    ax.grid(True, ls=":", lw=0.6, alpha=0.6)
    _footer(fig, dumps)
    path = out_dir / "profile.png"
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


_RENDERERS = {
    "q-map": render_q_map,
    "xi-map": render_xi_map,
    "norms": render_norms,
    "profile": render_profile,
}


def render(dumps: DumpSet, which: str, out_dir) -> list[Path]:
    """Render one figure type or 'all'; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if which == "all":
        return [_RENDERERS[name](dumps, out) for name in FIGURES]
    if which not in _RENDERERS:
        raise MissingDumpError(f"unknown figure type {which!r}; choose from {FIGURES + ('all',)}")
    return [_RENDERERS[which](dumps, out)]
