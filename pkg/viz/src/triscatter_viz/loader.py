"""Load and validate a directory of triscatter CSV artifacts.

The renderer depends only on the documented file formats: CSV dumps whose
first line is ``# config=<hash>`` and the ``run_summary.txt`` key/value
echo.  All files of one dump set must carry the same configuration hash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class MissingDumpError(FileNotFoundError):
    """A required artifact is absent or inconsistent."""


def _read_csv(path: Path):
    if not path.exists():
        raise MissingDumpError(f"missing artifact: {path}")
    with open(path) as f:
        first = f.readline().strip()
    if not first.startswith("# config="):
        raise MissingDumpError(f"{path} lacks the config-hash header")
    data = np.genfromtxt(path, delimiter=",", skip_header=2)
    return first.removeprefix("# config="), np.atleast_2d(data)


@dataclass
class DumpSet:
    """One run's artifacts, validated to share a single config hash."""

    config_hash: str
    grid_x: np.ndarray = field(repr=False)
    grid_y: np.ndarray = field(repr=False)
    psi1: np.ndarray = field(repr=False)
    psi_ray: np.ndarray = field(repr=False)
    discrepancy: np.ndarray = field(repr=False)
    xi_nodes: np.ndarray = field(repr=False)
    xi_values: np.ndarray = field(repr=False)
    norm_radii: np.ndarray = field(repr=False)
    norm_n: np.ndarray = field(repr=False)
    norm_m: np.ndarray = field(repr=False)
    profile_theta: np.ndarray = field(repr=False)
    profile_abs: np.ndarray = field(repr=False)
    summary: dict = field(repr=False)

    @property
    def window_centers_rad(self) -> np.ndarray:
        degs = [float(v) for v in self.summary["window_centers_deg"].split(",")]
        return np.deg2rad(degs)

    @property
    def window_halfangle_rad(self) -> float:
        return np.deg2rad(float(self.summary["delta_out_deg"]))

    @property
    def cutoffs(self) -> tuple[float, float]:
        return float(self.summary["r1"]), float(self.summary["r2"])

    @property
    def disk_radius(self) -> float:
        return float(self.summary["mesh_R"])


def _parse_summary(path: Path) -> tuple[str, dict]:
    if not path.exists():
        raise MissingDumpError(f"missing artifact: {path}")
    summary: dict[str, str] = {}
    cfg_hash = None
    for line in path.read_text().splitlines():
        line = line.strip()
        if line.startswith("config hash:"):
            cfg_hash = line.split(":", 1)[1].strip()
        elif "=" in line and not line.startswith("#"):
            key, value = (s.strip() for s in line.split("=", 1))
            summary[key] = value.strip("'\"")
    if cfg_hash is None:
        raise MissingDumpError(f"{path} lacks a 'config hash:' line")
    return cfg_hash, summary


def load_dumps(directory) -> DumpSet:
    d = Path(directory)
    h_grid, grid = _read_csv(d / "field_grid.csv")
    h_xi, xi = _read_csv(d / "xi.csv")
    h_n, norms = _read_csv(d / "norms.csv")
    h_p, prof = _read_csv(d / "profile.csv")
    h_sum, summary = _parse_summary(d / "run_summary.txt")

    hashes = {h_grid, h_xi, h_n, h_p, h_sum}
    if len(hashes) != 1:
        raise MissingDumpError(f"artifacts mix configuration hashes: {sorted(hashes)}")

    n = int(round(np.sqrt(len(grid))))
    if n * n != len(grid):
        raise MissingDumpError("field grid is not a complete square lattice")

    def sq(col):
        return grid[:, col].reshape(n, n)

    return DumpSet(
        config_hash=h_grid,
        grid_x=sq(0), grid_y=sq(1),
        psi1=sq(2) + 1j * sq(3),
        psi_ray=sq(4) + 1j * sq(5),
        discrepancy=sq(6) + 1j * sq(7),
        xi_nodes=xi[:, 1:3], xi_values=xi[:, 3] + 1j * xi[:, 4],
        norm_radii=norms[:, 0], norm_n=norms[:, 1], norm_m=norms[:, 2],
        profile_theta=prof[:, 0], profile_abs=prof[:, 1],
        summary=summary,
    )


def discrepancy_support_stats(dumps: DumpSet, significance: float = 1e-3) -> dict:
    """Where does significant |Q| live, relative to the expected geometry?

    Expected support: the radial cutoff annulus r1 <= r <= r2 plus the two
    angular wedges of half-angle delta_out around the anomalous rays.
    Returns the fraction of significant samples falling outside it.
    """
    q = np.abs(dumps.discrepancy)
    thr = significance * np.max(q)
    r = np.hypot(dumps.grid_x, dumps.grid_y)
    th = np.arctan2(dumps.grid_y, dumps.grid_x)
    r1, r2 = dumps.cutoffs
    pad_r = 1.5 * float(dumps.grid_x[0, 1] - dumps.grid_x[0, 0])
    in_annulus = (r >= r1 - pad_r) & (r <= r2 + pad_r)
    in_wedge = np.zeros_like(in_annulus)
    pad_th = np.arctan2(pad_r, np.maximum(r, 1.0))
    for c in dumps.window_centers_rad:
        off = np.abs((th - c + np.pi) % (2 * np.pi) - np.pi)
        in_wedge |= off <= dumps.window_halfangle_rad + pad_th
    significant = q > thr
    expected = in_annulus | (in_wedge & (r >= r1 - pad_r))
    n_sig = int(np.sum(significant))
    outside = int(np.sum(significant & ~expected))
    return {
        "n_significant": n_sig,
        "n_outside": outside,
        "fraction_outside": outside / n_sig if n_sig else 0.0,
    }
