"""Synthetic dump-set fixture mimicking the documented artifact formats."""

import numpy as np
import pytest

HASH = "deadbeef0123"


def _csv(path, header, rows, cfg_hash=HASH):
    lines = [f"# config={cfg_hash}", ",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def make_dumpset(root, cfg_hash=HASH, q_blob_outside=False):
    """Write a small, geometry-faithful artifact directory."""
    root.mkdir(parents=True, exist_ok=True)
    r1, r2, mesh_r = 3.0, 6.0, 10.0
    centers_deg = (150.0, -30.0)
    d_out = 16.0

    n = 61
    axis = np.linspace(-mesh_r, mesh_r, n)
    gx, gy = np.meshgrid(axis, axis)
    r = np.hypot(gx, gy)
    th = np.arctan2(gy, gx)

    in_annulus = (r > r1) & (r < r2)
    in_wedge = np.zeros_like(in_annulus)
    for c in np.deg2rad(centers_deg):
        off = np.abs((th - c + np.pi) % (2 * np.pi) - np.pi)
        in_wedge |= (off < np.deg2rad(d_out)) & (off > np.deg2rad(8.0)) & (r > r1)
    q = np.where(in_annulus | in_wedge, np.cos(2 * r) * np.exp(-0.05 * r), 0.0)
    if q_blob_outside:
        blob = (np.hypot(gx - 8.0, gy - 3.0) < 1.0)
        q = q + np.where(blob, 1.0, 0.0)
    psi = np.exp(1j * (1.0 * gx + np.sqrt(3.0) * gy))
    rows = np.column_stack([
        gx.ravel(), gy.ravel(),
        psi.real.ravel(), psi.imag.ravel(),
        psi.real.ravel(), psi.imag.ravel(),
        q.ravel(), 0.3 * q.ravel(),
    ])
    _csv(root / "field_grid.csv",
         ["x", "y", "re_psi1", "im_psi1", "re_psiR", "im_psiR", "re_Q", "im_Q"],
         rows, cfg_hash)

    rng = np.random.default_rng(0)
    n_nodes = 800
    rr = mesh_r * np.sqrt(rng.random(n_nodes))
    tt = rng.uniform(-np.pi, np.pi, n_nodes)
    nodes = np.column_stack([rr * np.cos(tt), rr * np.sin(tt)])
    xi = np.exp(2j * rr) / np.sqrt(np.maximum(rr, 0.5))
    _csv(root / "xi.csv", ["node", "x", "y", "re_xi", "im_xi"],
         np.column_stack([np.arange(n_nodes), nodes, xi.real, xi.imag]), cfg_hash)

    radii = np.array([7.0, 8.0, 9.0])
    _csv(root / "norms.csv", ["r", "N", "M"],
         np.column_stack([radii, 2 * np.pi * np.ones(3), 1e-3 * np.ones(3)]), cfg_hash)

    th_p = np.linspace(-np.pi, np.pi, 240, endpoint=False)
    prof = 0.01 + 0.2 * np.exp(-0.5 * ((np.rad2deg(th_p) - 150.0) / 5.0) ** 2) \
        + 0.15 * np.exp(-0.5 * ((np.rad2deg(th_p) + 30.0) / 5.0) ** 2)
    _csv(root / "profile.csv", ["theta", "abs_xi"],
         np.column_stack([th_p, prof]), cfg_hash)

    summary = "\n".join([
        f"config hash: {cfg_hash}",
        "",
        "# configuration",
        "r1 = 3.0",
        "r2 = 6.0",
        "mesh_R = 10.0",
        "delta_out_deg = 16.0",
        "delta_in_deg = 8.0",
        "# geometry",
        f"window_centers_deg = {centers_deg[0]},{centers_deg[1]}",
    ])
    (root / "run_summary.txt").write_text(summary + "\n")
    return root


@pytest.fixture()
def dump_dir(tmp_path):
    return make_dumpset(tmp_path / "dumps")
