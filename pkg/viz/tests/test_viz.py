"""Loader validation, rendering determinism, support analysis, CLI."""

import numpy as np
import pytest

from triscatter_viz import (
    MissingDumpError,
    discrepancy_support_stats,
    load_dumps,
    render,
)
from triscatter_viz.cli import main

from conftest import make_dumpset


def test_load_dumps(dump_dir):
    dumps = load_dumps(dump_dir)
    assert dumps.config_hash == "deadbeef0123"
    assert dumps.grid_x.shape == dumps.discrepancy.shape
    assert dumps.cutoffs == (3.0, 6.0)
    assert dumps.disk_radius == 10.0
    assert len(dumps.window_centers_rad) == 2


def test_missing_artifact_raises(dump_dir):
    (dump_dir / "norms.csv").unlink()
    with pytest.raises(MissingDumpError):
        load_dumps(dump_dir)


def test_hash_mismatch_raises(tmp_path):
    root = make_dumpset(tmp_path / "dumps")
    text = (root / "profile.csv").read_text().splitlines()
    text[0] = "# config=othercafe9999"
    (root / "profile.csv").write_text("\n".join(text) + "\n")
    with pytest.raises(MissingDumpError):
        load_dumps(root)


def test_render_all_produces_four_figures(dump_dir, tmp_path):
    dumps = load_dumps(dump_dir)
    paths = render(dumps, "all", tmp_path / "figs")
    assert len(paths) == 4
    names = {p.name for p in paths}
    assert names == {"q_map.png", "xi_map.png", "norms.png", "profile.png"}
    for p in paths:
        assert p.stat().st_size > 10_000  # non-trivial raster content


def test_render_is_deterministic(dump_dir, tmp_path):
    dumps = load_dumps(dump_dir)
    a = render(dumps, "all", tmp_path / "a")
    b = render(dumps, "all", tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes(), f"{pa.name} not deterministic"


def test_render_single_figure(dump_dir, tmp_path):
    dumps = load_dumps(dump_dir)
    paths = render(dumps, "norms", tmp_path / "figs")
    assert [p.name for p in paths] == ["norms.png"]
    with pytest.raises(MissingDumpError):
        render(dumps, "bogus", tmp_path / "figs")


def test_support_stats_clean_geometry(dump_dir):
    dumps = load_dumps(dump_dir)
    stats = discrepancy_support_stats(dumps)
    assert stats["n_significant"] > 50
    assert stats["fraction_outside"] == 0.0


def test_support_stats_flags_stray_mass(tmp_path):
    root = make_dumpset(tmp_path / "dumps", q_blob_outside=True)
    stats = discrepancy_support_stats(load_dumps(root))
    assert stats["fraction_outside"] > 0.01


def test_profile_peaks_inside_windows(dump_dir):
    dumps = load_dumps(dump_dir)
    prof = dumps.profile_abs
    th = dumps.profile_theta
    top = np.argsort(prof)[-2:]
    for i in top:
        offs = np.abs((th[i] - dumps.window_centers_rad + np.pi) % (2 * np.pi) - np.pi)
        assert np.min(offs) < dumps.window_halfangle_rad


def test_cli(dump_dir, tmp_path, capsys):
    out = tmp_path / "figs"
    assert main(["--in", str(dump_dir), "--out", str(out), "--which", "all"]) == 0
    assert len(list(out.glob("*.png"))) == 4
    assert main(["--in", str(tmp_path / "nope"), "--out", str(out)]) == 1
