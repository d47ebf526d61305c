"""Command-line orchestration: pair tables, field dumps, mesh, solve, diagnostics.

Stages run in dependency order and are idempotent per configuration hash:
every artifact carries the hash in its header, and a stage whose artifact
already matches the current hash is reused rather than recomputed.  Data
files contain no timestamps, so reruns are byte-identical.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import geometry as geo
from .config import ConfigInvalidError, RunConfig, load_config
from .diagnostics import run_diagnostics
from .fem import NonConvergenceError, assemble, problem_from_solution, solve
from .mesh import (
    MeshQualityError,
    build_mesh,
    estimate_p2_dofs,
    read_mesh,
    size_field,
    strip_window_tagger,
    write_mesh,
)
from .pair1d import bump_potential, solve_pair
from .wavefield import FieldModel

STAGES = ("pair", "field", "mesh", "solve", "diagnose", "describe", "all")


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header_cols, rows, cfg_hash: str):
    lines = [f"# config={cfg_hash}", ",".join(header_cols)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _artifact_matches(path: Path, cfg_hash: str) -> bool:
    if not path.exists():
        return False
    with open(path) as f:
        first = f.readline().strip()
    return first == f"# config={cfg_hash}"


class Runner:
    def __init__(self, config: RunConfig, out_dir: Path):
        self.cfg = config.validate()
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.hash = self.cfg.hash()
        self.timings: dict[str, float] = {}
        self._model = None
        self._mesh = None
        self._problem = None

    # -- lazily built shared objects ---------------------------------------

    def model(self) -> FieldModel:
        if self._model is None:
            cfg = self.cfg
            self._model = FieldModel(
                bump_potential(cfg.amplitude, cfg.support_halfwidth),
                cfg.q_triple(),
                r1=cfg.r1, r2=cfg.r2,
                delta_in=np.deg2rad(cfg.delta_in_deg),
                delta_out=np.deg2rad(cfg.delta_out_deg),
            )
        return self._model

    # -- stages --------------------------------------------------------------

    def stage_pair(self):
        t0 = time.perf_counter()
        cfg = self.cfg
        path = self.out / "pair_table.csv"
        if _artifact_matches(path, self.hash):
            return path
        ks = cfg.pair_k_list() or sorted({round(abs(c), 12) for c in cfg.q_triple()})
        pot = bump_potential(cfg.amplitude, cfg.support_halfwidth)
        rows = []
        for k in ks:
            ps = solve_pair(pot, k)
            rows.append([k, ps.s.real, ps.s.imag, ps.r.real, ps.r.imag, ps.unitarity_defect()])
        _write_csv(path, ["k", "re_s", "im_s", "re_r", "im_r", "unitarity_defect"], rows, self.hash)
        self.timings["pair"] = time.perf_counter() - t0
        return path

    def stage_field(self):
        t0 = time.perf_counter()
        cfg = self.cfg
        path = self.out / "field_grid.csv"
        if _artifact_matches(path, self.hash):
            return path
        model = self.model()
        extent = cfg.grid_extent or cfg.mesh_R
        axis = np.linspace(-extent, extent, cfg.grid_n)
        gx, gy = np.meshgrid(axis, axis)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        psi1 = model.cutoff_field(pts)
        psir = model.ray_field(pts)
        q = model.discrepancy(pts)
        rows = np.column_stack([
            pts[:, 0], pts[:, 1], psi1.real, psi1.imag, psir.real, psir.imag, q.real, q.imag,
        ])
        _write_csv(path, ["x", "y", "re_psi1", "im_psi1", "re_psiR", "im_psiR", "re_Q", "im_Q"],
                   rows, self.hash)
        self.timings["field"] = time.perf_counter() - t0
        return path

    def stage_mesh(self):
        t0 = time.perf_counter()
        cfg = self.cfg
        path = self.out / "mesh.txt"
        fresh = self._mesh is None
        if fresh:
            if _artifact_matches(path, self.hash):
                self._mesh = read_mesh(path)
            else:
                model = self.model()
                centers = [geo.polar_angle(d) for d in model.anomalous_directions]
                sw = cfg.support_halfwidth + cfg.mesh_h
                sz = size_field(cfg.mesh_R, cfg.mesh_h, strip_halfwidth=sw,
                                strip_factor=cfg.strip_refine, window_centers=centers,
                                window_halfangle=model.delta_out,
                                window_factor=cfg.window_refine)
                self._mesh = build_mesh(
                    cfg.mesh_R, cfg.mesh_h, size=sz, min_angle_deg=cfg.min_angle_deg,
                    seed=cfg.mesh_seed,
                    region_tagger=strip_window_tagger(sw, centers, model.delta_out))
                write_mesh(self._mesh, path, header=f"config={self.hash}")
        if fresh:
            self.timings["mesh"] = time.perf_counter() - t0
        return path

    def stage_solve(self):
        t0 = time.perf_counter()
        cfg = self.cfg
        path = self.out / "xi.csv"
        self.stage_mesh()
        mesh = self._mesh
        fresh = self._problem is None
        if fresh:
            if _artifact_matches(path, self.hash):
                data = np.genfromtxt(path, delimiter=",", skip_header=2)
                sol = data[:, 3] + 1j * data[:, 4]
                self._problem = problem_from_solution(mesh, cfg.E, cfg.bc, sol)
            else:
                problem = assemble(mesh, self.model(), bc=cfg.bc)
                solve(problem, direct_threshold=cfg.direct_dof_threshold,
                      tol=cfg.solver_tol, maxiter=cfg.solver_maxiter)
                self._problem = problem
                rows = np.column_stack([
                    np.arange(len(mesh.nodes)), mesh.nodes[:, 0], mesh.nodes[:, 1],
                    problem.solution.real, problem.solution.imag,
                ])
                _write_csv(path, ["node", "x", "y", "re_xi", "im_xi"], rows, self.hash)
        if fresh:
            self.timings["solve"] = time.perf_counter() - t0
        return path

    def stage_diagnose(self):
        cfg = self.cfg
        self.stage_solve()
        t0 = time.perf_counter()
        report = run_diagnostics(
            self.model(), self._problem, cfg.probe_radii_list(), cfg.profile_radius,
            n_samples=cfg.profile_samples, with_symmetry=True)
        _write_csv(self.out / "norms.csv", ["r", "N", "M"],
                   np.column_stack([report.radii, report.n_values, report.m_values]), self.hash)
        _write_csv(self.out / "profile.csv", ["theta", "abs_xi"],
                   np.column_stack([report.profile_theta, report.profile_abs]), self.hash)
        _write_csv(self.out / "amplitude.csv", ["theta", "re_g", "im_g"],
                   np.column_stack([report.profile_theta, report.amplitude.real,
                                    report.amplitude.imag]), self.hash)
        self.timings["diagnose"] = time.perf_counter() - t0
        self._report = report
        return report

    def describe_text(self) -> str:
        cfg = self.cfg
        model = self.model()
        fan = model.fan
        lines = [f"config hash: {self.hash}", f"q = {tuple(model.q)}  E = {model.E!r}"]
        lines.append("rays (deg): " + ", ".join(
            f"{name}:{np.rad2deg(a):.3f}" for name, a in zip(fan.ray_names, fan.ray_angles)))
        lines.append("sector labels: " + ", ".join(fan.sector_labels))
        for w in range(2):
            knots = np.rad2deg(fan.window_knots(w))
            lines.append(
                f"window {w}: center {knots[2]:.3f} deg, knots "
                + "/".join(f"{v:.3f}" for v in knots))
        amp_cw, amp_ccw = model.window_amplitudes(0)
        lines.append(f"jump amplitudes (window 0): cw={amp_cw!r} ccw={amp_ccw!r}")
        sw = cfg.support_halfwidth + cfg.mesh_h
        est = estimate_p2_dofs(cfg.mesh_R, cfg.mesh_h, strip_halfwidth=sw,
                               strip_factor=cfg.strip_refine,
                               window_halfangle=np.deg2rad(cfg.delta_out_deg),
                               window_factor=cfg.window_refine)
        lines.append(f"estimated quadratic dofs at R={cfg.mesh_R}, h={cfg.mesh_h}: {est}")
        for k in sorted(model._pair):
            ps = model._pair[k]
            lines.append(f"pair k={k}: s={ps.s!r} r={ps.r!r} defect={ps.unitarity_defect():.2e}")
        return "\n".join(lines) + "\n"

    def stage_describe(self):
        text = self.describe_text()
        (self.out / "describe.txt").write_text(text)
        return text

    def write_summary(self):
        cfg = self.cfg
        lines = [f"config hash: {self.hash}", "", "# configuration", cfg.to_text()]
        centers = ",".join(
            repr(float(np.rad2deg(geo.polar_angle(d))))
            for d in self.model().anomalous_directions
        )
        lines += ["# geometry", f"window_centers_deg = {centers}"]
        if self._mesh is not None:
            m = self._mesh
            lines += ["# mesh",
                      f"vertices = {m.n_vertices}",
                      f"triangles = {m.n_triangles}",
                      f"p2_nodes = {m.n_p2_nodes}",
                      f"min_angle_deg = {m.min_angle_deg!r}",
                      f"edge_lengths = {m.edge_lengths().min()!r} .. {m.edge_lengths().max()!r}"]
        if self._problem is not None and self._problem.residual is not None:
            lines += ["# solve", f"relative_residual = {self._problem.residual!r}"]
        if getattr(self, "_report", None) is not None and self._report.symmetry_defect is not None:
            lines += ["# diagnostics", f"symmetry_defect = {self._report.symmetry_defect!r}"]
        lines += ["# wall times (s)"]
        lines += [f"{k} = {v:.3f}" for k, v in self.timings.items()]
        (self.out / "run_summary.txt").write_text("\n".join(lines) + "\n")

    def run(self, stage: str):
        if stage not in STAGES:
            raise ConfigInvalidError(f"unknown stage {stage!r}")
        if stage == "pair":
            self.stage_pair()
        elif stage == "field":
            self.stage_field()
        elif stage == "mesh":
            self.stage_mesh()
        elif stage == "solve":
            self.stage_solve()
        elif stage == "diagnose":
            self.stage_diagnose()
        elif stage == "describe":
            sys.stdout.write(self.stage_describe())
        else:
            self.stage_describe()
            self.stage_pair()
            self.stage_field()
            self.stage_mesh()
            self.stage_solve()
            self.stage_diagnose()
        self.write_summary()


def run(config: RunConfig, out_dir, stage: str = "all") -> Runner:
    """Programmatic entry point; returns the Runner with cached objects."""
    runner = Runner(config, Path(out_dir))
    runner.run(stage)
    return runner


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="triscatter",
        description="Three-particle 1D scattering workbench: "
                    "ray/diffraction field, discrepancy, FEM correction, diagnostics.",
    )
    parser.add_argument("stage_cmd", nargs="?", choices=STAGES, help="stage to run")
    parser.add_argument("--config", type=Path, default=None, help="key = value config file")
    parser.add_argument("--out", type=Path, default=Path("out"), help="artifact directory")
    parser.add_argument("--stage", choices=STAGES, default=None, help="alternative to the positional stage")
    parser.add_argument("--bc", choices=("plain", "corrected"), default=None,
                        help="override the radiation boundary condition variant")
    parser.add_argument("--threads", type=int, default=None,
                        help="advisory thread count for the linear algebra backend")
    args = parser.parse_args(argv)

    stage = args.stage_cmd or args.stage or "all"
    if args.threads is not None:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))

    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.bc is not None:
            cfg.bc = args.bc
        cfg.validate()
        run(cfg, args.out, stage)
    except ConfigInvalidError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (MeshQualityError, NonConvergenceError, geo.DegenerateFanError,
            FloatingPointError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
