"""Run configuration: flat key = value text files, validation, hashing.

The format is deliberately primitive (one ``key = value`` per line, ``#``
comments), which keeps configs diff-friendly and lets every artifact embed
a stable hash of the exact numerical setup that produced it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

import numpy as np


class ConfigInvalidError(ValueError):
    """A configuration violates one of its invariants."""


@dataclass
class RunConfig:
    # pair potential
    amplitude: float = 2.0
    support_halfwidth: float = 0.25
    # incident wave (frame-1 Jacobi components) and energy
    k1: float = 1.0
    p1: float = float(np.sqrt(3.0))
    E: float = 4.0
    # ansatz cutoffs and windows
    r1: float = 4.0
    r2: float = 10.0
    delta_in_deg: float = 8.0
    delta_out_deg: float = 16.0
    # mesh
    mesh_R: float = 25.0
    mesh_h: float = 0.25
    strip_refine: float = 1.5
    window_refine: float = 1.25
    min_angle_deg: float = 20.0
    mesh_seed: int = 0
    # solver
    bc: str = "plain"
    direct_dof_threshold: int = 400_000
    solver_tol: float = 1e-8
    solver_maxiter: int = 2000
    # outputs
    pair_k_values: str = ""
    probe_radii: str = "18,19,20,21,22,23,24"
    profile_radius: float = 20.0
    profile_samples: int = 720
    grid_n: int = 241
    grid_extent: float = 0.0  # 0 -> mesh_R

    def q_triple(self):
        from .geometry import jacobi_inverse

        return jacobi_inverse(self.k1, self.p1, 1)

    def validate(self) -> "RunConfig":
        if abs(self.k1**2 + self.p1**2 - self.E) > 1e-10 * max(1.0, self.E):
            raise ConfigInvalidError(
                f"k1^2 + p1^2 = {self.k1**2 + self.p1**2!r} must equal E = {self.E!r}"
            )
        if self.E <= 0:
            raise ConfigInvalidError("E must be positive")
        free = self.amplitude == 0.0
        if self.r1 == 0.0 and self.r2 == 0.0:
            if not free:
                raise ConfigInvalidError("r1 = r2 = 0 (no cutoff) requires amplitude = 0")
        elif not (0.0 < self.r1 < self.r2 < self.mesh_R):
            raise ConfigInvalidError(
                f"need r1 < r2 < mesh_R, got {self.r1!r}, {self.r2!r}, {self.mesh_R!r}"
            )
        if not (0.0 < self.delta_in_deg < self.delta_out_deg):
            raise ConfigInvalidError("need 0 < delta_in_deg < delta_out_deg")
        if self.mesh_h <= 0 or self.mesh_h >= self.mesh_R:
            raise ConfigInvalidError("need 0 < mesh_h < mesh_R")
        if self.bc not in ("plain", "corrected"):
            raise ConfigInvalidError("bc must be 'plain' or 'corrected'")
        if self.support_halfwidth <= 0:
            raise ConfigInvalidError("support_halfwidth must be positive")
        return self

    def probe_radii_list(self):
        vals = [float(v) for v in self.probe_radii.split(",") if v.strip()]
        if any(v >= self.mesh_R for v in vals):
            raise ConfigInvalidError("probe radii must be < mesh_R")
        return vals

    def pair_k_list(self):
        return [float(v) for v in self.pair_k_values.split(",") if v.strip()]

    def to_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)!r}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:12]


def load_config(path) -> RunConfig:
    """Parse a flat key = value file into a validated RunConfig."""
    raw: dict[str, str] = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalidError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value

    known = {f.name: f.type for f in fields(RunConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigInvalidError(f"unknown config key {key!r}")
        kind = known[key]
        try:
            if kind == "int":
                kwargs[key] = int(value)
            elif kind == "float":
                kwargs[key] = float(value.strip("'\""))
            else:
                kwargs[key] = value.strip("'\"")
        except ValueError as exc:
            raise ConfigInvalidError(f"bad value for {key!r}: {value!r}") from exc
    return RunConfig(**kwargs).validate()
