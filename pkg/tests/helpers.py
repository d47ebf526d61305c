"""Shared independent oracles: analytic barrier formulas and FD operators.

Everything here is deliberately written without touching the library's own
evaluation paths, so tests compare two genuinely different routes.
"""

from __future__ import annotations

import numpy as np

from triscatter import geometry as geo


def square_barrier_coefficients(height: float, width: float, k: float):
    """Closed-form s, r for a rectangular barrier centred at the origin.

    Matches plane waves across both interfaces of v = height on
    (-width/2, width/2) using 2x2 analytic transfer matrices; valid for
    tunnelling (k^2 < height) through complex kappa.
    """
    a = width / 2.0
    kappa = np.sqrt(complex(k * k - height))

    def interface(x, k_out, k_in):
        # Continuity of value and derivative at x for exponentials
        # c_out+ e^{i k_out x} + c_out- e^{-i k_out x} = c_in+ e^{i k_in x} + ...
        m_out = np.array([
            [np.exp(1j * k_out * x), np.exp(-1j * k_out * x)],
            [1j * k_out * np.exp(1j * k_out * x), -1j * k_out * np.exp(-1j * k_out * x)],
        ])
        m_in = np.array([
            [np.exp(1j * k_in * x), np.exp(-1j * k_in * x)],
            [1j * k_in * np.exp(1j * k_in * x), -1j * k_in * np.exp(-1j * k_in * x)],
        ])
        return np.linalg.solve(m_out, m_in)

    # Left coefficients (1, r) -> inside -> right coefficients (s, 0).
    t_left = interface(-a, k, kappa)    # maps inside coeffs to left coeffs
    t_right = interface(a, kappa, k)    # maps right coeffs to inside coeffs
    total = t_left @ t_right            # maps (s, 0) to (1, r)
    s = 1.0 / total[0, 0]
    r = total[1, 0] * s
    return complex(s), complex(r)


class SquareBarrier:
    """Potential object for the solver: constant ``height`` on (-w, w)."""

    def __init__(self, height: float, width: float):
        self.height = float(height)
        self.support_halfwidth = width / 2.0
        self.amplitude = float(height)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < self.support_halfwidth, self.height, 0.0)


def vsum_chart(potential, xy):
    """Sum of the three screen potentials at chart points."""
    t = geo.chart_inverse(np.asarray(xy, dtype=float))
    return potential(t[..., 0]) + potential(t[..., 1]) + potential(t[..., 2])


def schroedinger_residual_5pt(f, potential, energy, xy, h=1e-3):
    """(-Lap + sum_j v(x_j) - E) f by the 5-point Laplacian stencil."""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    offs = np.array([[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    vals = np.stack([f(xy + o) for o in offs])
    lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / (h * h)
    return -lap + (vsum_chart(potential, xy) - energy) * vals[0]


def schroedinger_residual_4th(f, potential, energy, xy, h=2e-3):
    """Same operator with a 4th-order separable Laplacian (tighter oracle)."""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    coef = np.array([-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0])
    acc = 0.0
    for axis in range(2):
        for c, off in zip(coef, (-2, -1, 0, 1, 2)):
            d = np.zeros(2)
            d[axis] = off * h
            acc = acc + c * f(xy + d)
    return -(acc / (h * h)) + (vsum_chart(potential, xy) - energy) * f(xy)


def sample_annulus(rng, n, r_lo, r_hi, accept=None):
    """Uniform-in-angle, uniform-in-radius samples with an accept filter."""
    out = []
    while len(out) < n:
        r = rng.uniform(r_lo, r_hi)
        th = rng.uniform(-np.pi, np.pi)
        xy = np.array([r * np.cos(th), r * np.sin(th)])
        if accept is None or accept(xy, r, th):
            out.append(xy)
    return np.array(out)
