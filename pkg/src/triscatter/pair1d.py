"""1D pair scattering: transmission/reflection coefficients and chi(x, k).

The pair interaction is an even, non-negative potential with compact
support, v(x) = 0 for |x| >= b/2.  For k > 0 the scattering solution is
fixed by its asymptotics

    chi(x, k) ~ s(k) e^{ikx},              x -> +inf,
    chi(x, k) ~ e^{ikx} + r(k) e^{-ikx},   x -> -inf,

and extended to k < 0 by chi(x, k) = chi(-x, -k).  Because the support is
compact, the asymptotic forms are exact outside [-b/2, b/2]; inside, chi is
tabulated densely and interpolated with a cubic Hermite rule built from
(chi, chi').

Non-negative v has no bound states, so the transmission denominator never
vanishes for k > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline


@dataclass(frozen=True)
class PairPotential:
    """Even compactly supported bump, v(x) = A exp(1/((x/w)^2 - 1) + 1) for |x| < w.

    All one-sided derivatives vanish at |x| = w, so v is smooth on the line.
    ``amplitude = 0`` gives the free system.
    """

    amplitude: float = 2.0
    support_halfwidth: float = 0.25

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = self.support_halfwidth
        out = np.zeros_like(x)
        if self.amplitude != 0.0 and w > 0.0:
            inside = np.abs(x) < w
            u = x[inside] / w
            out[inside] = self.amplitude * np.exp(1.0 / (u * u - 1.0) + 1.0)
        return out if out.ndim else float(out)


def bump_potential(amplitude: float = 2.0, support_halfwidth: float = 0.25) -> PairPotential:
    """Default pair potential (max value = ``amplitude`` at the origin)."""
    return PairPotential(amplitude=amplitude, support_halfwidth=support_halfwidth)


@dataclass(frozen=True)
class PairScattering:
    """Scattering data for one wavenumber k > 0 of a single pair.

    Attributes
    ----------
    k : float
        Wavenumber (> 0).
    s, r : complex
        Transmission and reflection coefficients; |s|^2 + |r|^2 = 1.
    support_halfwidth : float
        Half-width b/2 of the potential support.
    chi : CubicHermiteSpline
        Interpolant of chi(x, k) on [-b/2, b/2] (complex), built from the
        integrated values and first derivatives.
    """

    k: float
    s: complex
    r: complex
    support_halfwidth: float
    chi: CubicHermiteSpline = field(repr=False)
    chi_x: CubicHermiteSpline = field(repr=False)
    free: bool = False

    def unitarity_defect(self) -> float:
        return abs(abs(self.s) ** 2 + abs(self.r) ** 2 - 1.0)


def solve_pair(potential, k: float, tol: float = 1e-12, n_table: int = 4096) -> PairScattering:
    """Integrate -chi'' + v chi = k^2 chi across the support and match.

    Starts from chi = e^{ikx} at x = +b/2, integrates backward to -b/2,
    matches onto A e^{ikx} + B e^{-ikx} and rescales so the incoming wave
    has unit amplitude: s = 1/A, r = B/A.

    Parameters
    ----------
    potential : callable with ``support_halfwidth`` attribute
        Even potential; evaluated pointwise during integration.
    k : float
        Wavenumber, must be > 0.
    tol : float
        Local error tolerance of the adaptive integrator.
    n_table : int
        Number of interior samples kept for interpolation (>= 2000 gives
        interpolation error far below 1e-8 for smooth bumps).
    """
    if k <= 0.0:
        raise ValueError(f"solve_pair requires k > 0, got {k}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    w = float(potential.support_halfwidth)

    amplitude = getattr(potential, "amplitude", None)
    if w == 0.0 or amplitude == 0.0:
        xs = np.linspace(-max(w, 0.25), max(w, 0.25), 9)
        vals = np.exp(1j * k * xs)
        chi = CubicHermiteSpline(xs, vals, 1j * k * vals)
        return PairScattering(
            k=k, s=1.0 + 0.0j, r=0.0j, support_halfwidth=w,
            chi=chi, chi_x=chi.derivative(), free=True,
        )

    def rhs(x, y):
        chi, dchi = y[0] + 1j * y[1], y[2] + 1j * y[3]
        d2 = (potential(x) - k * k) * chi
        return [dchi.real, dchi.imag, d2.real, d2.imag]

    y0 = np.array([np.cos(k * w), np.sin(k * w), -k * np.sin(k * w), k * np.cos(k * w)])
    xs = np.linspace(w, -w, n_table + 1)
    sol = solve_ivp(rhs, (w, -w), y0, method="DOP853", rtol=tol, atol=tol, t_eval=xs, dense_output=False)
    if not sol.success:
        raise RuntimeError(f"pair ODE integration failed: {sol.message}")

    chi_raw = sol.y[0] + 1j * sol.y[1]
    dchi_raw = sol.y[2] + 1j * sol.y[3]

    # Match chi_raw = A e^{ikx} + B e^{-ikx} at x = -b/2.
    e_m = np.exp(-1j * k * w)
    chi_l, dchi_l = chi_raw[-1], dchi_raw[-1]
    a_coef = 0.5 * (chi_l + dchi_l / (1j * k)) / e_m
    b_coef = 0.5 * (chi_l - dchi_l / (1j * k)) * e_m
    if abs(a_coef) < 1e-12:
        # Cannot happen for v >= 0 (no bound states); indicates a solver bug.
        raise RuntimeError("transmission denominator vanished; integration is inconsistent")

    s = 1.0 / a_coef
    r = b_coef / a_coef

    order = np.argsort(xs)
    xs_s = xs[order]
    chi_s = chi_raw[order] * s
    dchi_s = dchi_raw[order] * s
    chi = CubicHermiteSpline(xs_s, chi_s, dchi_s)
    return PairScattering(k=k, s=complex(s), r=complex(r), support_halfwidth=w, chi=chi, chi_x=chi.derivative())


def _eval_positive_k(ps: PairScattering, x: np.ndarray, deriv: bool):
    """chi(x, k) for the tabulated k > 0; exact exponentials off the support."""
    w = ps.support_halfwidth
    k = ps.k
    if ps.free:
        val = np.exp(1j * k * x)
        return val, (1j * k * val if deriv else None)
    val = np.empty(x.shape, dtype=complex)
    dval = np.empty(x.shape, dtype=complex) if deriv else None

    right = x >= w
    left = x <= -w
    mid = ~(right | left)

    er = np.exp(1j * k * x[right])
    val[right] = ps.s * er
    el_p = np.exp(1j * k * x[left])
    el_m = np.exp(-1j * k * x[left])
    val[left] = el_p + ps.r * el_m
    if np.any(mid):
        val[mid] = ps.chi(x[mid])
    if deriv:
        dval[right] = 1j * k * ps.s * er
        dval[left] = 1j * k * (el_p - ps.r * el_m)
        if np.any(mid):
            dval[mid] = ps.chi_x(x[mid])
    return val, dval


def chi_eval(ps: PairScattering, x, k_signed: float):
    """Evaluate chi(x, k_signed) where ps holds the data for |k_signed|.

    The even potential gives the extension chi(x, -k) = chi(-x, k).
    """
    if abs(abs(k_signed) - ps.k) > 1e-9 * max(1.0, ps.k):
        raise ValueError(f"pair data tabulated for k={ps.k}, asked for |{k_signed}|")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if k_signed >= 0:
        val, _ = _eval_positive_k(ps, x, deriv=False)
    else:
        val, _ = _eval_positive_k(ps, -x, deriv=False)
    return val if val.size > 1 else complex(val[0])


def chi_eval_with_derivative(ps: PairScattering, x, k_signed: float):
    """chi and d(chi)/dx for signed k; d/dx chi(-x, k) = -chi'(-x, k)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if k_signed >= 0:
        val, dval = _eval_positive_k(ps, x, deriv=True)
    else:
        val, dval = _eval_positive_k(ps, -x, deriv=True)
        dval = -dval
    return val, dval
