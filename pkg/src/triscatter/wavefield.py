"""Ray-plus-diffraction approximation of the scattered plane wave.

The field is assembled in three layers:

1.  Ray field.  The six rays of the incident wavevector's reflection orbit
    cut the plane into six sectors; in each one the field is a finite sum
    of one-screen channel waves chi_j(x, p) = chi(x_j, k_j) e^{i p_j y_j}
    weighted by products of pair transmission/reflection coefficients.
    The result solves the full equation exactly away from the two cyclic
    rotations of the incident vector, across which it jumps by a plane
    wave with computable amplitudes.

2.  Diffraction windows.  In an angular window around each jump ray the
    discontinuous plane-wave component is replaced by a smooth Fresnel
    half-plane solution e^{i<qa, x>} Phi(alpha), blended in by a smoothstep
    bump in the polar angle.

3.  Radial cutoff.  A smoothstep in |x| zeroes the field near the origin
    (where the three pair supports overlap) and leaves it untouched beyond
    the outer cutoff radius.

The discrepancy of the final field under H - E is known in closed form:
it is supported on the cutoff annulus plus the rising/falling flanks of
the angular windows and decays like |x|^(-5/2); it feeds the right-hand
side of the finite element correction problem.

Sector formulas are written for wavevectors whose components have the
sign pattern (+, -, +).  A general wavevector is mapped onto that pattern
by a unique element of the reflection group and all evaluations route
through the conjugated frame; the public jump amplitudes and window
directions refer to the caller's wavevector throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import fresnel as _scipy_fresnel

from . import geometry as geo
from .pair1d import PairPotential, PairScattering, chi_eval_with_derivative, solve_pair

_SQRT3 = np.sqrt(3.0)
#: e^{-i pi/4} / sqrt(pi): normalisation making the full Fresnel integral 1.
_C_FRESNEL = np.exp(-0.25j * np.pi) / np.sqrt(np.pi)


# ---------------------------------------------------------------------------
# Fresnel smoothed step
# ---------------------------------------------------------------------------

def fresnel_step(alpha):
    """Phi(alpha) = e^{-i pi/4}/sqrt(pi) * int_{-inf}^{alpha} e^{i t^2} dt.

    A smoothed unit step: Phi(-inf) = 0, Phi(0) = 1/2, Phi(+inf) = 1, and
    Phi(alpha) + Phi(-alpha) = 1.  e^{i<x,d>} Phi of the half-plane phase
    argument solves the Helmholtz equation exactly.
    """
    alpha = np.asarray(alpha, dtype=float)
    ssin, ccos = _scipy_fresnel(alpha * np.sqrt(2.0 / np.pi))
    f0 = np.sqrt(np.pi / 2.0) * (ccos + 1j * ssin)  # int_0^alpha e^{it^2} dt
    out = 0.5 + _C_FRESNEL * f0
    return out if out.ndim else complex(out)


def fresnel_remainder(alpha):
    """rho(alpha) = Phi(alpha) - H(alpha) - e^{-i pi/4}/sqrt(pi) e^{i a^2}/(2 i a).

    H is the unit step.  For alpha > 0 this is the O(alpha^-3) remainder of
    the large-argument expansion of Phi; the extension to alpha < 0 is
    rho(alpha) = -rho(-alpha), which is exactly the combination entering
    the angular-gradient term of the window discrepancy.  Undefined at 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    step = (alpha > 0).astype(float)
    out = fresnel_step(alpha) - step - _C_FRESNEL * np.exp(1j * alpha**2) / (2j * alpha)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# Smoothstep cutoffs
# ---------------------------------------------------------------------------

def smoothstep(z):
    """z^3 (10 - 15 z + 6 z^2) clamped to [0, 1]; C^2 with flat ends."""
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    out = z**3 * (10.0 - 15.0 * z + 6.0 * z * z)
    return out if out.ndim else float(out)


def _smoothstep_d1(z):
    z = np.asarray(z, dtype=float)
    inside = (z > 0.0) & (z < 1.0)
    out = np.zeros_like(z)
    zi = z[inside]
    out[inside] = 30.0 * zi**2 * (1.0 - zi) ** 2
    return out


def _smoothstep_d2(z):
    z = np.asarray(z, dtype=float)
    inside = (z > 0.0) & (z < 1.0)
    out = np.zeros_like(z)
    zi = z[inside]
    out[inside] = 60.0 * zi - 180.0 * zi**2 + 120.0 * zi**3
    return out


def _radial_cutoff(r, r1, r2, orders=2):
    """Smoothstep in radius: (zeta, zeta', zeta'') with hard 0/1 tails."""
    r = np.asarray(r, dtype=float)
    if r2 <= 0.0:  # cutoff disabled
        zero = np.zeros_like(r)
        return np.ones_like(r), zero, zero
    dr = r2 - r1
    z = (r - r1) / dr
    val = smoothstep(z)
    if orders == 0:
        return val, None, None
    return val, _smoothstep_d1(z) / dr, _smoothstep_d2(z) / (dr * dr)


def _window_bump(delta, d_in, d_out):
    """Angular plateau bump and derivatives w.r.t. the offset angle.

    0 outside |delta| >= d_out, 1 on |delta| <= d_in, smoothstep flanks.
    """
    delta = np.asarray(delta, dtype=float)
    a = np.abs(delta)
    width = d_out - d_in
    z = (d_out - a) / width
    val = smoothstep(z)
    sgn = np.where(delta >= 0.0, 1.0, -1.0)
    d1 = _smoothstep_d1(z) * (-sgn) / width
    d2 = _smoothstep_d2(z) / (width * width)
    return val, d1, d2


# ---------------------------------------------------------------------------
# Field model
# ---------------------------------------------------------------------------

_CANONICAL_SIGNS = np.array([1.0, -1.0, 1.0])

#: Oriented direction contained in each sector of the canonical frame.
_SECTOR_ANCHORS = {
    "K1+": (0.0, -1.0, 1.0),
    "K1-": (0.0, 1.0, -1.0),
    "K2+": (1.0, 0.0, -1.0),
    "K2-": (-1.0, 0.0, 1.0),
    "K3+": (-1.0, 1.0, 0.0),
    "K3-": (1.0, -1.0, 0.0),
}


def _canonical_element(q) -> str:
    """Group element g with sign pattern of g(q) equal to (+, -, +)."""
    matches = [
        name for name in geo.GROUP
        if np.all(np.sign(geo.apply_group(name, q)) == _CANONICAL_SIGNS)
    ]
    if len(matches) != 1:
        raise geo.DegenerateFanError(
            f"wavevector {q} has no unique canonical representative (components too close to a screen?)"
        )
    return matches[0]


@dataclass(frozen=True)
class _Window:
    """One diffraction window: jump ray direction, bump, and side amplitudes."""

    qa: np.ndarray          # jump-ray wavevector (canonical triple)
    center: float           # chart angle of qa in the canonical frame
    amp_lo: complex         # plane-wave amplitude carried on the clockwise side
    amp_hi: complex         # amplitude on the counterclockwise side


@dataclass
class FieldModel:
    """Explicit approximate scattered plane wave and its closed-form discrepancy.

    Parameters
    ----------
    potential : PairPotential
        Even, non-negative, compactly supported pair potential.
    q : array-like, shape (3,)
        Incident wavevector as a zero-sum triple with no vanishing
        component; the energy is E = |q|^2.
    r1, r2 : float
        Radial cutoff: the field vanishes for |x| <= r1 and carries no
        radial taper beyond r2.  ``r1 = r2 = 0`` disables the cutoff and is
        permitted only for the free system.
    delta_in, delta_out : float
        Angular window half-widths (radians) around the two jump rays.
    """

    potential: PairPotential
    q: np.ndarray
    r1: float = 4.0
    r2: float = 14.5
    delta_in: float = np.deg2rad(8.0)
    delta_out: float = np.deg2rad(16.0)
    pair_tol: float = 1e-12
    fan: geo.SectorFan = field(init=False, repr=False)
    _sigma: str = field(init=False)

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.E = geo.inner(self.q, self.q)
        self.k = float(np.sqrt(self.E))
        if np.any(self.q == 0.0):
            raise geo.DegenerateFanError("wavevector lies on a screen line")
        self.fan = geo.build_fan(self.q, self.delta_in, self.delta_out)

        self._sigma = _canonical_element(self.q)
        self._qc = geo.apply_group(self._sigma, self.q)
        self._fan_c = geo.build_fan(self._qc, self.delta_in, self.delta_out)

        # Pair scattering data per distinct |component| of q.
        b = self.potential.support_halfwidth
        self._pair: dict[float, PairScattering] = {}
        for a in np.abs(self._qc):
            key = round(float(a), 12)
            if key not in self._pair:
                self._pair[key] = solve_pair(self.potential, float(a), tol=self.pair_tol)

        s = [self._coef(self._qc[m]).s for m in range(3)]
        r = [self._coef(self._qc[m]).r for m in range(3)]
        self.jump_amp_1 = r[0] * s[1] * r[2]
        self.jump_amp_2 = r[2] * r[1] * s[0] + s[2] * r[1] * r[0]

        self._validate_cutoff()
        self._build_sector_tables(s, r)
        self._build_windows()

    # -- construction helpers ------------------------------------------------

    def _coef(self, k_component: float) -> PairScattering:
        return self._pair[round(abs(float(k_component)), 12)]

    def _validate_cutoff(self):
        b2 = self.potential.support_halfwidth
        free = getattr(self.potential, "amplitude", 1.0) == 0.0
        if self.r2 == 0.0 and self.r1 == 0.0:
            if not free:
                raise ValueError("radial cutoff can be disabled only for the free system")
            return
        if not 0.0 < self.r1 < self.r2:
            raise ValueError("need 0 < r1 < r2")
        if self.r1 < 2.0 * b2:
            raise ValueError("r1 must exceed the pairwise overlap radius of the supports")
        # Every ray must clear every screen strip beyond r1.
        vecs = np.array([geo.apply_group(n, self._qc) for n in geo.GROUP])
        unit = vecs / np.array([geo.norm(v) for v in vecs])[:, None]
        clearance = self.r1 * np.min(np.abs(unit))
        if clearance <= b2:
            raise ValueError(
                f"r1={self.r1} leaves a sector ray inside a potential strip "
                f"(clearance {clearance:.3f} <= {b2})"
            )

    def _build_sector_tables(self, s, r):
        qc = self._qc
        t1, t2, t3 = (geo.apply_group(f"tau{j}", qc) for j in (1, 2, 3))
        c1, c2 = geo.apply_group("cyc1", qc), geo.apply_group("cyc2", qc)
        formulas = {
            "K1+": [(1, qc, s[1] * s[2])],
            "K1-": [(1, qc, 1.0), (1, t2, r[1] * s[0]), (1, c1, r[1] * r[0]), (1, t3, r[2])],
            "K2+": [(2, qc, s[0]), (2, t3, s[1] * r[2])],
            "K2-": [(2, qc, s[2]), (2, t1, s[1] * r[0])],
            "K3+": [(3, qc, 1.0), (3, t2, r[1] * s[2]), (3, c2, r[1] * r[2]), (3, t1, r[0])],
            "K3-": [(3, qc, s[0] * s[1])],
        }
        self._sector_formula = [None] * 6
        self._sector_name = [None] * 6
        for name, terms in formulas.items():
            anchor = np.array(_SECTOR_ANCHORS[name])
            idx = int(self._fan_c.sector_of(geo.polar_angle(anchor)))
            if self._sector_formula[idx] is not None:
                raise geo.DegenerateFanError("sector anchors collide; fan is degenerate")
            terms_resolved = [
                (j, p, complex(coef), self._coef(p[j - 1])) for (j, p, coef) in terms
            ]
            self._sector_formula[idx] = terms_resolved
            self._sector_name[idx] = name

    def _build_windows(self):
        c1, c2 = geo.anomalous_rays(self._qc)
        self._windows = (
            _Window(qa=c1, center=geo.polar_angle(c1), amp_lo=self.jump_amp_1, amp_hi=self.jump_amp_2),
            _Window(qa=c2, center=geo.polar_angle(c2), amp_lo=self.jump_amp_2, amp_hi=self.jump_amp_1),
        )
        # The derived side pairing: jump ray 1 separates K2+ (cw) from K1- (ccw),
        # jump ray 2 separates K3+ from K2-.  Guard against silent relabeling.
        eps = 1e-9
        expect = {0: ("K2+", "K1-"), 1: ("K3+", "K2-")}
        for w, win in enumerate(self._windows):
            lo = self._sector_name[int(self._fan_c.sector_of(win.center - eps))]
            hi = self._sector_name[int(self._fan_c.sector_of(win.center + eps))]
            if (lo, hi) != expect[w]:
                raise geo.DegenerateFanError(
                    f"window {w} sides are {(lo, hi)}, expected {expect[w]}"
                )

    # -- coordinate plumbing ---------------------------------------------------

    def _canonical_points(self, x) -> np.ndarray:
        """Map caller points (triples or chart pairs) into the canonical frame."""
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[-1] == 2:
            x = geo.chart_inverse(x)
        elif x.shape[-1] != 3:
            raise ValueError("points must be (N, 2) chart pairs or (N, 3) triples")
        return geo.apply_group(self._sigma, x), squeeze

    @property
    def anomalous_directions(self):
        """Jump-ray wavevectors in the caller's frame (cyclic rotations of q)."""
        return geo.anomalous_rays(self.q)

    def window_amplitudes(self, which: int):
        """(clockwise, counterclockwise) jump amplitudes of window ``which``
        in the caller's frame; the jump of the ray field across the window's
        ray equals e^{i<qa, x>} (cw - ccw)."""
        # Reflections reverse orientation, swapping the two windows and sides.
        if geo.GROUP[self._sigma][1] < 0:
            win = self._windows[1 - which]
            return win.amp_hi, win.amp_lo
        win = self._windows[which]
        return win.amp_lo, win.amp_hi

    # -- channel waves ----------------------------------------------------------

    def channel_wave(self, j: int, sigma_q, x, derivative: bool = False):
        """One-screen solution chi_j(x, p) = chi(x_j, k_j) e^{i p_j y_j}.

        ``sigma_q`` must have |j-th component| equal to one of |q|'s
        components (pair data is tabulated per distinct |k|).  With
        ``derivative=True`` also returns the radial derivative d/d|x|.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[-1] == 2:
            x = geo.chart_inverse(x)
        p = np.asarray(sigma_q, dtype=float)
        ps = self._coef(p[j - 1])
        val, dr = _channel_terms(ps, j, p, x, derivative)
        return (val, dr) if derivative else val

    # -- field evaluators -------------------------------------------------------

    def ray_field(self, x):
        """Piecewise sector field; exact solution away from the two jump rays."""
        y, squeeze = self._canonical_points(x)
        out = self._ray_canonical(y)
        return complex(out[0]) if squeeze else out

    def ray_field_on_side(self, x, sector: dict | int):
        """Evaluate one sector's formula regardless of position (one-sided limits).

        ``sector`` is a canonical-frame sector index or a name like 'K2+'.
        """
        y, squeeze = self._canonical_points(x)
        if isinstance(sector, str):
            sector = self._sector_name.index(sector)
        out = self._sector_sum(int(sector), y)
        return complex(out[0]) if squeeze else out

    def ray_field_sides_at(self, which: int, x):
        """One-sided limits (clockwise, counterclockwise) of the ray field
        across anomalous ray ``which`` (0 or 1, caller's frame) at points x."""
        y, squeeze = self._canonical_points(x)
        reflected = geo.GROUP[self._sigma][1] < 0
        wi = (1 - which) if reflected else which
        lo_name, hi_name = (("K2+", "K1-"), ("K3+", "K2-"))[wi]
        lo = self._sector_sum(self._sector_name.index(lo_name), y)
        hi = self._sector_sum(self._sector_name.index(hi_name), y)
        cw, ccw = (hi, lo) if reflected else (lo, hi)
        if squeeze:
            return complex(cw[0]), complex(ccw[0])
        return cw, ccw

    def corrected_field_sides_at(self, which: int, x):
        """One-sided limits of the corrected field across anomalous ray ``which``."""
        y, squeeze = self._canonical_points(x)
        reflected = geo.GROUP[self._sigma][1] < 0
        wi = (1 - which) if reflected else which
        win = self._windows[wi]
        lo_name, hi_name = (("K2+", "K1-"), ("K3+", "K2-"))[wi]
        lo = self._sector_sum(self._sector_name.index(lo_name), y)
        hi = self._sector_sum(self._sector_name.index(hi_name), y)

        r = np.sqrt(np.maximum(0.0, (2.0 / 3.0) * np.sum(y * y, axis=-1)))
        _, delta, _ = self._window_geometry(y, win)
        zeta2, _, _ = _window_bump(delta, self.delta_in, self.delta_out)
        u = (2.0 / 3.0) * (y @ win.qa)
        phase = np.exp(1j * u)
        alpha1 = -np.sqrt(2.0 * self.k * r) * np.sin(0.5 * delta)
        phi1 = fresnel_step(alpha1)
        phi2 = fresnel_step(-alpha1)
        corr_lo = zeta2 * phase * (win.amp_lo * (phi1 - 1.0) + win.amp_hi * phi2)
        corr_hi = zeta2 * phase * (win.amp_lo * phi1 + win.amp_hi * (phi2 - 1.0))
        cw, ccw = ((hi + corr_hi, lo + corr_lo) if reflected else (lo + corr_lo, hi + corr_hi))
        if squeeze:
            return complex(cw[0]), complex(ccw[0])
        return cw, ccw

    def corrected_field(self, x):
        """Ray field with the Fresnel diffraction blend in both windows."""
        y, squeeze = self._canonical_points(x)
        out = self._ray_canonical(y)
        out += self._window_correction(y)[0]
        return complex(out[0]) if squeeze else out

    def cutoff_field(self, x):
        """Corrected field tapered to zero inside the cutoff radius (the ansatz)."""
        y, squeeze = self._canonical_points(x)
        r = np.sqrt(np.maximum(0.0, (2.0 / 3.0) * np.sum(y * y, axis=-1)))
        out = np.zeros(len(y), dtype=complex)
        live = r > self.r1 if self.r2 > 0.0 else np.ones(len(y), bool)
        if np.any(live):
            zeta, _, _ = _radial_cutoff(r[live], self.r1, self.r2)
            vals = self._ray_canonical(y[live]) + self._window_correction(y[live])[0]
            out[live] = zeta * vals
        return complex(out[0]) if squeeze else out

    def discrepancy(self, x):
        """Closed-form (H - E) applied to the cutoff field.

        Zero for |x| <= r1 and, beyond r2, outside the window flanks; the
        remainder combines the angular-bump terms (with exact Fresnel
        derivatives) and the radial-cutoff terms.
        """
        y, squeeze = self._canonical_points(x)
        r = np.sqrt(np.maximum(0.0, (2.0 / 3.0) * np.sum(y * y, axis=-1)))
        out = np.zeros(len(y), dtype=complex)
        live = r > self.r1 if self.r2 > 0.0 else np.ones(len(y), bool)
        if not np.any(live):
            return complex(out[0]) if squeeze else out
        yl, rl = y[live], r[live]

        q_window = self._window_source(yl, rl)
        zeta, dz, ddz = _radial_cutoff(rl, self.r1, self.r2)
        total = zeta * q_window
        band = dz != 0.0
        if np.any(band):
            yb, rb = yl[band], rl[band]
            psi0 = self._ray_canonical(yb) + self._window_correction(yb)[0]
            dpsi0 = self._ray_radial_deriv(yb) + self._window_radial_deriv(yb)
            total[band] -= 2.0 * dz[band] * dpsi0 + psi0 * (ddz[band] + dz[band] / rb)
        out[live] = total
        return complex(out[0]) if squeeze else out

    # -- canonical-frame internals ----------------------------------------------

    def _angles(self, y):
        return np.arctan2((y[:, 1] - y[:, 2]) / _SQRT3, y[:, 0])

    def _ray_canonical(self, y):
        out = np.zeros(len(y), dtype=complex)
        sec = self._fan_c.sector_of(self._angles(y))
        for i in range(6):
            m = sec == i
            if np.any(m):
                out[m] = self._sector_sum(i, y[m])
        return out

    def _sector_sum(self, i: int, y):
        out = np.zeros(len(y), dtype=complex)
        for j, p, coef, ps in self._sector_formula[i]:
            out += coef * _channel_terms(ps, j, p, y, False)[0]
        return out

    def _ray_radial_deriv(self, y):
        out = np.zeros(len(y), dtype=complex)
        sec = self._fan_c.sector_of(self._angles(y))
        for i in range(6):
            m = sec == i
            if not np.any(m):
                continue
            acc = np.zeros(m.sum(), dtype=complex)
            for j, p, coef, ps in self._sector_formula[i]:
                acc += coef * _channel_terms(ps, j, p, y[m], True)[1]
            out[m] = acc
        return out

    def _window_geometry(self, y, win: _Window):
        """Offsets, phases and Fresnel arguments for points near one window."""
        omega = self._angles(y)
        delta = np.mod(omega - win.center + np.pi, 2.0 * np.pi) - np.pi
        m = np.abs(delta) < self.delta_out
        return omega, delta, m

    def _window_correction(self, y):
        """zeta2 * e^{iu} [A_lo (Phi_1 - theta_lo) + A_hi (Phi_2 - theta_hi)]."""
        out = np.zeros(len(y), dtype=complex)
        touched = np.zeros(len(y), dtype=bool)
        r = np.sqrt(np.maximum(0.0, (2.0 / 3.0) * np.sum(y * y, axis=-1)))
        for win in self._windows:
            _, delta, m = self._window_geometry(y, win)
            if not np.any(m):
                continue
            d = delta[m]
            zeta2, _, _ = _window_bump(d, self.delta_in, self.delta_out)
            u = (2.0 / 3.0) * (y[m] @ win.qa)
            alpha1 = -np.sqrt(2.0 * self.k * r[m]) * np.sin(0.5 * d)
            theta_lo = (d < 0.0).astype(float)
            phase = np.exp(1j * u)
            corr = win.amp_lo * (fresnel_step(alpha1) - theta_lo)
            corr += win.amp_hi * (fresnel_step(-alpha1) - (1.0 - theta_lo))
            out[m] += zeta2 * phase * corr
            touched[m] = True
        return out, touched

    def _window_radial_deriv(self, y):
        out = np.zeros(len(y), dtype=complex)
        r = np.sqrt(np.maximum(0.0, (2.0 / 3.0) * np.sum(y * y, axis=-1)))
        for win in self._windows:
            _, delta, m = self._window_geometry(y, win)
            if not np.any(m):
                continue
            d = delta[m]
            rm = r[m]
            zeta2, _, _ = _window_bump(d, self.delta_in, self.delta_out)
            u = (2.0 / 3.0) * (y[m] @ win.qa)
            alpha1 = -np.sqrt(2.0 * self.k * rm) * np.sin(0.5 * d)
            theta_lo = (d < 0.0).astype(float)
            phase = np.exp(1j * u)
            gauss1 = _C_FRESNEL * np.exp(1j * alpha1**2)
            val = win.amp_lo * (fresnel_step(alpha1) - theta_lo)
            val += win.amp_hi * (fresnel_step(-alpha1) - (1.0 - theta_lo))
            dval = 1j * (u / rm) * val
            # d(alpha)/dr = alpha / (2r); the two arguments are opposite.
            dval += (win.amp_lo - win.amp_hi) * gauss1 * alpha1 / (2.0 * rm)
            out[m] += zeta2 * phase * dval
        return out

    def _window_source(self, y, r):
        """Window part of the discrepancy of the corrected field.

        Per window and side:  amp * e^{iu} [ -(zeta2''/r^2)(Phi - theta)
        - (2 zeta2'/r) i <qa, w> rho(alpha) ] plus the potential pickup
        (sum_m v(x_m)) zeta2 e^{iu} (Phi - theta) inside the strips.
        """
        out = np.zeros(len(y), dtype=complex)
        vsum = None
        for win in self._windows:
            _, delta, m = self._window_geometry(y, win)
            if not np.any(m):
                continue
            d = delta[m]
            rm = r[m]
            ym = y[m]
            zeta2, dz2, ddz2 = _window_bump(d, self.delta_in, self.delta_out)
            u = (2.0 / 3.0) * (ym @ win.qa)
            phase = np.exp(1j * u)
            alpha1 = -np.sqrt(2.0 * self.k * rm) * np.sin(0.5 * d)
            theta_lo = (d < 0.0).astype(float)
            g_lo = fresnel_step(alpha1) - theta_lo
            g_hi = fresnel_step(-alpha1) - (1.0 - theta_lo)
            g_tot = win.amp_lo * g_lo + win.amp_hi * g_hi

            src = -(ddz2 / rm**2) * g_tot
            flank = dz2 != 0.0
            if np.any(flank):
                qa_dot_w = -self.k * np.sin(d[flank])
                rho_lo = fresnel_remainder(alpha1[flank])
                rho_hi = -rho_lo  # rho is odd
                grad = win.amp_lo * rho_lo + win.amp_hi * rho_hi
                src[flank] -= (2.0 * dz2[flank] / rm[flank]) * 1j * qa_dot_w * grad
            src *= phase

            active = zeta2 > 0.0
            if np.any(active):
                if vsum is None:
                    vsum = (self.potential(y[:, 0]) + self.potential(y[:, 1])
                            + self.potential(y[:, 2]))
                vm = vsum[m][active]
                src[active] += vm * zeta2[active] * phase[active] * g_tot[active]
            out[m] += src
        return out


def _channel_terms(ps: PairScattering, j: int, p, y, derivative: bool):
    """chi(x_j, k_j) e^{i p_j y_j} (and its radial derivative) at triples y."""
    i = j - 1
    i1, i2 = (i + 1) % 3, (i + 2) % 3
    xj = y[:, i]
    yj = (y[:, i1] - y[:, i2]) / _SQRT3
    kj = float(p[i])
    pj = float((p[i1] - p[i2]) / _SQRT3)
    phase = np.exp(1j * pj * yj)
    chi, dchi = chi_eval_with_derivative(ps, xj, kj)
    val = chi * phase
    if not derivative:
        return val, None
    r = np.sqrt(xj * xj + yj * yj)
    dr = (dchi * xj / r + 1j * pj * chi * yj / r) * phase
    return val, dr
