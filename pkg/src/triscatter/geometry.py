"""Geometry of the zero-sum configuration plane.

Points and wavevectors are stored as triples (x1, x2, x3) with
x1 + x2 + x3 = 0.  The scalar product is

    <x, x'> = (2/3) (x1 x1' + x2 x2' + x3 x3'),

and for each pair index j the Jacobi frame is the orthonormal chart

    x_j = j-th component,   y_j = (x_{j+1} - x_{j+2}) / sqrt(3)   (cyclic),

so that <x, x> = x_j^2 + y_j^2 in every frame.  The line l_j = {x_j = 0}
is where pair j interacts (the "screen" of the diffraction analogy); the
reflection about l_j negates all components and swaps the two components
other than j.  Frame 1 serves as the global Cartesian chart for angles,
meshing and plotting.

A wavevector q away from all screens generates six rays (its orbit under
the reflection group); the six sectors between consecutive rays each
contain exactly one of the directions +-l_j and are the pieces on which
the ray field is assembled.  The two cyclic rotations of q are the
directions where that field is discontinuous; diffraction corrections act
in angular windows around them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQRT3 = np.sqrt(3.0)

#: Group elements as (name, permutation, sign): g(x)_i = sign * x[perm[i]].
#: tau_j reflects about l_j; cyc1/cyc2 are the two rotations.
GROUP = {
    "id": ((0, 1, 2), 1.0),
    "tau1": ((0, 2, 1), -1.0),
    "tau2": ((2, 1, 0), -1.0),
    "tau3": ((1, 0, 2), -1.0),
    "cyc1": ((2, 0, 1), 1.0),  # x -> (x3, x1, x2) = tau2 tau3 = tau3 tau1 = tau1 tau2
    "cyc2": ((1, 2, 0), 1.0),  # x -> (x2, x3, x1) = tau2 tau1 = tau1 tau3 = tau3 tau2
}


class DegenerateFanError(ValueError):
    """Raised when q is too close to a sector boundary to define the six-ray fan."""


def triple(x1: float, x2: float, x3: float, tol: float = 1e-12) -> np.ndarray:
    """Build a zero-sum triple, validating the constraint."""
    t = np.array([x1, x2, x3], dtype=float)
    scale = max(1.0, float(np.max(np.abs(t))))
    if abs(t.sum()) > tol * scale:
        raise ValueError(f"components must sum to zero, got sum={t.sum()!r}")
    return t


def inner(a, b) -> float:
    """Scalar product (2/3) sum_j a_j b_j on the zero-sum plane."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (2.0 / 3.0) * float(np.dot(a, b))


def norm(a) -> float:
    return float(np.sqrt(inner(a, a)))


def jacobi(x, j: int):
    """Jacobi components (x_j, y_j) of a triple in frame j (1-based).

    y_j = (x_{j+1} - x_{j+2}) / sqrt(3); on l_j, y_j increases with x_{j+1}.
    """
    x = np.asarray(x, dtype=float)
    if j not in (1, 2, 3):
        raise ValueError("frame index must be 1, 2 or 3")
    i = j - 1
    return float(x[i]), float((x[(i + 1) % 3] - x[(i + 2) % 3]) / _SQRT3)


def jacobi_inverse(xj: float, yj: float, j: int = 1) -> np.ndarray:
    """Triple with Jacobi components (xj, yj) in frame j."""
    if j not in (1, 2, 3):
        raise ValueError("frame index must be 1, 2 or 3")
    t = np.empty(3)
    i = j - 1
    t[i] = xj
    t[(i + 1) % 3] = 0.5 * (-xj + _SQRT3 * yj)
    t[(i + 2) % 3] = 0.5 * (-xj - _SQRT3 * yj)
    return t


def apply_group(name: str, x):
    """Apply a group element to a triple or an (N, 3) array of triples."""
    perm, sign = GROUP[name]
    x = np.asarray(x, dtype=float)
    return sign * x[..., perm]


def reflect(x, j: int):
    """Reflection about the screen line l_j (an isometry fixing l_j pointwise)."""
    if j not in (1, 2, 3):
        raise ValueError("mirror index must be 1, 2 or 3")
    return apply_group(f"tau{j}", x)


def anomalous_rays(q):
    """The two cyclic rotations of q: the directions carrying the ray-field jump."""
    return apply_group("cyc1", q), apply_group("cyc2", q)


def chart(x):
    """Frame-1 Cartesian coordinates of triples; accepts (3,) or (N, 3)."""
    x = np.asarray(x, dtype=float)
    return np.stack([x[..., 0], (x[..., 1] - x[..., 2]) / _SQRT3], axis=-1)


def chart_inverse(xy):
    """Triples for frame-1 Cartesian points; accepts (2,) or (N, 2)."""
    xy = np.asarray(xy, dtype=float)
    x1 = xy[..., 0]
    y1 = xy[..., 1]
    return np.stack([x1, 0.5 * (-x1 + _SQRT3 * y1), 0.5 * (-x1 - _SQRT3 * y1)], axis=-1)


def polar_angle(x) -> float:
    """Polar angle of a triple's direction in the frame-1 chart, in (-pi, pi]."""
    c = chart(x)
    return float(np.arctan2(c[..., 1], c[..., 0]))


#: Chart angles of the oriented screen directions +l_j (y_j increasing).
SCREEN_DIRECTION_ANGLE = {1: np.pi / 2, 2: 7 * np.pi / 6, 3: -np.pi / 6}


def _wrap(a):
    """Wrap angles to (-pi, pi]."""
    return np.mod(np.asarray(a) + np.pi, 2 * np.pi) - np.pi


@dataclass(frozen=True)
class SectorFan:
    """Six rays of the orbit of q, the sectors between them, and the jump windows.

    Attributes
    ----------
    q : np.ndarray
        The base wavevector (zero-sum triple).
    ray_angles : np.ndarray, shape (6,)
        Chart angles of the rays, sorted ascending in (-pi, pi].
    ray_names : tuple of str
        Group element generating each ray, aligned with ``ray_angles``.
    sector_labels : tuple of str
        For sector i (between ray i and ray i+1): the contained screen
        direction, one of '+l1', '-l1', ..., '-l3'.
    window_centers : np.ndarray, shape (2,)
        Chart angles of the two anomalous rays (cyclic rotations of q).
    delta_in, delta_out : float
        Window half-angles (radians): the correction bump rises on
        (outer, inner), is 1 within +-delta_in, and falls symmetrically.
    """

    q: np.ndarray
    ray_angles: np.ndarray
    ray_names: tuple
    sector_labels: tuple
    window_centers: np.ndarray
    delta_in: float
    delta_out: float

    def window_knots(self, which: int) -> np.ndarray:
        """Angles (w1, w2, w_center, w3, w4) of window ``which`` (0 or 1)."""
        c = self.window_centers[which]
        return np.array([c - self.delta_out, c - self.delta_in, c, c + self.delta_in, c + self.delta_out])

    def sector_of(self, angles):
        """Sector index for chart angles; boundary angles go counterclockwise."""
        a = _wrap(angles)
        idx = np.searchsorted(self.ray_angles, a, side="right") - 1
        return np.mod(idx, 6)


def build_fan(q, delta_in: float = np.deg2rad(8.0), delta_out: float = np.deg2rad(16.0),
              tol: float = 1e-9) -> SectorFan:
    """Construct the six-ray fan of q with jump windows around its rotations.

    Raises
    ------
    DegenerateFanError
        If q lies on a screen line (coincident rays), if a sector fails to
        contain exactly one +-l_j, or if a window does not fit strictly
        inside the two sectors adjacent to its anomalous ray.
    """
    q = np.asarray(q, dtype=float)
    if not (0.0 < delta_in < delta_out):
        raise ValueError("window offsets must satisfy 0 < delta_in < delta_out")

    names = list(GROUP.keys())
    vecs = np.array([apply_group(n, q) for n in names])
    angles = np.array([polar_angle(v) for v in vecs])

    order = np.argsort(angles)
    ray_angles = angles[order]
    ray_names = tuple(names[i] for i in order)

    gaps = np.diff(np.concatenate([ray_angles, [ray_angles[0] + 2 * np.pi]]))
    if np.min(gaps) < tol:
        raise DegenerateFanError("coincident rays: q lies on (or too close to) a screen line")

    # Label sectors by the contained oriented screen direction.
    labels = []
    for i in range(6):
        lo = ray_angles[i]
        width = gaps[i]
        found = []
        for j in (1, 2, 3):
            for sgn, off in (("+", 0.0), ("-", np.pi)):
                a = _wrap(SCREEN_DIRECTION_ANGLE[j] + off)
                if 0.0 < float(np.mod(a - lo, 2 * np.pi)) < width:
                    found.append(f"{sgn}l{j}")
        if len(found) != 1:
            raise DegenerateFanError(
                f"sector {i} contains {found or 'no screen direction'}; q is too close to degenerate"
            )
        labels.append(found[0])

    centers = np.array([polar_angle(apply_group("cyc1", q)), polar_angle(apply_group("cyc2", q))])
    for c in centers:
        i = int(np.searchsorted(ray_angles, c - tol, side="right") - 1) % 6
        # Adjacent gaps around the anomalous ray (it is ray i+1 up to wrap).
        near = np.min(np.abs(_wrap(ray_angles - c)) + np.where(np.abs(_wrap(ray_angles - c)) < tol, np.inf, 0.0))
        if near <= delta_out:
            raise DegenerateFanError(
                f"window half-angle {np.rad2deg(delta_out):.2f} deg reaches another ray "
                f"(nearest gap {np.rad2deg(near):.2f} deg); shrink delta_out or move q"
            )
    return SectorFan(
        q=q, ray_angles=ray_angles, ray_names=ray_names, sector_labels=tuple(labels),
        window_centers=centers, delta_in=float(delta_in), delta_out=float(delta_out),
    )


def classify(fan: SectorFan, x):
    """K-sector label of a point, plus window bookkeeping if applicable.

    Returns a dict with keys ``sector`` (index), ``label``, ``angle``, and,
    when the direction falls in an anomalous window, ``window`` (0 or 1)
    and ``offset`` (signed angle from the window's anomalous ray).
    """
    x = np.asarray(x, dtype=float)
    if np.allclose(x, 0.0):
        raise ValueError("cannot classify the origin")
    a = polar_angle(x)
    sec = int(fan.sector_of(a))
    out = {"sector": sec, "label": fan.sector_labels[sec], "angle": a}
    offs = _wrap(a - fan.window_centers)
    for w in range(2):
        if abs(offs[w]) < fan.delta_out:
            out["window"] = w
            out["offset"] = float(offs[w])
    return out
