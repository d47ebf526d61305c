"""Sector geometry of the configuration plane.

The reflection orbit of the incident wavevector spans six rays.  The
sectors between them each contain exactly one oriented screen direction;
the two cyclic rotations of q are the anomalous rays where the ray field
jumps and diffraction windows open.
"""

import numpy as np

from triscatter import anomalous_rays, build_fan, jacobi_inverse

for label, (k1, p1) in {
    "control (k1=1, p1=sqrt 3)": (1.0, np.sqrt(3.0)),
    "generic (k1=p1=sqrt 2)": (np.sqrt(2.0), np.sqrt(2.0)),
}.items():
    q = jacobi_inverse(k1, p1, 1)
    fan = build_fan(q)
    print(f"== {label}: q = ({q[0]:.4f}, {q[1]:.4f}, {q[2]:.4f})")
    for name, ang, sec in zip(fan.ray_names, fan.ray_angles, fan.sector_labels):
        print(f"   ray {name:5s} at {np.rad2deg(ang):8.2f} deg | sector above holds {sec}")
    qa, qb = anomalous_rays(q)
    print(f"   anomalous rays: ({qa[0]:.3f},{qa[1]:.3f},{qa[2]:.3f}) and "
          f"({qb[0]:.3f},{qb[1]:.3f},{qb[2]:.3f})")
    for w in range(2):
        knots = np.rad2deg(fan.window_knots(w))
        print(f"   window {w}: rises {knots[0]:.1f}..{knots[1]:.1f}, plateau to "
          f"{knots[3]:.1f}, falls to {knots[4]:.1f} deg")
    print()
