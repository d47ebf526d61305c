"""Unstructured quadratic triangle meshes on a disk.

Mesh generation follows the classic force-equilibrium scheme: points are
seeded from a hex lattice with density matching a spatial size field,
then relaxed as a truss (edges push apart when shorter than their target
length) with repeated Delaunay retriangulation, while a fixed ring of
equally spaced vertices pins the circle |x| = R.  The size field refines
the three screen strips {|x_j| <= strip half-width} and the two angular
diffraction windows.

Quadratic (six-node) elements are built afterwards by inserting midside
nodes on the unique edges; elements remain straight-sided, so the circle
is approximated by its chord polygon (geometric error O(h^2), below the
truncation error of the first-order radiation condition).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from . import geometry as geo

_DENSITY = 2.0 / np.sqrt(3.0)  # vertices per unit area ~ _DENSITY / h^2


class MeshQualityError(RuntimeError):
    """Raised when the requested minimum angle cannot be reached."""


@dataclass
class Mesh:
    """Six-node triangle mesh of the disk |x| <= radius.

    ``nodes`` lists the corner vertices first (``n_vertices`` of them),
    then the midside nodes.  ``triangles`` holds, per element, the three
    corners followed by the midside nodes opposite the standard ordering
    (m01, m12, m20).  ``boundary_edges`` rows are (a, b, mid) node ids.
    ``region`` tags each element: 0 generic, 1 screen strip, 2 window.
    """

    nodes: np.ndarray
    n_vertices: int
    triangles: np.ndarray
    boundary_edges: np.ndarray
    region: np.ndarray
    radius: float
    h_base: float
    min_angle_deg: float = field(default=0.0)

    @property
    def n_p2_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def corner_coords(self) -> np.ndarray:
        """(Nt, 3, 2) corner coordinates per element."""
        return self.nodes[self.triangles[:, :3]]

    def edge_lengths(self) -> np.ndarray:
        c = self.corner_coords()
        out = []
        for i, j in ((0, 1), (1, 2), (2, 0)):
            out.append(np.linalg.norm(c[:, i] - c[:, j], axis=1))
        return np.concatenate(out)

    def angles_deg(self) -> np.ndarray:
        """(Nt, 3) interior angles in degrees."""
        c = self.corner_coords()
        out = np.empty((len(c), 3))
        for k in range(3):
            a = c[:, (k + 1) % 3] - c[:, k]
            b = c[:, (k + 2) % 3] - c[:, k]
            cosang = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            out[:, k] = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        return out


def size_field(R: float, h: float, *, strip_halfwidth: float = 0.0, strip_factor: float = 1.0,
               window_centers=(), window_halfangle: float = 0.0, window_factor: float = 1.0,
               grading: float = 0.3):
    """Target edge-length callable h(xy) with Lipschitz grading."""
    centers = np.asarray(window_centers, dtype=float)

    def h_of(p):
        p = np.atleast_2d(p)
        out = np.full(len(p), h)
        if strip_factor > 1.0 and strip_halfwidth > 0.0:
            t = geo.chart_inverse(p)
            d = np.min(np.maximum(np.abs(t) - strip_halfwidth, 0.0), axis=1)
            out = np.minimum(out, h / strip_factor + grading * d)
        if window_factor > 1.0 and len(centers):
            r = np.hypot(p[:, 0], p[:, 1])
            th = np.arctan2(p[:, 1], p[:, 0])
            off = np.min(
                np.abs((th[:, None] - centers[None, :] + np.pi) % (2 * np.pi) - np.pi), axis=1
            )
            d = r * np.maximum(off - window_halfangle, 0.0)
            out = np.minimum(out, h / window_factor + grading * d)
        return out

    return h_of


def build_mesh(R: float, h: float, *, size=None, min_angle_deg: float = 20.0,
               seed: int = 0, max_iters: int = 60, region_tagger=None) -> Mesh:
    """Relax a graded point set into a quality triangulation of the disk.

    Parameters
    ----------
    R, h : float
        Disk radius and base target edge length (R > 0, 0 < h < R).
    size : callable, optional
        Target-size field from :func:`size_field`; uniform ``h`` if absent.
    min_angle_deg : float
        Quality gate; :class:`MeshQualityError` if unattained after repair.
    region_tagger : callable, optional
        Maps element centroids (N, 2) to integer region tags.
    """
    if not (R > 0 and 0 < h < R):
        raise ValueError("require R > 0 and 0 < h < R")
    h_of = size if size is not None else (lambda p: np.full(len(np.atleast_2d(p)), h))
    rng = np.random.default_rng(seed)

    # Fixed boundary ring at the exact radius.
    h_bnd = float(np.mean(h_of(np.array([[R, 0.0], [0.0, R], [-R, 0.0], [0.0, -R]]))))
    n_ring = max(12, int(np.ceil(2.0 * np.pi * R / h_bnd)))
    ang = 2.0 * np.pi * np.arange(n_ring) / n_ring
    ring = np.column_stack([R * np.cos(ang), R * np.sin(ang)])

    # Hex seed lattice at the finest requested size, thinned by the field.
    probe = np.linspace(-R, R, 41)
    gx, gy = np.meshgrid(probe, probe)
    h_min = float(np.min(h_of(np.column_stack([gx.ravel(), gy.ravel()]))))
    dx = h_min
    dy = h_min * np.sqrt(3.0) / 2.0
    xs = np.arange(-R - dx, R + 2 * dx, dx)
    ys = np.arange(-R - dy, R + 2 * dy, dy)
    px, py = np.meshgrid(xs, ys)
    px[1::2] += dx / 2.0
    pts = np.column_stack([px.ravel(), py.ravel()])
    rr = np.hypot(pts[:, 0], pts[:, 1])
    pts = pts[rr < R - 0.55 * h_bnd]
    keep = rng.random(len(pts)) < (h_min / h_of(pts)) ** 2
    pts = pts[keep]

    p = np.vstack([ring, pts])
    nfix = n_ring

    dptol, ttol, fscale, deltat = 0.001, 0.1, 1.2, 0.2
    p_old = p + 1e9
    tri = None
    for _ in range(max_iters):
        if np.max(np.linalg.norm(p - p_old, axis=1)) > ttol * h_min:
            p_old = p.copy()
            tri = Delaunay(p)
            simplices = tri.simplices
            bars = np.unique(np.sort(np.concatenate(
                [simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [2, 0]]]), axis=1), axis=0)
        vec = p[bars[:, 0]] - p[bars[:, 1]]
        L = np.linalg.norm(vec, axis=1)
        hbar = h_of(0.5 * (p[bars[:, 0]] + p[bars[:, 1]]))
        L0 = hbar * fscale * np.sqrt(np.sum(L**2) / np.sum(hbar**2))
        f = np.maximum(L0 - L, 0.0)
        fvec = (f / np.maximum(L, 1e-12))[:, None] * vec
        force = np.zeros_like(p)
        np.add.at(force, bars[:, 0], fvec)
        np.add.at(force, bars[:, 1], -fvec)
        force[:nfix] = 0.0
        p = p + deltat * force
        # Keep interior points off the pinned ring.
        rr = np.hypot(p[:, 0], p[:, 1])
        out = rr > R - 0.5 * h_bnd
        out[:nfix] = False
        if np.any(out):
            scale = (R - 0.5 * h_bnd) / rr[out]
            p[out] *= scale[:, None]
        if np.max(np.linalg.norm(deltat * force, axis=1)) < dptol * h_min:
            break

    # Final triangulation plus a few smoothing sweeps for stragglers.
    for _ in range(4):
        tri = Delaunay(p)
        simplices = _oriented(p, tri.simplices)
        angles = _tri_angles(p, simplices)
        if np.min(angles) >= min_angle_deg:
            break
        p = _smooth_once(p, simplices, nfix)
    else:
        tri = Delaunay(p)
        simplices = _oriented(p, tri.simplices)
        angles = _tri_angles(p, simplices)
        if np.min(angles) < min_angle_deg:
            bad = np.unique(simplices[np.min(angles, axis=1) < min_angle_deg])
            bad = bad[bad >= nfix]
            if len(bad):
                p = np.delete(p, bad, axis=0)
                tri = Delaunay(p)
                simplices = _oriented(p, tri.simplices)
                angles = _tri_angles(p, simplices)
            if np.min(angles) < min_angle_deg:
                raise MeshQualityError(
                    f"minimum angle {np.min(angles):.2f} deg below the {min_angle_deg} deg gate"
                )

    return _to_p2(p, simplices, R, h, float(np.min(angles)), region_tagger)


def _tri_angles(p, simplices):
    c = p[simplices]
    out = np.empty((len(simplices), 3))
    for k in range(3):
        a = c[:, (k + 1) % 3] - c[:, k]
        b = c[:, (k + 2) % 3] - c[:, k]
        cosang = np.sum(a * b, axis=1) / np.maximum(
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1), 1e-300)
        out[:, k] = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
    return out


def _oriented(p, simplices):
    c = p[simplices]
    det = ((c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
           - (c[:, 2, 0] - c[:, 0, 0]) * (c[:, 1, 1] - c[:, 0, 1]))
    flip = det < 0
    simplices = simplices.copy()
    simplices[flip, 1], simplices[flip, 2] = simplices[flip, 2], simplices[flip, 1].copy()
    return simplices


def _smooth_once(p, simplices, nfix):
    """One Laplacian sweep over interior vertices."""
    bars = np.concatenate([simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [2, 0]]])
    acc = np.zeros_like(p)
    cnt = np.zeros(len(p))
    np.add.at(acc, bars[:, 0], p[bars[:, 1]])
    np.add.at(acc, bars[:, 1], p[bars[:, 0]])
    np.add.at(cnt, bars[:, 0], 1.0)
    np.add.at(cnt, bars[:, 1], 1.0)
    target = acc / np.maximum(cnt, 1.0)[:, None]
    p2 = p.copy()
    p2[nfix:] = p[nfix:] + 0.7 * (target[nfix:] - p[nfix:])
    return p2


def _to_p2(p, simplices, R, h, min_angle, region_tagger):
    edges_all = np.sort(np.concatenate(
        [simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [2, 0]]]), axis=1)
    edges, inverse, counts = np.unique(edges_all, axis=0, return_inverse=True, return_counts=True)
    n_tri = len(simplices)
    mid_ids = len(p) + inverse.reshape(3, n_tri).T  # columns: m01, m12, m20
    midpoints = 0.5 * (p[edges[:, 0]] + p[edges[:, 1]])
    nodes = np.vstack([p, midpoints])
    triangles = np.column_stack([simplices, mid_ids])

    boundary = counts == 1
    b_edges = edges[boundary]
    b_mid = len(p) + np.flatnonzero(boundary)
    boundary_edges = np.column_stack([b_edges, b_mid])

    centroids = p[simplices].mean(axis=1)
    region = (region_tagger(centroids).astype(np.int32) if region_tagger
              else np.zeros(n_tri, dtype=np.int32))
    return Mesh(nodes=nodes, n_vertices=len(p), triangles=triangles.astype(np.int64),
                boundary_edges=boundary_edges.astype(np.int64), region=region,
                radius=float(R), h_base=float(h), min_angle_deg=min_angle)


def strip_window_tagger(strip_halfwidth: float, window_centers, window_halfangle: float):
    """Standard region tagging: 1 inside a screen strip, 2 inside a window."""
    centers = np.asarray(window_centers, dtype=float)

    def tag(c):
        c = np.atleast_2d(c)
        out = np.zeros(len(c), dtype=np.int32)
        if len(centers):
            th = np.arctan2(c[:, 1], c[:, 0])
            off = np.min(np.abs((th[:, None] - centers[None, :] + np.pi) % (2 * np.pi) - np.pi), axis=1)
            out[off <= window_halfangle] = 2
        t = geo.chart_inverse(c)
        out[np.min(np.abs(t), axis=1) <= strip_halfwidth] = 1
        return out

    return tag


def estimate_p2_dofs(R: float, h: float, *, strip_halfwidth: float = 0.0,
                     strip_factor: float = 1.0, window_halfangle: float = 0.0,
                     window_factor: float = 1.0) -> int:
    """Analytic degree-of-freedom estimate (vertices + edges ~ 4x vertices)."""
    area = np.pi * R * R
    strip_area = min(area, 3.0 * 2.0 * strip_halfwidth * 2.0 * R) if strip_factor > 1 else 0.0
    window_area = min(area - strip_area, 2.0 * window_halfangle * R * R) if window_factor > 1 else 0.0
    base_area = area - strip_area - window_area
    v = _DENSITY * (base_area / h**2
                    + strip_area / (h / strip_factor) ** 2
                    + window_area / (h / window_factor) ** 2)
    return int(4.0 * v)


# ---------------------------------------------------------------------------
# Plain-text mesh format
# ---------------------------------------------------------------------------

def write_mesh(mesh: Mesh, path, header: str = ""):
    """Documented plain-text format: nodes, six-node elements, boundary edges.

    Layout: optional '#' comment lines; node count then ``x y`` per node;
    element count then six node ids (+ region tag) per element; boundary
    edge count then ``a b mid`` per edge; trailing metadata line with
    radius / base size / vertex count.
    """
    lines = []
    if header:
        for row in header.splitlines():
            lines.append(f"# {row}")
    lines.append(f"{mesh.n_p2_nodes}")
    lines.extend(f"{float(x)!r} {float(y)!r}" for x, y in mesh.nodes)
    lines.append(f"{mesh.n_triangles}")
    lines.extend(
        " ".join(map(str, row)) + f" {tag}" for row, tag in zip(mesh.triangles, mesh.region)
    )
    lines.append(f"{len(mesh.boundary_edges)}")
    lines.extend(" ".join(map(str, row)) for row in mesh.boundary_edges)
    lines.append(
        f"meta {float(mesh.radius)!r} {float(mesh.h_base)!r} "
        f"{mesh.n_vertices} {float(mesh.min_angle_deg)!r}"
    )
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    with open(path) as f:
        rows = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
    it = iter(rows)
    n_nodes = int(next(it))
    nodes = np.array([[float(v) for v in next(it).split()] for _ in range(n_nodes)])
    n_tri = int(next(it))
    raw = np.array([[int(v) for v in next(it).split()] for _ in range(n_tri)], dtype=np.int64)
    triangles, region = raw[:, :6], raw[:, 6].astype(np.int32)
    n_b = int(next(it))
    boundary = np.array([[int(v) for v in next(it).split()] for _ in range(n_b)], dtype=np.int64)
    meta = next(it).split()
    return Mesh(nodes=nodes, n_vertices=int(meta[3]), triangles=triangles,
                boundary_edges=boundary, region=region, radius=float(meta[1]),
                h_base=float(meta[2]), min_angle_deg=float(meta[4]))


class PointLocator:
    """Vectorized point-in-triangle search via a centroid KD-tree."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        corners = mesh.corner_coords()
        self._c0 = corners[:, 0]
        d1 = corners[:, 1] - corners[:, 0]
        d2 = corners[:, 2] - corners[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        self._inv = np.stack([
            np.stack([d2[:, 1] / det, -d2[:, 0] / det], axis=1),
            np.stack([-d1[:, 1] / det, d1[:, 0] / det], axis=1),
        ], axis=1)  # (Nt, 2, 2): barycentric (xi, eta) = inv @ (p - c0)
        self._tree = cKDTree(corners.mean(axis=1))

    def locate(self, pts, k: int = 24, tol: float = 1e-10):
        """Triangle index and reference coordinates (xi, eta) per point.

        Returns index -1 for points outside the mesh.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = len(pts)
        found = np.full(n, -1, dtype=np.int64)
        ref = np.zeros((n, 2))
        remaining = np.arange(n)
        kk = min(k, len(self.mesh.triangles))
        _, cand = self._tree.query(pts, k=kk)
        cand = np.atleast_2d(cand)
        for col in range(cand.shape[1]):
            if not len(remaining):
                break
            t = cand[remaining, col]
            d = pts[remaining] - self._c0[t]
            xi = self._inv[t, 0, 0] * d[:, 0] + self._inv[t, 0, 1] * d[:, 1]
            eta = self._inv[t, 1, 0] * d[:, 0] + self._inv[t, 1, 1] * d[:, 1]
            ok = (xi >= -tol) & (eta >= -tol) & (xi + eta <= 1.0 + tol)
            hit = remaining[ok]
            found[hit] = t[ok]
            ref[hit, 0] = xi[ok]
            ref[hit, 1] = eta[ok]
            remaining = remaining[~ok]
        if len(remaining):
            # Exhaustive fallback for stragglers (rare, e.g. slivers).
            for i in remaining:
                d = pts[i] - self._c0
                xi = self._inv[:, 0, 0] * d[:, 0] + self._inv[:, 0, 1] * d[:, 1]
                eta = self._inv[:, 1, 0] * d[:, 0] + self._inv[:, 1, 1] * d[:, 1]
                ok = (xi >= -tol) & (eta >= -tol) & (xi + eta <= 1.0 + tol)
                js = np.flatnonzero(ok)
                if len(js):
                    found[i] = js[0]
                    ref[i] = (xi[js[0]], eta[js[0]])
        return found, ref
