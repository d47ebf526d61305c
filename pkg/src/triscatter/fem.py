"""Quadratic finite elements for the complex correction problem on the disk.

Weak form (test functions NOT conjugated, so the system matrix is complex
symmetric):

    int_D  grad(xi).grad(w) + (v(x1)+v(x2)+v(x3) - E) xi w  dx
        - int_bnd (i sqrt(E) - c/(2R)) xi w ds  =  int_D f w dx + int_bnd g w ds

with f = -Q for the physical problem and c = 0 ("plain" radiation
condition, d/dr - i sqrt(E)) or c = 1 ("corrected", extra 1/(2r) term).
Interior quadrature is a 6-point degree-4 rule; boundary edges use 3-point
Gauss, both exact for the P2 products involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import Mesh, PointLocator

# Degree-4 rule on the reference triangle (barycentric, weights sum to 1/2).
_TRI_QP = np.array([
    [0.445948490915965, 0.445948490915965],
    [0.445948490915965, 0.108103018168070],
    [0.108103018168070, 0.445948490915965],
    [0.091576213509771, 0.091576213509771],
    [0.091576213509771, 0.816847572980459],
    [0.816847572980459, 0.091576213509771],
])
_TRI_QW = 0.5 * np.array([
    0.223381589678011, 0.223381589678011, 0.223381589678011,
    0.109951743655322, 0.109951743655322, 0.109951743655322,
])

# 3-point Gauss on [0, 1] (degree 5).
_EDGE_QP = 0.5 + 0.5 * np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_EDGE_QW = np.array([5.0, 8.0, 5.0]) / 18.0


class NonConvergenceError(RuntimeError):
    """Iterative solve failed; carries the residual history."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = list(history)


class PointOutsideDomainError(ValueError):
    pass


def _p2_shapes(xi, eta):
    """Values of the six P2 shape functions at reference points."""
    lam1 = 1.0 - xi - eta
    return np.stack([
        lam1 * (2.0 * lam1 - 1.0),
        xi * (2.0 * xi - 1.0),
        eta * (2.0 * eta - 1.0),
        4.0 * lam1 * xi,
        4.0 * xi * eta,
        4.0 * eta * lam1,
    ], axis=-1)


def _p2_grads(xi, eta):
    """Reference gradients, shape (..., 6, 2)."""
    lam1 = 1.0 - xi - eta
    zeros = np.zeros_like(xi)
    g = np.empty(np.shape(xi) + (6, 2))
    g[..., 0, 0] = 1.0 - 4.0 * lam1
    g[..., 0, 1] = 1.0 - 4.0 * lam1
    g[..., 1, 0] = 4.0 * xi - 1.0
    g[..., 1, 1] = zeros
    g[..., 2, 0] = zeros
    g[..., 2, 1] = 4.0 * eta - 1.0
    g[..., 3, 0] = 4.0 * (lam1 - xi)
    g[..., 3, 1] = -4.0 * xi
    g[..., 4, 0] = 4.0 * eta
    g[..., 4, 1] = 4.0 * xi
    g[..., 5, 0] = -4.0 * eta
    g[..., 5, 1] = 4.0 * (lam1 - eta)
    return g


def _edge_shapes(t):
    """Quadratic shape functions on an edge (a, b, mid) at parameter t."""
    return np.stack([
        (1.0 - t) * (1.0 - 2.0 * t),
        t * (2.0 * t - 1.0),
        4.0 * t * (1.0 - t),
    ], axis=-1)


@dataclass
class FemProblem:
    """Assembled complex-symmetric system A xi = b on a quadratic mesh."""

    mesh: Mesh
    energy: float
    bc: str
    matrix: sp.csc_matrix = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    solution: np.ndarray | None = field(default=None, repr=False)
    residual: float | None = None
    _locator: PointLocator | None = field(default=None, repr=False)

    @property
    def n_dofs(self) -> int:
        return self.matrix.shape[0]

    def locator(self) -> PointLocator:
        if self._locator is None:
            self._locator = PointLocator(self.mesh)
        return self._locator


def assemble(mesh: Mesh, model=None, *, bc: str = "plain", energy: float | None = None,
             potential_sum=None, source=None, boundary_source=None) -> FemProblem:
    """Assemble the weak form on a quadratic mesh.

    The physical problem passes ``model`` (a FieldModel): the energy, the
    summed pair potential, and the volume source f = -Q all come from it.
    Verification problems pass ``energy`` plus explicit ``potential_sum``,
    ``source`` f and optional ``boundary_source`` g, all callables of chart
    points (N, 2).
    """
    if bc not in ("plain", "corrected"):
        raise ValueError("bc must be 'plain' or 'corrected'")
    if model is not None:
        energy = model.E
        pot = model.potential

        def potential_sum(p):
            t = np.stack([p[:, 0], 0.5 * (-p[:, 0] + np.sqrt(3.0) * p[:, 1]),
                          0.5 * (-p[:, 0] - np.sqrt(3.0) * p[:, 1])], axis=-1)
            return pot(t[:, 0]) + pot(t[:, 1]) + pot(t[:, 2])

        def source(p):
            return -model.discrepancy(p)

    if energy is None or energy <= 0:
        raise ValueError("energy must be positive")

    nodes = mesh.nodes
    tris = mesh.triangles
    n_dof = len(nodes)
    corners = mesh.corner_coords()
    b_mat = np.stack([corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=-1)
    det = b_mat[:, 0, 0] * b_mat[:, 1, 1] - b_mat[:, 0, 1] * b_mat[:, 1, 0]
    inv_t = np.empty_like(b_mat)  # B^{-T}
    inv_t[:, 0, 0] = b_mat[:, 1, 1] / det
    inv_t[:, 0, 1] = -b_mat[:, 1, 0] / det
    inv_t[:, 1, 0] = -b_mat[:, 0, 1] / det
    inv_t[:, 1, 1] = b_mat[:, 0, 0] / det
    absdet = np.abs(det)

    ref_vals = _p2_shapes(_TRI_QP[:, 0], _TRI_QP[:, 1])            # (nq, 6)
    ref_grads = _p2_grads(_TRI_QP[:, 0], _TRI_QP[:, 1])            # (nq, 6, 2)

    # Physical quadrature points, (Nt, nq, 2).
    xq = corners[:, None, 0, :] + np.einsum("qk,tik->tqi", _TRI_QP, b_mat)
    xq_flat = xq.reshape(-1, 2)
    v_q = potential_sum(xq_flat).reshape(len(tris), -1) if potential_sum else 0.0
    f_q = np.asarray(source(xq_flat), dtype=complex).reshape(len(tris), -1) if source else None

    # Element stiffness: sum_q w |det| (B^-T gN)(B^-T gN)^T.
    gphys = np.einsum("tij,qnj->tqni", inv_t, ref_grads)           # (Nt, nq, 6, 2)
    ke = np.einsum("q,t,tqni,tqmi->tnm", _TRI_QW, absdet, gphys, gphys)
    # Mass with coefficient (v - E).
    coeff = (v_q - energy) if potential_sum else -energy
    me = np.einsum("tq,q,t,qn,qm->tnm", np.broadcast_to(coeff, xq.shape[:2]),
                   _TRI_QW, absdet, ref_vals, ref_vals)
    ae = ke + me

    rows = np.repeat(tris, 6, axis=1).reshape(-1)
    cols = np.tile(tris, (1, 6)).reshape(-1)
    a = sp.coo_matrix((ae.reshape(-1).astype(complex), (rows, cols)), shape=(n_dof, n_dof)).tocsc()

    rhs = np.zeros(n_dof, dtype=complex)
    if f_q is not None:
        fe = np.einsum("tq,q,t,qn->tn", f_q, _TRI_QW, absdet, ref_vals)
        np.add.at(rhs, tris.reshape(-1), fe.reshape(-1))

    # Boundary term over the chord polygon.
    be = mesh.boundary_edges
    pa, pb = nodes[be[:, 0]], nodes[be[:, 1]]
    lengths = np.linalg.norm(pb - pa, axis=1)
    eshapes = _edge_shapes(_EDGE_QP)                              # (nq, 3)
    robin = -1j * np.sqrt(energy)
    if bc == "corrected":
        robin = robin + 1.0 / (2.0 * mesh.radius)
    mb = np.einsum("q,e,qn,qm->enm", _EDGE_QW, lengths, eshapes, eshapes) * robin
    br = np.repeat(be, 3, axis=1).reshape(-1)
    bcix = np.tile(be, (1, 3)).reshape(-1)
    a = a + sp.coo_matrix((mb.reshape(-1), (br, bcix)), shape=(n_dof, n_dof)).tocsc()

    if boundary_source is not None:
        xq_e = pa[:, None, :] + _EDGE_QP[None, :, None] * (pb - pa)[:, None, :]
        g_q = np.asarray(boundary_source(xq_e.reshape(-1, 2)), dtype=complex).reshape(len(be), -1)
        ge = np.einsum("eq,q,e,qn->en", g_q, _EDGE_QW, lengths, eshapes)
        np.add.at(rhs, be.reshape(-1), ge.reshape(-1))

    return FemProblem(mesh=mesh, energy=float(energy), bc=bc, matrix=a, rhs=rhs)


def problem_from_solution(mesh: Mesh, energy: float, bc: str, solution) -> FemProblem:
    """Rehydrate a solved problem from dumped nodal values (evaluation only)."""
    n = len(solution)
    empty = sp.csc_matrix((n, n), dtype=complex)
    return FemProblem(mesh=mesh, energy=float(energy), bc=bc, matrix=empty,
                      rhs=np.zeros(n, dtype=complex),
                      solution=np.asarray(solution, dtype=complex))


def solve(problem: FemProblem, *, direct_threshold: int = 400_000, tol: float = 1e-8,
          maxiter: int = 2000) -> np.ndarray:
    """Solve the assembled system; direct below the DOF threshold, else ILU-GMRES."""
    a, b = problem.matrix, problem.rhs
    if problem.n_dofs <= direct_threshold:
        lu = spla.splu(a.tocsc())
        x = lu.solve(b)
    else:
        ilu = spla.spilu(a.tocsc(), drop_tol=1e-5, fill_factor=20.0)
        pre = spla.LinearOperator(a.shape, ilu.solve)
        history = []

        def cb(rk):
            history.append(float(rk))

        restart = min(200, maxiter)
        x, info = spla.gmres(a, b, rtol=tol * 1e-2, atol=0.0, M=pre,
                             maxiter=max(1, maxiter // restart), restart=restart,
                             callback=cb, callback_type="pr_norm")
        if info != 0:
            raise NonConvergenceError(f"GMRES stalled after {info} iterations", history)
    nb = np.linalg.norm(b)
    res = np.linalg.norm(a @ x - b) / nb if nb > 0 else np.linalg.norm(a @ x - b)
    problem.solution = x
    problem.residual = float(res)
    return x


def evaluate(problem: FemProblem, points, gradient: bool = False):
    """P2 interpolation of the solution (and optionally its gradient)."""
    if problem.solution is None:
        raise RuntimeError("solve the problem before evaluating")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    idx, ref = problem.locator().locate(pts)
    if np.any(idx < 0):
        j = int(np.flatnonzero(idx < 0)[0])
        raise PointOutsideDomainError(f"point {pts[j]} is outside the mesh")
    tri = problem.mesh.triangles[idx]
    vals_nodal = problem.solution[tri]                                  # (N, 6)
    shp = _p2_shapes(ref[:, 0], ref[:, 1])                              # (N, 6)
    vals = np.sum(shp * vals_nodal, axis=1)
    if not gradient:
        return vals
    grads_ref = _p2_grads(ref[:, 0], ref[:, 1])                         # (N, 6, 2)
    corners = problem.mesh.nodes[tri[:, :3]]
    b_mat = np.stack([corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=-1)
    det = b_mat[:, 0, 0] * b_mat[:, 1, 1] - b_mat[:, 0, 1] * b_mat[:, 1, 0]
    inv_t = np.empty_like(b_mat)
    inv_t[:, 0, 0] = b_mat[:, 1, 1] / det
    inv_t[:, 0, 1] = -b_mat[:, 1, 0] / det
    inv_t[:, 1, 0] = -b_mat[:, 0, 1] / det
    inv_t[:, 1, 1] = b_mat[:, 0, 0] / det
    gphys = np.einsum("nij,nkj->nki", inv_t, grads_ref)                 # (N, 6, 2)
    grad = np.einsum("nk,nki->ni", vals_nodal, gphys)
    return vals, grad


def l2_norm(problem_or_mesh, values_at_quadrature=None, func=None) -> float:
    """L2 norm over the mesh of a callable on chart points or nodal data."""
    mesh = problem_or_mesh.mesh if isinstance(problem_or_mesh, FemProblem) else problem_or_mesh
    corners = mesh.corner_coords()
    b_mat = np.stack([corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=-1)
    det = np.abs(b_mat[:, 0, 0] * b_mat[:, 1, 1] - b_mat[:, 0, 1] * b_mat[:, 1, 0])
    xq = corners[:, None, 0, :] + np.einsum("qk,tik->tqi", _TRI_QP, b_mat)
    if func is not None:
        vals = np.asarray(func(xq.reshape(-1, 2))).reshape(len(corners), -1)
    else:
        vals = values_at_quadrature
    return float(np.sqrt(np.einsum("tq,q,t->", np.abs(vals) ** 2, _TRI_QW, det)))


def l2_error_against(problem: FemProblem, exact) -> float:
    """L2 distance between the FE solution and a callable exact field."""
    mesh = problem.mesh
    corners = mesh.corner_coords()
    b_mat = np.stack([corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=-1)
    det = np.abs(b_mat[:, 0, 0] * b_mat[:, 1, 1] - b_mat[:, 0, 1] * b_mat[:, 1, 0])
    xq = corners[:, None, 0, :] + np.einsum("qk,tik->tqi", _TRI_QP, b_mat)
    shp = _p2_shapes(_TRI_QP[:, 0], _TRI_QP[:, 1])
    uh = np.einsum("qn,tn->tq", shp, problem.solution[mesh.triangles])
    ue = np.asarray(exact(xq.reshape(-1, 2))).reshape(len(corners), -1)
    return float(np.sqrt(np.einsum("tq,q,t->", np.abs(uh - ue) ** 2, _TRI_QW, det)))


def manufactured_plane_wave_problem(mesh: Mesh, energy: float, direction) -> tuple[FemProblem, callable]:
    """MMS setup: exact xi* = e^{i<x,d>} with |d|^2 != E, Robin data absorbed."""
    d = np.asarray(direction, dtype=float)
    d2 = float(d @ d)
    k = np.sqrt(energy)

    def exact(p):
        return np.exp(1j * (p @ d))

    def source(p):
        return (d2 - energy) * exact(p)

    def boundary_source(p):
        r = np.linalg.norm(p, axis=1)
        n_hat = p / r[:, None]
        return (1j * (n_hat @ d) - 1j * k) * exact(p)

    problem = assemble(mesh, energy=energy, source=source, boundary_source=boundary_source)
    return problem, exact
