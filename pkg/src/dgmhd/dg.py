"""Modal DG discretization: fields, numerical flux, semi-discrete residual.

A field stores modal coefficients as an array of shape (n_basis, 8, ny, nx),
so coeffs[0] holds the cell averages (mode 0 is the constant 1).  The
semi-discrete form integrated here is, per cell K and mode alpha,

    m_alpha dU^alpha/dt = - surface integral of Fhat.n phi_alpha
                          + volume integral of F . grad phi_alpha

with the local Lax-Friedrichs flux on edges.  Each edge flux is evaluated
once per interface and enters the two neighbors with opposite signs, which
makes cell-average transfer between neighbors cancel bitwise.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import BasisSpec, mass_diagonal, quadrature_rule
from .errors import NonFiniteResidual
from .mesh import Mesh, pad_modal
from .physics import (
    N_COMP,
    RHO,
    Array,
    _flux_from_prim,
    _flux_pair_from_prim,
    _speed_from_prim,
    cons_to_prim,
    cons_to_prim_unchecked,
    flux,
    max_wave_speed,
)


@dataclass
class ModalField:
    """Modal coefficients plus the geometry they live on."""

    coeffs: Array  # (n_basis, 8, ny, nx)
    mesh: Mesh
    basis: BasisSpec

    def __post_init__(self):
        expect = (self.basis.n_basis, N_COMP, self.mesh.ny, self.mesh.nx)
        if self.coeffs.shape != expect:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {expect}")

    @classmethod
    def zeros(cls, mesh: Mesh, basis: BasisSpec) -> "ModalField":
        return cls(np.zeros((basis.n_basis, N_COMP, mesh.ny, mesh.nx)), mesh, basis)

    @classmethod
    def from_constant(cls, mesh: Mesh, basis: BasisSpec, u: Array) -> "ModalField":
        field = cls.zeros(mesh, basis)
        field.coeffs[0] = np.asarray(u, dtype=float).reshape(N_COMP, 1, 1)
        return field

    def copy(self) -> "ModalField":
        return ModalField(self.coeffs.copy(), self.mesh, self.basis)

    def cell_averages(self) -> Array:
        """(8, ny, nx) view of the cell means."""
        return self.coeffs[0]


def eval_modal(coeffs: Array, table: Array) -> Array:
    """Evaluate modal data at reference points.

    coeffs: (n_basis, ...), table: (n_points, n_basis).  Returns
    (..., moved so that) the leading axis of coeffs is contracted and the
    point axis lands second: for (nb, nc, ny, nx) input the result is
    (nc, n_points, ny, nx), ready for the component-first physics kernels.
    """
    vals = np.tensordot(table, coeffs, axes=(1, 0))
    return np.moveaxis(vals, 0, 1)


def llf_flux(u_left: Array, u_right: Array, normal, gamma: float) -> Array:
    """Local Lax-Friedrichs flux through a unit normal.

    Fhat = (F(uL).n + F(uR).n)/2 - lam*(uR - uL)/2 with lam the larger of
    the two states' fast-speed bounds along the normal.  Propagates the
    pointwise physics errors for inadmissible inputs.
    """
    nx, ny = float(normal[0]), float(normal[1])
    fl = nx * flux(u_left, gamma, "x") if nx != 0.0 else 0.0
    if ny != 0.0:
        fl = fl + ny * flux(u_left, gamma, "y")
    fr = nx * flux(u_right, gamma, "x") if nx != 0.0 else 0.0
    if ny != 0.0:
        fr = fr + ny * flux(u_right, gamma, "y")
    lam = np.maximum(max_wave_speed(u_left, gamma, (nx, ny)),
                     max_wave_speed(u_right, gamma, (nx, ny)))
    return 0.5 * (fl + fr) - 0.5 * lam * (np.asarray(u_right, dtype=float) - u_left)


def _check_states(states: Array, where: str, to_cell, stage=None):
    """Abort with cell diagnostics when a state cannot form fluxes.

    Only non-finite values and rho <= 0 are fatal here; transient negative
    thermal pressure at quadrature points is evaluated through (the flux is
    polynomial in the state and the fast-speed bound stays real).
    """
    finite = np.isfinite(states).all(axis=0)
    ok = finite & (states[RHO] > 0.0)
    if ok.all():
        return
    idx = np.unravel_index(np.argmax(~ok), ok.shape)
    raise NonFiniteResidual(
        f"non-finite state or rho <= 0 at {where} point {idx}",
        cell=to_cell(idx), stage=stage,
    )


def _llf_axis(ul: Array, ur: Array, ax: int, gamma: float) -> Array:
    """LLF flux along +x (ax=0) or +y (ax=1) for trace arrays (8, ...)."""
    wl = cons_to_prim_unchecked(ul, gamma)
    wr = cons_to_prim_unchecked(ur, gamma)
    nx, ny = (1.0, 0.0) if ax == 0 else (0.0, 1.0)
    lam = np.maximum(_speed_from_prim(wl, gamma, nx, ny),
                     _speed_from_prim(wr, gamma, nx, ny))
    fl = _flux_from_prim(ul, wl, ax)
    fr = _flux_from_prim(ur, wr, ax)
    return 0.5 * (fl + fr) - 0.5 * lam * (ur - ul)


def _edge_project(fluxes: Array, table: Array, w: Array, scale: float) -> Array:
    """Quadrature of flux * phi along edges: (nc,g,ny,ni) -> (nb,nc,ny,ni)."""
    weighted = fluxes * w[None, :, None, None]
    return scale * np.einsum("gb,cgyx->bcyx", table, weighted)


@lru_cache(maxsize=None)
def _residual_tables(degree: int, hx: float, hy: float):
    """Quadrature tables for residual(), cached per basis and cell size.

    `trace` stacks the own-cell edge traces (right, left, top, bottom; g
    rows each) so one evaluation of the padded coefficients serves all four
    interface sides.  Returned arrays are marked read-only.
    """
    basis = BasisSpec(degree)
    rule = quadrature_rule(basis.n_quad_1d)
    g = rule.nodes
    trace = np.concatenate([
        basis.eval(1.0, g),
        basis.eval(-1.0, g),
        basis.eval(g, 1.0),
        basis.eval(g, -1.0),
    ])
    phi_v = basis.eval(rule.volume_x, rule.volume_y)
    gx_v = basis.deriv(1, 0, rule.volume_x, rule.volume_y, hx, hy)
    gy_v = basis.deriv(0, 1, rule.volume_x, rule.volume_y, hx, hy)
    mass = mass_diagonal(basis, hx, hy)
    tables = (trace, phi_v, gx_v, gy_v, mass)
    for arr in tables:
        arr.setflags(write=False)
    return tables


def residual(field: ModalField, gamma: float, workers: int = 1, stage=None) -> Array:
    """Rate of change of every modal coefficient; same shape as coeffs.

    Evaluates traces on all interfaces (ghost layers supply outer traces at
    boundaries), forms one LLF flux per interface, and combines with the
    volume term.  Raises NonFiniteResidual when any quadrature state is
    non-finite or has nonpositive density.
    """
    mesh, basis = field.mesh, field.basis
    hx, hy = mesh.hx, mesh.hy
    nx, ny = mesh.nx, mesh.ny
    rule = quadrature_rule(basis.n_quad_1d)
    w = rule.weights
    ng = rule.n
    trace_tab, phi_v, gx_v, gy_v, mass = _residual_tables(basis.degree, hx, hy)
    phi_xr = trace_tab[0:ng]       # own trace on the right edge, (g, nb)
    phi_xl = trace_tab[ng:2 * ng]  # own trace on the left edge
    phi_yt = trace_tab[2 * ng:3 * ng]
    phi_yb = trace_tab[3 * ng:]

    ext = pad_modal(field.coeffs, mesh)
    traces = eval_modal(ext, trace_tab)      # (nc, 4g, ny+2, nx+2)

    def x_faces():
        # interface i sits between ext columns i and i+1, i = 0..nx
        ul = traces[:, 0:ng, 1:-1, :-1]          # (nc, g, ny, nx+1)
        ur = traces[:, ng:2 * ng, 1:-1, 1:]
        # trace index (g, j, m): ul at interface m comes from cell m-1,
        # ur from cell m (clamped into the interior for ghost traces)
        _check_states(ul, "x-interface left trace",
                      lambda idx: (min(max(idx[2] - 1, 0), nx - 1), idx[1]),
                      stage)
        _check_states(ur, "x-interface right trace",
                      lambda idx: (min(idx[2], nx - 1), idx[1]), stage)
        fhat = _llf_axis(ul, ur, 0, gamma)
        right = _edge_project(fhat[:, :, :, 1:], phi_xr, w, hy / 2.0)
        left = _edge_project(fhat[:, :, :, :-1], phi_xl, w, hy / 2.0)
        return right - left

    def y_faces():
        ub = traces[:, 2 * ng:3 * ng, :-1, 1:-1]  # (nc, g, ny+1, nx)
        ut = traces[:, 3 * ng:, 1:, 1:-1]
        _check_states(ub, "y-interface lower trace",
                      lambda idx: (idx[2], min(max(idx[1] - 1, 0), ny - 1)),
                      stage)
        _check_states(ut, "y-interface upper trace",
                      lambda idx: (idx[2], min(idx[1], ny - 1)), stage)
        fhat = _llf_axis(ub, ut, 1, gamma)
        top = _edge_project(fhat[:, :, 1:, :], phi_yt, w, hx / 2.0)
        bottom = _edge_project(fhat[:, :, :-1, :], phi_yb, w, hx / 2.0)
        return top - bottom

    def volume():
        uq = eval_modal(field.coeffs, phi_v)            # (nc, q, ny, nx)
        _check_states(uq, "volume quadrature",
                      lambda idx: (idx[2], idx[1]), stage)
        wq = cons_to_prim_unchecked(uq, gamma)
        fx, fy = _flux_pair_from_prim(uq, wq)
        fx *= rule.volume_w[None, :, None, None]
        fy *= rule.volume_w[None, :, None, None]
        term = np.einsum("qb,cqyx->bcyx", gx_v, fx)
        term += np.einsum("qb,cqyx->bcyx", gy_v, fy)
        return (hx * hy / 4.0) * term

    surf_x, surf_y, vol = _run_tasks([x_faces, y_faces, volume], workers)
    return (vol - surf_x - surf_y) / mass[:, None, None, None]


def _run_tasks(tasks, workers: int):
    """Run independent whole-array kernels, optionally on a thread pool.

    Every task performs identical work regardless of the worker count, so
    results are bitwise independent of `workers`.
    """
    if workers <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [f.result() for f in futures]
