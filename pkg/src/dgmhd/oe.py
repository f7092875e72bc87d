"""Oscillation-eliminating damping of the non-constant modal content.

After each Runge-Kutta stage the degree-j coefficient group of every cell is
scaled by exp(-tau * (delta^0 + ... + delta^j)), the exact solution of the
modal damping ODE over a pseudo-time equal to the physical step tau.  The
rates delta^m are built from scaled jumps of the solution and its
derivatives across the four cell faces:

    sigma_e^m = (2m+1) h^m / (2 (2k-1) m!)
                * sum over |alpha| = m of face-average |jump of d^alpha u|
                / max-norm of (u - domain average)

with h the face-normal cell extent (hx for x-faces, hy for y-faces), and

    delta^m = max over components of
              [beta_x (sigma_left + sigma_right)/hx
               + beta_y (sigma_bottom + sigma_top)/hy]

where beta_x, beta_y are fast-speed bounds at the cell average along each
axis.  Cell averages are never touched, so the filter is conservative by
construction.  Components whose fluctuation norm is zero (up to roundoff)
contribute sigma = 0 rather than 0/0.

Damping activates only where it is needed.  A face contributes sigma for a
component only when that component's face-averaged jump exceeds GATE_TOL
times the global fluctuation scale (the largest component fluctuation).
Without the gate, the per-component normalization is self-defeating on any
component that stays close to uniform: its fluctuation is grid-scale noise,
the normalized jump indicators of that noise are O(1), and over thousands
of steps the accumulated damping destroys the accuracy of every component.
The gate leaves smooth resolved fields bitwise untouched while genuine
discontinuities, whose jumps are comparable to the solution scale, receive
the full damping strength.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import BasisSpec, quadrature_rule
from .dg import ModalField, eval_modal
from .mesh import pad_modal
from .physics import Array, _speed_from_prim, cons_to_prim_unchecked

# fluctuations at or below 1e-14 * max(1, |avg|) count as identically flat
FLAT_TOL = 1e-14

# a face participates in the damping of a component only when the
# face-averaged jump of that component exceeds this fraction of the global
# fluctuation scale; smooth resolved fields fall far below it, while jumps
# at shocks and contacts are of order one on that scale
GATE_TOL = 0.1

# derivative multi-indices contributing at each jump order m
_ORDERS = ((0, 0),), ((1, 0), (0, 1)), ((2, 0), (1, 1), (0, 2))


@dataclass(frozen=True)
class NormalizationCache:
    """Per-component domain average and max fluctuation |u - avg|.

    Sampled once per filter invocation at the volume and edge quadrature
    points of every cell.
    """

    avg: Array    # (8,)
    fluct: Array  # (8,)

    def flat_mask(self) -> Array:
        return self.fluct <= FLAT_TOL * np.maximum(1.0, np.abs(self.avg))


@lru_cache(maxsize=None)
def _norm_table(degree: int) -> Array:
    """Volume plus four-edge sampling table used by build_normalization."""
    basis = BasisSpec(degree)
    rule = quadrature_rule(basis.n_quad_1d)
    g = rule.nodes
    table = np.concatenate([
        basis.eval(rule.volume_x, rule.volume_y),
        basis.eval(1.0, g),
        basis.eval(-1.0, g),
        basis.eval(g, 1.0),
        basis.eval(g, -1.0),
    ])
    table.setflags(write=False)
    return table


def build_normalization(field: ModalField) -> NormalizationCache:
    avg = field.coeffs[0].mean(axis=(1, 2))  # exact: mode 0 is the cell mean
    vals = eval_modal(field.coeffs, _norm_table(field.basis.degree))
    fluct = np.abs(vals - avg[:, None, None, None]).max(axis=(1, 2, 3))
    return NormalizationCache(avg=avg, fluct=fluct)


def _prefactor(m: int, h: float, k: int) -> float:
    return (2 * m + 1) * h ** m / (2.0 * (2 * k - 1) * math.factorial(m))


@lru_cache(maxsize=None)
def _jump_tables(degree: int, hx: float, hy: float, axis: int):
    """Stacked derivative-trace tables for _sigmas_axis, plus the matching
    per-order quadrature weights.

    Rows run over the multi-indices of orders m = 0..degree, g quadrature
    rows each, first traced from the near cell's face and then from the far
    cell's, so one evaluation of the padded coefficients covers every jump.
    """
    basis = BasisSpec(degree)
    rule = quadrature_rule(basis.n_quad_1d)
    g, w = rule.nodes, rule.weights
    near_rows, far_rows, weights = [], [], []
    for m in range(degree + 1):
        for ax, ay in _ORDERS[m]:
            if axis == 0:
                near_rows.append(basis.deriv(ax, ay, 1.0, g, hx, hy))
                far_rows.append(basis.deriv(ax, ay, -1.0, g, hx, hy))
            else:
                near_rows.append(basis.deriv(ax, ay, g, 1.0, hx, hy))
                far_rows.append(basis.deriv(ax, ay, g, -1.0, hx, hy))
        weights.append(np.tile(w, len(_ORDERS[m])))
    table = np.concatenate(near_rows + far_rows)
    table.setflags(write=False)
    for arr in weights:
        arr.setflags(write=False)
    return table, tuple(weights)


def _sigmas_axis(field: ModalField, norm: NormalizationCache, axis: int,
                 ext: Array | None = None,
                 force: Array | None = None) -> Array:
    """Face indicators for one interface orientation.

    axis=0: vertical faces, (k+1, 8, ny, nx+1), interface i between cells
    i-1 and i.  axis=1: horizontal faces, (k+1, 8, ny+1, nx).  The jump is
    sampled by edge quadrature from the two adjacent cells' own expansions,
    including ghost neighbors at boundaries.  Callers that already hold the
    padded coefficients can pass them as `ext`.  `force` is an optional
    boolean face mask that holds the activation gate open regardless of the
    jump size, used to keep full damping on cells that needed an
    admissibility squeeze.
    """
    mesh, basis = field.mesh, field.basis
    k = basis.degree
    if ext is None:
        ext = pad_modal(field.coeffs, mesh)
    table, weights = _jump_tables(k, mesh.hx, mesh.hy, axis)
    half = table.shape[0] // 2
    vals = eval_modal(ext, table)
    if axis == 0:
        # near: cell on the -x side of interface i; far: the +x side
        jump = vals[:, :half, 1:-1, :-1] - vals[:, half:, 1:-1, 1:]
        h_face = mesh.hx
    else:
        jump = vals[:, :half, :-1, 1:-1] - vals[:, half:, 1:, 1:-1]
        h_face = mesh.hy
    ajump = np.abs(jump)

    denom = np.where(norm.flat_mask(), 1.0, norm.fluct)
    sig = np.empty((k + 1, ajump.shape[0]) + ajump.shape[2:])
    gate = None
    row = 0
    for m in range(k + 1):
        block = ajump[:, row:row + weights[m].size]
        # face average of |jump|: (1/|e|) integral = sum(w |jump|)/2
        acc = 0.5 * np.einsum("g,cgyx->cyx", weights[m], block)
        if m == 0:
            # activation: the raw m=0 average is the jump of u itself
            gate = acc > GATE_TOL * norm.fluct.max()
            if force is not None:
                gate |= force[None]
        sig[m] = _prefactor(m, h_face, k) * acc / denom[:, None, None]
        row += weights[m].size
    sig *= gate[None]
    sig[:, norm.flat_mask()] = 0.0
    return sig


_FACE_AXIS = {"left": 0, "right": 0, "bottom": 1, "top": 1}


def face_sigma(field: ModalField, cell, face: str, m: int,
               norm: NormalizationCache) -> Array:
    """Per-component jump indicator of one face of one cell."""
    if face not in _FACE_AXIS:
        raise ValueError(f"face must be one of {tuple(_FACE_AXIS)}")
    i, j = cell
    sig = _sigmas_axis(field, norm, _FACE_AXIS[face])
    if face == "left":
        return sig[m, :, j, i]
    if face == "right":
        return sig[m, :, j, i + 1]
    if face == "bottom":
        return sig[m, :, j, i]
    return sig[m, :, j + 1, i]


def _betas(field: ModalField, gamma: float) -> tuple[Array, Array]:
    """Directional fast-speed bounds at the cell averages, (ny, nx) each."""
    w = cons_to_prim_unchecked(field.cell_averages(), gamma)
    return (_speed_from_prim(w, gamma, 1.0, 0.0),
            _speed_from_prim(w, gamma, 0.0, 1.0))


def deltas(field: ModalField, gamma: float,
           norm: NormalizationCache | None = None,
           force_cells: Array | None = None) -> Array:
    """Damping rates delta^m for every cell, shape (k+1, ny, nx).

    `force_cells` is an optional (ny, nx) boolean mask; every face of a
    marked cell bypasses the activation gate.
    """
    mesh, basis = field.mesh, field.basis
    k = basis.degree
    if k == 0:
        return np.zeros((1, mesh.ny, mesh.nx))
    if norm is None:
        norm = build_normalization(field)
    force_x = force_y = None
    if force_cells is not None and force_cells.any():
        force_x = np.zeros((mesh.ny, mesh.nx + 1), dtype=bool)
        force_x[:, :-1] |= force_cells
        force_x[:, 1:] |= force_cells
        force_y = np.zeros((mesh.ny + 1, mesh.nx), dtype=bool)
        force_y[:-1] |= force_cells
        force_y[1:] |= force_cells
    ext = pad_modal(field.coeffs, mesh)
    sig_x = _sigmas_axis(field, norm, 0, ext, force_x)
    sig_y = _sigmas_axis(field, norm, 1, ext, force_y)
    beta_x, beta_y = _betas(field, gamma)
    combined = (beta_x * (sig_x[:, :, :, :-1] + sig_x[:, :, :, 1:]) / mesh.hx
                + beta_y * (sig_y[:, :, :-1, :] + sig_y[:, :, 1:, :]) / mesh.hy)
    return combined.max(axis=1)


def delta(field: ModalField, cell, m: int, norm: NormalizationCache,
          gamma: float) -> float:
    """Damping rate delta^m of a single cell."""
    i, j = cell
    return float(deltas(field, gamma, norm)[m, j, i])


def damping_factors(delta_arr: Array, dt: float) -> Array:
    """Per-degree-group factors exp(-dt * sum_{m<=j} delta^m), j = 1..k.

    Shape (k, ny, nx).  Factors lie in (0, 1] and are non-increasing in the
    degree because the partial sums of nonnegative rates are nondecreasing.
    """
    partial = np.cumsum(delta_arr, axis=0)
    return np.exp(-dt * partial[1:])


def apply_factors(field: ModalField, factors: Array) -> ModalField:
    """Scale each degree group's coefficients; averages stay untouched."""
    out = field.copy()
    for j, sl in enumerate(field.basis.degree_slices[1:]):
        out.coeffs[sl] *= factors[j]
    return out


def apply_oe(field: ModalField, dt: float, gamma: float,
             force_cells: Array | None = None) -> ModalField:
    """One exact damping step over pseudo-time dt.

    Returns a new field; input is untouched.  For k=0 there is nothing to
    damp and the copy is returned as-is.  `force_cells` marks cells whose
    faces must be damped at full strength regardless of the jump gate.
    """
    if field.basis.degree == 0:
        return field.copy()
    rates = deltas(field, gamma, force_cells=force_cells)
    return apply_factors(field, damping_factors(rates, dt))
