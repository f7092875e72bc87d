"""Error norms, convergence orders, and conservation/divergence audits."""

import numpy as np

from .basis import QuadratureRule
from .dg import ModalField, eval_modal
from .errors import NonPositiveError
from .physics import BX, BY, Array, prim_to_cons

CONSERVED_NAMES = ("rho", "mom_x", "mom_y", "mom_z", "energy", "Bx", "By", "Bz")


def _volume_points(field: ModalField):
    """Physical quadrature coordinates (q, ny, nx) plus the rule."""
    mesh = field.mesh
    rule = QuadratureRule(field.basis.n_quad_1d)
    xq = mesh.centers_x()[None, None, :] + 0.5 * mesh.hx * rule.volume_x[:, None, None]
    yq = mesh.centers_y()[None, :, None] + 0.5 * mesh.hy * rule.volume_y[:, None, None]
    xq, yq = np.broadcast_arrays(xq, yq)
    return rule, xq, yq


def l2_error(field: ModalField, exact, t: float, component: int,
             gamma: float) -> float:
    """Quadrature L2 norm of one conserved component's error.

    `exact(x, y, t, gamma)` must return primitive states; they are converted
    to conserved form before comparing.
    """
    rule, xq, yq = _volume_points(field)
    phi = field.basis.eval(rule.volume_x, rule.volume_y)
    uh = eval_modal(field.coeffs, phi)[component]          # (q, ny, nx)
    ue = prim_to_cons(exact(xq, yq, t, gamma), gamma)[component]
    jac = field.mesh.hx * field.mesh.hy / 4.0
    err2 = jac * np.sum(rule.volume_w[:, None, None] * (uh - ue) ** 2)
    return float(np.sqrt(err2))


def convergence_order(errors) -> Array:
    """log2 ratios of successive errors under mesh doubling.

    Raises NonPositiveError unless every error is finite and > 0.
    """
    e = np.asarray(errors, dtype=float)
    if np.any(~np.isfinite(e) | (e <= 0.0)):
        raise NonPositiveError("convergence orders need positive finite errors")
    return np.log2(e[:-1] / e[1:])


def divergence_values(field: ModalField, X, Y) -> Array:
    """dBx/dx + dBy/dy at the same reference points of every cell."""
    mesh, basis = field.mesh, field.basis
    tx = basis.deriv(1, 0, X, Y, mesh.hx, mesh.hy)
    ty = basis.deriv(0, 1, X, Y, mesh.hx, mesh.hy)
    dbx = np.tensordot(tx, field.coeffs[:, BX], axes=(1, 0))
    dby = np.tensordot(ty, field.coeffs[:, BY], axes=(1, 0))
    return dbx + dby


def divergence_report(field: ModalField) -> tuple[float, float]:
    """(max |div B|, RMS div B) over all volume quadrature points."""
    rule = QuadratureRule(field.basis.n_quad_1d)
    div = divergence_values(field, rule.volume_x, rule.volume_y)
    wts = rule.volume_w[:, None, None] / 4.0      # reference measure is 4
    rms = np.sqrt(np.sum(wts * div ** 2) / field.mesh.n_cells)
    return float(np.abs(div).max()), float(rms)


def conservation_audit(field: ModalField) -> Array:
    """Domain totals of the 8 conserved quantities.

    Mode 0 is the cell mean, so the total is cell_area times the pairwise
    numpy sum of the mean plane, taken in row-major cell order; the
    summation order is fixed by the array layout, making audits of the same
    field reproducible bit for bit.
    """
    return field.mesh.cell_area * field.coeffs[0].sum(axis=(1, 2))
