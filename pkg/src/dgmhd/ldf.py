"""Locally divergence-free projection of the in-plane magnetic field.

Per cell, (Bx, By) is L2-projected onto the divergence-free polynomial
space spanned by (for degree 2, in the scaled coordinates X, Y):

    psi_1 = (1, 0)                 psi_6 = (hx (X^2 - 1/3), -2 hy XY)
    psi_2 = (0, 1)                 psi_7 = (2 hx XY, -hy (Y^2 - 1/3))
    psi_3 = (hx X, -hy Y)          psi_8 = (Y^2 - 1/3, 0)
    psi_4 = (Y, 0)                 psi_9 = (0, X^2 - 1/3)
    psi_5 = (0, X)

(the first 5 for degree 1, the first 2 for degree 0).  The family is
mutually orthogonal, so each coefficient is an independent quotient
b_l = <B, psi_l> / <psi_l, psi_l> and the projection reduces to a fixed
linear map on the 2*n_basis scalar coefficients of one cell, identical for
every cell of a uniform mesh.  Cell averages of Bx and By are basis
coefficients b_1, b_2 themselves, so they pass through unchanged, and the
map is idempotent.  Bz is not part of the planar divergence and is left
alone.
"""

import numpy as np

from .basis import BasisSpec, mass_diagonal
from .dg import ModalField
from .physics import BX, BY, Array

# number of divergence-free modes per scalar-basis degree
N_DF = {0: 2, 1: 5, 2: 9}


def df_basis_values(l: int, X, Y, hx: float, hy: float) -> Array:
    """Values of psi_l (1-based l), shape (2, ...) for (Bx, By) parts."""
    spec = BasisSpec(2)
    phi = np.moveaxis(spec.eval(X, Y), -1, 0)  # (6, ...)
    zero = np.zeros_like(phi[0])
    table = {
        1: (phi[0], zero),
        2: (zero, phi[0]),
        3: (hx * phi[1], -hy * phi[2]),
        4: (phi[2], zero),
        5: (zero, phi[1]),
        6: (hx * phi[3], -2.0 * hy * phi[4]),
        7: (2.0 * hx * phi[4], -hy * phi[5]),
        8: (phi[5], zero),
        9: (zero, phi[3]),
    }
    if l not in table:
        raise ValueError("divergence-free mode index must be 1..9")
    return np.stack(table[l], axis=0)


def df_norms(hx: float, hy: float) -> Array:
    """Squared L2 norms of psi_1..psi_9 over one hx-by-hy cell."""
    m = mass_diagonal(BasisSpec(2), hx, hy)
    return np.array([
        m[0],
        m[0],
        hx * hx * m[1] + hy * hy * m[2],
        m[2],
        m[1],
        hx * hx * m[3] + 4.0 * hy * hy * m[4],
        4.0 * hx * hx * m[4] + hy * hy * m[5],
        m[5],
        m[3],
    ])


def project_ldf(bx_coeffs: Array, by_coeffs: Array, hx: float, hy: float) -> Array:
    """Divergence-free coefficients of one cell's (Bx, By) expansion.

    Input arrays carry the scalar-mode axis first (length 6 for degree 2)
    and broadcast over any trailing axes.  Returns the 9 coefficients of
    the expansion in psi_1..psi_9.  Because the psi family is orthogonal,
    each entry is <B, psi_l>/<psi_l, psi_l>; the quotients below are that
    formula reduced against the diagonal scalar masses (the common cell
    Jacobian cancels).
    """
    bx = np.asarray(bx_coeffs, dtype=float)
    by = np.asarray(by_coeffs, dtype=float)
    if bx.shape[0] != 6 or by.shape[0] != 6:
        raise ValueError("expected degree-2 coefficient arrays (first axis 6)")
    m1 = m2 = 4.0 / 3.0
    m3 = m5 = 16.0 / 45.0
    m4 = 4.0 / 9.0
    b3 = (hx * m1 * bx[1] - hy * m2 * by[2]) / (hx * hx * m1 + hy * hy * m2)
    b6 = (hx * m3 * bx[3] - 2.0 * hy * m4 * by[4]) / (hx * hx * m3 + 4.0 * hy * hy * m4)
    b7 = (2.0 * hx * m4 * bx[4] - hy * m5 * by[5]) / (4.0 * hx * hx * m4 + hy * hy * m5)
    return np.stack([bx[0], by[0], b3, bx[2], by[1], b6, b7, bx[5], by[3]], axis=0)


def expand_df(df_coeffs: Array, hx: float, hy: float) -> tuple[Array, Array]:
    """Scalar modal coefficients (bx, by) of a divergence-free expansion."""
    d = np.asarray(df_coeffs, dtype=float)
    if d.shape[0] != 9:
        raise ValueError("expected 9 divergence-free coefficients")
    bx = np.stack([d[0], hx * d[2], d[3], hx * d[5], 2.0 * hx * d[6], d[7]], axis=0)
    by = np.stack([d[1], d[4], -hy * d[2], d[8], -2.0 * hy * d[5], -hy * d[6]], axis=0)
    return bx, by


def apply_ldf(field: ModalField) -> ModalField:
    """Project every cell's (Bx, By) onto the divergence-free space.

    Returns a new field; only the Bx and By coefficient planes change.
    """
    out = field.copy()
    nb = field.basis.n_basis
    hx, hy = field.mesh.hx, field.mesh.hy
    bx = out.coeffs[:, BX]
    by = out.coeffs[:, BY]
    if nb >= 3:
        m1 = m2 = 4.0 / 3.0
        b3 = (hx * m1 * bx[1] - hy * m2 * by[2]) / (hx * hx * m1 + hy * hy * m2)
        bx[1] = hx * b3
        by[2] = -hy * b3
    if nb == 6:
        m3 = m5 = 16.0 / 45.0
        m4 = 4.0 / 9.0
        b6 = (hx * m3 * bx[3] - 2.0 * hy * m4 * by[4]) / (hx * hx * m3 + 4.0 * hy * hy * m4)
        b7 = (2.0 * hx * m4 * bx[4] - hy * m5 * by[5]) / (4.0 * hx * hx * m4 + hy * hy * m5)
        bx[3] = hx * b6
        bx[4] = 2.0 * hx * b7
        by[4] = -2.0 * hy * b6
        by[5] = -hy * b7
    return out
