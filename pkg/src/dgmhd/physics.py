"""Pointwise state algebra for ideal compressible MHD.

States are numpy arrays with the component axis first, so a single state is a
plain length-8 vector and a field of quadrature points is an (8, ...) array.
Every function broadcasts over the trailing axes.

Conserved layout:  (rho, rho*ux, rho*uy, rho*uz, E, Bx, By, Bz)
Primitive layout:  (rho, ux, uy, uz, p, Bx, By, Bz)

The total energy closes the system through
    E = p/(gamma - 1) + rho*|u|^2/2 + |B|^2/2
and fluxes use the total pressure p_tot = p + |B|^2/2.
"""

import numpy as np

from .errors import NegativePressure, NonPositiveDensity

Array = np.ndarray

# conserved component indices
RHO, MX, MY, MZ, EN, BX, BY, BZ = range(8)
# primitive component indices (velocity and thermal pressure slots)
UX, UY, UZ, PRES = 1, 2, 3, 4

N_COMP = 8


def state(rho, mom, ener, mag) -> Array:
    """Assemble a conserved 8-vector from rho, momentum, energy, field."""
    return np.array([rho, mom[0], mom[1], mom[2], ener, mag[0], mag[1], mag[2]],
                    dtype=float)


def primitive(rho, vel, pres, mag) -> Array:
    """Assemble a primitive 8-vector from rho, velocity, pressure, field."""
    return np.array([rho, vel[0], vel[1], vel[2], pres, mag[0], mag[1], mag[2]],
                    dtype=float)


def _first_bad_index(mask: Array):
    """Flat index of the first True entry, for error messages."""
    idx = np.argmax(mask)
    return np.unravel_index(idx, mask.shape) if mask.ndim else ()


def cons_to_prim_unchecked(u: Array, gamma: float) -> Array:
    """Conserved -> primitive without admissibility checks.

    Division by rho is taken at face value; callers that can face rho <= 0
    must guard themselves.  Used by diagnostics and snapshot writers, which
    report rather than enforce positivity.
    """
    u = np.asarray(u, dtype=float)
    out = u.copy()
    rho = u[RHO]
    inv = 1.0 / rho
    out[UX] = u[MX] * inv
    out[UY] = u[MY] * inv
    out[UZ] = u[MZ] * inv
    kin = 0.5 * (u[MX] ** 2 + u[MY] ** 2 + u[MZ] ** 2) * inv
    mag = 0.5 * (u[BX] ** 2 + u[BY] ** 2 + u[BZ] ** 2)
    out[PRES] = (gamma - 1.0) * (u[EN] - kin - mag)
    return out


def cons_to_prim(u: Array, gamma: float) -> Array:
    """Conserved -> primitive.

    Raises:
        NonPositiveDensity: any rho <= 0 or non-finite rho.
        NegativePressure: any recovered p <= 0.
    """
    u = np.asarray(u, dtype=float)
    rho = u[RHO]
    bad = ~np.isfinite(rho) | (rho <= 0.0)
    if np.any(bad):
        raise NonPositiveDensity(f"rho <= 0 at index {_first_bad_index(bad)}")
    out = cons_to_prim_unchecked(u, gamma)
    p = out[PRES]
    bad = ~np.isfinite(p) | (p <= 0.0)
    if np.any(bad):
        raise NegativePressure(f"p <= 0 at index {_first_bad_index(bad)}")
    return out


def prim_to_cons(w: Array, gamma: float) -> Array:
    """Primitive -> conserved.

    Raises:
        NonPositiveDensity: any rho <= 0.
        NegativePressure: any p <= 0.
    """
    w = np.asarray(w, dtype=float)
    rho = w[RHO]
    if np.any(~np.isfinite(rho) | (rho <= 0.0)):
        raise NonPositiveDensity("rho <= 0 in primitive state")
    p = w[PRES]
    if np.any(~np.isfinite(p) | (p <= 0.0)):
        raise NegativePressure("p <= 0 in primitive state")
    out = w.copy()
    out[MX] = rho * w[UX]
    out[MY] = rho * w[UY]
    out[MZ] = rho * w[UZ]
    kin = 0.5 * rho * (w[UX] ** 2 + w[UY] ** 2 + w[UZ] ** 2)
    mag = 0.5 * (w[BX] ** 2 + w[BY] ** 2 + w[BZ] ** 2)
    out[EN] = p / (gamma - 1.0) + kin + mag
    return out


_AXES = {"x": 0, "y": 1, 0: 0, 1: 1}


def _flux_from_prim(u: Array, w: Array, ax: int) -> Array:
    """Directional flux given matching conserved and primitive arrays.

    No admissibility requirement beyond rho != 0: the expressions are
    polynomial in the state and stay finite through transient p <= 0.
    """
    un = w[UX + ax]
    bn = w[BX + ax]
    ptot = w[PRES] + 0.5 * (w[BX] ** 2 + w[BY] ** 2 + w[BZ] ** 2)
    udotb = w[UX] * w[BX] + w[UY] * w[BY] + w[UZ] * w[BZ]
    f = np.empty_like(u)
    f[RHO] = u[MX + ax]
    f[MX] = u[MX] * un - bn * w[BX]
    f[MY] = u[MY] * un - bn * w[BY]
    f[MZ] = u[MZ] * un - bn * w[BZ]
    f[MX + ax] += ptot
    f[EN] = un * (u[EN] + ptot) - bn * udotb
    f[BX] = un * w[BX] - bn * w[UX]
    f[BY] = un * w[BY] - bn * w[UY]
    f[BZ] = un * w[BZ] - bn * w[UZ]
    return f


def _flux_pair_from_prim(u: Array, w: Array) -> tuple:
    """Both directional fluxes at once, sharing the common subexpressions.

    Row for row identical to calling _flux_from_prim with ax=0 and ax=1;
    only the shared ptot and u.B products are computed once.
    """
    ptot = w[PRES] + 0.5 * (w[BX] ** 2 + w[BY] ** 2 + w[BZ] ** 2)
    udotb = w[UX] * w[BX] + w[UY] * w[BY] + w[UZ] * w[BZ]
    en_tot = u[EN] + ptot
    pair = []
    for ax in (0, 1):
        un = w[UX + ax]
        bn = w[BX + ax]
        f = np.empty_like(u)
        f[RHO] = u[MX + ax]
        f[MX] = u[MX] * un - bn * w[BX]
        f[MY] = u[MY] * un - bn * w[BY]
        f[MZ] = u[MZ] * un - bn * w[BZ]
        f[MX + ax] += ptot
        f[EN] = un * en_tot - bn * udotb
        f[BX] = un * w[BX] - bn * w[UX]
        f[BY] = un * w[BY] - bn * w[UY]
        f[BZ] = un * w[BZ] - bn * w[UZ]
        pair.append(f)
    return pair[0], pair[1]


def flux(u: Array, gamma: float, axis) -> Array:
    """Ideal-MHD flux along a coordinate axis ('x' or 'y').

    Columns per axis a: mass rho*u_a; momentum rho*u_a*u + p_tot*e_a - B_a*B;
    energy u_a*(E + p_tot) - B_a*(u.B); induction u_a*B - B_a*u (so the
    normal induction component is exactly zero).

    Raises whatever cons_to_prim raises for inadmissible states.
    """
    ax = _AXES[axis]
    u = np.asarray(u, dtype=float)
    w = cons_to_prim(u, gamma)
    return _flux_from_prim(u, w, ax)


def _speed_from_prim(w: Array, gamma: float, nx: float, ny: float) -> Array:
    """|u.n| + c_f from a primitive array; real for any p when rho > 0.

    c_f^2 = ((a^2 + b^2) + sqrt((a^2 + b^2)^2 - 4 a^2 b_n^2)) / 2 with
    a^2 = gamma*p/rho, b^2 = |B|^2/rho, b_n^2 = (B.n)^2/rho.  The
    discriminant is >= (a^2 - b^2)^2 >= 0 analytically; a floor at zero
    guards roundoff.  The outer sum is >= 0 for the same reason even when
    a^2 < 0, so the estimate survives transient negative pressure.
    """
    inv = 1.0 / w[RHO]
    a2 = gamma * w[PRES] * inv
    b2 = (w[BX] ** 2 + w[BY] ** 2 + w[BZ] ** 2) * inv
    bn2 = (w[BX] * nx + w[BY] * ny) ** 2 * inv
    s = a2 + b2
    disc = np.maximum(s * s - 4.0 * a2 * bn2, 0.0)
    cf2 = np.maximum(0.5 * (s + np.sqrt(disc)), 0.0)
    return np.abs(w[UX] * nx + w[UY] * ny) + np.sqrt(cf2)


def max_wave_speed(u: Array, gamma: float, normal) -> Array:
    """Fast magnetosonic bound |u.n| + c_f along a unit normal (nx, ny).

    Raises whatever cons_to_prim raises for inadmissible states.
    """
    u = np.asarray(u, dtype=float)
    w = cons_to_prim(u, gamma)
    return _speed_from_prim(w, gamma, float(normal[0]), float(normal[1]))
