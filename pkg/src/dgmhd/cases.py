"""Benchmark problem catalogue and modal initialization.

Each case supplies a primitive-state initializer w(x, y) vectorized over
coordinate arrays, the domain box, boundary kinds, gamma, the default
stop time, and (for the advected vortex) the exact solution at any time.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import BasisSpec, QuadratureRule, mass_diagonal
from .dg import ModalField
from .errors import InadmissibleInitialData
from .mesh import Mesh
from .physics import PRES, RHO, Array, prim_to_cons

Initializer = Callable[[Array, Array], Array]
ExactSolution = Callable[[Array, Array, float, float], Array]


@dataclass(frozen=True)
class CaseSpec:
    name: str
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    bc_x: str
    bc_y: str
    gamma: float
    t_final: float
    nx_default: int
    ny_default: int
    init: Initializer
    exact: Optional[ExactSolution] = None

    def make_mesh(self, nx: int | None = None, ny: int | None = None) -> Mesh:
        return Mesh(self.x_lo, self.x_hi, self.y_lo, self.y_hi,
                    nx or self.nx_default, ny or self.ny_default,
                    self.bc_x, self.bc_y)


def _prim(rho, ux, uy, uz, p, bx, by, bz) -> Array:
    """Stack broadcastable primitive parts into an (8, ...) array."""
    parts = np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                  for v in (rho, ux, uy, uz, p, bx, by, bz)))
    return np.stack(parts, axis=0)


# --- smooth vortex advected by a uniform background -------------------------

def vortex_init(x: Array, y: Array) -> Array:
    """Background (rho, u, B, p) = (1, (1,1,0), 0, 1) plus a vortex.

    delta_u = delta_B = e^{(1-r^2)/2} (-y, x) / (2 pi) and
    delta_p = -(r^2 / (8 pi^2)) e^{1-r^2}; the whole pattern advects with
    the background velocity, which makes it an exact smooth solution.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    s = np.exp(0.5 * (1.0 - r2)) / (2.0 * np.pi)
    p = 1.0 - r2 * np.exp(1.0 - r2) / (8.0 * np.pi ** 2)
    return _prim(1.0, 1.0 - y * s, 1.0 + x * s, 0.0, p, -y * s, x * s, 0.0)


def exact_vortex(x: Array, y: Array, t: float, gamma: float) -> Array:
    """Initial profile advected by (1, 1) with periodic wrap-around."""
    del gamma  # profile does not depend on it
    x0 = VORTEX.x_lo + np.mod(np.asarray(x, dtype=float) - t - VORTEX.x_lo,
                              VORTEX.x_hi - VORTEX.x_lo)
    y0 = VORTEX.y_lo + np.mod(np.asarray(y, dtype=float) - t - VORTEX.y_lo,
                              VORTEX.y_hi - VORTEX.y_lo)
    return vortex_init(x0, y0)


# --- current-sheet vortex system --------------------------------------------

_GAMMA = 5.0 / 3.0


def orszag_tang_init(x: Array, y: Array) -> Array:
    return _prim(_GAMMA ** 2, -np.sin(y), np.sin(x), 0.0, _GAMMA,
                 -np.sin(y), np.sin(2.0 * x), 0.0)


# --- rotating dense disk in a magnetized medium ------------------------------

def rotor_init(x: Array, y: Array) -> Array:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r0, r1 = 0.1, 0.115
    dx, dy = x - 0.5, y - 0.5
    r = np.hypot(dx, dy)
    rs = np.where(r > 0.0, r, 1.0)
    f = (r1 - r) / (r1 - r0)
    inner = r <= r0
    taper = (r > r0) & (r < r1)
    rho = np.where(inner, 10.0, np.where(taper, 1.0 + 9.0 * f, 1.0))
    ux = np.where(inner, -dy / r0, np.where(taper, -f * dy / rs, 0.0))
    uy = np.where(inner, dx / r0, np.where(taper, f * dx / rs, 0.0))
    return _prim(rho, ux, uy, 0.0, 0.5, 2.5 / np.sqrt(4.0 * np.pi), 0.0, 0.0)


# --- strong cylindrical explosion at low plasma beta ------------------------

def blast_init(x: Array, y: Array) -> Array:
    r = np.hypot(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    p = np.where(r <= 0.1, 1000.0, 0.1)
    return _prim(1.0, 0.0, 0.0, 0.0, p, 100.0 / np.sqrt(4.0 * np.pi), 0.0, 0.0)


# --- weak field loop advected across the box ---------------------------------

LOOP_AMPLITUDE = 1.0e-3
LOOP_RADIUS = 0.3


def loop_init(x: Array, y: Array) -> Array:
    """B is the curl of A_z = A0 (R - r) inside r <= R, zero outside.

    The curl gives B = A0 (-y/r, x/r) inside; at the center both components
    vanish by symmetry and sample points landing exactly on r = R take the
    inside value.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.hypot(x, y)
    rs = np.where(r > 0.0, r, 1.0)
    inside = r <= LOOP_RADIUS
    bx = np.where(inside, -LOOP_AMPLITUDE * y / rs, 0.0)
    by = np.where(inside, LOOP_AMPLITUDE * x / rs, 0.0)
    return _prim(1.0, 2.0, 1.0, 0.0, 1.0, bx, by, 0.0)


# --- supersonic stream hitting a dense cloud ---------------------------------

def shock_cloud_init(x: Array, y: Array) -> Array:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    behind = x <= 1.2
    cloud = np.hypot(x - 1.4, y - 0.5) < 0.18
    rho = np.where(behind, 3.88968, np.where(cloud, 5.0, 1.0))
    ux = np.where(behind, 0.0, -3.3156)
    uz = np.where(behind, -0.05234, 0.0)
    bz = np.where(behind, 3.9353, 1.0)
    p = np.where(behind, 14.2641, 0.04)
    return _prim(rho, ux, 0.0, uz, p, 1.0, 0.0, bz)


VORTEX = CaseSpec("vortex", -5.0, 5.0, -5.0, 5.0, "periodic", "periodic",
                  _GAMMA, 20.0, 64, 64, vortex_init, exact_vortex)
ORSZAG_TANG = CaseSpec("orszag_tang", 0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi,
                       "periodic", "periodic", _GAMMA, 2.0, 192, 192,
                       orszag_tang_init)
ROTOR = CaseSpec("rotor", 0.0, 1.0, 0.0, 1.0, "periodic", "periodic",
                 _GAMMA, 0.295, 200, 200, rotor_init)
BLAST = CaseSpec("blast", -0.5, 0.5, -0.5, 0.5, "outflow", "outflow",
                 1.4, 0.01, 200, 200, blast_init)
LOOP = CaseSpec("loop", -1.0, 1.0, -0.5, 0.5, "periodic", "periodic",
                _GAMMA, 2.0, 200, 100, loop_init)
SHOCK_CLOUD = CaseSpec("shock_cloud", 0.0, 2.0, 0.0, 1.0, "outflow", "outflow",
                       _GAMMA, 0.6, 600, 300, shock_cloud_init)

CASES = {c.name: c for c in
         (VORTEX, ORSZAG_TANG, ROTOR, BLAST, LOOP, SHOCK_CLOUD)}


def case_by_name(name: str) -> CaseSpec:
    try:
        return CASES[name]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choices: {sorted(CASES)}") from None


def init_field(case: CaseSpec, mesh: Mesh, basis: BasisSpec) -> ModalField:
    """L2-project the case's initial data onto the modal basis.

    Uses the same tensor Gauss rule as the residual (exact for products of
    basis functions).  Raises InadmissibleInitialData if the initializer
    returns rho <= 0 or p <= 0 at any quadrature point.
    """
    rule = QuadratureRule(basis.n_quad_1d)
    xq = (mesh.centers_x()[None, None, :]
          + 0.5 * mesh.hx * rule.volume_x[:, None, None])
    yq = (mesh.centers_y()[None, :, None]
          + 0.5 * mesh.hy * rule.volume_y[:, None, None])
    xq, yq = np.broadcast_arrays(xq, yq)      # (q, ny, nx)
    w = case.init(xq, yq)                     # (8, q, ny, nx)
    if np.any(w[RHO] <= 0.0) or np.any(w[PRES] <= 0.0) or not np.all(np.isfinite(w)):
        raise InadmissibleInitialData(
            f"case {case.name!r} initial data fails rho > 0, p > 0 at a quadrature point")
    u = prim_to_cons(w, case.gamma)
    phi = basis.eval(rule.volume_x, rule.volume_y)        # (q, nb)
    weighted = u * rule.volume_w[None, :, None, None]
    raw = np.einsum("qb,cqyx->bcyx", phi, weighted) * (mesh.hx * mesh.hy / 4.0)
    coeffs = raw / mass_diagonal(basis, mesh.hx, mesh.hy)[:, None, None, None]
    return ModalField(coeffs, mesh, basis)
