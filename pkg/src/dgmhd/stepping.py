"""Three-stage SSP Runge-Kutta marching with per-stage damping/projection.

Each stage s forms the convex update

    U^(s) = (1 - c_s) U^n + c_s (U^(s-1) + tau * residual(U^(s-1)))

with c = (1, 1/4, 2/3), then damps the fresh modal content (pseudo-time
equal to the physical tau), re-projects the magnetic field, and squeezes
any cell whose pointwise density or pressure left the admissible set back
toward its average.  With both filters disabled and no inadmissible points
the loop is a plain SSP-RK3 DG step.
"""

from dataclasses import dataclass

import numpy as np

from .dg import ModalField, eval_modal, residual
from .errors import NonFiniteResidual, NonFiniteSpeed
from .ldf import apply_ldf
from .oe import _norm_table, apply_oe
from .physics import BX, BY, BZ, EN, MX, MY, MZ, RHO, _speed_from_prim, \
    cons_to_prim_unchecked

STAGE_WEIGHTS = (1.0, 0.25, 2.0 / 3.0)

# smallest admissible pointwise density and pressure for the squeeze
POS_FLOOR = 1e-12


def _pressures(u, gamma: float):
    """Thermal pressure with the component axis leading; rho must be > 0."""
    kin = 0.5 * (u[MX] ** 2 + u[MY] ** 2 + u[MZ] ** 2) / u[RHO]
    mag = 0.5 * (u[BX] ** 2 + u[BY] ** 2 + u[BZ] ** 2)
    return (gamma - 1.0) * (u[EN] - kin - mag)


def enforce_positive(field: ModalField, gamma: float) -> ModalField:
    """Squeeze troubled cells toward their averages until density and
    pressure are positive at every state-evaluation point.

    Per cell, U <- avg + theta (U - avg) with the largest theta in [0, 1]
    that keeps rho and p at or above POS_FLOOR at the volume and edge
    quadrature points.  Cell averages are preserved exactly, untroubled
    cells are not touched at all, and the common per-cell factor keeps the
    in-plane magnetic modes divergence-free.  Raises NonFiniteResidual when
    a cell average itself is inadmissible, since no squeeze can fix that.
    The field is modified in place and returned.
    """
    return _admissible_squeeze(field, gamma)[0]


def _admissible_squeeze(field: ModalField, gamma: float):
    """enforce_positive plus a mask of cells near the admissibility edge.

    The mask marks every cell whose pointwise density or pressure dips
    below half its cell average, not just the cells that had to be
    clipped, so the caller can keep full damping on regions that are still
    fighting oscillations.
    """
    if field.basis.degree == 0:
        return field, None
    coeffs = field.coeffs
    avg = coeffs[0]
    rho_bar = avg[RHO]
    p_bar = _pressures(avg, gamma)
    if np.any(rho_bar <= POS_FLOOR) or np.any(p_bar <= POS_FLOOR):
        raise NonFiniteResidual("cell-average density or pressure fell to "
                                "the admissibility floor")
    vals = eval_modal(coeffs, _norm_table(field.basis.degree))
    theta = np.ones_like(rho_bar)
    rho_min = vals[RHO].min(axis=0)
    low = rho_min < POS_FLOOR
    if np.any(low):
        theta[low] = (rho_bar[low] - POS_FLOOR) / (rho_bar[low] - rho_min[low])
    shifted = avg[:, None] + theta * (vals - avg[:, None])
    pmin = _pressures(shifted, gamma).min(axis=0)
    bad = pmin < POS_FLOOR
    if np.any(bad):
        base = avg[:, bad]                    # (8, M)
        span = shifted[:, :, bad] - base[:, None]
        lo = np.zeros(int(bad.sum()))
        hi = np.ones_like(lo)
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            trial = _pressures(base[:, None] + mid * span, gamma).min(axis=0)
            ok = trial >= POS_FLOOR
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        theta[bad] *= lo
    scaled = theta < 1.0
    if np.any(scaled):
        coeffs[1:][:, :, scaled] *= theta[scaled]
    edge = (rho_min < 0.5 * rho_bar) | (pmin < 0.5 * p_bar) | scaled
    return field, (edge if edge.any() else None)


def _dilate(mask):
    """Grow a boolean cell mask by one cell in the four axis directions."""
    out = mask.copy()
    out[1:] |= mask[:-1]
    out[:-1] |= mask[1:]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


@dataclass(frozen=True)
class StepControls:
    """Step-size policy: CFL number, stop time, safety cap on step count."""

    cfl: float = 0.15
    t_final: float = np.inf
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


def compute_dt(field: ModalField, gamma: float, controls: StepControls,
               t: float = 0.0) -> float:
    """CFL step from directional speed bounds at the cell averages.

    tau = cfl / (lam_x/hx + lam_y/hy) with lam_x, lam_y the global maxima
    of the fast-speed bound along each axis, clipped so the step lands
    exactly on controls.t_final.
    """
    mesh = field.mesh
    w = cons_to_prim_unchecked(field.cell_averages(), gamma)
    lam_x = float(_speed_from_prim(w, gamma, 1.0, 0.0).max())
    lam_y = float(_speed_from_prim(w, gamma, 0.0, 1.0).max())
    if not (np.isfinite(lam_x) and np.isfinite(lam_y)):
        raise NonFiniteSpeed(f"wave-speed bound is not finite: ({lam_x}, {lam_y})")
    dt = controls.cfl / (lam_x / mesh.hx + lam_y / mesh.hy)
    remaining = controls.t_final - t
    if np.isfinite(remaining) and dt >= remaining:
        dt = remaining
    if not (np.isfinite(dt) and dt > 0.0):
        raise NonFiniteSpeed(f"step size degenerated to {dt}")
    return dt


def step(field: ModalField, tau: float, gamma: float,
         oe_enabled: bool = True, ldf_enabled: bool = True,
         workers: int = 1) -> ModalField:
    """Advance one full time step; returns a new field.

    NonFiniteResidual raised by a stage is annotated with the stage number
    (1-based) and re-raised.
    """
    current, trouble = _admissible_squeeze(field.copy(), gamma)
    start = current.coeffs
    for s, c in enumerate(STAGE_WEIGHTS, start=1):
        try:
            rate = residual(current, gamma, workers=workers, stage=s)
        except NonFiniteResidual as err:
            err.stage = s
            raise
        updated = (1.0 - c) * start + c * (current.coeffs + tau * rate)
        current = ModalField(updated, field.mesh, field.basis)
        if oe_enabled:
            force = _dilate(trouble) if trouble is not None else None
            current = apply_oe(current, tau, gamma, force_cells=force)
        if ldf_enabled:
            current = apply_ldf(current)
        current, trouble = _admissible_squeeze(current, gamma)
    return current
