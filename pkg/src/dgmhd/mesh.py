"""Uniform rectangular mesh and ghost-cell access."""

from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

BC_KINDS = ("periodic", "outflow")
SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class Mesh:
    """Uniform nx-by-ny cell grid on [x_lo, x_hi] x [y_lo, y_hi].

    Cell (i, j) spans [x_lo + i*hx, x_lo + (i+1)*hx] x [y_lo + j*hy, ...].
    hx and hy are computed once at construction and reused everywhere so that
    cell geometry is bitwise consistent across modules.
    """

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int
    ny: int
    bc_x: str = "periodic"
    bc_y: str = "periodic"
    hx: float = field(init=False)
    hy: float = field(init=False)

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("mesh needs nx >= 2 and ny >= 2")
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise ValueError("mesh box must have positive extent")
        if self.bc_x not in BC_KINDS or self.bc_y not in BC_KINDS:
            raise ValueError(f"boundary kinds must be one of {BC_KINDS}")
        object.__setattr__(self, "hx", (self.x_hi - self.x_lo) / self.nx)
        object.__setattr__(self, "hy", (self.y_hi - self.y_lo) / self.ny)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    def centers_x(self) -> Array:
        return self.x_lo + (np.arange(self.nx) + 0.5) * self.hx

    def centers_y(self) -> Array:
        return self.y_lo + (np.arange(self.ny) + 0.5) * self.hy

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (self.x_lo + (i + 0.5) * self.hx, self.y_lo + (j + 0.5) * self.hy)


def pad_modal(coeffs: Array, mesh: Mesh) -> Array:
    """Add one ghost layer per side to a (nb, nc, ny, nx) coefficient array.

    Periodic sides wrap; outflow sides replicate the boundary cell's own
    coefficients (zeroth-order extrapolation in the ghost cell's local frame).
    """
    mode_x = "wrap" if mesh.bc_x == "periodic" else "edge"
    mode_y = "wrap" if mesh.bc_y == "periodic" else "edge"
    ext = np.pad(coeffs, ((0, 0), (0, 0), (0, 0), (1, 1)), mode=mode_x)
    return np.pad(ext, ((0, 0), (0, 0), (1, 1), (0, 0)), mode=mode_y)


def ghost_state(mesh: Mesh, field, cell: tuple[int, int], side: str) -> Array:
    """Modal coefficients of the neighbor across `side` of cell (i, j).

    For interior cells this is simply the adjacent cell.  Across a periodic
    boundary it wraps; across an outflow boundary it is a copy of the
    boundary cell's own coefficients.  Always returns a copy with shape
    (n_basis, 8).
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    i, j = cell
    if not (0 <= i < mesh.nx and 0 <= j < mesh.ny):
        raise ValueError(f"cell {cell} outside mesh {mesh.nx}x{mesh.ny}")
    di = {"left": -1, "right": 1}.get(side, 0)
    dj = {"bottom": -1, "top": 1}.get(side, 0)
    ni, nj = i + di, j + dj
    if ni < 0 or ni >= mesh.nx:
        ni = ni % mesh.nx if mesh.bc_x == "periodic" else i
    if nj < 0 or nj >= mesh.ny:
        nj = nj % mesh.ny if mesh.bc_y == "periodic" else j
    return field.coeffs[:, :, nj, ni].copy()
