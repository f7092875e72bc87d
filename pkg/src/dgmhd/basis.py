"""Orthogonal modal basis on the reference square and Gauss quadrature.

The basis lives on [-1, 1]^2 in the scaled cell coordinates
X = (x - x_c)/(hx/2), Y = (y - y_c)/(hy/2).  Modes are ordered by total
degree with degree groups contiguous:

    index     0      1    2    3          4     5
    mode      1      X    Y    X^2-1/3    XY    Y^2-1/3
    degree    0      1    1    2          2     2

All six modes are mutually L2-orthogonal on the square, so the mass matrix
is diagonal.
"""

from functools import lru_cache

import numpy as np

Array = np.ndarray

# multi-index exponents (degree in X, degree in Y) per mode
EXPONENTS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))

# integral of each mode squared over the reference square
REF_MASS = np.array([4.0, 4.0 / 3.0, 4.0 / 3.0, 16.0 / 45.0, 4.0 / 9.0, 16.0 / 45.0])

# slice of mode indices of each total degree
DEGREE_SLICES = (slice(0, 1), slice(1, 3), slice(3, 6))


class BasisSpec:
    """Modal basis truncated at total degree k (0 <= k <= 2)."""

    def __init__(self, degree: int):
        if not 0 <= degree <= 2:
            raise ValueError("basis degree must be 0, 1, or 2")
        self.degree = degree
        self.n_basis = (degree + 1) * (degree + 2) // 2
        self.exponents = EXPONENTS[: self.n_basis]
        self.ref_mass = REF_MASS[: self.n_basis].copy()
        self.degree_slices = DEGREE_SLICES[: degree + 1]

    @property
    def n_quad_1d(self) -> int:
        # 3 points per axis for k=2, k+1 below; enough for basis products
        return 3 if self.degree == 2 else self.degree + 1

    def deriv(self, ax: int, ay: int, X, Y, hx: float = 2.0, hy: float = 2.0) -> Array:
        """Values of d^(ax+ay) phi_b / dx^ax dy^ay at reference points.

        X, Y broadcast against each other; the result gains a trailing basis
        axis.  Physical scaling uses X = 2(x - x_c)/hx, so each x derivative
        contributes a factor 2/hx and each y derivative 2/hy.  The defaults
        hx = hy = 2 give plain reference-square derivatives.
        """
        X, Y = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
        one = np.ones_like(X)
        zero = np.zeros_like(X)
        d = (ax, ay)
        if d == (0, 0):
            cols = [one, X, Y, X * X - 1.0 / 3.0, X * Y, Y * Y - 1.0 / 3.0]
        elif d == (1, 0):
            cols = [zero, one, zero, 2.0 * X, Y, zero]
        elif d == (0, 1):
            cols = [zero, zero, one, zero, X, 2.0 * Y]
        elif d == (2, 0):
            cols = [zero, zero, zero, 2.0 * one, zero, zero]
        elif d == (1, 1):
            cols = [zero, zero, zero, zero, one, zero]
        elif d == (0, 2):
            cols = [zero, zero, zero, zero, zero, 2.0 * one]
        else:
            # third derivatives of quadratics vanish
            cols = [zero] * 6
        vals = np.stack(cols[: self.n_basis], axis=-1)
        scale = (2.0 / hx) ** ax * (2.0 / hy) ** ay
        return vals if scale == 1.0 else vals * scale

    def eval(self, X, Y) -> Array:
        """Basis values at reference points; trailing axis is the mode."""
        return self.deriv(0, 0, X, Y)


def eval_basis(spec: BasisSpec, X, Y) -> Array:
    return spec.eval(X, Y)


def eval_basis_grad(spec: BasisSpec, X, Y, hx: float, hy: float) -> Array:
    """Physical gradients; result shape (..., n_basis, 2)."""
    gx = spec.deriv(1, 0, X, Y, hx, hy)
    gy = spec.deriv(0, 1, X, Y, hx, hy)
    return np.stack([gx, gy], axis=-1)


def mass_diagonal(spec: BasisSpec, hx: float, hy: float) -> Array:
    """Diagonal of the cell mass matrix: (hx*hy/4) * reference masses."""
    return (hx * hy / 4.0) * spec.ref_mass


class QuadratureRule:
    """Tensor-product Gauss-Legendre rule built from an n-point 1D rule.

    The 1D rule integrates polynomials of degree <= 2n-1 exactly.  Volume
    points are ordered with the Y node outermost and the X node innermost,
    which fixes the deterministic traversal used everywhere.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one quadrature point")
        nodes, weights = np.polynomial.legendre.leggauss(n)
        self.n = n
        self.nodes = nodes
        self.weights = weights
        self.volume_x = np.tile(nodes, n)
        self.volume_y = np.repeat(nodes, n)
        self.volume_w = np.repeat(weights, n) * np.tile(weights, n)

    @property
    def n_volume(self) -> int:
        return self.n * self.n


@lru_cache(maxsize=None)
def quadrature_rule(n: int) -> QuadratureRule:
    """Shared rule instance for hot paths that need one every call.

    Callers must treat the returned object as immutable.
    """
    rule = QuadratureRule(n)
    for arr in (rule.nodes, rule.weights, rule.volume_x, rule.volume_y, rule.volume_w):
        arr.setflags(write=False)
    return rule
