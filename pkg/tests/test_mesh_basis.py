"""Mesh geometry, modal basis, quadrature, ghost access."""

import numpy as np
import pytest

from conftest import make_mesh, random_field
from dgmhd.basis import BasisSpec, QuadratureRule, eval_basis, eval_basis_grad, mass_diagonal
from dgmhd.dg import ModalField
from dgmhd.mesh import Mesh, ghost_state, pad_modal


def test_mesh_spacing_and_centers():
    mesh = make_mesh(nx=5, ny=4, box=(-1.0, 1.5, 0.0, 2.0))
    assert mesh.hx == pytest.approx(0.5)
    assert mesh.hy == pytest.approx(0.5)
    assert mesh.centers_x()[0] == pytest.approx(-0.75)
    assert mesh.centers_y()[-1] == pytest.approx(1.75)
    assert mesh.cell_center(2, 1) == (pytest.approx(0.25), pytest.approx(0.75))


def test_mesh_validation():
    with pytest.raises(ValueError):
        make_mesh(nx=1, ny=4)
    with pytest.raises(ValueError):
        Mesh(0.0, 1.0, 0.0, 1.0, 4, 4, bc_x="wall", bc_y="periodic")
    with pytest.raises(ValueError):
        Mesh(1.0, 0.0, 0.0, 1.0, 4, 4)


def test_basis_values_at_reference_points():
    spec = BasisSpec(2)
    assert np.allclose(spec.eval(0.0, 0.0),
                       [1.0, 0.0, 0.0, -1.0 / 3.0, 0.0, -1.0 / 3.0], atol=1e-15)
    assert np.allclose(spec.eval(1.0, 1.0),
                       [1.0, 1.0, 1.0, 2.0 / 3.0, 1.0, 2.0 / 3.0], atol=1e-15)
    assert np.allclose(spec.eval(1.0, -1.0),
                       [1.0, 1.0, -1.0, 2.0 / 3.0, -1.0, 2.0 / 3.0], atol=1e-15)


def test_basis_truncation_by_degree():
    assert BasisSpec(0).n_basis == 1
    assert BasisSpec(1).n_basis == 3
    assert BasisSpec(2).n_basis == 6
    with pytest.raises(ValueError):
        BasisSpec(3)


def test_basis_gradients():
    spec = BasisSpec(2)
    # d/dx of X = 2/hx: with hx = 0.5 that is 4
    g = eval_basis_grad(spec, 0.0, 0.0, 0.5, 1.0)
    assert g[1, 0] == pytest.approx(4.0)
    assert g[1, 1] == 0.0
    # XY mode at (1, -1) on a unit cell: (2Y/hx, 2X/hy) = (-2, 2)
    g = eval_basis_grad(spec, 1.0, -1.0, 1.0, 1.0)
    assert g[4, 0] == pytest.approx(-2.0)
    assert g[4, 1] == pytest.approx(2.0)


def test_second_derivatives_are_constant():
    spec = BasisSpec(2)
    pts = np.linspace(-1, 1, 7)
    dxx = spec.deriv(2, 0, pts, pts, 1.0, 1.0)
    # d2/dx2 (X^2 - 1/3) = 2 * (2/hx)^2 = 8 on a unit cell
    assert np.allclose(dxx[:, 3], 8.0, atol=1e-14)
    assert np.allclose(np.delete(dxx, 3, axis=1), 0.0, atol=1e-15)
    dxy = spec.deriv(1, 1, 0.3, -0.4, 0.5, 0.25)
    assert dxy[4] == pytest.approx((2 / 0.5) * (2 / 0.25))


def test_mass_diagonal_reference_and_scaled():
    spec = BasisSpec(2)
    ref = np.array([4.0, 4 / 3, 4 / 3, 16 / 45, 4 / 9, 16 / 45])
    assert np.allclose(mass_diagonal(spec, 2.0, 2.0), ref, rtol=1e-15)
    assert np.allclose(mass_diagonal(spec, 1.0, 1.0), ref / 4.0, rtol=1e-15)


def test_mass_diagonal_matches_quadrature():
    spec = BasisSpec(2)
    rule = QuadratureRule(3)
    phi = spec.eval(rule.volume_x, rule.volume_y)   # (9, 6)
    hx, hy = 0.7, 1.3
    gram = (hx * hy / 4.0) * np.einsum("q,qa,qb->ab", rule.volume_w, phi, phi)
    assert np.allclose(gram, np.diag(mass_diagonal(spec, hx, hy)), atol=1e-13)


def test_basis_orthogonality_off_diagonal():
    spec = BasisSpec(2)
    rule = QuadratureRule(3)
    phi = spec.eval(rule.volume_x, rule.volume_y)
    gram = np.einsum("q,qa,qb->ab", rule.volume_w, phi, phi)
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() < 1e-13


def test_gauss_rule_exactness():
    # n-point Gauss is exact through degree 2n-1
    for n in (1, 2, 3):
        rule = QuadratureRule(n)
        for d in range(2 * n):
            exact = 0.0 if d % 2 else 2.0 / (d + 1)
            got = np.sum(rule.weights * rule.nodes ** d)
            assert abs(got - exact) < 1e-14, (n, d)


def test_basis_completeness_reproduces_quadratics(rng):
    """L2 projection of a polynomial of total degree <= 2 is exact."""
    spec = BasisSpec(2)
    rule = QuadratureRule(3)
    c = rng.standard_normal(6)

    def poly(X, Y):
        return (c[0] + c[1] * X + c[2] * Y + c[3] * X * X + c[4] * X * Y
                + c[5] * Y * Y)

    phi = spec.eval(rule.volume_x, rule.volume_y)
    vals = poly(rule.volume_x, rule.volume_y)
    coeffs = (rule.volume_w[:, None] * phi * vals[:, None]).sum(axis=0) / spec.ref_mass
    xs = rng.uniform(-1, 1, 40)
    ys = rng.uniform(-1, 1, 40)
    recon = spec.eval(xs, ys) @ coeffs
    assert np.allclose(recon, poly(xs, ys), atol=1e-13)


def test_ghost_state_interior_and_periodic(rng):
    mesh = make_mesh(nx=4, ny=3)
    field = random_field(mesh, BasisSpec(2), rng)
    # interior neighbor
    got = ghost_state(mesh, field, (1, 1), "right")
    assert np.array_equal(got, field.coeffs[:, :, 1, 2])
    # periodic wrap across the left boundary
    got = ghost_state(mesh, field, (0, 2), "left")
    assert np.array_equal(got, field.coeffs[:, :, 2, 3])
    got = ghost_state(mesh, field, (3, 0), "bottom")
    assert np.array_equal(got, field.coeffs[:, :, 2, 3])


def test_ghost_state_outflow_copies_boundary_cell(rng):
    mesh = make_mesh(nx=4, ny=3, bc="outflow")
    field = random_field(mesh, BasisSpec(2), rng)
    got = ghost_state(mesh, field, (0, 1), "left")
    assert np.array_equal(got, field.coeffs[:, :, 1, 0])
    got = ghost_state(mesh, field, (2, 2), "top")
    assert np.array_equal(got, field.coeffs[:, :, 2, 2])
    # returned array is a copy, not a view
    got[0, 0] += 1.0
    assert got[0, 0] != field.coeffs[0, 0, 2, 2]


def test_pad_modal_layers(rng):
    mesh = Mesh(0.0, 1.0, 0.0, 1.0, 4, 3, bc_x="periodic", bc_y="outflow")
    field = random_field(mesh, BasisSpec(2), rng)
    ext = pad_modal(field.coeffs, mesh)
    assert ext.shape == (6, 8, 5, 6)
    assert np.array_equal(ext[:, :, 1:-1, 1:-1], field.coeffs)
    # periodic wrap in x
    assert np.array_equal(ext[:, :, 1:-1, 0], field.coeffs[:, :, :, -1])
    # outflow copy in y
    assert np.array_equal(ext[:, :, 0, 1:-1], field.coeffs[:, :, 0, :])


def test_modal_field_shape_guard():
    mesh = make_mesh()
    with pytest.raises(ValueError):
        ModalField(np.zeros((6, 8, 3, 4)), mesh, BasisSpec(2))
