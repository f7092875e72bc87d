"""Locally divergence-free projection of the planar magnetic field."""

import numpy as np
import pytest

from conftest import make_mesh, random_field
from dgmhd.basis import BasisSpec, QuadratureRule, mass_diagonal
from dgmhd.dg import ModalField
from dgmhd.ldf import (
    N_DF,
    apply_ldf,
    df_basis_values,
    df_norms,
    expand_df,
    project_ldf,
)
from dgmhd.physics import BX, BY, BZ

HX, HY = 0.7, 1.3


def _one_hot(l):
    d = np.zeros(9)
    d[l - 1] = 1.0
    return d


def _div_at(basis, bx, by, X, Y, hx, hy):
    dx = basis.deriv(1, 0, X, Y, hx, hy)
    dy = basis.deriv(0, 1, X, Y, hx, hy)
    return dx @ bx + dy @ by, np.abs(dx @ bx) + np.abs(dy @ by)


def test_every_df_mode_has_zero_divergence(rng):
    basis = BasisSpec(2)
    X = rng.uniform(-1.0, 1.0, 40)
    Y = rng.uniform(-1.0, 1.0, 40)
    for l in range(1, 10):
        bx, by = expand_df(_one_hot(l), HX, HY)
        div, scale = _div_at(basis, bx, by, X, Y, HX, HY)
        assert np.all(np.abs(div) <= 1e-13 * (scale + 1.0))


def test_df_modes_match_expanded_coefficients(rng):
    """The closed-form mode table and the coefficient expansion agree."""
    basis = BasisSpec(2)
    X = rng.uniform(-1.0, 1.0, 25)
    Y = rng.uniform(-1.0, 1.0, 25)
    phi = basis.eval(X, Y)
    for l in range(1, 10):
        bx, by = expand_df(_one_hot(l), HX, HY)
        vals = df_basis_values(l, X, Y, HX, HY)
        assert np.allclose(phi @ bx, vals[0], atol=1e-14)
        assert np.allclose(phi @ by, vals[1], atol=1e-14)


def test_df_modes_are_orthogonal_with_expected_norms():
    rule = QuadratureRule(3)
    X, Y, W = rule.volume_x, rule.volume_y, rule.volume_w
    vals = np.stack([df_basis_values(l, X, Y, HX, HY) for l in range(1, 10)])
    gram = (HX * HY / 4.0) * np.einsum("q,lvq,mvq->lm", W, vals, vals)
    norms = df_norms(HX, HY)
    assert np.allclose(np.diag(gram), norms, rtol=1e-13)
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() <= 1e-13 * norms.max()


def test_projection_halves_pure_x_ramp():
    """Bx = (hx/2) X, By = 0 projects to coefficient 1/4 on the ramp mode.

    On a square cell the divergence-free part of a one-sided linear ramp
    carries exactly half the field; the removed half is the curl-free
    residual it cannot represent.
    """
    h = 0.5
    bx = np.zeros(6)
    bx[1] = h / 2.0
    by = np.zeros(6)
    df = project_ldf(bx, by, h, h)
    assert df[2] == pytest.approx(0.25, rel=1e-14)
    out_bx, out_by = expand_df(df, h, h)
    assert out_bx[1] == pytest.approx(h / 4.0, rel=1e-14)
    assert out_by[2] == pytest.approx(-h / 4.0, rel=1e-14)
    assert np.all(out_bx[[0, 2, 3, 4, 5]] == 0.0)
    assert np.all(out_by[[0, 1, 3, 4, 5]] == 0.0)


def test_project_then_expand_recovers_df_coefficients(rng):
    d = rng.standard_normal((9, 20))
    bx, by = expand_df(d, HX, HY)
    back = project_ldf(bx, by, HX, HY)
    assert np.allclose(back, d, rtol=1e-13, atol=1e-14)


def test_apply_ldf_is_idempotent(rng):
    mesh = make_mesh(nx=5, ny=4, box=(0.0, 3.5, 0.0, 5.2))
    field = random_field(mesh, BasisSpec(2), rng, amp=0.4)
    once = apply_ldf(field)
    twice = apply_ldf(once)
    assert np.allclose(twice.coeffs, once.coeffs, rtol=1e-13, atol=1e-15)


def test_apply_ldf_fixes_divergence_free_fields(rng):
    mesh = make_mesh(nx=4, ny=3, box=(0.0, 2.8, 0.0, 3.9))
    field = random_field(mesh, BasisSpec(2), rng, amp=0.3)
    d = rng.standard_normal((9, mesh.ny, mesh.nx))
    bx, by = expand_df(d, mesh.hx, mesh.hy)
    field.coeffs[:, BX] = bx
    field.coeffs[:, BY] = by
    out = apply_ldf(field)
    assert np.allclose(out.coeffs[:, BX], bx, rtol=1e-13, atol=1e-15)
    assert np.allclose(out.coeffs[:, BY], by, rtol=1e-13, atol=1e-15)


def test_apply_ldf_touches_only_planar_field_modes(rng):
    mesh = make_mesh(nx=4, ny=4)
    field = random_field(mesh, BasisSpec(2), rng, amp=0.3)
    out = apply_ldf(field)
    keep = [c for c in range(8) if c not in (BX, BY)]
    assert np.array_equal(out.coeffs[:, keep], field.coeffs[:, keep])
    assert np.array_equal(out.coeffs[0, BX], field.coeffs[0, BX])
    assert np.array_equal(out.coeffs[0, BY], field.coeffs[0, BY])
    assert np.array_equal(out.coeffs[:, BZ], field.coeffs[:, BZ])


def test_apply_ldf_output_is_pointwise_divergence_free(rng):
    mesh = make_mesh(nx=6, ny=5, box=(0.0, 1.2, 0.0, 0.5))
    basis = BasisSpec(2)
    field = random_field(mesh, basis, rng, amp=0.5)
    out = apply_ldf(field)
    X = rng.uniform(-1.0, 1.0, 12)
    Y = rng.uniform(-1.0, 1.0, 12)
    dx = basis.deriv(1, 0, X, Y, mesh.hx, mesh.hy)
    dy = basis.deriv(0, 1, X, Y, mesh.hx, mesh.hy)
    ddx = np.einsum("qb,byx->qyx", dx, out.coeffs[:, BX])
    ddy = np.einsum("qb,byx->qyx", dy, out.coeffs[:, BY])
    assert np.all(np.abs(ddx + ddy) <= 1e-12 * (np.abs(ddx) + np.abs(ddy) + 1e-3))


def test_projection_is_best_approximation(rng):
    """No divergence-free candidate beats the projection in the L2 norm."""
    mass = mass_diagonal(BasisSpec(2), HX, HY)

    def dist2(bx_a, by_a, bx_b, by_b):
        return float(mass @ ((bx_a - bx_b) ** 2 + (by_a - by_b) ** 2))

    bx = rng.standard_normal(6)
    by = rng.standard_normal(6)
    pbx, pby = expand_df(project_ldf(bx, by, HX, HY), HX, HY)
    best = dist2(bx, by, pbx, pby)
    for _ in range(100):
        cbx, cby = expand_df(rng.standard_normal(9), HX, HY)
        assert best <= dist2(bx, by, cbx, cby) * (1.0 + 1e-12)


def test_degree_one_projection_keeps_linears_divergence_free(rng):
    mesh = make_mesh(nx=3, ny=3, box=(0.0, 0.9, 0.0, 1.5))
    basis = BasisSpec(1)
    field = random_field(mesh, basis, rng, amp=0.4)
    out = apply_ldf(field)
    assert np.array_equal(out.coeffs[0], field.coeffs[0])
    # constant derivative fields: div = bx[1] * 2/hx + by[2] * 2/hy
    div = (out.coeffs[1, BX] * 2.0 / mesh.hx
           + out.coeffs[2, BY] * 2.0 / mesh.hy)
    scale = np.abs(out.coeffs[1, BX] * 2.0 / mesh.hx) + 1e-12
    assert np.all(np.abs(div) <= 1e-12 * np.maximum(scale, 1.0))


def test_degree_zero_projection_is_identity(rng):
    mesh = make_mesh(nx=3, ny=2)
    field = random_field(mesh, BasisSpec(0), rng, amp=0.4)
    out = apply_ldf(field)
    assert np.array_equal(out.coeffs, field.coeffs)


def test_mode_count_table():
    assert N_DF == {0: 2, 1: 5, 2: 9}


def test_input_validation():
    with pytest.raises(ValueError):
        project_ldf(np.zeros(5), np.zeros(5), 1.0, 1.0)
    with pytest.raises(ValueError):
        expand_df(np.zeros(8), 1.0, 1.0)
    with pytest.raises(ValueError):
        df_basis_values(10, 0.0, 0.0, 1.0, 1.0)
