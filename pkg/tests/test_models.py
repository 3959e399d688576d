"""Constitutive catalog: hand values, finite-difference checks, invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from croccolab.fieldcalc import Grid, OrderField, OrderGradField, ScalarField, VectorField
from croccolab.models import (
    ComplexFluidModel,
    EvaluationError,
    KortewegCoEnergy,
    KortewegModel,
    ModelError,
    OrderCoEnergy,
    catalog_models,
    check_sphere_constraint,
    gl_partials,
    korteweg_coenergy_terms,
    korteweg_partials,
    order_coenergy_terms,
    validate_partials,
)


def fields_on(grid, iota, gradiota, eta):
    return (
        ScalarField(grid, np.full(grid.extents, iota)),
        VectorField(grid, np.broadcast_to(gradiota, grid.extents + (len(gradiota),)).copy()),
        ScalarField(grid, np.full(grid.extents, eta)),
    )


# ---------------------------------------------------------------------------
# capillary potential
# ---------------------------------------------------------------------------


def test_korteweg_partials_at_energy_minimum():
    grid = Grid.periodic(8)
    model = KortewegModel(f_kind="quadratic", c=2.0, iota_ref=1.5, beta=0.3)
    iota, gi, eta = fields_on(grid, 1.5, (0.0, 0.0), 0.2)
    parts = korteweg_partials(model, iota, gi, eta)
    assert np.max(np.abs(parts.dphi_diota.values)) == 0.0
    assert np.max(np.abs(parts.dphi_dgrad_iota.values)) == 0.0
    assert np.min(parts.theta.values) > 0.0


def test_korteweg_gradient_partial_is_linear():
    grid = Grid.periodic(8, dim=3)
    model = KortewegModel(beta=2.0)
    iota, gi, eta = fields_on(grid, 1.0, (1.0, 0.0, 0.0), 0.0)
    parts = korteweg_partials(model, iota, gi, eta)
    assert np.allclose(parts.dphi_dgrad_iota.values[..., 0], 2.0)
    assert np.max(np.abs(parts.dphi_dgrad_iota.values[..., 1:])) == 0.0


def test_two_well_partial_hand_value():
    # d/diota of c*(i-1)^2*(i-2)^2 is 2c(i-1)(i-2)(2i-3): zero at i = 1.5
    model = KortewegModel(f_kind="two-well", c=1.0, well_1=1.0, well_2=2.0)
    assert model.dphi_diota(np.array(1.5)) == pytest.approx(0.0, abs=1e-15)
    assert model.dphi_diota(np.array(1.2)) == pytest.approx(2 * 0.2 * (-0.8) * (-0.6))


def test_theta_positive_everywhere():
    model = KortewegModel()
    eta = np.linspace(-30.0, 30.0, 101)
    assert np.min(model.theta(eta)) > 0.0


def test_exp_overflow_reported_with_cell():
    grid = Grid.periodic(8)
    model = KortewegModel()
    iota, gi, eta = fields_on(grid, 1.0, (0.0, 0.0), 0.0)
    hot = np.zeros(grid.extents)
    hot[2, 3] = 1e4  # exp overflows to inf
    with np.errstate(over="ignore"):
        with pytest.raises(EvaluationError, match=r"\(2, 3\)"):
            korteweg_partials(model, iota, gi, ScalarField(grid, hot))


# ---------------------------------------------------------------------------
# rate co-energy
# ---------------------------------------------------------------------------


def test_coenergy_rest_state_and_constant_kappa():
    grid = Grid.periodic(8)
    iota = ScalarField(grid, np.full(grid.extents, 1.3))
    zero = ScalarField(grid, np.zeros(grid.extents))
    terms = korteweg_coenergy_terms(KortewegCoEnergy(kappa0=2.0, kappa1=1.0), iota, zero)
    assert np.max(np.abs(terms.dchi_diota_dot.values)) == 0.0
    assert np.max(np.abs(terms.dchi_diota.values)) == 0.0
    rate = ScalarField(grid, np.full(grid.extents, 0.7))
    const_kappa = korteweg_coenergy_terms(KortewegCoEnergy(kappa0=2.0, kappa1=0.0), iota, rate)
    assert np.max(np.abs(const_kappa.dchi_diota.values)) == 0.0


def test_coenergy_hand_values():
    # kappa0=1, kappa1=2, iota=1, rate=3: kappa=3, so 3*3=9 and 0.5*2*9=9
    co = KortewegCoEnergy(kappa0=1.0, kappa1=2.0)
    assert co.dchi_diota_dot(1.0, 3.0) == pytest.approx(9.0)
    assert co.dchi_diota(1.0, 3.0) == pytest.approx(9.0)


# ---------------------------------------------------------------------------
# order-parameter potential
# ---------------------------------------------------------------------------


def test_gl_partials_at_anchor():
    grid = Grid.periodic(8)
    model = ComplexFluidModel(m=2, k=2.0, nu_ref=(0.1, -0.2), a=3.0)
    iota = ScalarField(grid, np.ones(grid.extents))
    eta = ScalarField(grid, np.zeros(grid.extents))
    nu = OrderField(grid, np.broadcast_to([0.1, -0.2], grid.extents + (2,)).copy())
    gnu = OrderGradField(grid, np.zeros(grid.extents + (2, 2)))
    parts = gl_partials(model, iota, nu, gnu, eta)
    assert np.max(np.abs(parts.dphi_dnu.values)) == 0.0
    assert np.max(np.abs(parts.dphi_dgrad_nu.values)) == 0.0


def test_gl_gradient_partial_linear_and_quadratic_hand_value():
    grid = Grid.periodic(8)
    model = ComplexFluidModel(m=2, k=2.0, a=3.0)
    iota = ScalarField(grid, np.ones(grid.extents))
    eta = ScalarField(grid, np.zeros(grid.extents))
    gnu_values = np.zeros(grid.extents + (2, 2))
    gnu_values[..., 0, 0] = 1.0
    gnu = OrderGradField(grid, gnu_values)
    nu = OrderField(grid, np.broadcast_to([0.5, -1.0], grid.extents + (2,)).copy())
    parts = gl_partials(model, iota, nu, gnu, eta)
    assert np.allclose(parts.dphi_dgrad_nu.values[..., 0, 0], 3.0)
    assert np.max(np.abs(parts.dphi_dgrad_nu.values[..., 1, :])) == 0.0
    # quadratic gamma with k=2 and nu - nu0 = (0.5, -1): dphi_dnu = (1, -2)
    assert np.allclose(parts.dphi_dnu.values[..., 0], 1.0)
    assert np.allclose(parts.dphi_dnu.values[..., 1], -2.0)


def test_gl_chart_dimension_mismatch():
    grid = Grid.periodic(8)
    model = ComplexFluidModel(m=3)
    iota = ScalarField(grid, np.ones(grid.extents))
    eta = ScalarField(grid, np.zeros(grid.extents))
    nu = OrderField(grid, np.zeros(grid.extents + (2,)))
    gnu = OrderGradField(grid, np.zeros(grid.extents + (2, 2)))
    with pytest.raises(ModelError, match="mismatch"):
        gl_partials(model, iota, nu, gnu, eta)


def test_sphere_constraint_validation():
    grid = Grid.periodic(8)
    model = ComplexFluidModel(m=2, sphere_constrained=True)
    good = np.zeros(grid.extents + (2,))
    good[..., 0] = 1.0
    check_sphere_constraint(model, OrderField(grid, good))
    bad = good.copy()
    bad[1, 2, 0] = 1.1
    with pytest.raises(ModelError, match=r"\(1, 2\)"):
        check_sphere_constraint(model, OrderField(grid, bad))


# ---------------------------------------------------------------------------
# order co-energy
# ---------------------------------------------------------------------------


def test_order_coenergy_hand_values_and_legendre():
    co = OrderCoEnergy(((2.0, 0.0), (0.0, 3.0)), (1.0, 0.0))
    nd = np.array([1.0, 1.0])
    assert np.allclose(co.dchi_dnu_dot(None, nd), [3.0, 3.0])
    k = co.dchi_dnu_dot(None, nd) @ nd - co.chi(None, nd)
    assert k == pytest.approx(2.5)
    assert co.kinetic_energy(nd) == pytest.approx(2.5)


def test_order_coenergy_zero_at_rest():
    grid = Grid.periodic(8)
    co = OrderCoEnergy(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))
    nu = OrderField(grid, np.zeros(grid.extents + (2,)))
    terms = order_coenergy_terms(co, nu, nu)
    assert np.max(np.abs(terms.dchi_dnu_dot.values)) == 0.0
    assert np.max(np.abs(terms.dchi_dnu.values)) == 0.0


def test_order_coenergy_identity_matrix():
    co = OrderCoEnergy(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))
    assert np.allclose(co.dchi_dnu_dot(None, np.array([1.0, 2.0])), [1.0, 2.0])


def test_order_coenergy_validation():
    with pytest.raises(ModelError):
        OrderCoEnergy(((1.0, 0.5), (0.0, 1.0)), (0.0, 0.0))  # not symmetric
    with pytest.raises(ModelError):
        OrderCoEnergy(((-1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))  # not PSD
    assert OrderCoEnergy.zero(3).is_zero


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=2, max_size=2),
       st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_legendre_transform_independent_of_lambda(nudot, lam):
    omega = ((1.5, 0.4), (0.4, 1.1))
    with_lam = OrderCoEnergy(omega, tuple(lam))
    without = OrderCoEnergy(omega, (0.0, 0.0))
    nd = np.array(nudot)
    k1 = with_lam.dchi_dnu_dot(None, nd) @ nd - with_lam.chi(None, nd)
    k2 = without.dchi_dnu_dot(None, nd) @ nd - without.chi(None, nd)
    assert k1 == pytest.approx(k2, abs=1e-12)


# ---------------------------------------------------------------------------
# objectivity
# ---------------------------------------------------------------------------


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 6.283), st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_korteweg_potential_objectivity(theta, grad):
    model = KortewegModel(beta=0.8, c=1.2)
    g = np.array(grad)
    rotated = _rotation(theta) @ g
    phi_1 = model.phi(1.3, g, 0.4)
    phi_2 = model.phi(1.3, rotated, 0.4)
    assert phi_1 == pytest.approx(phi_2, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 6.283))
def test_gl_potential_objectivity(theta):
    model = ComplexFluidModel(m=2, a=0.9)
    rng = np.random.default_rng(3)
    gnu = rng.uniform(-1, 1, (2, 2))
    rotated = gnu @ _rotation(theta).T  # spatial index rotates
    nu = np.array([0.3, -0.2])
    assert model.phi(1.2, nu, gnu, 0.1) == pytest.approx(
        model.phi(1.2, nu, rotated, 0.1), abs=1e-12
    )


# ---------------------------------------------------------------------------
# finite-difference validation
# ---------------------------------------------------------------------------


def test_validate_partials_all_catalog_models():
    for model in catalog_models():
        report = validate_partials(model, n_points=100)
        assert report.passed, [c.entry for c in report.failures]


def test_validate_partials_detects_corruption():
    class Corrupted(KortewegModel):
        def dphi_diota(self, iota):
            return 1.1 * super().dphi_diota(iota)

    report = validate_partials(Corrupted(c=1.0, beta=0.5), n_points=50)
    assert not report.passed
    assert [c.entry for c in report.failures] == ["dphi_diota"]


def test_validate_partials_beta_zero_gradient_free():
    model = KortewegModel(beta=0.0)
    report = validate_partials(model, n_points=30)
    assert report.passed
    assert np.max(np.abs(model.dphi_dgrad_iota(np.array([1.0, 2.0, 3.0])))) == 0.0


# ---------------------------------------------------------------------------
# chart reduction to the capillary model
# ---------------------------------------------------------------------------


def test_complex_model_reduces_to_korteweg_partials():
    grid = Grid.periodic(16)
    x, y = grid.meshgrid()
    kmodel = KortewegModel(f_kind="quadratic", c=1.3, iota_ref=1.8, beta=0.7)
    cmodel = ComplexFluidModel(m=1, k=0.0, a=0.7, f_kind="quadratic", c=1.3, iota_ref=1.8)
    iota = ScalarField(grid, 2.0 + 0.3 * np.sin(x) * np.cos(y))
    eta = ScalarField(grid, 0.2 * np.sin(y))
    from croccolab.fieldcalc import grad_scalar, order_grad

    gi = grad_scalar(iota)
    kparts = korteweg_partials(kmodel, iota, gi, eta)
    nu = OrderField(grid, iota.values[..., None])
    gnu = order_grad(nu)
    cparts = gl_partials(cmodel, iota, nu, gnu, eta)
    assert np.array_equal(kparts.dphi_diota.values, cparts.dphi_diota.values)
    assert np.array_equal(kparts.theta.values, cparts.theta.values)
    assert np.array_equal(gi.values * 0.7, cparts.dphi_dgrad_nu.values[..., 0, :])
    assert np.max(np.abs(cparts.dphi_dnu.values)) == 0.0
