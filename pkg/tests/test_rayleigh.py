import numpy as np
import pytest

from dipolar.analyzer import binding_necessary
from dipolar.errors import InadmissibleInput, ResolutionError
from dipolar.potentials import Constant
from dipolar.rayleigh import (
    AngularFactor, Bump, ConePotential, CylindricalTestFunction, InverseSquare, LogCutoffRadial,
    QuadratureSpec, SphericalTestFunction, counterexample_search, counterexample_window,
    example_configurations, hardy_ratio, optimize_hardy_ratio, quadratic_form, radial_excess,
    scaling_translation, separable_hardy_ratio, single_cone_positivity, zero_potential,
)
from dipolar.thresholds import hardy_level, lambda_n


def gaussian_like(dim):
    return SphericalTestFunction(dim, LogCutoffRadial(0.0, -2.0, 1.0, 0.8))


def test_radial_derivative_matches_finite_differences():
    f = LogCutoffRadial(0.7, -1.0, 2.0, 0.6)
    r = np.linspace(0.45, 7.0, 40)
    h = 1e-6
    fd = (f.value(r + h) - f.value(r - h)) / (2 * h)
    assert np.allclose(f.derivative(r), fd, atol=1e-6)
    assert f.value(np.array([0.3, 8.0])).tolist() == [0.0, 0.0]


def test_gradient_matches_finite_differences():
    u = SphericalTestFunction(3, LogCutoffRadial(0.5, -1.0, 1.0, 0.5), AngularFactor((0.0, 0.4, -0.2)))
    x = np.array([[0.3, -0.2, 0.5], [1.1, 0.4, -0.3]])
    h = 1e-6
    fd = np.stack([(u.value(x + h * e) - u.value(x - h * e)) / (2 * h) for e in np.eye(3)], axis=1)
    assert np.allclose(u.grad(x), fd, atol=1e-7)
    v = CylindricalTestFunction(4, LogCutoffRadial(0.2, -3.0, -1.0, 0.5), Bump(0.5, 0.2))
    y = np.array([[0.1, 0.05, -0.02, 0.45]])
    fd = np.stack([(v.value(y + h * e) - v.value(y - h * e)) / (2 * h) for e in np.eye(4)], axis=1)
    assert np.allclose(v.grad(y), fd, atol=1e-6)


def test_constant_potential_quotient_below_hardy():
    # int u^2/|x|^2 <= int |grad u|^2 / ((N-2)/2)^2
    for dim in (3, 4):
        u = gaussian_like(dim)
        f = quadratic_form(InverseSquare(Constant(dim, 1.0)), u)
        assert 0 < f.ratio < 1 / hardy_level(dim)


def test_scaling_and_translation_leave_the_quotient_invariant():
    dim = 3
    u = gaussian_like(dim)
    V = InverseSquare(Constant(dim, 1.0))
    base = quadratic_form(V, u).ratio
    moved = scaling_translation(u, 3.0)
    assert quadratic_form(V, moved).ratio == pytest.approx(base, rel=1e-8)
    f0 = quadratic_form(zero_potential, u)
    assert f0.potential == 0.0 and f0.mu_ratio == 1.0


def test_refinement_check_raises_for_coarse_rules():
    u = SphericalTestFunction(3, LogCutoffRadial(0.5, -6.0, 6.0, 0.05))
    with pytest.raises(ResolutionError):
        quadratic_form(InverseSquare(Constant(3, 1.0)), u, QuadratureSpec(n_per_panel=2,
                                                                          angular_level=2))


def test_hardy_ratio_is_a_lower_bound():
    for dim in (3, 4):
        u = SphericalTestFunction(dim, LogCutoffRadial(0.5 * (dim - 2), -8.0, 8.0, 2.0),
                                  AngularFactor((0.0, 0.8)))
        assert hardy_ratio(u) < lambda_n(dim).value


def test_separable_ratio_agrees_with_full_quadrature():
    dim = 3
    radial = LogCutoffRadial(0.5, -6.0, 6.0, 2.0)
    A = AngularFactor((0.0, 0.9, -0.1))
    sep = separable_hardy_ratio(A, dim, radial_excess(radial, dim))
    full = hardy_ratio(SphericalTestFunction(dim, radial, A))
    assert sep == pytest.approx(full, rel=1e-7)


def test_optimized_ratio_increases_with_plateau():
    a = optimize_hardy_ratio(3, plateau=10.0, ramp=2.0).ratio
    b = optimize_hardy_ratio(3, plateau=200.0, ramp=20.0).ratio
    assert a < b < lambda_n(3).value


def test_cone_potential_support():
    V = ConePotential(4, 0.2, np.sqrt(3) / 2, 0.1)
    x = np.array([[0.2, 0, 0, 1.0], [0.05, 0, 0, 1.0], [1.0, 0, 0, 0.2], [0.2, 0, 0, -1.0]])
    assert V(x).tolist() == pytest.approx([0.2 / 0.04, 0.0, 0.0, 0.0])


def test_counterexample_window_and_guards():
    lo, hi = counterexample_window(4)
    assert (lo, hi) == (0.125, 0.25)
    assert single_cone_positivity(4, 0.2) and not single_cone_positivity(4, 0.3)
    with pytest.raises(InadmissibleInput):
        counterexample_search(4, 0.1)
    with pytest.raises(InadmissibleInput):
        counterexample_search(3, 0.2)
    with pytest.raises(InadmissibleInput):
        counterexample_search(4, 0.2, separation=0.0)


def test_counterexample_result_is_scale_free():
    a = counterexample_search(4, 0.2, 1.0)
    b = counterexample_search(4, 0.2, 4.0)
    assert a.success and b.success
    assert a.best_ratio == pytest.approx(b.best_ratio, rel=1e-9)
    assert a.sweep_csv().splitlines()[0] == "T,ramp,tau,w,c,ratio"
    A, B = example_configurations(4, 0.2, a.delta)
    nec = binding_necessary(A, B)
    # slow Galerkin convergence near the axis, but far from the threshold
    assert nec.verdict == "true"
    assert abs(nec.detail["mu1_sum"] - nec.detail["mu1_sum_coarse"]) < 0.01 < nec.margin
