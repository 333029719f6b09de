import pytest

from dipolar.errors import ResolutionError
from dipolar.potentials import AxisymmetricProfile, Constant, Dipole
from dipolar.spectrum import mu1_value
from dipolar.thresholds import (
    hardy_bounds, hardy_level, lambda_n, lambda_n_of_h, marcinkiewicz_norm, weak_norm_direct,
)


def test_constant_lambda_closed_form():
    for dim in (3, 4, 7):
        r = lambda_n_of_h(Constant(dim, 0.1))
        assert r.value == pytest.approx(0.1 / hardy_level(dim), rel=1e-15)


def test_nonpositive_has_zero_lambda():
    assert lambda_n_of_h(Constant(3, -2.0)).value == 0.0
    assert lambda_n_of_h(AxisymmetricProfile.polynomial(4, [-1.0, 0.0, -1.0])).value == 0.0


def test_critical_scale_hits_the_level():
    for dim in (3, 5):
        r = lambda_n(dim)
        assert mu1_value(Dipole(dim, r.critical_scale)) == pytest.approx(-hardy_level(dim), abs=1e-9)
        assert r.refined_value == pytest.approx(r.value, abs=1e-9)


def test_lambda_is_homogeneous_of_degree_one():
    h = AxisymmetricProfile.polynomial(3, [0.1, 0.8, -0.3])
    base = lambda_n_of_h(h).value
    for c in (0.25, 3.0):
        assert lambda_n_of_h(h.scaled(c)).value == pytest.approx(c * base, rel=1e-8)


def test_dipole_lambda_decreases_with_dimension():
    vals = [lambda_n(d, 120, refine=False).value for d in range(3, 8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_refinement_gate_raises():
    with pytest.raises(ResolutionError):
        lambda_n_of_h(Dipole(3, 1.0), 6, refine_tol=1e-14)


def test_dimension_guard():
    with pytest.raises(ValueError):
        lambda_n(2)


def test_hardy_bounds_for_dipole():
    b = hardy_bounds(Dipole(4, 2.0))
    assert b.in_regime
    assert b.lower_margin > 0 and b.upper_margin > 0


def test_marcinkiewicz_constant_closed_form():
    from dipolar.sphere import sphere_area

    for dim in (3, 4, 6):
        expected = dim ** (-2 / dim) * 2.0 * sphere_area(dim) ** (2 / dim)
        assert marcinkiewicz_norm(Constant(dim, 2.0)) == pytest.approx(expected, rel=1e-14)
        assert weak_norm_direct(Constant(dim, 2.0)) == pytest.approx(expected, rel=1e-12)


def test_marcinkiewicz_for_profiles_two_routes():
    h = AxisymmetricProfile.polynomial(4, [0.2, 1.0, -1.5])
    assert marcinkiewicz_norm(h) == pytest.approx(weak_norm_direct(h, level=96), rel=1e-6)
