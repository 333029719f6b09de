import numpy as np
import pytest

from dipolar.errors import ResolutionError
from dipolar.potentials import AxisymmetricProfile, Dipole, HarmonicTable
from dipolar.spectrum import (
    GalerkinOperator, dense_legendre_oracle, eval_eigenfunction, mu1, mu1_bounds, mu1_value,
)
from dipolar.sphere import random_directions, sphere_nodes


@pytest.mark.parametrize("dim", [3, 4, 5, 8])
@pytest.mark.parametrize("strength", [0.3, 2.0, 15.0])
def test_dipole_tridiagonal_vs_dense_quadrature_route(dim, strength):
    h = Dipole(dim, strength)
    assert mu1_value(h, 120) == pytest.approx(dense_legendre_oracle(h, 120), abs=1e-11)


def test_profile_dense_vs_oracle_with_breakpoints():
    h = AxisymmetricProfile.band(4, 3.0, -0.1, 0.7)
    assert mu1_value(h, 150) == pytest.approx(dense_legendre_oracle(h, 150), abs=1e-10)


def test_n3_gegenbauer_route_matches_harmonic_route():
    d = np.array([2.0, -1.0, 2.0]) / 3.0
    h = Dipole(3, 1.7, d)
    via_table = mu1_value(HarmonicTable.from_dipole(h), 24)
    assert mu1_value(h, 200) == pytest.approx(via_table, abs=1e-10)


def test_small_dipole_perturbation_series():
    # second-order perturbation: mu_1 = -lambda^2 / (N (N - 1)) + O(lambda^4)
    for dim in (3, 4, 6):
        lam = 1e-3
        assert mu1_value(Dipole(dim, lam), 60) == pytest.approx(-lam ** 2 / (dim * (dim - 1)),
                                                               rel=1e-5)


def test_eigenfunction_is_positive_and_normalized():
    h = Dipole(4, 4.0)
    pair = mu1(h)
    assert pair.residual < 1e-9
    assert pair.min_node_value > 0
    pts, w = sphere_nodes(4, 24)
    vals = pair.at_points(pts)
    assert np.all(vals > 0)
    assert np.sum(w * vals ** 2) == pytest.approx(1.0, rel=1e-8)
    assert eval_eigenfunction(pair, 1.0) > eval_eigenfunction(pair, -1.0)


def test_eigenfunction_solves_the_equation():
    # -Lap_S psi - h psi = mu psi tested against a second basis function by quadrature
    h = AxisymmetricProfile.polynomial(3, [0.2, 1.0, -0.5])
    pair = mu1(h)
    op = GalerkinOperator(h, pair.basis_size)
    A = op.matrix()
    assert np.linalg.norm(A @ pair.coeffs - pair.mu1 * pair.coeffs) < 1e-10


def test_harmonic_eigenpair_positive():
    h = HarmonicTable({(0, 0): 0.3, (1, 1): 1.0, (2, -2): 0.6})
    pair = mu1(h, 14)
    x = random_directions(np.random.default_rng(5), 200, 3)
    assert np.all(pair.at_points(x) > 0)


def test_bounds_are_strict_for_nonconstant():
    for h in (Dipole(3, 1.0), AxisymmetricProfile.polynomial(5, [0.0, 1.0, 1.0])):
        lo, hi = mu1_bounds(h)
        m = mu1_value(h)
        assert lo < m < hi


def test_basis_size_validation():
    with pytest.raises(ValueError):
        mu1(Dipole(3, 1.0), 2)


def test_positivity_guard_triggers_on_underresolved_basis():
    with pytest.raises(ResolutionError):
        mu1(Dipole(3, 400.0), 6)
