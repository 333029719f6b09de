import numpy as np
import pytest

from dipolar.potentials import (
    AxisymmetricProfile, Constant, Dipole, HarmonicTable, add_potentials, potential_from_json,
)
from dipolar.sphere import random_directions, sphere_area, sphere_nodes


def test_dipole_basic_statistics():
    h = Dipole(4, 2.5)
    assert h.ess_sup == pytest.approx(2.5)
    assert h.ess_inf == pytest.approx(-2.5)
    assert h.mean == 0.0
    assert h.positive_sup == pytest.approx(2.5)
    x = random_directions(np.random.default_rng(1), 10, 4)
    assert np.allclose(h(x), 2.5 * x[:, -1])


def test_constant_statistics():
    h = Constant(3, -1.25)
    assert h.mean == h.ess_sup == h.ess_inf == -1.25
    assert h.is_nonpositive()


def test_profile_mean_matches_sphere_quadrature():
    h = AxisymmetricProfile.polynomial(4, [0.3, -1.0, 2.0])
    pts, w = sphere_nodes(4, 10)
    ref = np.sum(w * h(pts)) / sphere_area(4)
    assert h.mean == pytest.approx(ref, rel=1e-12)


def test_band_and_mollified_band():
    b = AxisymmetricProfile.band(3, 2.0, 0.2, 0.6)
    m = AxisymmetricProfile.mollified_band(3, 2.0, 0.2, 0.6, 1e-3)
    t = np.array([-0.5, 0.1, 0.4, 0.59, 0.9])
    assert b.profile(t).tolist() == [0.0, 0.0, 2.0, 2.0, 0.0]
    assert np.allclose(m.profile(t), b.profile(t), atol=1e-10)
    assert np.all(np.abs(m.profile(np.linspace(-1, 1, 501))) <= 2.0)
    with pytest.raises(ValueError):
        AxisymmetricProfile.mollified_band(3, 1.0, 0.2, 0.6, 0.0)


def test_cylindrical_band_rejects_poles():
    with pytest.raises(ValueError):
        AxisymmetricProfile.band(4, 1.0, 0.5, 1.0, cylindrical=True)


@pytest.mark.parametrize("h", [
    Constant(3, 1.5),
    Dipole(5, 0.7, [0, 1, 0, 0, 0]),
    AxisymmetricProfile.polynomial(4, [1.0, 0.0, -2.0]),
    AxisymmetricProfile.band(3, 1.0, -0.2, 0.4),
    AxisymmetricProfile.mollified_band(4, -1.0, 0.0, 0.5, 0.05),
    AxisymmetricProfile.polynomial(3, [0.5, 1.0]).scaled(3.0),
    HarmonicTable({(0, 0): 1.0, (2, 1): -0.5}),
])
def test_json_round_trip(h):
    g = potential_from_json(h.to_json())
    x = random_directions(np.random.default_rng(2), 25, h.dim)
    assert np.allclose(g(x), h(x), rtol=1e-14, atol=1e-14)


def test_harmonic_table_reproduces_dipole():
    d = np.array([1.0, 2.0, -2.0]) / 3.0
    h = Dipole(3, 1.3, d)
    t = HarmonicTable.from_dipole(h)
    x = random_directions(np.random.default_rng(3), 40, 3)
    assert np.allclose(t(x), h(x), atol=1e-13)


def test_add_potentials():
    s = add_potentials(Dipole(4, 1.0), Dipole(4, 2.0))
    assert isinstance(s, Dipole) and s.strength == pytest.approx(3.0)
    z = add_potentials(Dipole(3, 1.0), Dipole(3, -1.0))
    assert isinstance(z, Constant) and z.level == 0.0
    c = add_potentials(Constant(3, 1.0), Constant(3, 0.5))
    assert c.level == 1.5
    # opposite axes of the same line are merged into one profile
    p = add_potentials(AxisymmetricProfile.polynomial(3, [0.0, 0.0, 1.0]),
                       Dipole(3, 1.0, [0, 0, -1]))
    x = random_directions(np.random.default_rng(4), 20, 3)
    assert np.allclose(p(x), x[:, 2] ** 2 - x[:, 2])
    # generic N = 3 sums fall back to harmonic tables
    q = add_potentials(Dipole(3, 1.0, [1, 0, 0]), Dipole(3, 2.0, [0, 1, 0]))
    assert np.allclose(q(x), x[:, 0] + 2 * x[:, 1], atol=1e-13)
    r = add_potentials(Dipole(3, 1.0, [1, 0, 0]), HarmonicTable({(0, 0): np.sqrt(4 * np.pi)}))
    assert np.allclose(r(x), x[:, 0] + 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        add_potentials(Dipole(3, 1.0), Dipole(4, 1.0))


def test_bad_documents():
    with pytest.raises(ValueError):
        potential_from_json({"dim": 3})
    with pytest.raises(ValueError):
        potential_from_json({"kind": "nope", "dim": 3})
    with pytest.raises((ValueError, TypeError)):
        Dipole(2, 1.0)
