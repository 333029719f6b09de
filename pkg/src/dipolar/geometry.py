"""Star-shaped regions |x - a| < R (psi^{h1}/psi^{h2})^sigma and exponent windows."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleInput
from .potentials import AngularPotential, potential_from_json
from .sphere import check_unit, sphere_nodes
from .spectrum import DEFAULT_BASIS, SphericalEigenpair, mu1

STRICT_SLACK = 1e-12
_PRODUCT_LEVEL = {3: 64, 4: 32, 5: 16, 6: 10, 7: 8}


def solve_pair(h: AngularPotential, basis_size: int = DEFAULT_BASIS) -> SphericalEigenpair:
    return mu1(h, basis_size)


def _common_axis(pairs):
    """Shared symmetry axis of axisymmetric pairs (constants fit any axis), else None.

    Returns (ok, axis)."""
    axis = None
    for p in pairs:
        if not p.is_axisymmetric:
            return False, None
        if p.axis is None:
            continue
        if axis is None:
            axis = p.axis
        elif abs(abs(float(axis @ p.axis)) - 1.0) > 1e-12:
            return False, None
    return True, axis


def probe_directions(pairs, dim: int, meridian_samples: int = 4001):
    """Directions on which region comparisons are made.

    When every pair is symmetric about one axis a fine meridian suffices
    (functions of t only); otherwise a product grid on the sphere is used.
    """
    ok, axis = _common_axis(pairs)
    if ok:
        if axis is None:
            axis = np.eye(dim)[-1]
        perp = np.eye(dim)[0] if abs(axis[0]) < 0.9 else np.eye(dim)[1]
        perp = perp - (perp @ axis) * axis
        perp /= np.linalg.norm(perp)
        phi = np.linspace(0.0, np.pi, meridian_samples)
        return np.cos(phi)[:, None] * axis + np.sin(phi)[:, None] * perp
    pts, _ = sphere_nodes(dim, _PRODUCT_LEVEL.get(dim, 6))
    return pts


@dataclass(frozen=True, eq=False)
class DipolarRegion:
    sigma: float
    scale: float
    h_num: AngularPotential
    h_den: AngularPotential
    center: np.ndarray = None
    pair_num: SphericalEigenpair = None
    pair_den: SphericalEigenpair = None
    basis_size: int = DEFAULT_BASIS

    def __post_init__(self):
        if not self.sigma > 0 or not self.scale > 0:
            raise ValueError("sigma and R must be positive")
        if self.h_num.dim != self.h_den.dim:
            raise ValueError("coefficients live on different spheres")
        N = self.h_num.dim
        c = np.zeros(N) if self.center is None else np.asarray(self.center, dtype=float)
        if c.shape != (N,):
            raise ValueError(f"center must have {N} components")
        object.__setattr__(self, "center", c)
        if self.pair_num is None:
            object.__setattr__(self, "pair_num", solve_pair(self.h_num, self.basis_size))
        if self.pair_den is None:
            if self.h_den is self.h_num:
                object.__setattr__(self, "pair_den", self.pair_num)
            else:
                object.__setattr__(self, "pair_den", solve_pair(self.h_den, self.basis_size))

    @property
    def dim(self) -> int:
        return self.h_num.dim

    def ratio(self, directions):
        return self.pair_num.at_points(directions) / self.pair_den.at_points(directions)

    def rho(self, directions):
        """Vectorized boundary radius on unit directions (..., N)."""
        return self.scale * self.ratio(directions) ** self.sigma

    def with_scale(self, scale: float) -> "DipolarRegion":
        return DipolarRegion(self.sigma, scale, self.h_num, self.h_den, self.center,
                             self.pair_num, self.pair_den, self.basis_size)

    def swapped(self) -> "DipolarRegion":
        return DipolarRegion(self.sigma, self.scale, self.h_den, self.h_num, self.center,
                             self.pair_den, self.pair_num, self.basis_size)

    def probe(self):
        return probe_directions([self.pair_num, self.pair_den], self.dim)

    def to_json(self):
        return {"sigma": self.sigma, "R": self.scale, "center": self.center.tolist(),
                "h_num": self.h_num.to_json(), "h_den": self.h_den.to_json()}

    @classmethod
    def from_json(cls, doc, basis_size: int = DEFAULT_BASIS):
        return cls(float(doc["sigma"]), float(doc["R"]), potential_from_json(doc["h_num"]),
                   potential_from_json(doc["h_den"]), doc.get("center"), basis_size=basis_size)

    def profile_csv(self, samples: int = 181) -> str:
        """(polar angle from the symmetry axis, rho) along one meridian, as CSV text."""
        ok, axis = _common_axis([self.pair_num, self.pair_den])
        if not ok:
            raise ValueError("profile export needs a common symmetry axis")
        dirs = probe_directions([self.pair_num, self.pair_den], self.dim, samples)
        angle = np.linspace(0.0, np.pi, samples)
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["angle", "rho"])
        for a, r in zip(angle, self.rho(dirs)):
            w.writerow([f"{a:.12g}", f"{r:.15g}"])
        return buf.getvalue()


def boundary_radius(region: DipolarRegion, direction) -> float:
    d = check_unit(direction, 1e-10, "direction")
    return float(region.rho(d))


def contains(region: DipolarRegion, x) -> bool:
    v = np.asarray(x, dtype=float) - region.center
    r = np.linalg.norm(v)
    if r == 0.0:
        return True
    return bool(r < region.rho(v / r))


def contains_many(region: DipolarRegion, xs) -> np.ndarray:
    v = np.asarray(xs, dtype=float) - region.center
    r = np.linalg.norm(v, axis=-1)
    out = np.ones(r.shape, dtype=bool)
    nz = r > 0
    out[nz] = r[nz] < region.rho(v[nz] / r[nz, None])
    return out


def bounding_balls(region: DipolarRegion):
    """(r_inner, r_outer) = (min rho, max rho) over the probe directions."""
    rho = region.rho(region.probe())
    return float(rho.min()), float(rho.max())


@dataclass(frozen=True)
class ExponentWindow:
    """Open window a < 1/sigma1 < 1/sigma1 + 1/sigma2 < a + m."""
    a: float
    cap: float              # m = min over coefficients of sqrt(a^2 + mu_1)
    mus: tuple
    variant: bool = False

    @property
    def inv_sigma1(self):
        return (self.a, self.a + self.cap)

    @property
    def nonempty(self) -> bool:
        return self.cap > 0

    @property
    def width(self) -> float:
        return self.cap

    def inv_sigma2(self, inv_sigma1: float):
        """Admissible open interval of 1/sigma2 once 1/sigma1 is chosen."""
        lo, hi = self.inv_sigma1
        if not lo < inv_sigma1 < hi:
            return (0.0, 0.0)
        return (0.0, self.a + self.cap - inv_sigma1)

    def contains(self, inv_sigma1: float, inv_sigma2: float, slack: float = STRICT_SLACK) -> bool:
        return (self.a + slack < inv_sigma1
                and inv_sigma2 > slack
                and inv_sigma1 + inv_sigma2 < self.a + self.cap - slack)

    def midpoint(self):
        """A canonical interior choice (1/sigma1, 1/sigma2)."""
        s1 = self.a + self.cap / 3.0
        return s1, self.cap / 3.0


def admissible_exponents(h_list, basis_size: int = DEFAULT_BASIS, variant: bool = False,
                         mus=None) -> ExponentWindow:
    """Exponent window for the juxtaposition lemmas.

    ``variant=True`` also caps the window by (N-2)/2, as in the multi-pole
    construction.
    """
    h_list = list(h_list)
    if not h_list:
        raise ValueError("need at least one coefficient")
    N = h_list[0].dim
    a = 0.5 * (N - 2)
    if mus is None:
        mus = [mu1(h, basis_size).mu1 for h in h_list]
    for m in mus:
        if not m > -a * a:
            raise InadmissibleInput(
                f"mu_1 = {m:.12g} is not above -((N-2)/2)^2 = {-a * a:g}")
    cap = min(np.sqrt(a * a + m) for m in mus)
    if variant:
        cap = min(cap, a)
    return ExponentWindow(a, float(cap), tuple(mus), variant)


def nesting_margin(inner: DipolarRegion, outer: DipolarRegion) -> float:
    """min over probe directions of rho_outer - rho_inner."""
    dirs = probe_directions([inner.pair_num, inner.pair_den, outer.pair_num, outer.pair_den],
                            inner.dim)
    return float(np.min(outer.rho(dirs) - inner.rho(dirs)))


def check_nesting(inner: DipolarRegion, outer: DipolarRegion) -> bool:
    return nesting_margin(inner, outer) > STRICT_SLACK
