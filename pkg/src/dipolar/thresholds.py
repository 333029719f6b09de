"""Hardy-type best constants Lambda_N(h) and the inequalities tying them to mu_1(h).

Lambda_N(h) < 1 exactly when mu_1(h) > -((N-2)/2)^2. Since s -> mu_1(s h) is
concave with mu_1(0) = 0, Lambda_N(h) = 1/s* where s* is the first crossing of
the level -((N-2)/2)^2.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ResolutionError
from .potentials import AngularPotential, Constant, Dipole
from .sphere import angle_rule, sphere_area, sphere_nodes, unit_vector
from .spectrum import DEFAULT_BASIS, GalerkinOperator, mu1_value

MARCH_START = 1e-3
MARCH_FACTOR = 1.5
SCALE_MAX = 1e8
BISECTION_STEPS = 80
REFINEMENT_TOL = 1e-6


def hardy_level(dim: int) -> float:
    return 0.25 * (dim - 2) ** 2


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    critical_scale: float | None
    bisection_residual: float
    basis_size: int
    refined_value: float | None = None

    def to_json(self):
        return {"lambda": self.value, "critical_scale": self.critical_scale,
                "residual": self.bisection_residual, "L": self.basis_size,
                "lambda_2L": self.refined_value}


def _critical_scale(op: GalerkinOperator, level: float, scale_max: float):
    g = lambda s: op.lowest(s) + level
    lo, hi = 0.0, MARCH_START
    while g(hi) > 0:
        lo = hi
        hi *= MARCH_FACTOR
        if hi > scale_max:
            raise ResolutionError(
                f"no crossing of mu_1 = {-level:g} for scales up to {scale_max:g}")
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    # the upper end is the side where the level has been reached
    s = hi if abs(g(hi)) <= abs(g(lo)) or lo == 0.0 else lo
    return s, abs(g(s))


def lambda_n_of_h(h: AngularPotential, basis_size: int = DEFAULT_BASIS,
                  scale_max: float = SCALE_MAX, refine: bool = True,
                  refine_tol: float = REFINEMENT_TOL) -> ThresholdResult:
    """Lambda_N(h) with a two-resolution acceptance gate (L and 2L)."""
    if h.is_nonpositive():
        return ThresholdResult(0.0, None, 0.0, basis_size)
    level = hardy_level(h.dim)
    if isinstance(h, Constant):
        s = level / h.level
        return ThresholdResult(1.0 / s, s, 0.0, basis_size, 1.0 / s if refine else None)
    s, res = _critical_scale(GalerkinOperator(h, basis_size), level, scale_max)
    value = 1.0 / s
    refined = None
    if refine:
        L2 = 2 * basis_size
        s2, _ = _critical_scale(GalerkinOperator(h, L2), level, scale_max)
        refined = 1.0 / s2
        if abs(refined - value) > refine_tol:
            raise ResolutionError(
                f"Lambda differs between L={basis_size} ({value:.10g}) and L={L2} "
                f"({refined:.10g}); increase the basis size")
    return ThresholdResult(value, s, res, basis_size, refined)


def lambda_n(dim: int, basis_size: int = DEFAULT_BASIS, refine: bool = True,
             refine_tol: float = REFINEMENT_TOL) -> ThresholdResult:
    """Best constant of the dipole Hardy inequality (x.d)/|x|^3 in R^N."""
    if dim < 3:
        raise ValueError("N must be >= 3")
    return lambda_n_of_h(Dipole(dim, 1.0, unit_vector(dim)), basis_size, refine=refine,
                         refine_tol=refine_tol)


@dataclass(frozen=True)
class HardyBounds:
    lower_24: float
    upper_rem: float | None
    mu1: float
    lam: float

    @property
    def in_regime(self) -> bool:
        """Both bounds are valid when Lambda <= 1, equivalently mu_1 >= -((N-2)/2)^2.
        Beyond that the test-function argument behind them reverses sign."""
        return self.lam <= 1.0

    @property
    def lower_margin(self) -> float:
        """Lambda - lower bound (>= 0 when the bound holds)."""
        return self.lam - self.lower_24

    @property
    def upper_margin(self) -> float | None:
        """upper bound - mu_1 (>= 0 when the bound holds)."""
        return None if self.upper_rem is None else self.upper_rem - self.mu1

    def to_json(self):
        d = asdict(self)
        d["lower_margin"] = self.lower_margin
        d["upper_margin"] = self.upper_margin
        d["in_regime"] = self.in_regime
        return d


def hardy_bounds(h: AngularPotential, basis_size: int = DEFAULT_BASIS) -> HardyBounds:
    """Both sides of  Lambda(h) >= -4 mu_1(h)/(N-2)^2  and
    mu_1(h) <= -((N-2)/2)^2 + (1/Lambda(h) - 1) ess sup h+."""
    N = h.dim
    m = mu1_value(h, basis_size)
    lam = lambda_n_of_h(h, basis_size).value
    lower = -4.0 * m / (N - 2) ** 2
    upper = None
    if lam > 0:
        upper = -hardy_level(N) + (1.0 / lam - 1.0) * h.positive_sup
    return HardyBounds(lower, upper, m, lam)


def _abs_power_integral(h: AngularPotential, p: float, n_nodes: int) -> float:
    """Integral of |h|^p over the sphere, with panels split at sign changes."""
    N = h.dim
    if isinstance(h, Constant):
        return abs(h.level) ** p * sphere_area(N)
    if h.is_axisymmetric:
        knots = set(h.breakpoints)
        knots.update(_sign_changes(h.profile))
        t, w = angle_rule(n_nodes, N, tuple(knots))
        return sphere_area(N - 1) * float(np.sum(w * np.abs(h.profile(t)) ** p))
    pts, w = sphere_nodes(N, n_nodes)
    return float(np.sum(w * np.abs(h(pts)) ** p))


def _sign_changes(f, grid: int = 4001):
    from scipy.optimize import brentq

    t = np.linspace(-1, 1, grid)
    v = f(t)
    roots = []
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
        roots.append(brentq(f, t[i], t[i + 1], xtol=1e-15))
    return roots


def marcinkiewicz_norm(h: AngularPotential, n_nodes: int = 200) -> float:
    """Weak L^{N/2} quasi-norm of h(x/|x|)/|x|^2, i.e. N^{-2/N} ||h||_{L^{N/2}(S^{N-1})}."""
    N = h.dim
    integral = _abs_power_integral(h, 0.5 * N, n_nodes)
    return N ** (-2.0 / N) * integral ** (2.0 / N)


def weak_norm_direct(h: AngularPotential, level: int | None = None, n_levels: int = 9) -> float:
    """sup_s s |{x : |h(x/|x|)|/|x|^2 > s}|^{2/N} by direct quadrature.

    The level set is star-shaped with radius sqrt(|h(theta)|/s); its volume is
    integrated in r with Gauss-Legendre on each ray instead of using the
    closed form r^N/N, so the route shares nothing with the formula above.
    """
    from scipy.special import roots_legendre

    N = h.dim
    if level is None:
        # product grids have ~level^(N-1) nodes; keep them near 2e5
        level = int(min(64, max(4, round(2e5 ** (1.0 / (N - 1))))))
    pts, w = sphere_nodes(N, level)
    hv = np.abs(h(pts))
    g, gw = roots_legendre(max(N, 4))
    best = 0.0
    for s in np.geomspace(1e-3, 1e3, n_levels):
        rho = np.sqrt(hv / s)
        r = 0.5 * rho[:, None] * (g[None, :] + 1.0)
        vol = float(np.sum(w * np.sum(0.5 * rho[:, None] * gw[None, :] * r ** (N - 1), axis=1)))
        best = max(best, s * vol ** (2.0 / N))
    return best
