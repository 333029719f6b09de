"""Quadratic forms on explicit test functions.

Q(u) = int |grad u|^2 - int V u^2 is evaluated by tensor quadrature in the
natural coordinates of each test function: log-radius panels times a sphere
rule for spherical functions, log-|x'| panels times an axial rule (times a rule
on S^{N-2}) for cylindrical ones. Every ratio reported here comes from an
explicit function, so 1 - potential/dirichlet is an upper bound for mu(V) up to
quadrature error, which is controlled by a refinement check.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.special import roots_legendre

from .errors import InadmissibleInput, ResolutionError
from .config import MultipoleConfiguration
from .potentials import AngularPotential, AxisymmetricProfile, Dipole
from .sphere import angle_rule, check_unit, sphere_area, sphere_nodes, unit_vector
from .thresholds import hardy_level

QUAD_TOL = 1e-8


# --- quadrature -----------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    n_per_panel: int = 16       # Gauss-Legendre nodes per unit panel in log-radius
    panel_length: float = 1.0
    angular_level: int = 8      # sphere rule level (full grids) / meridian nodes per panel / 4
    axial_nodes: int = 32       # Gauss-Legendre nodes along the cylinder axis
    tol: float = QUAD_TOL

    def refined(self) -> "QuadratureSpec":
        return replace(self, n_per_panel=2 * self.n_per_panel,
                       angular_level=2 * self.angular_level, axial_nodes=2 * self.axial_nodes)


def _panels(edges, q: QuadratureSpec):
    """Gauss-Legendre nodes on [edges[0], edges[-1]] with panels no longer than
    q.panel_length and breaks at every edge."""
    g, gw = roots_legendre(q.n_per_panel)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        m = max(1, int(np.ceil((hi - lo) / q.panel_length)))
        cuts = np.linspace(lo, hi, m + 1)
        for a, b in zip(cuts[:-1], cuts[1:]):
            half = 0.5 * (b - a)
            xs.append(a + half * (g + 1.0))
            ws.append(half * gw)
    return np.concatenate(xs), np.concatenate(ws)


# --- profiles -------------------------------------------------------------------

def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x)


@dataclass(frozen=True)
class LogCutoffRadial:
    """f(r) = r^{-p} chi(log r): chi is 1 on [s_lo + ramp, s_hi - ramp] and rises /
    falls with C^1 smoothsteps of length ``ramp``. Supported in [e^{s_lo}, e^{s_hi}]."""
    p: float
    s_lo: float
    s_hi: float
    ramp: float

    def __post_init__(self):
        if not self.s_hi - self.s_lo >= 2 * self.ramp > 0:
            raise ValueError("need s_hi - s_lo >= 2 ramp > 0")

    @property
    def edges(self):
        return np.array([self.s_lo, self.s_lo + self.ramp, self.s_hi - self.ramp, self.s_hi])

    def chi(self, s):
        up, dup = _smoothstep((s - self.s_lo) / self.ramp)
        dn, ddn = _smoothstep((self.s_hi - s) / self.ramp)
        return up * dn, (dup * dn - up * ddn) / self.ramp

    def value(self, r):
        s = np.log(r)
        c, _ = self.chi(s)
        return r ** -self.p * c

    def derivative(self, r):
        s = np.log(r)
        c, dc = self.chi(s)
        return r ** (-self.p - 1.0) * (dc - self.p * c)


@dataclass(frozen=True)
class AngularFactor:
    """A(t) = exp(P(t)) or P(t), coefficients of P in increasing degree."""
    coeffs: tuple = (0.0,)
    exponential: bool = True

    def value(self, t):
        P = np.polynomial.Polynomial(self.coeffs)
        return np.exp(P(t)) if self.exponential else P(t)

    def derivative(self, t):
        P = np.polynomial.Polynomial(self.coeffs)
        if self.exponential:
            return P.deriv()(t) * np.exp(P(t))
        return P.deriv()(t)


@dataclass(frozen=True)
class Bump:
    """eta(z) = (1 - ((z - c)/w)^2)^2 on |z - c| < w; C^1."""
    c: float
    w: float

    def value(self, z):
        x = (z - self.c) / self.w
        return np.where(np.abs(x) < 1, (1 - x * x) ** 2, 0.0)

    def derivative(self, z):
        x = (z - self.c) / self.w
        return np.where(np.abs(x) < 1, -4 * x * (1 - x * x) / self.w, 0.0)


# --- test functions -------------------------------------------------------------

class TestFunction:
    __test__ = False            # keep pytest from collecting this class
    dim: int

    def value(self, x): ...
    def grad(self, x): ...
    def nodes(self, q: QuadratureSpec, axial: bool = False): ...


@dataclass(frozen=True)
class SphericalTestFunction(TestFunction):
    """u(x) = f(|x - c|) A((x - c)/|x - c| . d)."""
    dim: int
    radial: LogCutoffRadial
    angular: AngularFactor = AngularFactor()
    axis: np.ndarray = None
    center: np.ndarray = None
    amplitude: float = 1.0

    def __post_init__(self):
        ax = unit_vector(self.dim) if self.axis is None else check_unit(self.axis)
        object.__setattr__(self, "axis", ax)
        c = np.zeros(self.dim) if self.center is None else np.asarray(self.center, float)
        object.__setattr__(self, "center", c)

    def _polar(self, x):
        y = np.atleast_2d(x) - self.center
        r = np.linalg.norm(y, axis=1)
        th = y / r[:, None]
        return r, th, th @ self.axis

    def value(self, x):
        r, _, t = self._polar(x)
        return self.amplitude * self.radial.value(r) * self.angular.value(t)

    def grad(self, x):
        r, th, t = self._polar(x)
        f, df = self.radial.value(r), self.radial.derivative(r)
        A, dA = self.angular.value(t), self.angular.derivative(t)
        tang = self.axis[None, :] - t[:, None] * th
        return self.amplitude * ((df * A)[:, None] * th + (f * dA / r)[:, None] * tang)

    def nodes(self, q: QuadratureSpec, axial: bool = False):
        s, ws = _panels(self.radial.edges, q)
        r = np.exp(s)
        wr = ws * r ** self.dim
        if axial:
            t, wt = angle_rule(4 * q.angular_level, self.dim)
            perp = np.eye(self.dim)[0] if abs(self.axis[0]) < 0.9 else np.eye(self.dim)[1]
            perp = perp - (perp @ self.axis) * self.axis
            perp /= np.linalg.norm(perp)
            dirs = t[:, None] * self.axis + np.sqrt(1 - t * t)[:, None] * perp
            wd = wt * sphere_area(self.dim - 1)
        else:
            dirs, wd = sphere_nodes(self.dim, q.angular_level)
        pts = self.center + (r[:, None, None] * dirs[None, :, :]).reshape(-1, self.dim)
        return pts, np.outer(wr, wd).ravel()


@dataclass(frozen=True)
class CylindricalTestFunction(TestFunction):
    """u(x) = g(|x'|) eta(x_N) about the x_N axis through ``center``."""
    dim: int
    radial: LogCutoffRadial
    bump: Bump
    center: np.ndarray = None
    amplitude: float = 1.0

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("cylindrical test functions need N >= 3")
        c = np.zeros(self.dim) if self.center is None else np.asarray(self.center, float)
        object.__setattr__(self, "center", c)

    def _cyl(self, x):
        y = np.atleast_2d(x) - self.center
        xp = y[:, :-1]
        return xp, np.linalg.norm(xp, axis=1), y[:, -1]

    def value(self, x):
        _, rho, z = self._cyl(x)
        return self.amplitude * self.radial.value(rho) * self.bump.value(z)

    def grad(self, x):
        xp, rho, z = self._cyl(x)
        g, dg = self.radial.value(rho), self.radial.derivative(rho)
        e, de = self.bump.value(z), self.bump.derivative(z)
        out = np.empty((len(rho), self.dim))
        out[:, :-1] = (dg * e / rho)[:, None] * xp
        out[:, -1] = g * de
        return self.amplitude * out

    @property
    def support_box(self):
        """(rho_min, rho_max, z_min, z_max) relative to the centre."""
        return (float(np.exp(self.radial.s_lo)), float(np.exp(self.radial.s_hi)),
                self.bump.c - self.bump.w, self.bump.c + self.bump.w)

    def nodes(self, q: QuadratureSpec, axial: bool = False):
        s, ws = _panels(self.radial.edges, q)
        rho = np.exp(s)
        wr = ws * rho ** (self.dim - 1)
        g, gw = roots_legendre(q.axial_nodes)
        b = self.bump
        zl = np.concatenate([b.c - b.w + 0.5 * b.w * (g + 1), b.c + 0.5 * b.w * (g + 1)])
        wz = np.concatenate([0.5 * b.w * gw, 0.5 * b.w * gw])
        if axial:
            dirs = np.eye(self.dim - 1)[:1]
            wd = np.array([sphere_area(self.dim - 1)])
        else:
            dirs, wd = sphere_nodes(self.dim - 1, q.angular_level)
        P = rho[:, None, None, None] * dirs[None, None, :, :] * np.ones((1, len(zl), 1, 1))
        Z = np.broadcast_to(zl[None, :, None, None], (len(rho), len(zl), len(dirs), 1))
        pts = np.concatenate([P, Z], axis=-1).reshape(-1, self.dim) + self.center
        w = (wr[:, None, None] * wz[None, :, None] * wd[None, None, :]).ravel()
        return pts, w


@dataclass(frozen=True)
class ScaledTestFunction(TestFunction):
    """u_mu(x) = mu^{-(N-2)/2} u((x - shift)/mu)."""
    base: TestFunction
    mu: float
    shift: np.ndarray

    @property
    def dim(self):
        return self.base.dim

    @property
    def _amp(self):
        return self.mu ** (-0.5 * (self.dim - 2))

    def value(self, x):
        return self._amp * self.base.value((np.atleast_2d(x) - self.shift) / self.mu)

    def grad(self, x):
        return self._amp / self.mu * self.base.grad((np.atleast_2d(x) - self.shift) / self.mu)

    def nodes(self, q: QuadratureSpec, axial: bool = False):
        p, w = self.base.nodes(q, axial)
        return self.shift + self.mu * p, w * self.mu ** self.dim


def scaling_translation(u: TestFunction, mu: float, shift=None) -> TestFunction:
    """u_mu(x) = mu^{-(N-2)/2} u((x - shift)/mu); the Dirichlet energy is unchanged."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    shift = np.zeros(u.dim) if shift is None else np.asarray(shift, dtype=float)
    if isinstance(u, ScaledTestFunction):
        return ScaledTestFunction(u.base, u.mu * mu, shift + mu * u.shift)
    return ScaledTestFunction(u, float(mu), shift)


# --- potentials -----------------------------------------------------------------

@dataclass(frozen=True)
class InverseSquare:
    """h((x - c)/|x - c|)/|x - c|^2."""
    h: AngularPotential
    center: np.ndarray = None

    def __call__(self, x):
        c = np.zeros(self.h.dim) if self.center is None else self.center
        y = np.atleast_2d(x) - c
        r = np.linalg.norm(y, axis=1)
        return self.h(y / r[:, None]) / r ** 2


@dataclass(frozen=True)
class ConePotential:
    """lambda chi_C(x - c)/|x' - c'|^2, C = {sign t > cos_open, sin(angle to e_N) > delta}.

    The narrow end is tested through the sine so that tiny delta stays resolvable."""
    dim: int
    level: float
    cos_open: float
    delta: float
    sign: int = 1
    center: np.ndarray = None

    def __call__(self, x):
        c = np.zeros(self.dim) if self.center is None else self.center
        y = np.atleast_2d(x) - c
        r = np.linalg.norm(y, axis=1)
        rho = np.linalg.norm(y[:, :-1], axis=1)
        inside = (self.sign * y[:, -1] > self.cos_open * r) & (rho > self.delta * r)
        out = np.zeros(len(y))
        out[inside] = self.level / rho[inside] ** 2
        return out


@dataclass(frozen=True)
class SumPotential:
    terms: tuple

    def __call__(self, x):
        return sum(t(x) for t in self.terms)


def zero_potential(x):
    return np.zeros(len(np.atleast_2d(x)))


# --- quadratic form -------------------------------------------------------------

@dataclass(frozen=True)
class FormValues:
    dirichlet: float
    potential: float
    mu_ratio: float
    refinement_change: float

    @property
    def ratio(self) -> float:
        return self.potential / self.dirichlet

    def to_json(self):
        return {"dirichlet": self.dirichlet, "potential": self.potential,
                "mu_ratio": self.mu_ratio, "ratio": self.ratio,
                "refinement_change": self.refinement_change}


def _integrals(V, u, q, axial):
    pts, w = u.nodes(q, axial)
    g = u.grad(pts)
    uu = u.value(pts)
    D = float(np.sum(w * np.sum(g * g, axis=1)))
    P = float(np.sum(w * V(pts) * uu * uu))
    return D, P


def quadratic_form(V, u: TestFunction, q: QuadratureSpec = QuadratureSpec(), axial: bool = False,
                   check: bool = True) -> FormValues:
    """(int |grad u|^2, int V u^2, 1 - potential/dirichlet).

    ``axial=True`` uses the reduced rule, valid when V u^2 and |grad u|^2 are
    invariant under rotations about the symmetry line of u."""
    D, P = _integrals(V, u, q, axial)
    change = 0.0
    if check:
        D2, P2 = _integrals(V, u, q.refined(), axial)
        change = max(abs(D2 - D), abs(P2 - P)) / max(abs(D2), 1e-300)
        if change > q.tol:
            raise ResolutionError(f"quadrature changed by {change:.2e} under refinement "
                                  f"(tolerance {q.tol:.1e})")
        D, P = D2, P2
    if not D > 0:
        raise ValueError("test function has zero Dirichlet energy")
    return FormValues(D, P, 1.0 - P / D, change)


def hardy_ratio(u: TestFunction, d=None, q: QuadratureSpec = QuadratureSpec(),
                check: bool = True) -> float:
    """int (x.d/|x|^3) u^2 / int |grad u|^2: a lower bound for Lambda_N."""
    N = u.dim
    d = unit_vector(N) if d is None else check_unit(d)
    V = InverseSquare(Dipole(N, 1.0, d))
    axial = isinstance(u, SphericalTestFunction) and abs(abs(float(u.axis @ d)) - 1) < 1e-14 \
        and not np.any(u.center)
    return quadratic_form(V, u, q, axial, check).ratio


# --- separable Hardy-ratio optimisation ------------------------------------------

def radial_excess(radial: LogCutoffRadial, dim: int, n_per_panel: int = 32) -> float:
    """int f'^2 r^{N-1} / int f^2 r^{N-3} - ((N-2)/2)^2 for p = (N-2)/2, in log variables."""
    if abs(radial.p - 0.5 * (dim - 2)) > 1e-15:
        raise ValueError("excess is defined for the critical exponent")
    s, w = _panels(radial.edges, QuadratureSpec(n_per_panel=n_per_panel,
                                                panel_length=max(radial.ramp / 4, 1.0)))
    c, dc = radial.chi(s)
    return float(np.sum(w * dc * dc) / np.sum(w * c * c))


def separable_hardy_ratio(A: AngularFactor, dim: int, excess: float, n_nodes: int = 400) -> float:
    """Hardy ratio of f(r) A(t) when f has radial excess ``excess`` over ((N-2)/2)^2."""
    t, w = angle_rule(n_nodes, dim)
    a, da = A.value(t), A.derivative(t)
    num = np.sum(w * t * a * a)
    den = (hardy_level(dim) + excess) * np.sum(w * a * a) + np.sum(w * (1 - t * t) * da * da)
    return float(num / den)


@dataclass
class HardyOptimum:
    ratio: float
    coeffs: tuple
    excess: float
    radial: LogCutoffRadial

    def test_function(self, dim) -> SphericalTestFunction:
        return SphericalTestFunction(dim, self.radial, AngularFactor(self.coeffs))

    def to_json(self):
        return {"ratio": self.ratio, "coeffs": list(self.coeffs), "excess": self.excess,
                "plateau": self.radial.s_hi - self.radial.s_lo - 2 * self.radial.ramp,
                "ramp": self.radial.ramp}


def optimize_hardy_ratio(dim: int, degree: int = 2, plateau: float = 1000.0, ramp: float = 100.0,
                         start=None) -> HardyOptimum:
    """Maximise the Hardy ratio over u = r^{-(N-2)/2} chi(log r) exp(P(t)), deg P = degree."""
    a = 0.5 * (dim - 2)
    half = 0.5 * plateau + ramp
    radial = LogCutoffRadial(a, -half, half, ramp)
    e = radial_excess(radial, dim)
    x0 = np.zeros(degree) if start is None else np.asarray(start, float)
    x0[0] = x0[0] or 1.0

    def neg(c):
        return -separable_hardy_ratio(AngularFactor((0.0, *c)), dim, e)

    res = minimize(neg, x0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
    return HardyOptimum(float(-res.fun), (0.0, *map(float, res.x)), e, radial)


# --- cones and the anti-localization example --------------------------------------

def single_cone_positivity(dim: int, level: float) -> bool:
    """lambda chi_C/|x'|^2 is form-bounded by the cylindrical Hardy constant ((N-3)/2)^2."""
    if dim < 4:
        raise ValueError("N must be >= 4")
    return bool(level < (0.5 * (dim - 3)) ** 2)


def counterexample_window(dim: int):
    c = (0.5 * (dim - 3)) ** 2
    return 0.5 * c, c


COS_CONE = np.sqrt(3.0) / 2.0


@dataclass
class CounterexampleResult:
    dim: int
    level: float
    separation: float
    best_ratio: float
    success: bool
    params: dict
    delta: float
    support_ok: bool
    hardy_quotient: float
    evaluations: int
    sweep: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "counterexample" if self.success else "inconclusive"

    def to_json(self):
        return {"dim": self.dim, "lambda": self.level, "mu": self.separation,
                "best_ratio": self.best_ratio, "verdict": self.verdict, "params": self.params,
                "delta": self.delta, "support_ok": self.support_ok,
                "hardy_quotient": self.hardy_quotient, "evaluations": self.evaluations}

    def sweep_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        keys = ["T", "ramp", "tau", "w", "c", "ratio"]
        w.writerow(keys)
        for row in self.sweep:
            w.writerow([f"{row[k]:.12g}" for k in keys])
        return buf.getvalue()


def _example_function(dim, T, ramp, tau, w, c, kappa=0.9):
    r1 = kappa * min(c - w, 1.0 - c - w) / np.sqrt(3.0)
    if not r1 > 0:
        return None
    p = 0.5 * (dim - 3) - tau
    s_hi = np.log(r1)
    radial = LogCutoffRadial(p, s_hi - T, s_hi, ramp)
    return CylindricalTestFunction(dim, radial, Bump(c, w))


def _support_slack(u: CylindricalTestFunction):
    """delta = min sqrt(1 - t^2) over the support for both cone tests, and whether
    the support box sits inside C+ and inside e_N + C-."""
    r0, r1, z0, z1 = u.support_box
    ok = np.sqrt(3.0) * r1 < z0 and np.sqrt(3.0) * r1 < 1.0 - z1
    d1 = r0 / np.hypot(r0, z1)
    d2 = r0 / np.hypot(r0, 1.0 - z0)
    return float(min(d1, d2)), bool(ok)


def example_potential(dim: int, level: float, delta: float, separation: float = 1.0):
    """V_1(x) + V_2(x - mu e_N), cones between angles cos = sqrt(3)/2 and sqrt(1 - delta^2)."""
    V1 = ConePotential(dim, level, COS_CONE, delta)
    V2 = ConePotential(dim, level, COS_CONE, delta, -1, separation * unit_vector(dim))
    return SumPotential((V1, V2))


def example_ratio(dim, level, u: CylindricalTestFunction, separation=1.0,
                  q: QuadratureSpec = QuadratureSpec(), check=True):
    """(form values, cone parameter delta, support inside Q') for u scaled by ``separation``."""
    slack, ok = _support_slack(u)
    # cones a little wider than the support, so V = 2 lambda/|x'|^2 on all of it
    delta = 0.5 * slack
    V = example_potential(dim, level, delta, separation)
    v = scaling_translation(u, separation) if separation != 1.0 else u
    f = quadratic_form(V, v, q, axial=True, check=check)
    return f, delta, ok


def example_configurations(dim: int, level: float, delta: float):
    """V_1 = h_1/|x|^2 and V_2 = h_2/|x|^2 as configurations with one pole at the origin
    (radius 1) and the same coefficient at infinity (R = 1)."""
    th = np.sqrt(1.0 - delta * delta)
    h1 = AxisymmetricProfile.band(dim, level, COS_CONE, th, cylindrical=True)
    h2 = AxisymmetricProfile.band(dim, level, -th, -COS_CONE, cylindrical=True)
    origin = np.zeros((1, dim))
    return (MultipoleConfiguration(dim, origin, (h1,), (1.0,), h1, 1.0),
            MultipoleConfiguration(dim, origin, (h2,), (1.0,), h2, 1.0))


def counterexample_search(dim: int, level: float, separation: float = 1.0,
                          q: QuadratureSpec = QuadratureSpec(n_per_panel=12, axial_nodes=24),
                          refine_rounds: int = 3, min_slack: float = 1e-6) -> CounterexampleResult:
    """Grid search then coordinate refinement over the cylindrical family; success
    when the quotient int (V_1 + V_2(. - mu e_N)) u^2 / int |grad u|^2 exceeds 1.

    Candidates whose angular slack falls below ``min_slack`` are rejected, which
    keeps the cone coefficients (sup = lambda/delta^2) representable."""
    if dim < 4:
        raise InadmissibleInput("the example needs N >= 4")
    lo, hi = counterexample_window(dim)
    if not lo < level < hi:
        raise InadmissibleInput(f"lambda = {level} outside the window ({lo:g}, {hi:g})")
    if not separation > 0:
        raise InadmissibleInput("separation must be positive")
    sweep = []
    cache = {}

    def evaluate(T, ramp_frac, tau, w, c):
        key = (round(T, 12), round(ramp_frac, 12), round(tau, 12), round(w, 12), round(c, 12))
        if key in cache:
            return cache[key]
        u = _example_function(dim, T, ramp_frac * T, tau, w, c)
        val = -np.inf
        if u is not None and 0 < w and w < c < 1 - w:
            delta, ok = _support_slack(u)
            if ok and 0.5 * delta >= min_slack:
                val = example_ratio(dim, level, u, 1.0, q, check=False)[0].ratio
        cache[key] = val
        sweep.append({"T": T, "ramp": ramp_frac * T, "tau": tau, "w": w, "c": c, "ratio": val})
        return val

    grid = [(T, rf, tau, w, 0.5) for T in (6.0, 8.0, 10.0, 12.0) for rf in (0.15, 0.25, 0.33)
            for tau in (0.0, 0.05) for w in (0.15, 0.25, 0.35)]
    best = max(grid, key=lambda g: evaluate(*g))
    steps = [4.0, 0.04, 0.02, 0.04, 0.04]
    bounds = [(4.0, 36.0), (0.05, 0.5), (0.0, 0.5 * (dim - 3)), (0.02, 0.48), (0.05, 0.95)]
    best = list(best)
    for _ in range(refine_rounds):
        for i in range(5):
            for sgn in (-1, 1):
                while True:
                    trial = list(best)
                    trial[i] = float(np.clip(trial[i] + sgn * steps[i], *bounds[i]))
                    if trial == best or not evaluate(*trial) > evaluate(*best):
                        break
                    best = trial
        steps = [0.5 * s for s in steps]
    T, rf, tau, w, c = best
    u = _example_function(dim, T, rf * T, tau, w, c)
    f, delta, ok = example_ratio(dim, level, u, separation, q, check=True)
    ratio = f.ratio
    # the Hardy quotient int |grad u|^2 / int u^2/|x'|^2 of the witness
    hq = 2 * level / ratio if ratio > 0 else np.inf
    params = {"T": T, "ramp": rf * T, "tau": tau, "w": w, "c": c, "kappa": 0.9,
              "r0": float(np.exp(u.radial.s_lo)), "r1": float(np.exp(u.radial.s_hi))}
    return CounterexampleResult(dim, float(level), float(separation), float(ratio),
                                bool(ratio > 1.0 and ok), params, delta, ok, float(hq),
                                len(cache), sweep)
