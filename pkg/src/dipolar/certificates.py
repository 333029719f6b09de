"""Piecewise supersolutions for juxtaposed inverse-square potentials.

An outer certificate lives around the point at infinity: it equals
omega^{-1/2} on a core region and decays like |x|^{-1/sigma1} psi^{h1} and then
|x|^{-(1/sigma1 + 1/sigma2)} psi^{h2} in two dipolar shells. The inner
certificate is its Kelvin transform. On every smooth piece

    -Laplace(u) - h(x/|x|) u / |x|^2 = c * u / |x|^2

with an explicit branch constant c, and the jumps of the normal derivative
across the interfaces have the favourable sign, so min(c) is a positivity
margin.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .errors import InadmissibleInput
from .geometry import DipolarRegion, ExponentWindow, admissible_exponents, check_nesting, nesting_margin
from .potentials import AngularPotential, Constant
from .sphere import random_directions, sphere_area
from .spectrum import SphericalEigenpair, mu1

CERT_BASIS = 64
INTERFACE_TOL = 1e-8
RESIDUAL_TOL = 1e-6


def kelvin_transform(f, x):
    """|x|^{-(N-2)} f(x/|x|^2) for x of shape (N,) or (M, N)."""
    x = np.asarray(x)
    if x.dtype != np.longdouble:
        x = x.astype(float)
    N = x.shape[-1]
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0):
        raise ValueError("Kelvin transform is undefined at the origin")
    y = x / r2[..., None]
    return r2 ** (-(N - 2) / 2) * f(y)


def kelvin(f, dim: int | None = None):
    """The transformed function as a callable."""
    return lambda x: kelvin_transform(f, x)


def branch_constant(dim: int, mu: float, shift: float) -> float:
    """((N-2)/2)^2 + mu - (shift - (N-2)/2)^2, the coefficient produced by
    -Laplace - h/|x|^2 on |x|^{-shift} psi^h (or its Kelvin image)."""
    a = 0.5 * (dim - 2)
    return a * a + mu - (shift - a) ** 2


def certificate_margin(dim, mu_1, mu_2, inv_sigma1, inv_sigma2) -> float:
    return min(branch_constant(dim, mu_1, inv_sigma1),
               branch_constant(dim, mu_2, inv_sigma1 + inv_sigma2))


def _radius(x):
    return np.sqrt(np.sum(x * x, axis=-1))


@dataclass(frozen=True, eq=False)
class PiecewiseCertificate:
    """Three-piece supersolution; pieces are indexed 0 (core / outside),
    1 (middle shell) and 2 (far piece / innermost region).

    Piece k equals K_k |x|^{-p_k} g_k(x/|x|) with g_0 = 1, g_1 = psi^{h1},
    g_2 = psi^{h2}. ``first`` is the region bounded by the first interface
    (core for the outer kind, the outer dipolar set for the inner kind).
    """

    kind: str
    h1: AngularPotential
    h2: AngularPotential
    sigma1: float
    sigma2: float
    scales: tuple
    pair1: SphericalEigenpair
    pair2: SphericalEigenpair
    first: DipolarRegion
    second: DipolarRegion
    window: ExponentWindow
    nesting_ok: bool

    @property
    def dim(self) -> int:
        return self.h1.dim

    @property
    def inv_sigma1(self):
        return 1.0 / self.sigma1

    @property
    def inv_sigma2(self):
        return 1.0 / self.sigma2

    @property
    def branch_constants(self):
        N = self.dim
        return (0.0,
                branch_constant(N, self.pair1.mu1, self.inv_sigma1),
                branch_constant(N, self.pair2.mu1, self.inv_sigma1 + self.inv_sigma2))

    @property
    def margin(self) -> float:
        return min(self.branch_constants[1:])

    @property
    def window_ok(self) -> bool:
        return self.window.contains(self.inv_sigma1, self.inv_sigma2)

    def _coefficients(self):
        N = self.dim
        s1, s = self.inv_sigma1, self.inv_sigma1 + self.inv_sigma2
        w = sphere_area(N) ** -0.5
        A, B = self.scales
        if self.kind == "outer":
            K = (w, A ** s1, A ** s1 * B ** self.inv_sigma2)
            p = (0.0, s1, s)
        else:
            K = (w, A ** -s1, A ** -s1 * B ** -self.inv_sigma2)
            p = (N - 2.0, N - 2.0 - s1, N - 2.0 - s)
        return K, p

    def piece(self, k: int, x):
        """Smooth extension of piece k to R^N minus the origin."""
        x = np.atleast_2d(x)
        r = _radius(x)
        theta = x / r[:, None]
        K, p = self._coefficients()
        if k == 0:
            g = 1.0
        else:
            g = (self.pair1 if k == 1 else self.pair2).at_points(theta)
        return K[k] * r ** (-p[k]) * g

    def interface_radii(self, theta):
        return self.first.rho(theta), self.second.rho(theta)

    def piece_index(self, x):
        x = np.atleast_2d(x)
        r = _radius(x)
        theta = (x / r[:, None]).astype(float)
        ra, rb = self.interface_radii(theta)
        r = r.astype(float)
        if self.kind == "outer":
            return np.where(r < ra, 0, np.where(r < rb, 1, 2))
        return np.where(r > ra, 0, np.where(r > rb, 1, 2))

    def __call__(self, x):
        x = np.atleast_2d(x)
        idx = self.piece_index(x)
        out = np.empty(len(x), dtype=x.dtype if x.dtype == np.longdouble else float)
        for k in range(3):
            m = idx == k
            if np.any(m):
                out[m] = self.piece(k, x[m])
        return out

    def coefficient(self, k: int):
        return (Constant(self.dim, 0.0), self.h1, self.h2)[k]

    def summary(self):
        return {"kind": self.kind, "sigma1": self.sigma1, "sigma2": self.sigma2,
                "scales": list(self.scales), "mu1_h1": self.pair1.mu1, "mu1_h2": self.pair2.mu1,
                "branch_constants": list(self.branch_constants), "margin": self.margin,
                "window_ok": self.window_ok, "nesting_ok": self.nesting_ok}


def _pairs(h1, h2, basis_size, pairs):
    if pairs is not None:
        return pairs
    p1 = mu1(h1, basis_size)
    p2 = p1 if h2 is h1 else mu1(h2, basis_size)
    return p1, p2


def _window(h1, h2, p1, p2, variant):
    return admissible_exponents([h1, h2], mus=[p1.mu1, p2.mu1], variant=variant)


def build_outer_certificate(h1, h2, sigma1, sigma2, R1, R2, basis_size: int = CERT_BASIS,
                            check: bool = True, variant: bool = False, pairs=None):
    """Certificate around infinity. ``check=False`` skips the window and nesting
    preconditions, which is only meant for negative controls."""
    N = h1.dim
    p1, p2 = _pairs(h1, h2, basis_size, pairs)
    zero = Constant(N, 0.0)
    p0 = mu1(zero, 4)
    core = DipolarRegion(sigma1, R1, h1, zero, pair_num=p1, pair_den=p0)
    shell = DipolarRegion(sigma2, R2, h2, h1, pair_num=p2, pair_den=p1)
    win = _window(h1, h2, p1, p2, variant) if check else _unchecked_window(N, p1, p2, variant)
    nest = check_nesting(core, shell)
    cert = PiecewiseCertificate("outer", h1, h2, float(sigma1), float(sigma2), (float(R1), float(R2)),
                                p1, p2, core, shell, win, nest)
    if check:
        _enforce(cert, "E^{sigma1,R1}_{h1,0} must lie inside E^{sigma2,R2}_{h2,h1}",
                 nesting_margin(core, shell))
    return cert


def build_inner_certificate(h1, h2, sigma1, sigma2, r1, r2, basis_size: int = CERT_BASIS,
                            check: bool = True, variant: bool = False, pairs=None):
    """Kelvin image of the outer certificate with R_i = 1/r_i, around a pole."""
    N = h1.dim
    p1, p2 = _pairs(h1, h2, basis_size, pairs)
    zero = Constant(N, 0.0)
    p0 = mu1(zero, 4)
    outer_set = DipolarRegion(sigma1, r1, zero, h1, pair_num=p0, pair_den=p1)
    inner_set = DipolarRegion(sigma2, r2, h1, h2, pair_num=p1, pair_den=p2)
    win = _window(h1, h2, p1, p2, variant) if check else _unchecked_window(N, p1, p2, variant)
    nest = check_nesting(inner_set, outer_set)
    cert = PiecewiseCertificate("inner", h1, h2, float(sigma1), float(sigma2), (float(r1), float(r2)),
                                p1, p2, outer_set, inner_set, win, nest)
    if check:
        _enforce(cert, "E^{sigma2,r2}_{h1,h2} must lie inside E^{sigma1,r1}_{0,h1}",
                 nesting_margin(inner_set, outer_set))
    return cert


def _unchecked_window(N, p1, p2, variant):
    a = 0.5 * (N - 2)
    cap = min(np.sqrt(max(a * a + m, 0.0)) for m in (p1.mu1, p2.mu1))
    if variant:
        cap = min(cap, a)
    return ExponentWindow(a, float(cap), (p1.mu1, p2.mu1), variant)


def _enforce(cert, nest_msg, nest_margin):
    if not cert.window_ok:
        lo, hi = cert.window.inv_sigma1
        raise InadmissibleInput(
            f"exponents 1/sigma1={cert.inv_sigma1:.6g}, 1/sigma1+1/sigma2="
            f"{cert.inv_sigma1 + cert.inv_sigma2:.6g} violate the window ({lo:.6g}, {hi:.6g})")
    if not cert.nesting_ok:
        raise InadmissibleInput(f"{nest_msg} (margin {nest_margin:.3e})")


def nesting_scales(h1, h2, sigma1, sigma2, first_scale: float, kind: str = "outer",
                   factor: float = 2.0, basis_size: int = CERT_BASIS, pairs=None):
    """A second scale that makes the nesting hold with room to spare.

    outer: R2 = factor * (smallest R2 for which the core fits in the shell).
    inner: r2 = (largest admissible r2) / factor.
    """
    N = h1.dim
    p1, p2 = _pairs(h1, h2, basis_size, pairs)
    zero = Constant(N, 0.0)
    p0 = mu1(zero, 4)
    if kind == "outer":
        core = DipolarRegion(sigma1, first_scale, h1, zero, pair_num=p1, pair_den=p0)
        unit = DipolarRegion(sigma2, 1.0, h2, h1, pair_num=p2, pair_den=p1)
        dirs = core.probe() if core.probe().shape[0] >= unit.probe().shape[0] else unit.probe()
        return factor * float(np.max(core.rho(dirs) / unit.rho(dirs)))
    outer_set = DipolarRegion(sigma1, first_scale, zero, h1, pair_num=p0, pair_den=p1)
    unit = DipolarRegion(sigma2, 1.0, h1, h2, pair_num=p1, pair_den=p2)
    dirs = outer_set.probe() if outer_set.probe().shape[0] >= unit.probe().shape[0] else unit.probe()
    return float(np.min(outer_set.rho(dirs) / unit.rho(dirs))) / factor


# ---------------------------------------------------------------------------
# verification

def fd_laplacian(f, x, step):
    """Central second differences, componentwise step ``step`` (array per point)."""
    x = np.atleast_2d(x)
    N = x.shape[1]
    h = np.asarray(step, dtype=x.dtype)
    fx = f(x)
    lap = np.zeros(len(x), dtype=x.dtype)
    for i in range(N):
        e = np.zeros(N, dtype=x.dtype)
        e[i] = 1
        lap += f(x + h[:, None] * e) - 2 * fx + f(x - h[:, None] * e)
    return lap / h ** 2, fx


def _interface_mismatch(cert, theta):
    ra, rb = cert.interface_radii(theta)
    pa = ra[:, None] * theta
    pb = rb[:, None] * theta
    v0, v1a = cert.piece(0, pa), cert.piece(1, pa)
    v1b, v2 = cert.piece(1, pb), cert.piece(2, pb)
    mism_a = np.abs(v0 - v1a) / np.abs(v0)
    mism_b = np.abs(v1b - v2) / np.abs(v1b)
    return float(max(mism_a.max(), mism_b.max()))


def _sample_points(cert, rng, count, step):
    """Random interior points with their piece index, away from interfaces so the
    whole FD stencil stays inside one smooth piece."""
    N = cert.dim
    xs, ks = [], []
    need = count
    while need > 0:
        m = max(2 * need, 256)
        theta = random_directions(rng, m, N)
        ra, rb = cert.interface_radii(theta)
        lo = np.minimum(ra, rb) / 3.0
        hi = np.maximum(ra, rb) * 3.0
        r = np.exp(rng.uniform(np.log(lo), np.log(hi)))
        far = (np.abs(r - ra) > 10 * step * r) & (np.abs(r - rb) > 10 * step * r)
        x = (r[:, None] * theta)[far]
        if len(x) == 0:
            continue
        k = cert.piece_index(x)
        ok = np.ones(len(x), dtype=bool)
        for i in range(N):
            for sgn in (-1.0, 1.0):
                y = x.copy()
                y[:, i] += sgn * step * _radius(x)
                ok &= cert.piece_index(y) == k
        xs.append(x[ok])
        ks.append(k[ok])
        need -= int(ok.sum())
    return np.concatenate(xs)[:count], np.concatenate(ks)[:count]


def residuals(cert, x, k, fd_step):
    """|-Lap u - h u/|x|^2 - c u/|x|^2| * |x|^2 / u, evaluated in extended precision."""
    X = np.asarray(x, dtype=np.longdouble)
    out = np.empty(len(X))
    c = cert.branch_constants
    for piece in range(3):
        m = k == piece
        if not np.any(m):
            continue
        Xm = X[m]
        r = _radius(Xm)
        lap, u = fd_laplacian(lambda y: cert.piece(piece, y), Xm, fd_step * r)
        theta = (Xm / r[:, None]).astype(float)
        hv = cert.coefficient(piece)(theta)
        res = -lap * r * r / u - hv - c[piece]
        out[m] = np.abs(res.astype(float))
    return out


@dataclass(frozen=True)
class CertificateReport:
    margin: float
    branch_constants: tuple
    interface_mismatch: float
    worst_residual: float
    n_points: int
    fd_step: float
    window_ok: bool
    nesting_ok: bool
    verdict: bool
    residual_tol: float = RESIDUAL_TOL
    interface_tol: float = INTERFACE_TOL

    def to_json(self):
        return {"margin": self.margin, "branch_constants": list(self.branch_constants),
                "interface_mismatch": self.interface_mismatch,
                "worst_residual": self.worst_residual, "n_points": self.n_points,
                "fd_step": self.fd_step, "window_ok": self.window_ok,
                "nesting_ok": self.nesting_ok, "residual_tol": self.residual_tol,
                "interface_tol": self.interface_tol,
                "verdict": "pass" if self.verdict else "fail"}


def verify_certificate(cert: PiecewiseCertificate, samples: int = 10_000, fd_step: float = 1e-4,
                       directions: int = 256, seed: int = 0,
                       residual_tol: float = RESIDUAL_TOL,
                       interface_tol: float = INTERFACE_TOL) -> CertificateReport:
    rng = np.random.default_rng(seed)
    theta = random_directions(rng, directions, cert.dim)
    mismatch = _interface_mismatch(cert, theta)
    x, k = _sample_points(cert, rng, samples, fd_step)
    worst = float(residuals(cert, x, k, fd_step).max())
    verdict = (cert.margin > 0 and cert.window_ok and cert.nesting_ok
               and mismatch < interface_tol and worst < residual_tol)
    return CertificateReport(cert.margin, cert.branch_constants, mismatch, worst, len(x),
                             fd_step, cert.window_ok, cert.nesting_ok, bool(verdict),
                             residual_tol, interface_tol)


def positivity_lower_bound(epsilon: float) -> float:
    """mu(V) >= eps/(1+eps) once -Lap(phi) - V phi >= eps V phi for a positive phi."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return epsilon / (1.0 + epsilon)


def epsilon_from_alpha(alpha: float, max_lambda: float) -> float:
    """eps = (alpha + max Lambda)^{-1} - 1, for which eps/(1+eps) = 1 - max Lambda - alpha."""
    if not 0 < alpha < 1 - max_lambda:
        raise ValueError("need 0 < alpha < 1 - max Lambda")
    return 1.0 / (alpha + max_lambda) - 1.0


# ---------------------------------------------------------------------------
# non-self-adjointness witness

@dataclass(frozen=True, eq=False)
class WitnessFunction:
    omega: float
    beta: float
    alpha: float
    delta: float
    mu1: float
    s: np.ndarray
    phi: np.ndarray
    gronwall_constant: float
    l2_truncated: float
    l2_tail: float
    finite: bool

    @property
    def l2_norm_estimate(self) -> float:
        return self.l2_truncated + self.l2_tail if self.finite else float("inf")

    def envelope_holds(self) -> bool:
        env = self.gronwall_constant * np.exp(-self.omega * self.s)
        return bool(np.all(self.phi >= -1e-12 * env) and np.all(self.phi <= env * (1 + 1e-9)))

    def to_json(self):
        return {"omega": self.omega, "beta": self.beta, "alpha": self.alpha,
                "delta": self.delta, "mu1": self.mu1, "s_min": float(self.s[0]),
                "gronwall_constant": self.gronwall_constant,
                "envelope_holds": self.envelope_holds(),
                "l2_truncated": self.l2_truncated, "l2_tail": self.l2_tail,
                "l2_norm_estimate": self.l2_norm_estimate if self.finite else None,
                "l2_finite": self.finite}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["s", "phi"])
        for s, p in zip(self.s, self.phi):
            w.writerow([f"{s:.15g}", f"{p:.15g}"])
        return buf.getvalue()

    def v(self, x, center, pair: SphericalEigenpair):
        """|x-a|^{-(N-2)/2} phi(ln|x-a|) psi(theta) on B(a, delta), zero outside."""
        x = np.atleast_2d(x) - np.asarray(center, dtype=float)
        r = _radius(x)
        a = 0.5 * (x.shape[1] - 2)
        inside = (r > 0) & (r < self.delta)
        out = np.zeros(len(x))
        ri = r[inside]
        ph = np.interp(np.log(ri), self.s, self.phi)
        out[inside] = ri ** -a * ph * pair.at_points(x[inside] / ri[:, None])
        return out


def witness_omega(mu: float, dim: int) -> float:
    a = 0.5 * (dim - 2)
    if not a * a + mu > 0:
        raise InadmissibleInput("mu_1 must exceed -((N-2)/2)^2 for a real exponent")
    return float(np.sqrt(a * a + mu))


def nonselfadjoint_witness(h: AngularPotential, beta: float, alpha: float, delta: float,
                           s_span: float | None = None, basis_size: int = CERT_BASIS,
                           n_grid: int = 4001, mu: float | None = None) -> WitnessFunction:
    """Solve phi'' - omega^2 phi = beta e^{2s} phi backwards from s = ln(delta)
    with phi(ln delta) = 0, phi'(ln delta) = alpha."""
    if not alpha < 0:
        raise ValueError("alpha must be negative")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if not delta > 0:
        raise ValueError("delta must be positive")
    return _witness(h, beta, alpha, delta, s_span, basis_size, n_grid, mu)


def _witness(h, beta, alpha, delta, s_span, basis_size, n_grid, mu):
    N = h.dim
    m = mu1(h, basis_size).mu1 if mu is None else mu
    om = witness_omega(m, N)
    s0 = np.log(delta)
    if s_span is None:
        s_span = 40.0 / om
    s_min = s0 - s_span

    def rhs(s, y):
        return [y[1], (om * om + beta * np.exp(2 * s)) * y[0]]

    grid = np.linspace(s0, s_min, n_grid)
    sol = solve_ivp(rhs, (s0, s_min), [0.0, alpha], method="DOP853", t_eval=grid,
                    rtol=1e-13, atol=1e-300, first_step=min(1e-3, s_span * 1e-4))
    if not sol.success:
        raise RuntimeError(f"ODE integration failed: {sol.message}")
    s = sol.t[::-1]
    phi = sol.y[0][::-1]
    # variation of constants plus Gronwall: phi(s) e^{omega s} <= |alpha| delta^omega/(2 omega)
    # * exp(beta delta^2 / (4 omega)) for all s <= ln(delta)
    C = abs(alpha) * delta ** om / (2 * om) * np.exp(beta * delta ** 2 / (4 * om))
    integrand = np.exp(2 * s) * phi ** 2
    trunc = float(simpson(integrand, x=s))
    finite = om < 1.0
    tail = C * C * np.exp((2 - 2 * om) * s_min) / (2 - 2 * om) if finite else float("inf")
    return WitnessFunction(om, float(beta), float(alpha), float(delta), float(m), s, phi,
                           float(C), trunc, float(tail), bool(finite))


def witness_beta_zero(mu: float, dim: int, alpha: float, delta: float, s):
    """Closed form of the beta = 0 problem: (alpha/omega) sinh(omega (s - ln delta))."""
    om = witness_omega(mu, dim)
    return alpha / om * np.sinh(om * (np.asarray(s) - np.log(delta)))


def witness_beta_zero_numeric(h, alpha, delta, s_span=None, basis_size=CERT_BASIS, n_grid=4001, mu=None):
    """ODE route with beta = 0, for comparison with the closed form."""
    if not alpha < 0:
        raise ValueError("alpha must be negative")
    return _witness(h, 0.0, alpha, delta, s_span, basis_size, n_grid, mu)
