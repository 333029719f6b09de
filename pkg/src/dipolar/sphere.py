"""Sphere measures, Gegenbauer bases and quadrature rules on S^{N-1}."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_gegenbauer, roots_legendre


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    return float(np.exp(np.log(2.0) + 0.5 * n * np.log(np.pi) - gammaln(0.5 * n)))


@dataclass(frozen=True)
class SphereMeasure:
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")

    @property
    def omega(self) -> float:
        return sphere_area(self.dim)

    @property
    def constant_mode(self) -> float:
        # value of the normalized ground state of the free Laplace-Beltrami operator
        return self.omega ** -0.5


def gegenbauer_alpha(dim: int) -> float:
    return 0.5 * (dim - 2)


def jacobi_offdiag(n_terms: int, dim: int) -> np.ndarray:
    """Off-diagonal b_1..b_{n_terms-1} of multiplication by t in the orthonormal
    Gegenbauer basis, t p_n = b_{n+1} p_{n+1} + b_n p_{n-1}."""
    a = gegenbauer_alpha(dim)
    n = np.arange(1, n_terms, dtype=float)
    return np.sqrt(n * (n + 2 * a - 1) / (4.0 * (n + a) * (n + a - 1)))


def weight_mass(dim: int) -> float:
    """Integral of (1-t^2)^{alpha-1/2} over [-1, 1]."""
    a = gegenbauer_alpha(dim)
    return float(np.exp(0.5 * np.log(np.pi) + gammaln(a + 0.5) - gammaln(a + 1.0)))


def gegenbauer_orthonormal(n_terms: int, dim: int, t) -> np.ndarray:
    """Rows p_0..p_{n_terms-1} evaluated at t, orthonormal for the Gegenbauer weight."""
    t = np.asarray(t)
    if t.dtype != np.longdouble:
        t = t.astype(float)
    out = np.empty((n_terms,) + t.shape, dtype=t.dtype)
    b = jacobi_offdiag(n_terms + 1, dim)
    out[0] = 1.0 / np.sqrt(weight_mass(dim))
    if n_terms > 1:
        out[1] = t * out[0] / b[0]
    for n in range(1, n_terms - 1):
        out[n + 1] = (t * out[n] - b[n - 1] * out[n - 1]) / b[n]
    return out


@lru_cache(maxsize=64)
def _gegenbauer_rule(n_nodes: int, dim: int):
    a = gegenbauer_alpha(dim)
    if abs(a - 0.5) < 1e-15:
        x, w = roots_legendre(n_nodes)
    else:
        x, w = roots_gegenbauer(n_nodes, a)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gegenbauer_rule(n_nodes: int, dim: int):
    """Gauss rule for the weight (1-t^2)^{(N-3)/2} on [-1, 1]."""
    return _gegenbauer_rule(int(n_nodes), int(dim))


def angle_rule(n_per_panel: int, dim: int, breakpoints=()):
    """Composite Gauss-Legendre rule in the polar angle, returned in t = cos(phi).

    The weights absorb sin^{N-2}(phi) so that sum(w f(t)) approximates the
    Gegenbauer-weighted integral. Breakpoints in t become panel edges, which
    keeps the rule spectrally accurate for piecewise-smooth profiles.
    """
    edges = {0.0, np.pi}
    for b in breakpoints:
        if -1.0 < b < 1.0:
            edges.add(float(np.arccos(b)))
    edges = np.array(sorted(edges))
    g, gw = roots_legendre(n_per_panel)
    phis, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        phi = lo + half * (g + 1.0)
        phis.append(phi)
        ws.append(half * gw * np.sin(phi) ** (dim - 2))
    phi = np.concatenate(phis)
    w = np.concatenate(ws)
    order = np.argsort(np.cos(phi))
    return np.cos(phi)[order], w[order]


def integrate_axisymmetric(f, dim: int, n_nodes: int = 200, breakpoints=()) -> float:
    """Integral over S^{N-1} of f(theta . d) for any unit axis d."""
    t, w = angle_rule(n_nodes, dim, breakpoints)
    return sphere_area(dim - 1) * float(np.sum(w * f(t)))


def sphere_nodes(dim: int, level: int):
    """Product rule on S^{dim-1}: Gauss-Gegenbauer in each polar coordinate and the
    trapezoidal rule in the azimuth. Returns (points (M, dim), weights (M,)).

    Exact for polynomials of degree < 2*level in the ambient coordinates.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    m = 2 * level
    ang = 2 * np.pi * np.arange(m) / m
    pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    wts = np.full(m, 2 * np.pi / m)
    for n in range(3, dim + 1):
        t, w = gegenbauer_rule(level, n)
        s = np.sqrt(1.0 - t ** 2)
        new_pts = np.concatenate(
            [np.column_stack([s_k * pts, np.full(len(pts), t_k)]) for t_k, s_k in zip(t, s)]
        )
        new_w = np.concatenate([w_k * wts for w_k in w])
        pts, wts = new_pts, new_w
    return pts, wts


def random_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def check_unit(v, tol: float = 1e-12, what: str = "axis") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{what} must be a vector")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{what} is not normalized (|v| = {np.linalg.norm(v):.15g})")
    return v


def unit_vector(dim: int, k: int = -1) -> np.ndarray:
    e = np.zeros(dim)
    e[k] = 1.0
    return e
