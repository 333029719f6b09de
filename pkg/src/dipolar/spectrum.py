"""First eigenvalue of -Laplace-Beltrami - h on S^{N-1}.

Axisymmetric coefficients reduce to a Galerkin problem in the orthonormal
Gegenbauer basis p_0..p_{L-1} for the weight (1-t^2)^{(N-3)/2}. Laplace-Beltrami
is diagonal with entries l(l+N-2); a dipole couples neighbours only, so that
case is a symmetric tridiagonal matrix. Non-axisymmetric tables on S^2 go
through real spherical harmonics and a dense solve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import ResolutionError
from .potentials import (
    AngularPotential, Constant, Dipole, HarmonicTable, harmonic_index, real_sph_harm,
)
from .sphere import (
    angle_rule, check_unit, gegenbauer_orthonormal, gegenbauer_rule, jacobi_offdiag, sphere_area,
    sphere_nodes,
)

DEFAULT_BASIS = 200
DEFAULT_HARMONIC_DEGREE = 16
DEFAULT_TOL = 1e-9
MIN_BASIS = 4


@dataclass(frozen=True, eq=False)
class SphericalEigenpair:
    mu1: float
    coeffs: np.ndarray
    basis_size: int
    dim: int
    residual: float
    basis: str = "gegenbauer"  # or "harmonic"
    axis: np.ndarray | None = None
    min_node_value: float = float("nan")

    @property
    def is_axisymmetric(self) -> bool:
        return self.basis == "gegenbauer"

    def at_t(self, t):
        """psi(t) for axisymmetric pairs, t = theta . axis."""
        if not self.is_axisymmetric:
            raise TypeError("harmonic-basis eigenpairs are not functions of t alone")
        t = np.asarray(t)
        if t.dtype != np.longdouble:
            t = t.astype(float)
        if np.any(np.abs(t) > 1 + 1e-12):
            raise ValueError("t must lie in [-1, 1]")
        t = np.clip(t, -1, 1)
        p = gegenbauer_orthonormal(len(self.coeffs), self.dim, t)
        return np.tensordot(self.coeffs, p, axes=1) / np.sqrt(sphere_area(self.dim - 1))

    def at_points(self, points):
        """psi at unit vectors, shape (..., N)."""
        points = np.asarray(points)
        if points.dtype != np.longdouble:
            points = points.astype(float)
        if points.shape[-1] != self.dim:
            raise ValueError(f"points must have {self.dim} components")
        norms = np.sqrt(np.sum(points * points, axis=-1))
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError("point not on the unit sphere")
        if self.is_axisymmetric:
            axis = self.axis if self.axis is not None else np.eye(self.dim)[-1]
            return self.at_t(np.clip(points @ axis, -1, 1))
        points = points.astype(float)
        out = np.zeros(points.shape[:-1])
        for c, (l, m) in zip(self.coeffs, harmonic_index(_degree_of(len(self.coeffs)))):
            out += c * real_sph_harm(l, m, points)
        return out

    def node_values(self, level: int = 64):
        """psi on a product quadrature grid (points, values)."""
        pts, _ = sphere_nodes(self.dim, level)
        return pts, self.at_points(pts)

    def extreme_values(self, samples: int = 2001):
        """(min, max) of psi, scanned in t for axisymmetric pairs."""
        if self.is_axisymmetric:
            if self.axis is None:
                v = self.at_t(np.zeros(1))[0]
                return v, v
            t = np.cos(np.linspace(0, np.pi, samples))
            v = self.at_t(t)
            return float(v.min()), float(v.max())
        _, v = self.node_values(48)
        return float(v.min()), float(v.max())


def _degree_of(n_coeffs):
    d = int(round(np.sqrt(n_coeffs))) - 1
    if (d + 1) ** 2 != n_coeffs:
        raise ValueError("coefficient count is not a full harmonic table")
    return d


class GalerkinOperator:
    """A(s) = diag(l(l+N-2)) - s * M_h for the scale family s*h.

    The coupling M_h is assembled once so that root-finding in s costs one
    eigen-solve per evaluation.
    """

    def __init__(self, h: AngularPotential, basis_size: int):
        if basis_size < MIN_BASIS:
            raise ValueError(f"basis size must be >= {MIN_BASIS}, got {basis_size}")
        self.h = h
        self.dim = h.dim
        self.L = int(basis_size)
        if isinstance(h, HarmonicTable):
            self._build_harmonic(h)
        elif h.is_axisymmetric:
            self._build_axisymmetric(h)
        else:
            raise ValueError(f"unsupported potential {h!r}")

    def _build_axisymmetric(self, h):
        N, L = self.dim, self.L
        ell = np.arange(L, dtype=float)
        self.basis = "gegenbauer"
        self.axis = h.axis
        self.diag = ell * (ell + N - 2)
        self.kind = "diagonal"
        if isinstance(h, Constant):
            self.shift = h.level
        elif isinstance(h, Dipole):
            self.kind = "tridiagonal"
            self.shift = 0.0
            self.off = h.strength * jacobi_offdiag(L, N)
        else:
            self.kind = "dense"
            self.shift = 0.0
            if h.breakpoints:
                t, w = angle_rule(2 * L + 16, N, h.breakpoints)
            else:
                t, w = gegenbauer_rule(2 * L + 16, N)
            f = h.profile(t)
            if not np.all(np.isfinite(f)):
                raise ValueError("profile evaluates to a non-finite value at a quadrature node")
            P = gegenbauer_orthonormal(L, N, t)
            self.M = (P * (w * f)) @ P.T
        self.nodes_t = self._positivity_nodes(h)

    def _positivity_nodes(self, h):
        if h.breakpoints:
            t, _ = angle_rule(2 * self.L + 16, self.dim, h.breakpoints)
        else:
            t, _ = gegenbauer_rule(2 * self.L + 16, self.dim)
        return t

    def _build_harmonic(self, h):
        L = self.L
        self.basis = "harmonic"
        self.axis = None
        idx = harmonic_index(L)
        level = L + (h.degree + 1) // 2 + 2
        pts, w = sphere_nodes(3, level)
        Y = np.array([real_sph_harm(l, m, pts) for l, m in idx])
        f = h(pts)
        self.kind = "dense"
        self.shift = 0.0
        self.diag = np.array([l * (l + 1.0) for l, _ in idx])
        self.M = (Y * (w * f)) @ Y.T
        self.Y_nodes = Y
        self.node_weights = w

    def matrix(self, scale: float = 1.0) -> np.ndarray:
        if self.kind == "dense":
            return np.diag(self.diag) - scale * self.M
        A = np.diag(self.diag - scale * self.shift)
        if self.kind == "tridiagonal":
            A -= scale * (np.diag(self.off, 1) + np.diag(self.off, -1))
        return A

    def lowest(self, scale: float = 1.0) -> float:
        if self.kind == "diagonal":
            return float(-scale * self.shift)
        return self._solve(scale)[0]

    def _solve(self, scale):
        """Lowest eigenpair, with the eigenvalue taken as the Rayleigh quotient of the
        computed vector. The backward error of a dense solve is eps * ||A|| and the
        diagonal grows like L^2, while the quotient only sees the low modes where the
        ground state lives; this keeps mu_1 monotone in L to ~1e-13."""
        if self.kind == "tridiagonal":
            # tiny tol: bisection to full relative accuracy instead of eps * ||T||
            w, V = eigh_tridiagonal(self.diag, -scale * self.off, select="i",
                                    select_range=(0, 0), lapack_driver="stebz",
                                    tol=np.finfo(float).tiny)
        else:
            w, V = eigh(self.matrix(scale), subset_by_index=[0, 0])
        v = V[:, 0] / np.linalg.norm(V[:, 0])
        return self._rayleigh(v, scale), v

    def _rayleigh(self, v, scale):
        q = float(np.dot(self.diag, v * v))
        if self.kind == "tridiagonal":
            return q - scale * 2.0 * float(np.dot(self.off, v[:-1] * v[1:]))
        return q - scale * float(v @ self.M @ v)

    def pair(self, scale: float = 1.0, tol: float = DEFAULT_TOL) -> SphericalEigenpair:
        if self.kind == "diagonal":
            v = np.zeros(len(self.diag))
            v[0] = 1.0
            mu = -scale * self.shift
        else:
            mu, v = self._solve(scale)
        A = self.matrix(scale)
        residual = float(np.linalg.norm(A @ v - mu * v))
        if residual > tol:
            raise ResolutionError(f"eigen-residual {residual:.3e} exceeds tolerance {tol:.1e}")
        vals, weights = self._node_values(v)
        if np.sum(weights * vals) < 0:
            v, vals = -v, -vals
        min_val = float(vals.min())
        if not min_val > 0:
            raise ResolutionError(
                f"ground state is not positive at all quadrature nodes (min {min_val:.3e}); "
                "increase the basis size")
        return SphericalEigenpair(mu, v, self.L, self.dim, residual, self.basis,
                                  self.axis, min_val)

    def _node_values(self, v):
        if self.basis == "harmonic":
            return v @ self.Y_nodes, self.node_weights
        t = self.nodes_t
        P = gegenbauer_orthonormal(self.L, self.dim, t)
        vals = v @ P / np.sqrt(sphere_area(self.dim - 1))
        return vals, np.ones_like(vals)


def _default_size(h):
    return DEFAULT_HARMONIC_DEGREE if isinstance(h, HarmonicTable) else DEFAULT_BASIS


def mu1(h: AngularPotential, basis_size: int | None = None, tol: float = DEFAULT_TOL) -> SphericalEigenpair:
    """mu_1(h) and its positive normalized eigenfunction.

    ``basis_size`` is the number of Gegenbauer modes for axisymmetric h and
    the maximal harmonic degree for ``HarmonicTable``.
    """
    L = _default_size(h) if basis_size is None else int(basis_size)
    return GalerkinOperator(h, L).pair(1.0, tol)


def mu1_value(h: AngularPotential, basis_size: int | None = None) -> float:
    """Eigenvalue only, skipping the eigenvector checks."""
    L = _default_size(h) if basis_size is None else int(basis_size)
    return GalerkinOperator(h, L).lowest(1.0)


def eval_eigenfunction(pair: SphericalEigenpair, point) -> float:
    """psi_1 at a unit vector, or at t in [-1, 1] for axisymmetric pairs."""
    p = np.asarray(point, dtype=float)
    if p.ndim == 0:
        return float(pair.at_t(p))
    check_unit(p, 1e-10, "point")
    return float(pair.at_points(p))


def mu1_bounds(h: AngularPotential):
    """(-ess sup h, -mean h); both inequalities are strict unless h is constant."""
    return -h.ess_sup, -h.mean


def dense_legendre_oracle(h: AngularPotential, basis_size: int) -> float:
    """Independent route for axisymmetric h: Galerkin matrix built entirely by
    quadrature of recurrence-generated polynomials, solved with numpy's dense eigh."""
    N = h.dim
    L = basis_size
    n = 2 * L + 40
    t, w = gegenbauer_rule(n, N) if not h.breakpoints else angle_rule(n, N, h.breakpoints)
    P = gegenbauer_orthonormal(L, N, t)
    ell = np.arange(L)
    A = np.diag(ell * (ell + N - 2.0)) - (P * (w * h.profile(t))) @ P.T
    return float(np.linalg.eigvalsh(A)[0])
