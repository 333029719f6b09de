"""Multi-pole supersolution phi = sum_i phi_i + eta phi_inf and the mu(V) lower bound
it certifies.

Everything is built in the coordinates x/delta, where pole i sits at a_i/delta,
its certificate lives on the unit-scale set E^{sigma1,1}_{0,h_i} and the
certificate at infinity is phi_inf(x) = u(delta x). On each smooth piece
-Lap(phi_i) - V_i phi_i = c phi_i/|y|^2 holds exactly (c the branch constant),
so the residual of the sum reduces to the cross terms, evaluated pointwise in
``CompositeCertificate.residual``. The interface jumps of the normal derivative have the
right sign by construction and are not sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .certificates import (CERT_BASIS, PiecewiseCertificate, build_inner_certificate,
                           build_outer_certificate, epsilon_from_alpha, nesting_scales,
                           positivity_lower_bound, verify_certificate)
from .config import MultipoleConfiguration
from .errors import InadmissibleInput
from .geometry import admissible_exponents
from .potentials import AngularPotential
from .sphere import random_directions, sphere_area
from .spectrum import mu1
from .thresholds import lambda_n_of_h

DELTA_START = 0.5
DELTA_STEPS = 60
ETA_FRACTION = 0.5


def _sup_norm(h: AngularPotential) -> float:
    return max(abs(h.ess_sup), abs(h.ess_inf))


def _psi_min(pair) -> float:
    return pair.extreme_values()[0]


@dataclass
class CompositeCheck:
    delta: float
    eta: float
    eta_upper: float
    pairwise_ok: bool
    pairwise_worst: float          # max_i sum_{j != i} sup |x - a_j/delta|^{-(N-2)} on E_i
    containment_ok: bool
    exterior_bracket: float
    sampled_min: float | None = None
    n_samples: int = 0

    @property
    def ok(self) -> bool:
        sampled = self.sampled_min is None or self.sampled_min >= 0.0
        return (self.pairwise_ok and self.containment_ok and self.exterior_bracket > 0
                and 0 < self.eta < self.eta_upper and sampled)

    def to_json(self):
        return {"delta": self.delta, "eta": self.eta, "eta_upper": self.eta_upper,
                "pairwise_ok": self.pairwise_ok, "pairwise_worst": self.pairwise_worst,
                "containment_ok": self.containment_ok,
                "exterior_bracket": self.exterior_bracket,
                "sampled_min": self.sampled_min, "n_samples": self.n_samples, "ok": self.ok}


@dataclass
class CompositeCertificate:
    dim: int
    poles: np.ndarray
    eps: float
    sigma1: float
    sigma2: float
    R0: float
    R: float
    r_scaled: float                 # r / delta
    inner: list                     # PiecewiseCertificate per pole (tilded coefficients)
    outer: PiecewiseCertificate
    C_bar: float
    C_inf: float
    C0: float
    C1: float
    check: CompositeCheck | None = None
    notes: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.poles)

    @property
    def inv_s(self) -> float:
        return 1.0 / self.sigma1 + 1.0 / self.sigma2

    @property
    def beta(self) -> float:
        return (np.sqrt(sphere_area(self.dim)) * _psi_min(self.outer.pair1)) ** self.sigma1

    @property
    def mu_lower_bound(self) -> float:
        return positivity_lower_bound(self.eps)

    # -- admissible ranges --------------------------------------------------------
    def _inner_norms(self):
        return [max(_sup_norm(c.h1), _sup_norm(c.h2)) for c in self.inner]

    def eta_upper(self) -> float:
        """Largest eta for which the inner-region estimate closes."""
        N, w = self.dim, sphere_area(self.dim)
        expo = 1.0 + self.sigma1 / self.sigma2 - self.sigma1 * (N - 2)
        best = np.inf
        for c, m in zip(self.inner, self._inner_norms()):
            if m == 0.0:
                continue
            base = w ** -0.5 / _psi_min(c.pair1)
            best = min(best, self.C_bar * np.sqrt(w) / (2.0 * self.C0 * m) * base ** expo)
        return float(best)

    def check_delta(self, delta: float, eta: float | None = None) -> CompositeCheck:
        """The smallness conditions on delta, in the form used by the regional estimates."""
        N = self.dim
        eta_up = self.eta_upper()
        if eta is None:
            eta = ETA_FRACTION * eta_up if np.isfinite(eta_up) else 1.0
        centers = self.poles / delta
        reach = np.array([c.first.with_scale(1.0).rho(c.first.probe()).max() for c in self.inner])
        worst = 0.0
        pair_ok = True
        for i in range(self.k):
            tot = 0.0
            for j in range(self.k):
                if j == i:
                    continue
                gap = np.linalg.norm(centers[i] - centers[j]) - reach[i]
                if gap <= reach[j]:
                    pair_ok = False
                    gap = max(gap, 1e-300)
                tot += gap ** -(N - 2)
            worst = max(worst, tot)
        if self.k > 1 and not worst < eta:
            pair_ok = False
        core_min = self.R0 * self.beta / delta
        contained = bool(np.all(np.linalg.norm(centers, axis=1) + reach < core_min))
        alpha = float(np.max(np.linalg.norm(self.poles, axis=1)))
        m_inf = max(_sup_norm(self.outer.h1), _sup_norm(self.outer.h2))
        s = self.inv_s
        if alpha >= self.beta * self.R0:
            bracket = -np.inf
        else:
            loss = (sphere_area(N) ** -0.5 * m_inf * self.k
                    * (1.0 - alpha / (self.beta * self.R0)) ** -(N - 2)
                    * (self.R0 * self.beta) ** (s - (N - 2)) * delta ** (N - 2))
            bracket = self.C_inf / self.C1 * eta - loss
        return CompositeCheck(float(delta), float(eta), eta_up, pair_ok, float(worst),
                              contained, float(bracket))

    # -- pointwise evaluation -----------------------------------------------------
    @staticmethod
    def _terms(cert, y, x_local):
        """phi, potential and branch term c/|x|^2 of one part. ``y`` is where the part
        is evaluated, ``x_local`` the same point relative to its centre at the
        current scale (they differ only by the factor delta for the outer part)."""
        r = np.linalg.norm(x_local, axis=1)
        theta = x_local / r[:, None]
        idx = cert.piece_index(y)
        V = np.zeros(len(y))
        cc = np.zeros(len(y))
        bc = cert.branch_constants
        for k in (1, 2):
            m = idx == k
            if np.any(m):
                V[m] = cert.coefficient(k)(theta[m]) / r[m] ** 2
                cc[m] = bc[k] / r[m] ** 2
        return cert(y), V, cc

    def residual(self, x, delta: float, eta: float):
        """-Lap(phi) - sum V_i phi - V_inf phi on smooth pieces, assembled exactly."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        poles = []
        for a, c in zip(self.poles, self.inner):
            y = x - a / delta
            poles.append(self._terms(c, y, y))
        phi_inf, V_inf, c_inf = self._terms(self.outer, delta * x, x)
        phis = np.array([p[0] for p in poles])
        Vs = np.array([p[1] for p in poles])
        out = sum(p[2] * p[0] for p in poles) + eta * c_inf * phi_inf
        total_phi = phis.sum(axis=0)
        for i in range(self.k):
            out -= Vs[i] * (total_phi - phis[i]) + eta * Vs[i] * phi_inf
        out -= V_inf * total_phi
        return out

    def sample_points(self, delta: float, count: int, rng):
        """Points inside every E_i(a_i/delta) and outside the core of phi_inf."""
        N = self.dim
        per = max(count // (self.k + 1), 1)
        pts = []
        for i, c in enumerate(self.inner):
            th = random_directions(rng, per, N)
            rho = c.first.rho(th)
            t = np.exp(rng.uniform(np.log(1e-6), 0.0, per))
            pts.append(self.poles[i] / delta + (t * rho)[:, None] * th)
        th = random_directions(rng, per, N)
        rho = self.outer.first.rho(th) / delta
        t = np.exp(rng.uniform(0.0, np.log(1e4), per))
        pts.append((t * rho)[:, None] * th)
        return np.concatenate(pts)

    def verify(self, delta: float, eta: float | None = None, samples: int = 4000, seed: int = 0):
        chk = self.check_delta(delta, eta)
        rng = np.random.default_rng(seed)
        x = self.sample_points(delta, samples, rng)
        res = self.residual(x, delta, chk.eta)
        chk.sampled_min = float(res.min())
        chk.n_samples = len(x)
        return chk

    def search_delta(self, samples: int = 4000, seed: int = 0) -> CompositeCheck:
        """Halve delta from DELTA_START until every check passes."""
        delta = DELTA_START
        last = None
        for _ in range(DELTA_STEPS):
            last = self.check_delta(delta)
            if last.ok:
                last = self.verify(delta, last.eta, samples, seed)
                if last.ok:
                    self.check = last
                    return last
            delta *= 0.5
        self.check = last
        return last

    def neighbourhoods(self):
        """Bounding radii of the neighbourhoods in original coordinates."""
        if self.check is None:
            return None
        d = self.check.delta
        inner = [float(d * c.first.rho(c.first.probe()).max()) for c in self.inner]
        # the coefficient at infinity acts outside E^{sigma1,R0}, which fits in this ball
        core = float(self.outer.first.rho(self.outer.first.probe()).max())
        return {"pole_radius": inner, "infinity_radius": core}

    def to_json(self):
        return {"dim": self.dim, "k": self.k, "eps": self.eps, "sigma1": self.sigma1,
                "sigma2": self.sigma2, "R0": self.R0, "R": self.R, "r_over_delta": self.r_scaled,
                "C_bar": self.C_bar, "C_inf": self.C_inf, "C0": self.C0, "C1": self.C1,
                "eta_upper": self.eta_upper(), "mu_lower_bound": self.mu_lower_bound,
                "check": None if self.check is None else self.check.to_json(),
                "neighbourhoods": self.neighbourhoods(), "notes": self.notes}


def _c0(cert: PiecewiseCertificate, sigma2: float) -> float:
    """phi_i >= |y|^{-(N-2)+s}/C0 on E^{sigma1,1}_{0,h_i}."""
    dirs = cert.first.probe()
    rho1 = cert.first.rho(dirs)
    mid = np.min(rho1 ** (-1.0 / sigma2) * cert.pair1.at_points(dirs))
    # r/delta is capped by the nesting requirement, so this bound does not depend on it
    inner = cert.second.rho(dirs) / cert.second.scale
    r_max = float(np.min(rho1 / inner))
    core = r_max ** (-1.0 / sigma2) * _psi_min(cert.pair2)
    return 1.0 / min(mid, core)


def _c1(cert: PiecewiseCertificate, sigma1: float, sigma2: float) -> float:
    """u(z) >= |z|^{-s}/C1 outside E^{sigma1,R0}_{h_inf,0}."""
    R0, R = cert.scales
    dirs = cert.first.probe()
    w = sphere_area(cert.dim)
    psi = cert.pair1.at_points(dirs)
    shell = np.min(R0 ** (1 / sigma1 + 1 / sigma2) * (np.sqrt(w) * psi) ** (sigma1 / sigma2) * psi)
    ext = R0 ** (1 / sigma1) * R ** (1 / sigma2) * _psi_min(cert.pair2)
    return 1.0 / min(shell, ext)


def build_composite(dim, poles, h_list, h_inf, eps, H_list=None, H_inf=None, sigmas=None,
                    basis_size: int = CERT_BASIS) -> CompositeCertificate:
    """Assemble the multi-pole certificate with tilded coefficients (1+eps) h."""
    poles = np.atleast_2d(np.asarray(poles, dtype=float))
    k = len(poles)
    H_list = list(h_list) if H_list is None else list(H_list)
    H_inf = h_inf if H_inf is None else H_inf
    if len(h_list) != k or len(H_list) != k:
        raise InadmissibleInput("one coefficient (and one core coefficient) per pole")
    if not eps > 0:
        raise InadmissibleInput("eps must be positive")
    sc = 1.0 + eps
    ht = [h.scaled(sc) for h in h_list]
    Ht = [t if H is h else H.scaled(sc) for t, H, h in zip(ht, H_list, h_list)]
    hinf_t = h_inf.scaled(sc)
    Hinf_t = hinf_t if H_inf is h_inf else H_inf.scaled(sc)
    pairs = {}

    def pair(h):
        if id(h) not in pairs:
            pairs[id(h)] = mu1(h, basis_size)
        return pairs[id(h)]

    allh = ht + Ht + [hinf_t, Hinf_t]
    win = admissible_exponents(allh, variant=True, mus=[pair(h).mu1 for h in allh])
    if sigmas is None:
        i1, i2 = win.midpoint()
    else:
        i1, i2 = 1.0 / sigmas[0], 1.0 / sigmas[1]
        if not win.contains(i1, i2):
            raise InadmissibleInput("exponents outside the admissible window")
    s1, s2 = 1.0 / i1, 1.0 / i2

    p_inf = pair(hinf_t)
    beta = (np.sqrt(sphere_area(dim)) * _psi_min(p_inf)) ** s1
    alpha = float(np.max(np.linalg.norm(poles, axis=1)))
    R0 = 2.0 * alpha / beta if alpha > 0 else 1.0
    R = nesting_scales(hinf_t, Hinf_t, s1, s2, R0, "outer", pairs=(p_inf, pair(Hinf_t)))
    outer = build_outer_certificate(hinf_t, Hinf_t, s1, s2, R0, R, variant=True,
                                    pairs=(p_inf, pair(Hinf_t)))
    r_scaled = min(nesting_scales(h, H, s1, s2, 1.0, "inner", pairs=(pair(h), pair(H)))
                   for h, H in zip(ht, Ht))
    inner = [build_inner_certificate(h, H, s1, s2, 1.0, r_scaled, variant=True,
                                     pairs=(pair(h), pair(H))) for h, H in zip(ht, Ht)]
    C_bar = min(c.margin for c in inner)
    C0 = max(_c0(c, s2) for c in inner)
    C1 = _c1(outer, s1, s2)
    return CompositeCertificate(dim, poles, float(eps), s1, s2, float(R0), float(R), float(r_scaled),
                                inner, outer, float(C_bar), float(outer.margin), float(C0), float(C1))


@dataclass
class PositivityCertificate:
    max_lambda: float
    alpha: float | None
    eps: float | None
    mu_lower_bound: float
    composite: CompositeCertificate | None
    parts: list
    verdict: bool
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"max_lambda": self.max_lambda, "alpha": self.alpha, "eps": self.eps,
                "mu_lower_bound": self.mu_lower_bound,
                "composite": None if self.composite is None else self.composite.to_json(),
                "parts": self.parts, "verdict": "pass" if self.verdict else "fail",
                "notes": self.notes}


def certify_configuration(cfg: MultipoleConfiguration, alpha: float | None = None,
                          sigmas=None, basis_size: int = CERT_BASIS, samples: int = 4000,
                          part_samples: int = 2000, seed: int = 0,
                          lambda_basis: int = 100) -> PositivityCertificate:
    """Lower bound mu >= 1 - max Lambda - alpha for V cut off to neighbourhoods of
    the poles and of infinity, with a certificate verified at sample points.

    alpha defaults to half of the gap 1 - max Lambda."""
    coeffs = [h for _, h in cfg.coefficients()]
    max_lam = max(lambda_n_of_h(h, lambda_basis).value for h in coeffs)
    if max_lam >= 1.0:
        raise InadmissibleInput(f"max Lambda = {max_lam:.6g} >= 1: no positivity certificate")
    if max_lam == 0.0:
        return PositivityCertificate(0.0, None, None, 1.0, None, [], True,
                                     ["all coefficients are nonpositive: mu = 1 trivially"])
    if alpha is None:
        alpha = 0.5 * (1.0 - max_lam)
    eps = epsilon_from_alpha(alpha, max_lam)
    comp = build_composite(cfg.dim, cfg.poles, list(cfg.angular), cfg.h_infinity, eps,
                           sigmas=sigmas, basis_size=basis_size)
    chk = comp.search_delta(samples, seed)
    parts = []
    for label, c in [*((str(i), c) for i, c in enumerate(comp.inner)), ("inf", comp.outer)]:
        rep = verify_certificate(c, samples=part_samples, seed=seed)
        parts.append({"part": label, **rep.to_json()})
    ok = chk is not None and chk.ok and all(p["verdict"] == "pass" for p in parts)
    notes = ["bound holds for the potential restricted to the reported neighbourhoods"]
    return PositivityCertificate(max_lam, float(alpha), float(eps), comp.mu_lower_bound, comp,
                                 parts, bool(ok), notes)
