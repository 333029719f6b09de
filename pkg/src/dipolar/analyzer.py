"""Checks on multipole configurations: membership, positivity, self-adjointness,
binding between clusters, perturbation windows and lattice hypotheses."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .config import ConfigError, MultipoleConfiguration
from .errors import InadmissibleInput
from .potentials import AngularPotential, add_potentials
from .spectrum import DEFAULT_BASIS, mu1_value
from .thresholds import hardy_level, lambda_n, lambda_n_of_h

BOUNDARY_TOL = 1e-12        # strict inequalities within this distance are indeterminate


class _Cache:
    """mu_1 and Lambda per potential object, so repeated coefficients are solved once."""

    def __init__(self, basis_size: int = DEFAULT_BASIS):
        self.L = basis_size
        self._mu, self._lam = {}, {}

    def mu(self, h):
        key = id(h)
        if key not in self._mu:
            self._mu[key] = (h, mu1_value(h, self.L))
        return self._mu[key][1]

    def lam(self, h):
        key = id(h)
        if key not in self._lam:
            self._lam[key] = (h, lambda_n_of_h(h, self.L).value)
        return self._lam[key][1]


def pole_exponent(mu: float, dim: int) -> float | None:
    """sigma = -(N-2)/2 + sqrt(((N-2)/2)^2 + mu); None when complex."""
    a2 = hardy_level(dim)
    if a2 + mu < 0:
        return None
    return float(-np.sqrt(a2) + np.sqrt(a2 + mu))


@dataclass
class Verdict:
    check: str
    verdict: str            # "true" | "false" | "indeterminate"
    margin: float
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict == "true"

    def to_json(self):
        return asdict(self)


def _verdict(check, margin, detail=None, tol=BOUNDARY_TOL):
    if abs(margin) <= tol:
        v = "indeterminate"
    else:
        v = "true" if margin > 0 else "false"
    return Verdict(check, v, float(margin), detail or {})


@dataclass
class ClassificationReport:
    in_class_V: bool
    class_margins: dict
    semibounded_weak: bool
    pole_exponents: list
    globally_positive_sufficient: Verdict | None = None
    necessary_ok: bool | None = None
    self_adjoint: bool | None = None
    self_adjoint_poles: list | None = None
    mu_upper: float | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        d = asdict(self)
        if self.globally_positive_sufficient is not None:
            d["globally_positive_sufficient"] = self.globally_positive_sufficient.to_json()
        return d


# --- membership -----------------------------------------------------------------

def validate_class_V(cfg: MultipoleConfiguration, basis_size: int = DEFAULT_BASIS,
                     cache: _Cache | None = None) -> ClassificationReport:
    """Per-index margins mu_1(h_i) + ((N-2)/2)^2 for i = 1..k and infinity."""
    cache = cache or _Cache(basis_size)
    a2 = hardy_level(cfg.dim)
    margins, exps = {}, []
    for label, h in cfg.coefficients():
        m = cache.mu(h)
        margins[str(label)] = m + a2
        if label != "inf":
            exps.append(pole_exponent(m, cfg.dim))
    in_class = all(v > 0 for v in margins.values())
    weak = all(v >= -BOUNDARY_TOL for v in margins.values())
    notes = []
    if cfg.w_descriptor:
        notes.append(f"W = {cfg.w_descriptor!r} carried as metadata; no criterion depends on it")
    return ClassificationReport(in_class, margins, weak, exps, notes=notes)


# --- positivity ---------------------------------------------------------------

def sufficient_global_positivity(cfg: MultipoleConfiguration,
                                 basis_size: int = DEFAULT_BASIS) -> Verdict:
    """sum lambda_i < 1/Lambda_N guarantees positivity for every pole placement.
    Above the threshold some placement fails; that is flagged as an alarm."""
    if not cfg.is_dipole_case:
        raise InadmissibleInput("the strength-sum criterion applies to dipole configurations only")
    lam = lambda_n(cfg.dim, basis_size).value
    total = float(sum(abs(s) for s in cfg.strengths))
    margin = 1.0 / lam - total
    v = _verdict("sum_of_strengths", margin,
                 {"sum_lambda": total, "inverse_lambda_N": 1.0 / lam, "lambda_N": lam})
    v.detail["converse_alarm"] = v.verdict == "false"
    return v


def mu_upper_bound(cfg: MultipoleConfiguration, basis_size: int = DEFAULT_BASIS,
                   cache: _Cache | None = None) -> float:
    """1 - max{0, Lambda(h_1), ..., Lambda(h_k), Lambda(h_inf)}."""
    cache = cache or _Cache(basis_size)
    worst = max([0.0] + [cache.lam(h) for _, h in cfg.coefficients()])
    return 1.0 - worst


# --- self-adjointness ---------------------------------------------------------

def self_adjoint_threshold(dim: int) -> float:
    return -hardy_level(dim) + 1.0


def classify_self_adjointness(cfg: MultipoleConfiguration, basis_size: int = DEFAULT_BASIS,
                              cache: _Cache | None = None) -> ClassificationReport:
    """Essential self-adjointness on C_c^inf(R^N minus poles): every finite pole needs
    mu_1(h_i) >= -((N-2)/2)^2 + 1. The coefficient at infinity plays no role."""
    cache = cache or _Cache(basis_size)
    rep = validate_class_V(cfg, basis_size, cache)
    if not rep.in_class_V:
        raise InadmissibleInput("configuration is outside the admissible class; "
                                f"margins {rep.class_margins}")
    thr = self_adjoint_threshold(cfg.dim)
    poles = []
    for i, h in enumerate(cfg.angular):
        m = cache.mu(h)
        # the criterion is non-strict; allow for eigensolver rounding at the boundary
        ok = m >= thr - BOUNDARY_TOL
        poles.append({"pole": i, "mu1": m, "margin": m - thr, "self_adjoint": ok,
                      "sigma": pole_exponent(m, cfg.dim)})
    rep.self_adjoint_poles = poles
    rep.self_adjoint = all(p["self_adjoint"] for p in poles)
    return rep


def classify(cfg: MultipoleConfiguration, basis_size: int = DEFAULT_BASIS) -> ClassificationReport:
    """Membership, positivity, self-adjointness and the upper bound for mu(V) together."""
    cache = _Cache(basis_size)
    rep = validate_class_V(cfg, basis_size, cache)
    rep.necessary_ok = rep.in_class_V
    if rep.in_class_V:
        sa = classify_self_adjointness(cfg, basis_size, cache)
        rep.self_adjoint, rep.self_adjoint_poles = sa.self_adjoint, sa.self_adjoint_poles
    else:
        rep.notes.append("self-adjointness not classified outside the admissible class")
    if cfg.is_dipole_case:
        rep.globally_positive_sufficient = sufficient_global_positivity(cfg, basis_size)
    else:
        rep.notes.append("strength-sum criterion skipped (non-dipole coefficients)")
    rep.mu_upper = mu_upper_bound(cfg, basis_size, cache)
    if not rep.semibounded_weak:
        rep.notes.append("some mu_1(h_i) < -((N-2)/2)^2: the form is unbounded below")
    return rep


# --- binding ------------------------------------------------------------------

def binding_necessary(cfgA: MultipoleConfiguration, cfgB: MultipoleConfiguration,
                      basis_size: int = DEFAULT_BASIS) -> Verdict:
    """Necessary for positivity of V_A + V_B(. - y) at large separation:
    mu_1(h_inf^A + h_inf^B) > -((N-2)/2)^2."""
    if cfgA.dim != cfgB.dim:
        raise ConfigError("configurations live in different dimensions")
    s = add_potentials(cfgA.h_infinity, cfgB.h_infinity)
    m = mu1_value(s, basis_size)
    m2 = mu1_value(s, 2 * basis_size)
    # the Galerkin value only decreases with L; use the finer one and refuse a
    # verdict when the last doubling moved it by as much as the margin
    margin = m2 + hardy_level(cfgA.dim)
    v = _verdict("necessary_binding", margin, {"mu1_sum": m2, "mu1_sum_coarse": m})
    if abs(m - m2) >= abs(margin):
        v.verdict = "indeterminate"
    return v


def binding_sufficient(cfgA: MultipoleConfiguration, cfgB: MultipoleConfiguration) -> Verdict:
    """Sufficient (given mu(V_A), mu(V_B) > 0): sup h_inf^A+ + sup h_inf^B+ < (N-2)^2/4."""
    if cfgA.dim != cfgB.dim:
        raise ConfigError("configurations live in different dimensions")
    pa, pb = cfgA.h_infinity.positive_sup, cfgB.h_infinity.positive_sup
    return _verdict("sufficient_binding", hardy_level(cfgA.dim) - pa - pb,
                    {"sup_plus_A": pa, "sup_plus_B": pb})


def binding_report(cfgA, cfgB, basis_size: int = DEFAULT_BASIS) -> dict:
    return {"necessary": binding_necessary(cfgA, cfgB, basis_size).to_json(),
            "sufficient": binding_sufficient(cfgA, cfgB).to_json()}


# --- perturbation windows -----------------------------------------------------

@dataclass
class PerturbationWindow:
    at: str
    max_lambda: float
    eps_upper: float | None         # None: unbounded
    empty: bool
    eps: float | None               # the epsilon at which the sigma window is evaluated
    inv_sigma_upper: float | None   # 0 < 1/sigma < this

    @property
    def eps_unbounded(self) -> bool:
        return self.eps_upper is None and not self.empty

    def to_json(self):
        d = asdict(self)
        d["eps_unbounded"] = self.eps_unbounded
        return d


def perturbation_window(cfg: MultipoleConfiguration, extra_h: AngularPotential, at="infinity",
                        eps: float | None = None,
                        basis_size: int = DEFAULT_BASIS) -> PerturbationWindow:
    """Admissible epsilon and exponent ranges when extra_h is added to the
    coefficient at a pole (integer index) or at infinity.

    ``eps`` defaults to half the upper end (1 when unbounded)."""
    cache = _Cache(basis_size)
    if at in ("infinity", "inf", None):
        target, label = cfg.h_infinity, "infinity"
    else:
        i = int(at)
        if not 0 <= i < cfg.k:
            raise InadmissibleInput(f"pole index {i} out of range")
        target, label = cfg.angular[i], str(i)
    H = add_potentials(target, extra_h)
    a2 = hardy_level(cfg.dim)
    if not cache.mu(H) > -a2:
        raise InadmissibleInput("perturbed coefficient has mu_1 <= -((N-2)/2)^2")
    coeffs = [h for _, h in cfg.coefficients()] + [H]
    max_lam = max(cache.lam(h) for h in coeffs)
    if max_lam >= 1.0:
        return PerturbationWindow(label, max_lam, 0.0, True, None, None)
    eps_upper = None if max_lam == 0.0 else 1.0 / max_lam - 1.0
    if eps is None:
        eps = 1.0 if eps_upper is None else 0.5 * eps_upper
    elif not eps > 0 or (eps_upper is not None and eps >= eps_upper):
        raise InadmissibleInput(f"eps = {eps} outside the admissible interval")
    mus = [mu1_value(h.scaled(1.0 + eps), basis_size) for h in coeffs]
    cap = min(np.sqrt(a2 + m) for m in mus)
    return PerturbationWindow(label, max_lam, eps_upper, False, float(eps), float(cap))


# --- lattices -----------------------------------------------------------------

def cubic_lattice(dim: int, count: int) -> np.ndarray:
    """First ``count`` points of Z^N minus the origin, ordered by norm then lexicographically."""
    rad = 1
    while True:
        axes = [np.arange(-rad, rad + 1)] * dim
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, dim)
        pts = pts[np.any(pts != 0, axis=1)]
        norms = np.linalg.norm(pts, axis=1)
        inside = pts[norms <= rad]
        if len(inside) >= count:
            n = np.linalg.norm(inside, axis=1)
            order = np.lexsort(inside.T[::-1].tolist() + [n])
            return inside[order][:count].astype(float)
        rad += 1


def dyadic_poles(dim: int, count: int) -> np.ndarray:
    out = np.zeros((count, dim))
    out[:, 0] = 2.0 ** np.arange(1, count + 1)
    return out


def _materialize(source, M, what):
    if callable(source):
        return [source(n) for n in range(M)]
    items = list(source) if not isinstance(source, np.ndarray) else source
    if len(items) < M:
        raise InadmissibleInput(f"{what}: need {M} entries, got {len(items)}")
    return items[:M]


@dataclass
class ReticularReport:
    M: int
    sup_norm: float
    inf_mu1: float
    sup_lambda: float
    partial_sums: list
    growth_slope: float
    tail_exponent: float | None
    sum_trend: str                 # "converging" | "growing" (fitted, not proved)
    min_distance: float
    per_pole_max: float
    per_pole_growth: float
    per_pole_bounded: bool
    hypotheses_ok: bool
    self_adjoint: bool

    def to_json(self):
        d = asdict(self)
        d["partial_sums"] = [float(x) for x in self.partial_sums]
        return d


def _interaction_sums(pts, p, chunk=512):
    """sum_{m != n} |a_m - a_n|^{-p} for every n."""
    out = np.empty(len(pts))
    for s in range(0, len(pts), chunk):
        d = np.linalg.norm(pts[s:s + chunk, None, :] - pts[None, :, :], axis=-1)
        with np.errstate(divide="ignore"):
            t = np.where(d > 0, d ** -p, 0.0)
        out[s:s + chunk] = t.sum(axis=1)
    return out


def reticular_admissible(poles, h_list, M: int, basis_size: int = 100) -> ReticularReport:
    """Finite-truncation checks of the lattice hypotheses on the first M poles.

    ``poles`` is an array, a sequence, or a callable n -> a_n; ``h_list`` likewise,
    or a single potential used at every pole. Tail behaviour is a fitted trend only.
    """
    if M < 2:
        raise InadmissibleInput("truncation M must be >= 2")
    pts = np.asarray(_materialize(poles, M, "poles"), dtype=float)
    N = pts.shape[1]
    if isinstance(h_list, AngularPotential):
        hs = [h_list] * M
    else:
        hs = _materialize(h_list, M, "coefficients")
    cache = _Cache(basis_size)
    sup_norm = max(max(abs(h.ess_sup), abs(h.ess_inf)) for h in hs)
    inf_mu = min(cache.mu(h) for h in hs)
    sup_lam = max(cache.lam(h) for h in hs)

    tree = cKDTree(pts)
    dist, _ = tree.query(pts, k=2)
    dmin = float(dist[:, 1].min())
    if dmin == 0.0:
        raise InadmissibleInput("pole generator produced coincident points")

    p = N - 2
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0):
        raise InadmissibleInput("a pole sits at the origin")
    terms = norms ** -p
    S = np.cumsum(terms)
    half = np.arange(M // 2, M)
    m = half + 1
    growth = float(np.polyfit(np.log(m), np.log(S[half]), 1)[0])
    pos = terms[half] > 0
    tail_exp = float(-np.polyfit(np.log(m[pos]), np.log(terms[half][pos]), 1)[0]) if pos.sum() > 1 else None
    ratio = terms[1:][-len(half):] / terms[:-1][-len(half):]
    geometric = bool(np.all(ratio < 1.0) and np.max(ratio) < 0.99)
    converging = geometric or (tail_exp is not None and tail_exp > 1.0)

    inter = _interaction_sums(pts, p)
    inter_half = _interaction_sums(pts[: M // 2], p)
    per_max = float(inter.max())
    per_growth = per_max / float(inter_half.max()) if inter_half.max() > 0 else 1.0

    # doubling M should leave the worst interaction sum essentially unchanged
    bounded = per_growth < 1.05
    ok = (np.isfinite(sup_norm) and sup_lam < 1.0 and converging and bounded and dmin >= 1.0)
    sa = inf_mu >= self_adjoint_threshold(N) - BOUNDARY_TOL
    return ReticularReport(M, float(sup_norm), float(inf_mu), float(sup_lam), S.tolist(), growth,
                           tail_exp, "converging" if converging else "growing", dmin,
                           per_max, per_growth, bool(bounded), bool(ok), bool(sa))
