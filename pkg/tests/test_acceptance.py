"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines are collected into the terminal summary) or directly:

    python tests/test_acceptance.py
"""
from __future__ import annotations

import time

import numpy as np
import pytest
from scipy.optimize import brentq

from dipolar.analyzer import binding_necessary, binding_sufficient, classify_self_adjointness
from dipolar.certificates import (
    build_inner_certificate, build_outer_certificate, fd_laplacian, kelvin_transform,
    nesting_scales, nonselfadjoint_witness, verify_certificate, witness_beta_zero,
    witness_beta_zero_numeric,
)
from dipolar.config import MultipoleConfiguration
from dipolar.geometry import admissible_exponents
from dipolar.potentials import AxisymmetricProfile, Constant, Dipole, HarmonicTable
from dipolar.rayleigh import counterexample_search, example_configurations, optimize_hardy_ratio
from dipolar.sphere import random_directions
from dipolar.spectrum import mu1, mu1_bounds, mu1_value
from dipolar.thresholds import (
    hardy_bounds, hardy_level, lambda_n, lambda_n_of_h, marcinkiewicz_norm, weak_norm_direct,
)

RESULTS: dict[int, str] = {}


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line


def random_profiles(seed: int = 20240601, count: int = 20):
    """Seeded band-limited coefficients with a nonzero positive part, rescaled so that
    Lambda_N(h) lands in (0, 1)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        N = (3, 4)[len(out) % 2]
        if N == 3 and len(out) % 4 == 1:
            # genuinely non-axisymmetric: random real harmonics up to degree 3
            coeffs = {(l, m): rng.normal() / (1 + l) for l in range(4) for m in range(-l, l + 1)}
            h = HarmonicTable(coeffs)
        else:
            h = AxisymmetricProfile.polynomial(N, rng.normal(size=int(rng.integers(2, 6))))
        if h.positive_sup <= 0:
            continue
        lam = lambda_n_of_h(h, 200 if h.is_axisymmetric else 12).value
        target = rng.uniform(0.2, 0.9)
        out.append(h.scaled(target / lam))
    return out


@pytest.fixture(scope="module")
def profiles():
    return random_profiles()


def _basis(h):
    return 200 if h.is_axisymmetric else 12


# --- 1 ---------------------------------------------------------------------------

def test_criterion_01_constant_identity():
    t0 = time.perf_counter()
    worst = max(abs(mu1(Constant(N, lam)).mu1 + lam)
                for lam in (-2.0, 0.0, 3.7) for N in (3, 4, 5))
    dt = time.perf_counter() - t0
    report(1, worst < 1e-10 and dt < 1.0, f"max |mu1 + lambda| = {worst:.2e}, {dt:.3f} s")


# --- 2 ---------------------------------------------------------------------------

def test_criterion_02_hardy_bound():
    bad = []
    worst_res = worst_gap = 0.0
    for N in range(3, 9):
        r200 = lambda_n(N, 200, refine=False)
        r100 = lambda_n(N, 100, refine=False)
        gap = abs(r200.value - r100.value)
        worst_res = max(worst_res, r200.bisection_residual)
        worst_gap = max(worst_gap, gap)
        if not (0 < r200.value < 4.0 / (N - 2) ** 2):
            bad.append(N)
    ok = not bad and worst_res < 1e-8 and worst_gap < 1e-6
    report(2, ok, f"bound violated for N={bad}, residual {worst_res:.1e}, L100/L200 gap {worst_gap:.1e}")


# --- 3, 4, 5 ---------------------------------------------------------------------

def test_criterion_03_inequality_chain(profiles):
    worst_low = worst_up = np.inf
    for h in profiles:
        b = hardy_bounds(h, _basis(h))
        assert b.in_regime and 0 < b.lam < 1
        worst_low = min(worst_low, b.lower_margin)
        worst_up = min(worst_up, b.upper_margin)
    eq = 0.0
    for N in (3, 4):
        for lam in (0.1, 0.2, 0.24):
            b = hardy_bounds(Constant(N, lam * hardy_level(N) / 0.25))
            eq = max(eq, abs(b.lower_margin), abs(b.upper_margin))
    ok = worst_low >= -1e-10 and worst_up >= -1e-10 and eq < 1e-8
    report(3, ok, f"min lower margin {worst_low:.2e}, min upper margin {worst_up:.2e}, "
                  f"constant-case equality error {eq:.1e}")


def test_criterion_04_sandwich(profiles):
    worst = np.inf
    for h in profiles:
        m = mu1_value(h, _basis(h))
        lo, hi = mu1_bounds(h)
        worst = min(worst, m - lo, hi - m)
    report(4, worst > 1e-8, f"smallest sandwich margin {worst:.3e}")


def test_criterion_05_variational_monotonicity(profiles):
    cases = list(profiles) + [Dipole(N, s) for N in (3, 4, 5, 8) for s in (0.5, 3.0, 20.0)]
    worst = -np.inf
    for h in cases:
        L = 12 if not h.is_axisymmetric else 40
        for _ in range(3):
            worst = max(worst, mu1_value(h, 2 * L) - mu1_value(h, L))
            L *= 2 if h.is_axisymmetric else 1
            if not h.is_axisymmetric:
                break
    report(5, worst <= 1e-12, f"max mu1(2L) - mu1(L) = {worst:.2e}")


# --- 6 ---------------------------------------------------------------------------

def _certificate_pair(N, h1):
    zero = Constant(N, 0.0)
    win = admissible_exponents([h1, zero], basis_size=64)
    i1, i2 = win.midpoint()
    s1, s2 = 1 / i1, 1 / i2
    R2 = nesting_scales(h1, zero, s1, s2, 1.0, "outer")
    r2 = nesting_scales(h1, zero, s1, s2, 1.0, "inner")
    return (build_outer_certificate(h1, zero, s1, s2, 1.0, R2),
            build_inner_certificate(h1, zero, s1, s2, 1.0, r2), win)


class _CorruptedExponent:
    """Wraps a certificate so the middle piece decays with a slightly wrong power
    while the claimed branch constants stay the same."""

    def __init__(self, cert, shift=1e-2):
        self._cert, self._shift = cert, shift

    def __getattr__(self, name):
        return getattr(self._cert, name)

    def piece(self, k, x):
        out = self._cert.piece(k, x)
        if k == 1:
            r = np.sqrt(np.sum(np.asarray(x) ** 2, axis=-1))
            out = out * r ** (-self._shift)
        return out


def test_criterion_06_certificates():
    from dipolar.certificates import residuals

    t0 = time.perf_counter()
    lines, ok = [], True
    for N in (3, 4):
        for h1 in (Constant(N, 0.0), Dipole(N, 0.5 * hardy_level(N))):
            outer, inner, win = _certificate_pair(N, h1)
            for cert in (outer, inner):
                rep = verify_certificate(cert, samples=10_000, fd_step=1e-4, directions=256)
                ok &= rep.verdict and rep.interface_mismatch < 1e-8 and rep.worst_residual < 1e-6
                lines.append(f"{cert.kind} N={N}: mismatch {rep.interface_mismatch:.1e}, "
                             f"residual {rep.worst_residual:.1e}")
            # negative control 1: exponents outside the window, built without the guard
            i1 = win.a + win.cap + 0.1
            bad = build_outer_certificate(h1, Constant(N, 0.0), 1 / i1, 10.0, 1.0, 4.0, check=False)
            ok &= not verify_certificate(bad, samples=2000).verdict
            # negative control 2: the FD residual detects a wrong power law
            rng = np.random.default_rng(1)
            th = random_directions(rng, 500, N)
            ra, rb = outer.interface_radii(th)
            x = th * (0.5 * (ra + rb))[:, None]
            res = residuals(_CorruptedExponent(outer), x, np.ones(len(x), int), 1e-4)
            ok &= bool(res.max() > 1e-6)
    dt = time.perf_counter() - t0
    ok &= dt < 30
    report(6, ok, "; ".join(lines[:2]) + f"; ... controls rejected; {dt:.1f} s")


# --- 7 ---------------------------------------------------------------------------

def test_criterion_07_kelvin():
    rng = np.random.default_rng(7)
    inv = lap = eq = 0.0
    for N in (3, 4, 5):
        c = rng.normal(size=N)
        f = lambda y, c=c: np.exp(-np.sum((y - c) ** 2, axis=-1))
        x = random_directions(rng, 100, N) * rng.uniform(0.5, 2.0, size=(100, 1))
        kk = kelvin_transform(lambda y: kelvin_transform(f, y), x)
        inv = max(inv, float(np.max(np.abs(kk - f(x)) / np.abs(f(x)))))
        # Lap(K u)(x) = |x|^{-4} K(Lap u)(x)
        X = np.asarray(x, dtype=np.longdouble)
        step = lambda y: np.full(len(y), 1e-4, dtype=np.longdouble)
        lhs, _ = fd_laplacian(lambda y: kelvin_transform(f, y), X, step(X))
        lap_u = lambda y: fd_laplacian(f, y, step(y))[0]
        rhs = np.sum(X * X, axis=-1) ** -2 * kelvin_transform(lap_u, X)
        lap = max(lap, float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-3))))
        for h1 in (Constant(N, 0.0), Dipole(N, 0.5 * hardy_level(N))):
            outer, inner, _ = _certificate_pair(N, h1)
            inner_k = build_inner_certificate(h1, Constant(N, 0.0), outer.sigma1, outer.sigma2,
                                              1 / outer.scales[0], 1 / outer.scales[1])
            pts = random_directions(rng, 100, N) * np.exp(rng.uniform(-3, 3, size=(100, 1)))
            a = inner_k(pts)
            b = kelvin_transform(outer, pts)
            eq = max(eq, float(np.max(np.abs(a - b) / np.abs(b))))
    ok = inv < 1e-10 and lap < 1e-4 and eq < 1e-10
    report(7, ok, f"involution {inv:.1e}, Laplacian conjugation {lap:.1e}, inner vs Kelvin(outer) {eq:.1e}")


# --- 8 ---------------------------------------------------------------------------

def _single_pole(N, h):
    return MultipoleConfiguration(N, np.zeros((1, N)), (h,), (1.0,), Constant(N, 0.0))


def _flip(flag, lo, hi, tol=1e-9):
    """Bisection for the point where a monotone boolean flag changes."""
    f_lo = flag(lo)
    assert flag(hi) != f_lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if flag(mid) == f_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_08_self_adjointness():
    N = 5
    thr_level = hardy_level(N) - 1.0
    at_boundary = classify_self_adjointness(_single_pole(N, Constant(N, thr_level))).self_adjoint
    above = classify_self_adjointness(_single_pole(N, Constant(N, thr_level + 1e-6))).self_adjoint
    target = -hardy_level(N) + 1.0
    s_exact = brentq(lambda s: mu1_value(Dipole(N, s), 200) - target, 0.1, 50.0, xtol=1e-14)
    sa = lambda s: classify_self_adjointness(_single_pole(N, Dipole(N, s))).self_adjoint
    l2 = lambda s: nonselfadjoint_witness(Dipole(N, s), 1.0, -1.0, 0.5, n_grid=201,
                                          basis_size=200).finite
    # sweep between mu_1 = target + 1/2 and target - 1/2, inside the admissible class
    lo, hi = (brentq(lambda s: mu1_value(Dipole(N, s), 200) - target - d, 1e-3, 50.0)
              for d in (0.5, -0.5))
    sweep = np.linspace(lo, hi, 11)
    consistent = all(sa(s) != l2(s) for s in sweep)
    s_sa = _flip(sa, sweep[0], sweep[-1])
    s_l2 = _flip(l2, sweep[0], sweep[-1])
    ok = (at_boundary and not above and consistent
          and abs(s_sa - s_exact) < 1e-6 and abs(s_l2 - s_exact) < 1e-6)
    report(8, ok, f"boundary {at_boundary}, +1e-6 {above}, crossing {s_exact:.9f}: "
                  f"classifier {s_sa - s_exact:+.1e}, witness {s_l2 - s_exact:+.1e}")


# --- 9 ---------------------------------------------------------------------------

def test_criterion_09_witness():
    closed = 0.0
    env_ok = flag_ok = True
    for N, h in ((3, Constant(3, 0.0)), (4, Dipole(4, 0.6)), (5, Constant(5, 1.5)),
                 (5, Constant(5, -1.0)), (3, Dipole(3, 0.3))):
        w0 = witness_beta_zero_numeric(h, -1.0, 0.5)
        exact = witness_beta_zero(w0.mu1, N, -1.0, 0.5, w0.s)
        scale = np.maximum(np.abs(exact), 1e-300)
        closed = max(closed, float(np.max(np.abs(w0.phi - exact)[1:-1] / scale[1:-1])))
        for beta in (0.5, 2.0):
            w = nonselfadjoint_witness(h, beta, -1.0, 0.5)
            env_ok &= w.envelope_holds()
            flag_ok &= w.finite == (1 - 2 * w.omega > -1)
    ok = closed < 1e-8 and env_ok and flag_ok
    report(9, ok, f"beta=0 relative error {closed:.1e}, envelope {env_ok}, L2 flag {flag_ok}")


# --- 10 --------------------------------------------------------------------------

def test_criterion_10_counterexample():
    N, lam = 4, 0.2
    ok, parts = True, []
    for mu in (1.0, 10.0):
        t0 = time.perf_counter()
        res = counterexample_search(N, lam, mu)
        A, B = example_configurations(N, lam, res.delta)
        nec = binding_necessary(A, B).verdict == "true"
        suf = binding_sufficient(A, B).verdict == "true"
        dt = time.perf_counter() - t0
        ok &= res.best_ratio > 1 and res.support_ok and nec and not suf and dt < 60
        parts.append(f"mu={mu:g}: ratio {res.best_ratio:.4f}, necessary {nec}, sufficient {suf}, {dt:.1f} s")
    report(10, ok, "; ".join(parts))


# --- 11 --------------------------------------------------------------------------

def test_criterion_11_appendix():
    gaps = []
    for N in (3, 4):
        step = AxisymmetricProfile.band(N, 2.0, 0.3, 0.8)
        m = mu1_value(step, 200)
        gaps.append([abs(mu1_value(AxisymmetricProfile.mollified_band(N, 2.0, 0.3, 0.8, w), 200) - m)
                     for w in (1e-1, 1e-2, 1e-3, 1e-4)])
    decreasing = all(np.all(np.diff(g) < 0) for g in gaps)
    finest = max(g[-1] for g in gaps)
    marc = max(abs(marcinkiewicz_norm(h) - weak_norm_direct(h))
               for h in (Dipole(4, 1.0), Dipole(4, 3.5), Constant(4, 2.0), Constant(4, -0.7)))
    ok = decreasing and finest < 1e-4 and marc < 1e-8
    report(11, ok, f"finest mollification gap {finest:.1e} (monotone {decreasing}), "
                   f"Marcinkiewicz routes differ by {marc:.1e}")


# --- 12 --------------------------------------------------------------------------

def test_criterion_12_cross_route_lambda():
    rel = {}
    below = True
    for N in (3, 4):
        lam = lambda_n(N).value
        opt = optimize_hardy_ratio(N).ratio
        rel[N] = abs(opt - lam) / lam
        below &= opt <= lam * (1 + 1e-9)
    ok = max(rel.values()) < 0.02 and below
    report(12, ok, ", ".join(f"N={N}: {100 * r:.3f}%" for N, r in rel.items())
               + f", Rayleigh value below bisection {below}")


if __name__ == "__main__":
    import sys

    failed = 0
    profs = random_profiles()
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion_"):
            continue
        try:
            fn(profs) if fn.__code__.co_argcount else fn()
        except AssertionError:
            failed += 1
        except Exception as exc:  # noqa: BLE001 - report and keep going
            failed += 1
            print(f"{name}: ERROR {type(exc).__name__}: {exc}")
    sys.exit(1 if failed else 0)
