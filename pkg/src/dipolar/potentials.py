"""Bounded angular coefficients h on S^{N-1}.

Four kinds are supported: dipoles lambda*(theta.d), constants, axisymmetric
profiles f(theta.axis) and, for N = 3 only, tables of real spherical harmonic
coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import PchipInterpolator
from scipy.special import erf, sph_harm_y

from .sphere import angle_rule, check_unit, integrate_axisymmetric, sphere_area, sphere_nodes

_SUP_PANEL_NODES = 200


class AngularPotential:
    """Base class. Subclasses set ``dim`` and implement ``__call__``."""

    dim: int

    @property
    def axis(self) -> np.ndarray | None:
        return None

    @property
    def is_axisymmetric(self) -> bool:
        return False

    @property
    def breakpoints(self) -> tuple:
        return ()

    def profile(self, t):
        raise TypeError(f"{type(self).__name__} has no axisymmetric profile")

    def __call__(self, points):
        raise NotImplementedError

    @property
    def ess_sup(self) -> float:
        return float(np.max(self._probe_values()))

    @property
    def ess_inf(self) -> float:
        return float(np.min(self._probe_values()))

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def positive_sup(self) -> float:
        """ess sup of the positive part h+."""
        return max(self.ess_sup, 0.0)

    def is_nonpositive(self) -> bool:
        return self.ess_sup <= 0.0

    def _probe_values(self) -> np.ndarray:
        t, _ = angle_rule(_SUP_PANEL_NODES, self.dim, self.breakpoints)
        extra = [-1.0, 1.0]
        for b in self.breakpoints:
            extra += [np.nextafter(b, -2.0), np.nextafter(b, 2.0)]
        t = np.concatenate([t, np.clip(extra, -1.0, 1.0)])
        return np.asarray(self.profile(t), dtype=float)

    # arithmetic -------------------------------------------------------
    def scaled(self, c: float) -> "AngularPotential":
        raise NotImplementedError

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return self.scaled(float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1.0)

    def __add__(self, other):
        if not isinstance(other, AngularPotential):
            return NotImplemented
        return add_potentials(self, other)

    def __sub__(self, other):
        return self + (-other)

    # serialization ----------------------------------------------------
    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(doc: dict) -> "AngularPotential":
        return potential_from_json(doc)


@dataclass(frozen=True, eq=False)
class Constant(AngularPotential):
    dim: int
    level: float

    def __post_init__(self):
        _check_dim(self.dim)
        object.__setattr__(self, "level", float(self.level))

    @property
    def is_axisymmetric(self):
        return True

    def profile(self, t):
        return np.full(np.shape(t), self.level)

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return np.full(points.shape[:-1], self.level)

    @property
    def ess_sup(self):
        return self.level

    @property
    def ess_inf(self):
        return self.level

    @property
    def mean(self):
        return self.level

    def scaled(self, c):
        return Constant(self.dim, c * self.level)

    def to_json(self):
        return {"kind": "constant", "dim": self.dim, "params": {"level": self.level}}

    def __repr__(self):
        return f"Constant(dim={self.dim}, level={self.level:g})"


@dataclass(frozen=True, eq=False)
class Dipole(AngularPotential):
    dim: int
    strength: float
    direction: np.ndarray = field(default=None)

    def __post_init__(self):
        _check_dim(self.dim)
        d = self.direction
        if d is None:
            d = np.eye(self.dim)[-1]
        d = check_unit(d)
        if d.shape != (self.dim,):
            raise ValueError(f"axis has length {d.shape[0]}, expected {self.dim}")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "strength", float(self.strength))

    @property
    def axis(self):
        return self.direction

    @property
    def is_axisymmetric(self):
        return True

    @property
    def moment(self) -> np.ndarray:
        return self.strength * self.direction

    def profile(self, t):
        return self.strength * np.asarray(t, dtype=float)

    def __call__(self, points):
        return self.strength * (np.asarray(points, dtype=float) @ self.direction)

    @property
    def ess_sup(self):
        return abs(self.strength)

    @property
    def ess_inf(self):
        return -abs(self.strength)

    @property
    def mean(self):
        return 0.0

    def scaled(self, c):
        return Dipole(self.dim, c * self.strength, self.direction)

    def to_json(self):
        return {
            "kind": "dipole",
            "dim": self.dim,
            "params": {"strength": self.strength, "axis": self.direction.tolist()},
        }

    def __repr__(self):
        return f"Dipole(dim={self.dim}, strength={self.strength:g}, axis={self.direction.tolist()})"


@dataclass(frozen=True, eq=False)
class AxisymmetricProfile(AngularPotential):
    """h(theta) = func(theta . axis).

    ``func`` must be vectorized over t in [-1, 1]. ``breakpoints`` lists the
    t-values where func is not smooth; quadrature panels are split there.
    ``poly_degree`` marks band-limited profiles (polynomials in t), which
    lets the solver use an exact Gauss rule. ``source`` keeps the document
    needed to serialize the profile.
    """

    dim: int
    direction: np.ndarray
    func: Callable
    knots: tuple = ()
    poly_degree: int | None = None
    source: dict | None = None

    def __post_init__(self):
        _check_dim(self.dim)
        d = check_unit(self.direction)
        if d.shape != (self.dim,):
            raise ValueError(f"axis has length {d.shape[0]}, expected {self.dim}")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "knots", tuple(sorted(float(b) for b in self.knots if -1 < b < 1)))

    @classmethod
    def polynomial(cls, dim, coeffs, axis=None):
        """Profile sum_k coeffs[k] t^k."""
        coeffs = [float(c) for c in coeffs]
        p = Polynomial(coeffs)
        axis = _default_axis(dim, axis)
        return cls(dim, axis, p, (), max(len(coeffs) - 1, 0),
                   {"polynomial": coeffs})

    @classmethod
    def from_samples(cls, dim, t, values, axis=None):
        """Shape-preserving cubic interpolant of sampled (t, f(t)) pairs."""
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape or len(t) < 2:
            raise ValueError("samples must be matching 1-D arrays with at least two points")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        if t[0] > -1 or t[-1] < 1:
            raise ValueError("samples must cover [-1, 1]")
        if not np.all(np.isfinite(values)):
            raise ValueError("profile samples contain non-finite values")
        interp = PchipInterpolator(t, values)
        axis = _default_axis(dim, axis)
        return cls(dim, axis, interp, (), None,
                   {"samples": np.column_stack([t, values]).tolist()})

    @classmethod
    def band(cls, dim, level, t_low, t_high, axis=None, cylindrical=False):
        """level * indicator(t_low < t < t_high), divided by (1 - t^2) when
        ``cylindrical`` (the angular trace of level*chi/|x'|^2)."""
        if not -1 <= t_low < t_high <= 1:
            raise ValueError("need -1 <= t_low < t_high <= 1")
        if cylindrical and (t_low <= -1 or t_high >= 1):
            raise ValueError("cylindrical band must stay away from the poles")
        level = float(level)

        def f(t):
            t = np.asarray(t, dtype=float)
            inside = (t > t_low) & (t < t_high)
            with np.errstate(divide="ignore", invalid="ignore"):
                base = level / (1.0 - t * t) if cylindrical else level
                return np.where(inside, base, 0.0)

        axis = _default_axis(dim, axis)
        src = {"band": {"level": level, "t_low": t_low, "t_high": t_high,
                        "cylindrical": bool(cylindrical)}}
        return cls(dim, axis, f, (t_low, t_high), None, src)

    @classmethod
    def mollified_band(cls, dim, level, t_low, t_high, width, axis=None):
        """``band`` convolved with a Gaussian of the given width: smooth, bounded by
        |level|, and converging to the band off its two edges as width -> 0."""
        if not -1 <= t_low < t_high <= 1:
            raise ValueError("need -1 <= t_low < t_high <= 1")
        if not width > 0:
            raise ValueError("width must be positive")
        level, width = float(level), float(width)

        def f(t):
            t = np.asarray(t, dtype=float)
            return 0.5 * level * (erf((t - t_low) / width) - erf((t - t_high) / width))

        # panel edges around each ramp so the quadrature resolves it
        knots = [e + k * width for e in (t_low, t_high) for k in (-8, -2, 0, 2, 8)]
        axis = _default_axis(dim, axis)
        src = {"mollified_band": {"level": level, "t_low": t_low, "t_high": t_high,
                                  "width": width}}
        return cls(dim, axis, f, tuple(knots), None, src)

    @property
    def axis(self):
        return self.direction

    @property
    def is_axisymmetric(self):
        return True

    @property
    def breakpoints(self):
        return self.knots

    def profile(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.func(t), dtype=float) * np.ones_like(t)

    def __call__(self, points):
        return self.profile(np.clip(np.asarray(points, dtype=float) @ self.direction, -1, 1))

    @property
    def mean(self):
        total = integrate_axisymmetric(self.profile, self.dim, 200, self.breakpoints)
        return total / sphere_area(self.dim)

    def scaled(self, c):
        f = self.func
        src = None
        if self.source is not None:
            src = {"scaled": {"factor": c, "of": self.source}}
        return AxisymmetricProfile(self.dim, self.direction, lambda t: c * f(t),
                                   self.knots, self.poly_degree, src)

    def to_json(self):
        if self.source is None:
            raise ValueError("profile built from an arbitrary callable cannot be serialized")
        return {"kind": "axisymmetric", "dim": self.dim,
                "params": {"axis": self.direction.tolist(), **self.source}}

    def __repr__(self):
        return f"AxisymmetricProfile(dim={self.dim}, axis={self.direction.tolist()}, source={self.source})"


def real_sph_harm(l: int, m: int, points) -> np.ndarray:
    """Real orthonormal spherical harmonic on S^2, without the Condon-Shortley phase,
    so that Y_{1,1}, Y_{1,-1}, Y_{1,0} are proportional to x, y, z."""
    p = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    phi = np.arctan2(p[..., 1], p[..., 0])
    y = sph_harm_y(l, abs(m), theta, phi)
    if m == 0:
        return y.real
    sign = (-1.0) ** m
    if m > 0:
        return np.sqrt(2.0) * sign * y.real
    return np.sqrt(2.0) * sign * y.imag


def harmonic_index(degree: int):
    return [(l, m) for l in range(degree + 1) for m in range(-l, l + 1)]


@dataclass(frozen=True, eq=False)
class HarmonicTable(AngularPotential):
    """h = sum c_{lm} Y_{lm} on S^2 with real harmonics (see ``real_sph_harm``)."""

    coefficients: dict
    dim: int = 3

    def __post_init__(self):
        if self.dim != 3:
            raise ValueError("harmonic tables are only supported for N = 3")
        clean = {}
        for (l, m), c in dict(self.coefficients).items():
            l, m = int(l), int(m)
            if l < 0 or abs(m) > l:
                raise ValueError(f"invalid harmonic index ({l}, {m})")
            if not np.isfinite(c):
                raise ValueError("non-finite harmonic coefficient")
            clean[(l, m)] = clean.get((l, m), 0.0) + float(c)
        object.__setattr__(self, "coefficients", clean)

    @property
    def degree(self) -> int:
        return max((l for l, _ in self.coefficients), default=0)

    @classmethod
    def from_dipole(cls, h: Dipole):
        if h.dim != 3:
            raise ValueError("dipole must live on S^2")
        s = h.strength * np.sqrt(4 * np.pi / 3)
        dx, dy, dz = h.direction
        return cls({(1, 1): s * dx, (1, -1): s * dy, (1, 0): s * dz})

    @classmethod
    def from_constant(cls, h: Constant):
        return cls({(0, 0): h.level * np.sqrt(4 * np.pi)})

    @classmethod
    def project(cls, func, degree: int, level: int | None = None):
        """Least-squares projection of a function on S^2 onto degree <= L."""
        level = level or (degree + 16)
        pts, w = sphere_nodes(3, level)
        vals = func(pts)
        coeffs = {(l, m): float(np.sum(w * vals * real_sph_harm(l, m, pts)))
                  for l, m in harmonic_index(degree)}
        return cls(coeffs)

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[:-1])
        for (l, m), c in self.coefficients.items():
            out += c * real_sph_harm(l, m, points)
        return out

    def _probe_values(self):
        pts, _ = sphere_nodes(3, max(2 * self.degree + 24, 48))
        return self(pts)

    @property
    def mean(self):
        return self.coefficients.get((0, 0), 0.0) / np.sqrt(4 * np.pi)

    def scaled(self, c):
        return HarmonicTable({k: c * v for k, v in self.coefficients.items()})

    def to_json(self):
        return {"kind": "harmonic_table", "dim": 3,
                "params": {"coefficients": [[l, m, c] for (l, m), c in sorted(self.coefficients.items())]}}

    def __repr__(self):
        return f"HarmonicTable(degree={self.degree}, terms={len(self.coefficients)})"


# ---------------------------------------------------------------------------

def _check_dim(dim):
    if int(dim) != dim or dim < 3:
        raise ValueError(f"dimension must be an integer >= 3, got {dim}")


def _default_axis(dim, axis):
    if axis is None:
        return np.eye(dim)[-1]
    return np.asarray(axis, dtype=float)


def _coaxial(u, v, tol=1e-12):
    c = float(np.dot(u, v))
    if abs(abs(c) - 1.0) < tol:
        return 1.0 if c > 0 else -1.0
    return 0.0


def add_potentials(a: AngularPotential, b: AngularPotential) -> AngularPotential:
    if a.dim != b.dim:
        raise ValueError(f"cannot add potentials on S^{a.dim - 1} and S^{b.dim - 1}")
    dim = a.dim
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(dim, a.level + b.level)
    if isinstance(a, Dipole) and isinstance(b, Dipole):
        v = a.moment + b.moment
        n = np.linalg.norm(v)
        if n < 1e-14:
            return Constant(dim, 0.0)
        return Dipole(dim, n, v / n)
    if isinstance(b, Constant):
        a, b = b, a
    if isinstance(a, Constant):
        if a.level == 0.0:
            return b
        if isinstance(b, HarmonicTable):
            return HarmonicTable({**b.coefficients,
                                  (0, 0): b.coefficients.get((0, 0), 0.0) + a.level * np.sqrt(4 * np.pi)})
        return _profile_sum(b.axis, dim, [(b, 1.0)], a.level)
    if a.is_axisymmetric and b.is_axisymmetric:
        s = _coaxial(a.axis, b.axis)
        if s != 0.0:
            return _profile_sum(a.axis, dim, [(a, 1.0), (b, s)], 0.0)
    if dim == 3:
        return HarmonicTable(_merge(_as_table(a).coefficients, _as_table(b).coefficients))
    raise ValueError("sums of non-coaxial axisymmetric potentials are only supported for N = 3 "
                     "dipoles, constants and harmonic tables")


def _merge(c1, c2):
    out = dict(c1)
    for k, v in c2.items():
        out[k] = out.get(k, 0.0) + v
    return out


def _as_table(h):
    if isinstance(h, HarmonicTable):
        return h
    if isinstance(h, Dipole):
        return HarmonicTable.from_dipole(h)
    if isinstance(h, Constant):
        return HarmonicTable.from_constant(h)
    raise ValueError(f"{type(h).__name__} has no exact harmonic expansion")


def _profile_sum(axis, dim, terms, const):
    """Coaxial sum; sign -1 means the term's axis is reversed relative to ``axis``."""
    terms = [h if s > 0 else _reflected(h) for h, s in terms]
    knots = set()
    degs = []
    for h in terms:
        knots.update(h.breakpoints)
        if isinstance(h, Dipole):
            degs.append(1)
        elif isinstance(h, AxisymmetricProfile):
            degs.append(h.poly_degree)
        else:
            degs.append(0)
    deg = None if any(d is None for d in degs) else max(degs)
    funcs = [h.profile for h in terms]

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, const)
        for prof in funcs:
            out = out + prof(t)
        return out

    try:
        src = {"sum": {"terms": [h.to_json() for h in terms], "constant": const}}
    except (ValueError, NotImplementedError):
        src = None
    return AxisymmetricProfile(dim, axis, f, tuple(knots), deg, src)


def potential_from_json(doc: dict) -> AngularPotential:
    """Inverse of ``to_json``. Accepts nested {kind, dim, params} or flat documents."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("potential document needs a 'kind' field")
    kind = str(doc["kind"]).lower()
    if "dim" not in doc:
        raise ValueError("potential document needs a 'dim' field")
    dim = int(doc["dim"])
    p = doc.get("params", doc)
    if kind == "constant":
        return Constant(dim, float(p.get("level", p.get("value", 0.0))))
    if kind == "dipole":
        return Dipole(dim, float(p["strength"]), p.get("axis"))
    if kind == "harmonic_table":
        coeffs = {(int(l), int(m)): float(c) for l, m, c in p["coefficients"]}
        return HarmonicTable(coeffs, dim)
    if kind == "axisymmetric":
        return _profile_from_source(dim, p.get("axis"), p)
    raise ValueError(f"unknown potential kind '{doc['kind']}'")


def _profile_from_source(dim, axis, src):
    if "polynomial" in src:
        return AxisymmetricProfile.polynomial(dim, src["polynomial"], axis)
    if "samples" in src:
        arr = np.asarray(src["samples"], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("samples must be a list of [t, f(t)] pairs")
        return AxisymmetricProfile.from_samples(dim, arr[:, 0], arr[:, 1], axis)
    if "band" in src:
        b = src["band"]
        return AxisymmetricProfile.band(dim, b["level"], b["t_low"], b["t_high"], axis,
                                        b.get("cylindrical", False))
    if "mollified_band" in src:
        b = src["mollified_band"]
        return AxisymmetricProfile.mollified_band(dim, b["level"], b["t_low"], b["t_high"],
                                                  b["width"], axis)
    if "scaled" in src:
        s = src["scaled"]
        return _profile_from_source(dim, axis, s["of"]).scaled(float(s["factor"]))
    if "sum" in src:
        s = src["sum"]
        h = Constant(dim, float(s.get("constant", 0.0)))
        for term in s["terms"]:
            h = h + potential_from_json(term)
        return h
    if "reflected" in src:
        return _reflected(_profile_from_source(dim, -np.asarray(axis, dtype=float), src["reflected"]))
    raise ValueError("axisymmetric profile needs one of: polynomial, samples, band")


def _reflected(h):
    """Same function written about the opposite axis."""
    if isinstance(h, Dipole):
        return Dipole(h.dim, -h.strength, -h.axis)
    src = None if h.source is None else {"reflected": h.source}
    return AxisymmetricProfile(h.dim, -h.axis, lambda t: h.profile(-np.asarray(t)),
                               tuple(-b for b in h.breakpoints), h.poly_degree, src)
