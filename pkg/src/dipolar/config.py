"""Multipole configurations: poles, angular coefficients, cut-off radii."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .potentials import AngularPotential, Constant, Dipole, potential_from_json


class ConfigError(ValueError):
    """Structurally invalid configuration document."""


@dataclass(frozen=True, eq=False)
class MultipoleConfiguration:
    """V = sum_i chi_{B(a_i, r_i)} h_i((x-a_i)/|x-a_i|)/|x-a_i|^2
         + chi_{|x| > R} h_inf(x/|x|)/|x|^2 (+ W, carried as a tag only)."""

    dim: int
    poles: np.ndarray
    angular: tuple
    radii: tuple
    h_infinity: AngularPotential
    R_infinity: float = 1.0
    w_descriptor: str | None = None

    def __post_init__(self):
        poles = np.atleast_2d(np.asarray(self.poles, dtype=float))
        if poles.size == 0:
            raise ConfigError("configuration has no poles")
        if poles.shape[1] != self.dim:
            raise ConfigError(f"poles must have {self.dim} coordinates")
        object.__setattr__(self, "poles", poles)
        k = len(poles)
        if len(self.angular) != k:
            raise ConfigError(f"{k} poles but {len(self.angular)} angular coefficients")
        radii = tuple(float(r) for r in self.radii)
        if len(radii) != k or any(not r > 0 for r in radii):
            raise ConfigError("need one positive radius per pole")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "angular", tuple(self.angular))
        for h in (*self.angular, self.h_infinity):
            if h.dim != self.dim:
                raise ConfigError("angular coefficient dimension does not match the configuration")
        if not self.R_infinity > 0:
            raise ConfigError("R must be positive")
        if k > 1 and self.min_pole_distance() <= 0:
            raise ConfigError("poles must be pairwise distinct")

    @property
    def k(self) -> int:
        return len(self.poles)

    @property
    def a(self) -> float:
        return 0.5 * (self.dim - 2)

    def min_pole_distance(self) -> float:
        if self.k < 2:
            return float("inf")
        d = np.linalg.norm(self.poles[:, None, :] - self.poles[None, :, :], axis=-1)
        return float(d[np.triu_indices(self.k, 1)].min())

    @property
    def is_dipole_case(self) -> bool:
        return all(isinstance(h, Dipole) for h in self.angular)

    @property
    def strengths(self):
        if not self.is_dipole_case:
            return None
        return [h.strength for h in self.angular]

    @property
    def moments(self):
        if not self.is_dipole_case:
            return None
        return [h.direction for h in self.angular]

    def coefficients(self):
        """(label, h) for every finite pole and for infinity."""
        out = [(i, h) for i, h in enumerate(self.angular)]
        out.append(("inf", self.h_infinity))
        return out

    @staticmethod
    def dipole_infinity(dim, strengths, moments) -> AngularPotential:
        """h_inf(theta) = theta . sum(lambda_i d_i)."""
        v = np.sum([s * np.asarray(d, dtype=float) for s, d in zip(strengths, moments)], axis=0)
        n = float(np.linalg.norm(v))
        if n < 1e-14:
            return Constant(dim, 0.0)
        return Dipole(dim, n, v / n)

    @classmethod
    def dipoles(cls, dim, poles, strengths, moments, radii=None, R=1.0, h_infinity=None):
        moments = [np.asarray(d, dtype=float) for d in moments]
        angular = [Dipole(dim, s, d) for s, d in zip(strengths, moments)]
        if h_infinity is None:
            h_infinity = cls.dipole_infinity(dim, strengths, moments)
        radii = radii if radii is not None else [1.0] * len(angular)
        return cls(dim, poles, tuple(angular), tuple(radii), h_infinity, R)

    def potential(self, x):
        """V(x) without W, vectorized over x of shape (M, N)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros(len(x))
        for a, r, h in zip(self.poles, self.radii, self.angular):
            y = x - a
            d = np.linalg.norm(y, axis=1)
            m = (d < r) & (d > 0)
            out[m] += h(y[m] / d[m, None]) / d[m] ** 2
        d = np.linalg.norm(x, axis=1)
        m = d > self.R_infinity
        out[m] += self.h_infinity(x[m] / d[m, None]) / d[m] ** 2
        return out

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        doc = {"dim": self.dim, "poles": self.poles.tolist(), "radii": list(self.radii),
               "R": self.R_infinity, "h_infinity": self.h_infinity.to_json()}
        if self.is_dipole_case:
            doc["strengths"] = self.strengths
            doc["moments"] = [d.tolist() for d in self.moments]
        else:
            doc["angular"] = [h.to_json() for h in self.angular]
        if self.w_descriptor:
            doc["W"] = self.w_descriptor
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "MultipoleConfiguration":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        try:
            dim = int(doc["dim"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError("configuration needs an integer 'dim'") from None
        poles = doc.get("poles") or []
        if len(poles) == 0:
            raise ConfigError("configuration has no poles")
        k = len(poles)
        radii = doc.get("radii", [1.0] * k)
        R = float(doc.get("R", 1.0))
        try:
            if "angular" in doc:
                angular = tuple(potential_from_json(_with_dim(h, dim)) for h in doc["angular"])
                if "h_infinity" not in doc:
                    raise ConfigError("non-dipole configurations need an explicit h_infinity")
                h_inf = potential_from_json(_with_dim(doc["h_infinity"], dim))
                return cls(dim, poles, angular, tuple(radii), h_inf, R, doc.get("W"))
            if "strengths" not in doc or "moments" not in doc:
                raise ConfigError("give either 'angular' or both 'strengths' and 'moments'")
            h_inf = None
            if "h_infinity" in doc:
                h_inf = potential_from_json(_with_dim(doc["h_infinity"], dim))
            cfg = cls.dipoles(dim, poles, doc["strengths"], doc["moments"], radii, R, h_inf)
            if doc.get("W"):
                object.__setattr__(cfg, "w_descriptor", doc["W"])
            return cfg
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "MultipoleConfiguration":
        return cls.from_json(json.loads(Path(path).read_text()))


def _with_dim(doc, dim):
    if isinstance(doc, dict) and "dim" not in doc:
        return {**doc, "dim": dim}
    return doc
