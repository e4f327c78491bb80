"""Physical parameters, spectral labels and the coordinate maps used throughout.

The Morse potential is

    V(x) = (hbar^2 kappa^2 / 2m) (exp(-2 alpha x) - beta exp(-alpha x))

and its shape is controlled by the dimensionless ``b = beta kappa / alpha``.
``beta = 0`` is the Liouville potential.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

CONFIG_KEYS = ("hbar", "mass", "alpha", "kappa", "beta")


@dataclass(frozen=True)
class MorseSystem:
    hbar: float = 1.0
    mass: float = 1.0
    alpha: float = 1.0
    kappa: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "mass", "alpha", "kappa"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.beta):
            raise DomainError(f"beta must be finite, got {self.beta!r}")

    @property
    def b(self) -> float:
        return self.beta * self.kappa / self.alpha

    @classmethod
    def from_b(cls, b, hbar=1.0, mass=1.0, alpha=1.0, kappa=1.0):
        return cls(hbar=hbar, mass=mass, alpha=alpha, kappa=kappa, beta=b * alpha / kappa)

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        pref = self.hbar**2 * self.kappa**2 / (2 * self.mass)
        return pref * (np.exp(-2 * self.alpha * x) - self.beta * np.exp(-self.alpha * x))

    def hamiltonian(self, x, p):
        """Classical symbol H(x, p) = p^2/2m + V(x)."""
        return np.asarray(p) ** 2 / (2 * self.mass) + self.potential(x)

    def to_config(self) -> dict:
        return {key: float(getattr(self, key)) for key in CONFIG_KEYS}

    @classmethod
    def from_config(cls, config: dict) -> "MorseSystem":
        unknown = set(config) - set(CONFIG_KEYS)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{key: float(config[key]) for key in CONFIG_KEYS if key in config})

    def to_json(self) -> str:
        return json.dumps(self.to_config(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MorseSystem":
        return cls.from_config(json.loads(text))


@dataclass(frozen=True)
class SpectralLabel:
    """Either a scattering state (wavenumber ``k > 0``) or a bound state ``nu``."""

    kind: str
    k: float | None = None
    nu: int | None = None

    def __post_init__(self):
        if self.kind == "scattering":
            if self.k is None or self.nu is not None:
                raise DomainError("scattering label needs k and no nu")
            if not (math.isfinite(self.k) and self.k > 0):
                raise DomainError(f"scattering wavenumber must be > 0, got {self.k!r}")
        elif self.kind == "bound":
            if self.nu is None or self.k is not None:
                raise DomainError("bound label needs nu and no k")
            if int(self.nu) != self.nu or self.nu < 0:
                raise DomainError(f"bound index must be a non-negative integer, got {self.nu!r}")
        else:
            raise DomainError(f"unknown label kind {self.kind!r}")

    @classmethod
    def scattering(cls, k) -> "SpectralLabel":
        return cls("scattering", k=float(k))

    @classmethod
    def bound(cls, nu) -> "SpectralLabel":
        return cls("bound", nu=int(nu))

    @property
    def is_bound(self) -> bool:
        return self.kind == "bound"

    def validate(self, sys: MorseSystem) -> None:
        if self.is_bound and not self.nu - sys.b / 2 + 0.5 < 0:
            raise DomainError(
                f"nu={self.nu} is not a normalizable bound state for b={sys.b} "
                "(need nu - b/2 + 1/2 < 0)"
            )

    def wavenumber(self, sys: MorseSystem) -> complex:
        """k with E = hbar^2 k^2 / 2m; imaginary for bound states."""
        if self.is_bound:
            self.validate(sys)
            return 1j * sys.alpha * (self.nu - sys.b / 2 + 0.5)
        return complex(self.k)

    def to_dict(self) -> dict:
        if self.is_bound:
            return {"kind": "bound", "nu": self.nu}
        return {"kind": "scattering", "k": self.k}

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralLabel":
        if data["kind"] == "bound":
            return cls.bound(data["nu"])
        return cls.scattering(data["k"])

    def __str__(self):
        return f"nu={self.nu}" if self.is_bound else f"k={self.k:g}"


class PhasePoint(NamedTuple):
    x: float
    p: complex


def energy_of(label: SpectralLabel, sys: MorseSystem) -> float:
    if label.is_bound:
        label.validate(sys)
        shift = label.nu - sys.b / 2 + 0.5
        return -(sys.hbar**2 * sys.alpha**2 / (2 * sys.mass)) * shift**2
    return sys.hbar**2 * label.k**2 / (2 * sys.mass)


def bound_count(sys: MorseSystem) -> int:
    """Number of normalizable bound states, i.e. integers nu >= 0 with nu < (b - 1)/2."""
    limit = (sys.b - 1) / 2
    if limit <= 0:
        return 0
    return math.ceil(limit)


def bound_count_literal(sys: MorseSystem) -> int:
    """Count from the range nu in [0, floor(b/2)] with a strict floor (largest integer < b/2).

    Differs from :func:`bound_count` for odd integer b, where it includes the
    zero-energy, non-normalizable level. Reported as a diagnostic only.
    """
    half = sys.b / 2
    if half <= 0:
        return 0
    return math.ceil(half)


def u_of_x(x, sys: MorseSystem):
    """Mellin variable u = 16 exp(4 alpha x) alpha^4 / kappa^4."""
    return np.exp(log_u_of_x(x, sys))


def log_u_of_x(x, sys: MorseSystem):
    return 4 * sys.alpha * np.asarray(x, dtype=float) + math.log(16 * sys.alpha**4 / sys.kappa**4)


def v_of_x(x, sys: MorseSystem):
    """Whittaker variable v = 2 kappa exp(-alpha x) / alpha."""
    return 2 * sys.kappa * np.exp(-sys.alpha * np.asarray(x, dtype=float)) / sys.alpha
