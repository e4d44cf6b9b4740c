"""
Dimensionless description of a spin-1/2 plane wave hitting a uniform
magnetic slab, plus the SI bridge for neutrons.

Everything downstream works with two numbers: the Zeeman-to-kinetic ratio
``epsilon = V0 / E`` and the slab width in units of the free wavelength,
``kl = k * L``.  The per-channel wavenumbers follow from

    (kappa_+ L)^2 = kl^2 (1 - epsilon)      spin up sees a barrier
    (kappa_- L)^2 = kl^2 (1 + epsilon)      spin down sees a well

``kappa_+^2`` is kept as a signed real so that ``epsilon > 1`` (tunneling)
needs no separate representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NEUTRON",
    "BOHR_MAGNETON",
    "ScatterParams",
    "SpinState",
    "UnitsBridge",
    "make_params",
    "params_from_kminus",
    "spin_from_angle",
    "field_for_speed",
    "epsilon_for_physical",
    "q_for_field",
]

BOHR_MAGNETON = 9.27e-24  # J/T, as quoted for atomic hydrogen


def _finite(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ScatterParams:
    """Dimensionless slab problem.

    Attributes
    ----------
    epsilon : float
        ``V0 / E``; zero means no field.
    kl : float
        Free wavenumber times slab width.
    """

    epsilon: float
    kl: float

    @property
    def kappa0_l(self) -> float:
        return self.kl * math.sqrt(self.epsilon)

    @property
    def kplus_sq_l2(self) -> float:
        """``(kappa_+ L)^2``; negative in the tunneling regime."""
        return self.kl * self.kl * (1.0 - self.epsilon)

    @property
    def kminus_sq_l2(self) -> float:
        return self.kl * self.kl * (1.0 + self.epsilon)

    @property
    def kminus_l(self) -> float:
        return self.kl * math.sqrt(1.0 + self.epsilon)

    @property
    def kplus_l(self) -> complex:
        """Principal square root of ``kplus_sq_l2`` (imaginary when tunneling)."""
        return cmath.sqrt(self.kplus_sq_l2)

    @property
    def tunneling(self) -> bool:
        return self.kplus_sq_l2 < 0.0

    def kappa_sq_l2(self, channel: int) -> float:
        """Signed ``(kappa_l L)^2`` for ``channel`` = +1 or -1."""
        if channel == +1:
            return self.kplus_sq_l2
        if channel == -1:
            return self.kminus_sq_l2
        raise ValueError(f"channel must be +1 or -1, got {channel!r}")


def make_params(epsilon, kl) -> ScatterParams:
    epsilon = _finite("epsilon", epsilon)
    kl = _finite("kl", kl)
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if kl <= 0.0:
        raise ValueError(f"kl must be > 0, got {kl}")
    return ScatterParams(epsilon, kl)


def params_from_kminus(epsilon, kminus_l) -> ScatterParams:
    """Build parameters from the spin-down slab phase ``kappa_- L``."""
    epsilon = _finite("epsilon", epsilon)
    kminus_l = _finite("kminus_l", kminus_l)
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if kminus_l <= 0.0:
        raise ValueError(f"kminus_l must be > 0, got {kminus_l}")
    return make_params(epsilon, kminus_l / math.sqrt(1.0 + epsilon))


@dataclass(frozen=True)
class SpinState:
    """Normalized spinor ``c_plus |+z> + c_minus |-z>``."""

    c_plus: complex
    c_minus: complex

    def __post_init__(self):
        norm = abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2
        if not abs(norm - 1.0) <= 1e-12:
            raise ValueError(f"spin state is not normalized (|c|^2 = {norm!r})")

    @classmethod
    def from_amplitudes(cls, c_plus, c_minus) -> "SpinState":
        """Normalize an arbitrary non-zero pair."""
        c_plus, c_minus = complex(c_plus), complex(c_minus)
        norm = math.hypot(abs(c_plus), abs(c_minus))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite spinor")
        return cls(c_plus / norm, c_minus / norm)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.c_plus, self.c_minus], dtype=complex)

    @property
    def weights(self) -> np.ndarray:
        """``(|c_+|^2, |c_-|^2)``."""
        return np.abs(self.amplitudes) ** 2

    @property
    def theta(self) -> float:
        """Cone angle to the field axis."""
        return 2.0 * math.atan2(abs(self.c_minus), abs(self.c_plus))


def spin_from_angle(theta, phi=0.0) -> SpinState:
    theta = _finite("theta", theta)
    phi = _finite("phi", phi)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    half = 0.5 * theta
    c_minus = math.sin(half) * cmath.exp(1j * phi) if theta != 0.0 else 0j
    return SpinState(complex(math.cos(half)), c_minus)


@dataclass(frozen=True)
class UnitsBridge:
    """SI constants for the particle; defaults are the neutron values."""

    mass: float = 1.675e-27  # kg
    moment: float = 9.662e-27  # J/T
    hbar: float = 1.054571817e-34  # J s, CODATA 2018
    name: str = field(default="neutron", compare=False)

    @property
    def mass_per_moment(self) -> float:
        """kg T / J; multiplies ``v^2`` in the field-speed relation."""
        return self.mass / self.moment

    def with_moment(self, moment) -> "UnitsBridge":
        moment = _finite("moment", moment)
        if moment <= 0.0:
            raise ValueError("moment must be positive")
        return UnitsBridge(self.mass, moment, self.hbar, name="custom")

    def speed_scale_factor(self, other: "UnitsBridge") -> float:
        """Factor by which the usable speed range grows for ``other``.

        At fixed field and fixed ``V0/E`` the speed scales as the square
        root of the moment (mass held fixed).
        """
        return math.sqrt(other.moment / self.moment)

    def speed_for_kl(self, kl, length) -> float:
        """Speed in m/s for dimensionless ``kl`` over a slab of ``length`` m."""
        return self.hbar * (kl / length) / self.mass


NEUTRON = UnitsBridge()


def field_for_speed(q, v, units: UnitsBridge = NEUTRON) -> float:
    """Field (T) enforcing simultaneous resonance with ratio ``q`` at speed ``v``.

    ``b0 = (q^2 - 1) / (q^2 + 1) * (m / mu) * v^2``.
    """
    q = _finite("q", q)
    v = _finite("v", v)
    if q <= 1.0:
        raise ValueError(f"q must exceed 1 (no Zeeman split otherwise), got {q}")
    if v <= 0.0:
        raise ValueError(f"v must be positive, got {v}")
    q2 = q * q
    return (q2 - 1.0) / (q2 + 1.0) * units.mass_per_moment * v * v


def q_for_field(b0, v, units: UnitsBridge = NEUTRON) -> float:
    """Inverse of :func:`field_for_speed` in ``q``."""
    eps = epsilon_for_physical(b0, v, units)
    if eps >= 1.0:
        raise ValueError("field too strong for a resonance at this speed (V0/E >= 1)")
    if eps == 0.0:
        raise ValueError("zero field has no resonance ratio")
    return math.sqrt((1.0 + eps) / (1.0 - eps))


def epsilon_for_physical(b0, v, units: UnitsBridge = NEUTRON) -> float:
    """``V0 / E = mu b0 / (m v^2)``."""
    b0 = _finite("b0", b0)
    v = _finite("v", v)
    if b0 < 0.0:
        raise ValueError(f"b0 must be >= 0, got {b0}")
    if v <= 0.0:
        raise ValueError(f"v must be positive, got {v}")
    return b0 / (units.mass_per_moment * v * v)
