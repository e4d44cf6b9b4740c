"""
Geometric phase evaluators.

The general evaluator is the open-path functional

    gamma = arg <phi(s0)|phi(s1)> - int_{s0}^{s1} Im<phi|phi'> / <phi|phi> ds,

integrated adaptively with exact derivatives from the regional closed
forms.  The Pancharatnam chain is kept deliberately naive: it only calls
the field's values and never its derivatives, so it can serve as an
independent check on the quadrature path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ScatterParams, SpinState
from .quadrature import integrate
from .scattering import (
    CHANNELS,
    AmplitudeField,
    DegenerateNormalization,
    amplitude_field,
    channel_scattering,
)

__all__ = [
    "TWO_PI",
    "GeometricPhaseError",
    "OrthogonalEndpoints",
    "VanishingNorm",
    "ParityMismatch",
    "GpValue",
    "fold",
    "wrapped_difference",
    "open_path_gp",
    "pancharatnam_oracle",
    "resonant_gp",
    "highspeed_gp",
    "prebarrier_gp",
    "prebarrier_gp_from_channels",
    "tunnel_gp",
]

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-9

_ORTHO_LIMIT = 1e-12
_NORM_LIMIT = 1e-14


class GeometricPhaseError(ArithmeticError):
    pass


class OrthogonalEndpoints(GeometricPhaseError):
    """Endpoint states are orthogonal; the open-path phase is undefined."""


class VanishingNorm(GeometricPhaseError):
    """The state vanishes somewhere along the path."""


class ParityMismatch(ValueError):
    """Resonance integers of opposite parity: the spin path does not close."""


def fold(raw: float):
    """Representative of ``raw`` in ``(-2 pi, 0]`` and a note on how it was chosen."""
    raw = float(raw)
    p = -math.fmod(-raw, TWO_PI)
    if p > 0.0:
        p -= TWO_PI
    turns = round((raw - p) / TWO_PI)
    note = "identity" if turns == 0 else f"shifted by {-turns:+d}*2pi"
    # floating residue just above -2pi is the zero class
    if p <= -TWO_PI + 1e-12:
        p = 0.0
        turns = round(raw / TWO_PI)
        note = "zero class" if turns == 0 else f"zero class, shifted by {-turns:+d}*2pi"
    return p, note


def wrapped_difference(a: float, b: float) -> float:
    """Distance between two angles on the circle, in ``[0, pi]``."""
    d = math.fmod(float(a) - float(b), TWO_PI)
    d = abs(d)
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class GpValue:
    """A geometric phase in radians.

    ``raw`` is the value as the formula produced it; ``principal`` is its
    representative in ``(-2 pi, 0]``.
    """

    raw: float
    principal: float
    branch_note: str
    error: float = 0.0

    @classmethod
    def of(cls, raw, error=0.0) -> "GpValue":
        p, note = fold(raw)
        return cls(float(raw), p, note, float(error))

    def __float__(self):
        return self.raw

    def close_to(self, other, tol) -> bool:
        """Equality modulo 2 pi."""
        return wrapped_difference(float(self), float(other)) <= tol


def _overlap(field: AmplitudeField, s0, s1) -> complex:
    f = field(np.array([s0, s1]))
    return complex(np.vdot(f[:, 0], f[:, 1]))


def _check_interval(field: AmplitudeField, s0, s1):
    s0, s1 = float(s0), float(s1)
    if not s0 < s1:
        raise ValueError(f"need s0 < s1, got ({s0}, {s1})")
    lo, hi = field.domain
    if s0 < lo - 1e-12 or s1 > hi + 1e-12:
        raise ValueError(f"interval ({s0}, {s1}) leaves region {field.region} domain {field.domain}")
    return s0, s1


def open_path_gp(field: AmplitudeField, s0, s1, quad_tol=DEFAULT_TOL) -> GpValue:
    """Open-path geometric phase of the state carried by ``field`` on ``[s0, s1]``."""
    s0, s1 = _check_interval(field, s0, s1)
    ov = _overlap(field, s0, s1)
    f0 = field(np.array([s0, s1]))
    scale = math.sqrt(np.sum(np.abs(f0[:, 0]) ** 2) * np.sum(np.abs(f0[:, 1]) ** 2))
    if scale == 0.0 or abs(ov) < _ORTHO_LIMIT * scale:
        raise OrthogonalEndpoints(f"|<phi(s0)|phi(s1)>| = {abs(ov):.3g} on [{s0}, {s1}]")

    def connection(s):
        f, df = field.evaluate(s)
        norm = np.sum(np.abs(f) ** 2, axis=0)
        if np.any(norm < _NORM_LIMIT):
            raise VanishingNorm(f"state norm below {_NORM_LIMIT} inside [{s0}, {s1}]")
        return np.sum(np.conj(f) * df, axis=0).imag / norm

    panels = int(math.ceil((s1 - s0) * field.rate / math.pi * 2.0)) + 4
    dyn = integrate(connection, s0, s1, rtol=quad_tol, atol=1e-14, panels=panels)
    return GpValue.of(math.atan2(ov.imag, ov.real) - dyn, dyn.error)


def pancharatnam_oracle(field: AmplitudeField, s0, s1, mesh=10_000) -> float:
    """Discrete Bargmann-chain estimate of :func:`open_path_gp` (raw radians).

    ``mesh`` counts the sample points including both endpoints; the error
    falls off as ``mesh**-2``.
    """
    mesh = int(mesh)
    if mesh < 2:
        raise ValueError("mesh must be >= 2")
    s0, s1 = _check_interval(field, s0, s1)
    s = np.linspace(s0, s1, mesh)
    f = field(s)
    norm = np.sum(np.abs(f) ** 2, axis=0)
    if np.any(norm < _NORM_LIMIT):
        raise VanishingNorm(f"state norm below {_NORM_LIMIT} on the oracle mesh")
    links = np.sum(np.conj(f[:, :-1]) * f[:, 1:], axis=0)
    total = complex(np.vdot(f[:, 0], f[:, -1]))
    if abs(total) < _ORTHO_LIMIT * math.sqrt(norm[0] * norm[-1]):
        raise OrthogonalEndpoints("endpoint states are orthogonal")
    return math.atan2(total.imag, total.real) - float(np.sum(np.angle(links)))


def _resonant_pair(n_plus, n_minus):
    if int(n_plus) != n_plus or int(n_minus) != n_minus:
        raise ValueError("resonance integers must be integers")
    n_plus, n_minus = int(n_plus), int(n_minus)
    if n_plus < 1 or n_minus <= n_plus:
        raise ValueError(f"need n_minus > n_plus >= 1, got ({n_plus}, {n_minus})")
    if (n_minus - n_plus) % 2:
        raise ParityMismatch(f"n_plus={n_plus} and n_minus={n_minus} differ in parity")
    return n_plus, n_minus


def resonant_gp(n_plus, n_minus, spin: SpinState, quad_tol=DEFAULT_TOL):
    """Slab geometric phase under simultaneous resonance.

    Returns ``(gp, xi, per_turn)`` where ``xi = (n_minus - n_plus) / 2`` is
    the winding number and ``per_turn = gp.raw / xi``.
    """
    n_plus, n_minus = _resonant_pair(n_plus, n_minus)
    xi = (n_minus - n_plus) // 2
    half_sum = 0.5 * (n_minus * n_minus + n_plus * n_plus)
    wp, wm = spin.weights
    ap = half_sum / (n_plus * n_plus)
    am = half_sum / (n_minus * n_minus)

    def integrand(s):
        sp, sm = np.sin(n_plus * s), np.sin(n_minus * s)
        # cos^2 + a sin^2 = 1 + (a - 1) sin^2
        return 1.0 / (wp * (1.0 + (ap - 1.0) * sp * sp) + wm * (1.0 + (am - 1.0) * sm * sm))

    # the integrand has period pi / gcd(n_plus, n_minus)
    period = math.gcd(n_plus, n_minus)
    val = integrate(integrand, 0.0, math.pi / period, rtol=quad_tol, atol=1e-15,
                    panels=4 * n_minus // period + 4)
    raw = math.pi * n_plus - math.sqrt(half_sum) * period * val
    err = math.sqrt(half_sum) * period * val.error
    gp = GpValue.of(raw, err)
    return gp, xi, raw / xi


def highspeed_gp(xi, theta) -> GpValue:
    """Precession limit ``-xi * pi * (1 - cos theta)``."""
    if int(xi) != xi or xi < 1:
        raise ValueError(f"xi must be a positive integer, got {xi!r}")
    theta = float(theta)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    return GpValue.of(-int(xi) * TWO_PI * math.sin(0.5 * theta) ** 2)


def prebarrier_gp_from_channels(r, delta, weights, quad_tol=DEFAULT_TOL, offset=0.0) -> GpValue:
    """Per-cycle phase of the standing wave in front of the slab.

    Parameters
    ----------
    r, delta : pair of float
        Reflection probability and reflection phase of the two channels.
    weights : pair of float
        ``|c_+|^2, |c_-|^2``.
    offset : float
        Start of the one-period window ``[offset, offset + pi]`` in ``s = k x``;
        the result does not depend on it.
    """
    r = np.asarray(r, dtype=float)
    delta = np.asarray(delta, dtype=float)
    w = np.asarray(weights, dtype=float)
    sq = np.sqrt(r)
    at_origin = 1.0 + r + 2.0 * sq * np.cos(delta)
    occupied = w > 0.0
    if np.any(occupied & (at_origin < 1e-14)):
        raise DegenerateNormalization("reflected wave cancels the incident one at x = 0")
    at_origin = np.where(occupied, at_origin, 1.0)
    drive = float(np.sum(np.where(occupied, (1.0 - r) / at_origin * w, 0.0)))
    if drive == 0.0:
        return GpValue.of(math.pi)

    def integrand(s):
        dens = np.zeros_like(s)
        for rl, sl, dl, ol, wl in zip(r, sq, delta, at_origin, w):
            if wl > 0.0:
                dens = dens + (1.0 + rl + 2.0 * sl * np.cos(dl - 2.0 * s)) / ol * wl
        if np.any(dens < _NORM_LIMIT):
            raise VanishingNorm("standing wave has a node common to both channels")
        return 1.0 / dens

    val = integrate(integrand, offset, offset + math.pi, rtol=quad_tol, atol=1e-15, panels=8)
    return GpValue.of(math.pi - drive * val, drive * val.error)


def prebarrier_gp(params: ScatterParams, spin: SpinState, quad_tol=DEFAULT_TOL, offset=0.0) -> GpValue:
    """Geometric phase per spatial period for ``x < 0``.

    ``zeta`` periods accumulate ``zeta`` times this value.
    """
    chans = [channel_scattering(params, ch) for ch in CHANNELS]
    return prebarrier_gp_from_channels(
        [c.r for c in chans], [c.delta for c in chans], spin.weights, quad_tol, offset
    )


def tunnel_gp(params: ScatterParams, spin: SpinState, quad_tol=DEFAULT_TOL) -> GpValue:
    """Slab geometric phase when the spin-up channel tunnels (``epsilon > 1``)."""
    if not params.epsilon > 1.0:
        raise ValueError(f"tunneling requires epsilon > 1, got {params.epsilon}")
    return open_path_gp(amplitude_field(params, spin, "ii"), 0.0, math.pi, quad_tol)
