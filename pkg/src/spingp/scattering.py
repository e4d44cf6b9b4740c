"""
Per-channel scattering off the slab and the spatial spin amplitudes.

Inside the slab each channel is written in the basis

    C(u) = cos(kappa u),    S(u) = sin(kappa u) / kappa,

which are entire functions of ``kappa^2``.  For ``kappa^2 < 0`` they become
``cosh`` and ``sinh / |kappa|`` and at ``kappa^2 = 0`` they reduce to
``(1, u)``, so barrier, threshold and tunneling channels share one code
path.  Lengths are measured in units of the slab width ``L`` throughout.

With unit incident amplitude the channel wave function is

    x <= 0:      e^{ikx} + rho e^{-ikx}
    0 <= x <= L: t [C(x - L) + i k S(x - L)]
    x >= L:      t e^{ik(x - L)}

with ``t = 2k / (2k C(L) - i (k^2 + kappa^2) S(L))`` and
``rho = (k^2 - kappa^2) S(L) / ((k^2 + kappa^2) S(L) + 2ik C(L))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ScatterParams, SpinState

__all__ = [
    "CHANNELS",
    "REGIONS",
    "DegenerateNormalization",
    "ChannelScattering",
    "AmplitudeField",
    "BlochSample",
    "slab_kernels",
    "channel_scattering",
    "amplitude_field",
    "incident_field",
    "continuity_check",
    "bloch_vectors",
    "bloch_trajectory",
]

CHANNELS = (+1, -1)
REGIONS = ("i", "ii", "iii")


class DegenerateNormalization(ValueError):
    """The pre-slab amplitude vanishes at x = 0 for an occupied channel."""


def slab_kernels(kappa_sq_l2, t):
    """Evaluate ``(cos(kappa x), sin(kappa x) / kappa)`` at ``x = t L``.

    Parameters
    ----------
    kappa_sq_l2 : float
        Signed ``(kappa L)^2``.
    t : float or ndarray
        Position in units of ``L``.

    Returns
    -------
    C, S : ndarray
        ``S`` is in units of ``L``.  Derivatives follow from
        ``dC/dt = -kappa^2 S`` and ``dS/dt = C``.
    """
    t = np.asarray(t, dtype=float)
    k2 = float(kappa_sq_l2)
    if k2 > 0.0:
        kap = math.sqrt(k2)
        return np.cos(kap * t), t * np.sinc(kap * t / math.pi)
    if k2 < 0.0:
        kap = math.sqrt(-k2)
        arg = kap * t
        # sinh(z)/z without cancellation for small z
        small = np.abs(arg) < 1e-8
        safe = np.where(small, 1.0, arg)
        shc = np.where(small, 1.0 + arg * arg / 6.0, np.sinh(safe) / safe)
        return np.cosh(arg), t * shc
    return np.ones_like(t), t.copy()


@dataclass(frozen=True)
class ChannelScattering:
    """Scattering data of one spin channel for unit incident amplitude.

    ``t_amp`` is the transmitted amplitude, so ``r + |t_amp|^2 = 1``.
    ``passage`` is the factor multiplying the slab-entrance amplitude on the
    way to the exit, ``f(L) / f(0) = 1 / (C(L) - i k S(L))``; it equals
    ``t_amp`` only when ``r = 0``.  ``a_coef`` and ``b_coef`` are the
    coefficients of ``exp(+-i kappa x)`` inside the slab and are ``None`` at
    ``kappa = 0`` where that basis degenerates.
    """

    channel: int
    kappa_sq_l2: float
    kl: float
    rho: complex
    r: float
    delta: float
    t_amp: complex
    passage: complex
    a_coef: Optional[complex]
    b_coef: Optional[complex]

    @property
    def transmission(self) -> float:
        return abs(self.t_amp) ** 2

    @property
    def b_over_a(self) -> Optional[complex]:
        if self.a_coef is None or self.a_coef == 0:
            return None
        return self.b_coef / self.a_coef


def channel_scattering(params: ScatterParams, channel: int) -> ChannelScattering:
    k2 = params.kappa_sq_l2(channel)
    k = params.kl
    c, s = (float(v) for v in slab_kernels(k2, 1.0))
    denom = complex((k * k + k2) * s, 2.0 * k * c)
    rho = (k * k - k2) * s / denom
    # t = 2k / (2k c - i (k^2 + kappa^2) s) = 2ik / denom
    t_amp = 2j * k / denom
    # |denom|^2 = |num|^2 + 4k^2 since C^2 + kappa^2 S^2 = 1, which keeps r <= 1
    num_sq = ((k * k - k2) * s) ** 2
    r = num_sq / (num_sq + 4.0 * k * k)
    delta = 0.0 if rho == 0 else cmath.phase(rho)
    passage = 1.0 / complex(c, -k * s)
    if k2 == 0.0:
        a_coef = b_coef = None
    else:
        kap = cmath.sqrt(k2)
        a_coef = 0.5 * t_amp * (1.0 + k / kap) * cmath.exp(-1j * kap)
        b_coef = 0.5 * t_amp * (1.0 - k / kap) * cmath.exp(1j * kap)
    return ChannelScattering(
        channel=channel,
        kappa_sq_l2=k2,
        kl=k,
        rho=rho,
        r=r,
        delta=delta,
        t_amp=t_amp,
        passage=passage,
        a_coef=a_coef,
        b_coef=b_coef,
    )


Evaluator = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


@dataclass(frozen=True)
class AmplitudeField:
    """The two spin amplitudes of one region as functions of position.

    ``evaluate(s)`` returns ``(f, df)``, each of shape ``(2, len(s))``, with
    row 0 the ``|+z>`` amplitude and ``df`` the exact derivative in ``s``.

    The dimensionless coordinate is ``s = k x`` in region i,
    ``s = pi x / L`` in region ii and ``s = k (x - L)`` in region iii.
    ``rate`` bounds the angular frequency of the amplitudes in ``s`` and is
    used to seed quadrature panels.
    """

    region: str
    evaluate: Evaluator
    domain: tuple
    rate: float = 1.0

    def __call__(self, s):
        return self.evaluate(np.atleast_1d(np.asarray(s, dtype=float)))[0]

    def values(self, s):
        return self(s)

    def twisted(self, alpha, dalpha) -> "AmplitudeField":
        """Same field multiplied by the common phase ``exp(i alpha(s))``."""
        inner = self.evaluate

        def evaluate(s):
            f, df = inner(s)
            ph = np.exp(1j * alpha(s))
            return f * ph, (df + 1j * dalpha(s) * f) * ph

        return AmplitudeField(self.region, evaluate, self.domain, self.rate)


def _check_region(region):
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")


def amplitude_field(params: ScatterParams, spin: SpinState, region: str) -> AmplitudeField:
    """Spin amplitudes normalized so that both channels equal ``spin`` at x = 0."""
    _check_region(region)
    chans = [channel_scattering(params, ch) for ch in CHANNELS]
    c = spin.amplitudes
    k = params.kl

    if region == "i":
        rho = np.array([ch.rho for ch in chans])
        norm = 1.0 + rho
        for ch, n, cl in zip(chans, norm, c):
            if cl != 0 and abs(n) < 1e-14:
                raise DegenerateNormalization(
                    f"channel {ch.channel:+d}: 1 + sqrt(r) e^(i delta) vanishes"
                )
        coef = np.where(c == 0, 0.0, c / np.where(norm == 0, 1.0, norm))[:, None]
        rho = rho[:, None]

        def evaluate(s):
            ep = np.exp(1j * s)[None, :]
            em = np.conj(ep)
            return coef * (ep + rho * em), 1j * coef * (ep - rho * em)

        return AmplitudeField("i", evaluate, (-math.inf, 0.0), 2.0)

    if region == "ii":
        k2 = [ch.kappa_sq_l2 for ch in chans]
        coef = np.array([ch.passage for ch in chans]) * c

        def evaluate(s):
            u = s / math.pi - 1.0
            f = np.empty((2, s.size), dtype=complex)
            df = np.empty_like(f)
            for row, (kk, cl) in enumerate(zip(k2, coef)):
                cc, ss = slab_kernels(kk, u)
                f[row] = cl * (cc + 1j * k * ss)
                df[row] = cl * (-kk * ss + 1j * k * cc) / math.pi
            return f, df

        rate = max(k, math.sqrt(abs(k2[0])), math.sqrt(abs(k2[1]))) / math.pi
        return AmplitudeField("ii", evaluate, (0.0, math.pi), max(rate, 1.0))

    coef = (np.array([ch.passage for ch in chans]) * c)[:, None]

    def evaluate(s):
        f = coef * np.exp(1j * s)[None, :]
        return f, 1j * f

    return AmplitudeField("iii", evaluate, (0.0, math.inf), 1.0)


def incident_field(params: ScatterParams, channel: int):
    """Unit-incident wave function of one channel in physical units of ``L``.

    Returns a callable ``psi(x) -> (value, d/dx value)`` valid on the whole
    line, where ``x`` is measured in units of ``L``.
    """
    ch = channel_scattering(params, channel)
    k = params.kl

    def psi(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        val = np.empty(x.shape, dtype=complex)
        der = np.empty_like(val)
        left, right = x <= 0.0, x >= 1.0
        mid = ~(left | right)
        xl = x[left]
        val[left] = np.exp(1j * k * xl) + ch.rho * np.exp(-1j * k * xl)
        der[left] = 1j * k * (np.exp(1j * k * xl) - ch.rho * np.exp(-1j * k * xl))
        cc, ss = slab_kernels(ch.kappa_sq_l2, x[mid] - 1.0)
        val[mid] = ch.t_amp * (cc + 1j * k * ss)
        der[mid] = ch.t_amp * (-ch.kappa_sq_l2 * ss + 1j * k * cc)
        xr = x[right]
        val[right] = ch.t_amp * np.exp(1j * k * (xr - 1.0))
        der[right] = 1j * k * val[right]
        return val, der

    return psi


def continuity_check(params: ScatterParams, spin: Optional[SpinState] = None) -> float:
    """Largest value-plus-derivative jump across the slab faces.

    Each regional form is evaluated independently at the junction (the
    slab form through the kernels, the outer forms through plane waves),
    for both channels with unit incident amplitude.  ``spin`` selects which
    channels count; unoccupied channels are skipped.
    """
    k = params.kl
    worst = 0.0
    for idx, channel in enumerate(CHANNELS):
        if spin is not None and spin.amplitudes[idx] == 0:
            continue
        ch = channel_scattering(params, channel)
        k2 = ch.kappa_sq_l2
        # slab form at x = 0 (u = -1) and x = L (u = 0)
        cc, ss = slab_kernels(k2, np.array([-1.0, 0.0]))
        inside = ch.t_amp * (cc + 1j * k * ss)
        inside_d = ch.t_amp * (-k2 * ss + 1j * k * cc)
        left = 1.0 + ch.rho
        left_d = 1j * k * (1.0 - ch.rho)
        right = ch.t_amp
        right_d = 1j * k * ch.t_amp
        jumps = (
            abs(inside[0] - left) + abs(inside_d[0] - left_d) / k,
            abs(inside[1] - right) + abs(inside_d[1] - right_d) / k,
        )
        worst = max(worst, *jumps)
    return float(worst)


@dataclass(frozen=True)
class BlochSample:
    s: float
    n: tuple
    norm: float
    degenerate: bool = False


def bloch_vectors(f):
    """Normalized Pauli expectations of a ``(2, N)`` amplitude array.

    Returns ``(n, norm)`` with ``n`` of shape ``(N, 3)``; columns where the
    norm vanishes are NaN.
    """
    fp, fm = f[0], f[1]
    norm = np.abs(fp) ** 2 + np.abs(fm) ** 2
    cross = np.conj(fp) * fm
    with np.errstate(invalid="ignore", divide="ignore"):
        n = np.stack([2.0 * cross.real, 2.0 * cross.imag, np.abs(fp) ** 2 - np.abs(fm) ** 2], axis=1)
        n = n / norm[:, None]
    n[norm <= 0.0] = np.nan
    return n, norm


def bloch_trajectory(params: ScatterParams, spin: SpinState, region: str = "ii", samples: int = 201):
    """Spin direction sampled uniformly over one region.

    Region ii covers the slab, ``s`` in ``[0, pi]``; region i covers the
    last spatial period before the slab, ``s`` in ``[-pi, 0]``.
    """
    if region not in ("i", "ii"):
        raise ValueError("trajectories are defined for regions 'i' and 'ii'")
    samples = int(samples)
    if samples < 2:
        raise ValueError("need at least two samples")
    field = amplitude_field(params, spin, region)
    s = np.linspace(0.0, math.pi, samples) if region == "ii" else np.linspace(-math.pi, 0.0, samples)
    n, norm = bloch_vectors(field(s))
    out = []
    for si, ni, wi in zip(s, n, norm):
        bad = not wi > 1e-300
        out.append(BlochSample(float(si), tuple(float(v) for v in ni), float(wi), bad))
    return out
