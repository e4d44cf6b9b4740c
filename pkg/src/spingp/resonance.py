"""
Simultaneous resonances of both spin channels.

Both channels pass the slab without reflection when ``kappa_l L = n_l pi``.
With ``n_+`` and ``n_-`` of equal parity the spin returns to its initial
ray, and

    epsilon = (n_-^2 - n_+^2) / (n_-^2 + n_+^2),
    k L     = pi sqrt((n_-^2 + n_+^2) / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import NEUTRON, UnitsBridge, field_for_speed, make_params
from .geophase import ParityMismatch

__all__ = [
    "LATTICE_TOL",
    "RATIO_TOL",
    "ResonanceSpec",
    "spec_from_pair",
    "resonances_for_kl",
    "resonances_in_range",
    "pair_for_ratio",
    "physical_point",
]

LATTICE_TOL = 1e-9
RATIO_TOL = 1e-6


@dataclass(frozen=True)
class ResonanceSpec:
    n_plus: int
    n_minus: int

    @property
    def xi(self) -> int:
        return (self.n_minus - self.n_plus) // 2

    @property
    def q(self) -> float:
        return self.n_minus / self.n_plus

    @property
    def epsilon_exact(self) -> Fraction:
        a, b = self.n_plus ** 2, self.n_minus ** 2
        return Fraction(b - a, b + a)

    @property
    def epsilon(self) -> float:
        return float(self.epsilon_exact)

    @property
    def kl(self) -> float:
        return math.pi * math.sqrt(0.5 * (self.n_minus ** 2 + self.n_plus ** 2))

    @property
    def kappa0_l(self) -> float:
        return math.pi * math.sqrt(0.5 * (self.n_minus ** 2 - self.n_plus ** 2))

    @property
    def trivial(self) -> bool:
        return self.n_plus == self.n_minus

    def params(self):
        return make_params(self.epsilon, self.kl)


def spec_from_pair(n_plus, n_minus) -> ResonanceSpec:
    """Validated resonance for the integer pair; raises :class:`ParityMismatch`."""
    if int(n_plus) != n_plus or int(n_minus) != n_minus:
        raise ValueError("resonance integers must be integers")
    n_plus, n_minus = int(n_plus), int(n_minus)
    if n_plus < 1 or n_minus <= n_plus:
        raise ValueError(f"need n_minus > n_plus >= 1, got ({n_plus}, {n_minus})")
    if (n_minus - n_plus) % 2:
        raise ParityMismatch(
            f"({n_plus}, {n_minus}) have opposite parity; the spin path would not close"
        )
    return ResonanceSpec(n_plus, n_minus)


def _lattice_pairs(m):
    """Same-parity pairs ``n_+ <= n_-`` with ``n_+^2 + n_-^2 = m``."""
    out = []
    a = 1
    while 2 * a * a <= m:
        b = math.isqrt(m - a * a)
        if b * b == m - a * a and (b - a) % 2 == 0:
            out.append((a, b))
        a += 1
    return out


def resonances_for_kl(kl, include_trivial=False):
    """All simultaneous resonances available at a given ``kl``, by ``n_plus``."""
    kl = float(kl)
    if not (math.isfinite(kl) and kl > 0.0):
        raise ValueError(f"kl must be positive and finite, got {kl}")
    target = 2.0 * (kl / math.pi) ** 2
    m = round(target)
    if m < 2 or abs(target - m) > LATTICE_TOL * max(1.0, target):
        return []
    return [
        ResonanceSpec(a, b)
        for a, b in _lattice_pairs(m)
        if include_trivial or a != b
    ]


def resonances_in_range(kl_lo, kl_hi, include_trivial=False):
    """Every resonance with ``kl`` in ``[kl_lo, kl_hi]``, ordered by ``kl`` then ``n_plus``."""
    if not 0.0 < kl_lo <= kl_hi:
        raise ValueError("need 0 < kl_lo <= kl_hi")
    m_lo = math.ceil(2.0 * (kl_lo / math.pi) ** 2 * (1.0 - LATTICE_TOL))
    m_hi = math.floor(2.0 * (kl_hi / math.pi) ** 2 * (1.0 + LATTICE_TOL))
    out = []
    for m in range(max(m_lo, 2), m_hi + 1):
        out.extend(
            ResonanceSpec(a, b) for a, b in _lattice_pairs(m) if include_trivial or a != b
        )
    return out


def _same_parity(n_plus, n_minus):
    if (n_minus - n_plus) % 2:
        return 2 * n_plus, 2 * n_minus
    return n_plus, n_minus


def pair_for_ratio(q, cap=10_000, tol=RATIO_TOL):
    """Smallest same-parity pair with ``n_minus / n_plus`` equal (or close) to ``q``.

    A rational ``q = a / b`` in lowest terms (int, Fraction or a decimal
    string) gives ``(b, a)`` when ``a`` and ``b`` share parity and
    ``(2b, 2a)`` otherwise.  A float is matched by the same-parity pair
    with the smallest ``n_plus`` whose ratio lies within ``tol`` of ``q``,
    searching ``n_plus <= 2 * cap``; failing that, the closest pair seen
    is returned.

    Returns
    -------
    (ResonanceSpec, exact) : tuple
        ``exact`` is False when the ratio had to be approximated.
    """
    if isinstance(q, str):
        q = Fraction(q.strip())
    if isinstance(q, (int, Fraction)) and Fraction(q).denominator <= cap:
        frac = Fraction(q)
        if frac <= 1:
            raise ValueError(f"q must exceed 1, got {q}")
        b, a = _same_parity(frac.denominator, frac.numerator)
        return ResonanceSpec(b, a), True
    qf = float(q)
    if not (math.isfinite(qf) and qf > 1.0):
        raise ValueError(f"q must exceed 1, got {q}")
    best = closest = None
    for den in range(1, cap + 1):
        if best is not None and den >= best[0]:
            break
        num = max(round(qf * den), den + 1)
        err = abs(num / den - qf)
        pair = _same_parity(den, num)
        if err < tol and (best is None or pair[0] < best[0]):
            best = pair
        if closest is None or err < closest[0]:
            closest = (err, pair)
    if best is None:
        return ResonanceSpec(*closest[1]), False
    return ResonanceSpec(*best), abs(best[1] / best[0] - qf) <= 1e-12 * qf


def physical_point(spec: ResonanceSpec, length, units: UnitsBridge = NEUTRON):
    """Speed (m/s) and field (T) realizing ``spec`` over a slab of ``length`` m."""
    length = float(length)
    if not length > 0.0:
        raise ValueError("slab length must be positive")
    v = units.speed_for_kl(spec.kl, length)
    b0 = field_for_speed(spec.q, v, units)
    # Zeeman split 2 V0 = mu b0 with V0 = epsilon * m v^2 / 2
    check = spec.epsilon * units.mass * v * v / units.moment
    if not math.isclose(b0, check, rel_tol=1e-9):
        raise ArithmeticError(f"inconsistent field: {b0} vs {check}")
    return v, b0
