"""Three-intensity decoy-state bounds and the phase-encoded BB84 key rate.

The closed-form lower bounds on the vacuum and single-photon yields and
the upper bound on the single-photon phase error assume three intensities
u > v > w with u matched to the signal.  The same machinery backs the
single-photon estimation of the sending-or-not-sending protocol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "DecoySet",
    "ChannelErrorModel",
    "DecoyBounds",
    "binary_entropy",
    "gain",
    "error_gain",
    "qber",
    "decoy_bounds",
    "bb84_rate",
]


def binary_entropy(p: float) -> float:
    """H2(p) with H2(0) = H2(1) = 0; symmetric about 1/2."""
    if not 0.0 <= p <= 1.0:
        raise DomainError("binary entropy argument must lie in [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


@dataclass(frozen=True)
class DecoySet:
    """Decoy intensities u > v > w >= 0, u matched to the signal intensity."""

    u: float = 0.4
    v: float = 0.16
    w: float = 1e-5

    def __post_init__(self):
        if not self.u > self.v > self.w >= 0.0:
            raise DomainError("decoy intensities must satisfy u > v > w >= 0")
        if self.u - self.v - self.w <= 0.0:
            raise DomainError("single-photon bound requires u > v + w")


@dataclass(frozen=True)
class ChannelErrorModel:
    """Effective transmittance, dark counts per signal and the two error terms."""

    eta_hat: float
    p_dc: float
    e_theta: float = 0.02
    e_phi: float = 0.0

    def __post_init__(self):
        for name in ("eta_hat", "p_dc", "e_theta", "e_phi"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1]")

    @property
    def e_total(self) -> float:
        return self.e_theta + self.e_phi


def gain(mu: float, m: ChannelErrorModel) -> float:
    """Click probability for intensity mu: 1 - (1 - p_dc) exp(-mu eta_hat)."""
    if mu < 0:
        raise DomainError("intensity must be >= 0")
    return float(1.0 - (1.0 - m.p_dc) * np.exp(-mu * m.eta_hat))


def error_gain(mu: float, m: ChannelErrorModel) -> float:
    """Joint probability of a click that is also an error, E_mu * Q_mu.

    Dark counts err half the time; misalignment and phase noise err on the
    detected-signal fraction: p_dc/2 + (e_theta + e_phi - p_dc/2)(1 - exp(-mu eta_hat)).
    """
    if mu < 0:
        raise DomainError("intensity must be >= 0")
    signal = -np.expm1(-mu * m.eta_hat)
    return float(m.p_dc / 2.0 + (m.e_total - m.p_dc / 2.0) * signal)


def qber(mu: float, m: ChannelErrorModel) -> float:
    """Total QBER E_mu = error_gain / gain, clamped to [0, 1]."""
    q = gain(mu, m)
    if q <= 0.0:
        raise DomainError("QBER undefined at zero gain")
    return float(np.clip(error_gain(mu, m) / q, 0.0, 1.0))


@dataclass(frozen=True)
class DecoyBounds:
    """Decoy estimates: yield lower bounds, single-photon gain, phase-error
    upper bound.  ok is False when the single-photon estimation failed
    (Y1 bound non-positive), in which case the protocol yields no key."""

    y0_low: float
    y1_low: float
    q1_low: float
    e1ph_up: float
    ok: bool


def decoy_bounds(s: DecoySet, m: ChannelErrorModel) -> DecoyBounds:
    """Closed-form three-intensity bounds, all clamped to [0, 1]."""
    u, v, w = s.u, s.v, s.w
    q_u, q_v, q_w = gain(u, m), gain(v, m), gain(w, m)
    eq_v, eq_w = error_gain(v, m), error_gain(w, m)
    e_u, e_v, e_w = np.exp(u), np.exp(v), np.exp(w)

    y0 = (v * q_w * e_w - w * q_v * e_v) / (v - w)
    y0 = float(np.clip(y0, 0.0, 1.0))
    y1 = (u**2 * (q_v * e_v - q_w * e_w) - (v**2 - w**2) * (q_u * e_u - y0)) \
        / (u * (u - v - w) * (v - w))
    if y1 <= 0.0:
        return DecoyBounds(y0_low=y0, y1_low=0.0, q1_low=0.0, e1ph_up=1.0, ok=False)
    y1 = float(min(y1, 1.0))
    q1 = float(np.clip(y1 * u * np.exp(-u), 0.0, 1.0))
    e1 = (eq_v * e_v - eq_w * e_w) / ((v - w) * y1)
    e1 = float(np.clip(e1, 0.0, 1.0))
    return DecoyBounds(y0_low=y0, y1_low=y1, q1_low=q1, e1ph_up=e1, ok=True)


def bb84_rate(s: DecoySet, m: ChannelErrorModel, f_ec: float = 1.15,
              duty: float = 1.0) -> float:
    """Asymptotic decoy BB84 secret key per transmitted signal, floored at 0.

    R = duty * [Q1 (1 - H2(e1ph)) - f_ec * Q_u * H2(E_u)]; the duty cycle
    is asymptotically 1 for a self-referenced setup and can be overridden.
    """
    if f_ec < 1.0:
        raise DomainError("error-correction inefficiency must be >= 1")
    if not 0.0 <= duty <= 1.0:
        raise DomainError("duty cycle must lie in [0, 1]")
    b = decoy_bounds(s, m)
    if not b.ok:
        return 0.0
    q_u = gain(s.u, m)
    e_u = qber(s.u, m)
    privacy = 1.0 - binary_entropy(min(b.e1ph_up, 0.5))
    rate = b.q1_low * privacy - f_ec * q_u * binary_entropy(e_u)
    return max(0.0, duty * rate)
