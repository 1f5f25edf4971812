"""Sending-or-not-sending twin-field protocol with odd-parity pairing.

Signal windows carry a phase-randomized pulse of intensity mu_z with
probability epsilon (bit 1 for the first party, bit 0 for the second) or
a near-vacuum mu_0 otherwise.  The middle node announces windows with
exactly one click; single-photon statistics are bounded with the
three-intensity decoy machinery on the per-arm channel, and actively
pairing the sifted bits in odd-parity pairs rejects most bit flips at the
cost of halving the string.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decoy import ChannelErrorModel, DecoySet, binary_entropy, decoy_bounds
from .errors import DomainError
from .link import DetectorParams

__all__ = [
    "SnsParams",
    "SnsWindowStats",
    "AoppStats",
    "effective_click_probability",
    "sns_window_stats",
    "aopp_transform",
    "sns_rate",
    "sns_aopp_rate",
]

PHASE_QUADRATURE_POINTS = 256


@dataclass(frozen=True)
class SnsParams:
    """Protocol knobs: window probabilities, intensities, decoys, EC inefficiency.

    Asymptotically the signal-window probability p_z is 1.  The sending
    intensity defaults to half the first decoy intensity and the
    not-sending intensity to half the weakest one.
    """

    p_z: float = 1.0
    epsilon: float = 0.25
    mu_z: float = 0.2
    mu_0: float = 5e-6
    decoys: DecoySet = field(default_factory=DecoySet)
    f_ec: float = 1.15

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError("sending probability must lie in (0, 1)")
        if not self.mu_z > self.mu_0 >= 0.0:
            raise DomainError("intensities must satisfy mu_z > mu_0 >= 0")
        if not 0.0 < self.p_z <= 1.0:
            raise DomainError("signal-window probability must lie in (0, 1]")
        if self.f_ec < 1.0:
            raise DomainError("error-correction inefficiency must be >= 1")


@dataclass(frozen=True)
class SnsWindowStats:
    """Per-signal effective rates of the four signal-window send patterns.

    n_t = n_ss + n_sn + n_ns + n_nn; e_z = (n_nn + n_ss) / n_t is the
    bit-flip error (both-send and both-not-send patterns give opposite
    bits).  n1_low and e1ph_up are the decoy bounds on the untagged
    single-photon rate and its phase error.
    """

    n_t: float
    n_ss: float
    n_sn: float
    n_ns: float
    n_nn: float
    e_z: float
    n1_low: float
    e1ph_up: float
    decoy_ok: bool


@dataclass(frozen=True)
class AoppStats:
    """Post-pairing quantities: survivors, untagged bound, error rates."""

    n_t_prime: float
    n1_prime: float
    e_z_prime: float
    e1ph_prime: float
    pair_rate: float


def effective_click_probability(mu_a: float, mu_b: float, arm_t: float,
                                p_dc: float,
                                n_phase: int = PHASE_QUADRATURE_POINTS) -> float:
    """Probability that exactly one threshold detector clicks.

    Phase-randomized inputs of intensities mu_a, mu_b reach the balanced
    beamsplitter through per-arm transmittance arm_t; detector intensities
    are t (mu_a + mu_b +/- 2 sqrt(mu_a mu_b) cos delta) / 2 and the
    relative phase delta is averaged with a midpoint rule (periodic
    integrand, so the rule converges spectrally).
    """
    if mu_a < 0 or mu_b < 0:
        raise DomainError("intensities must be >= 0")
    if not 0.0 <= arm_t <= 1.0 or not 0.0 <= p_dc < 1.0:
        raise DomainError("transmittance in [0,1] and p_dc in [0,1) required")
    delta = 2.0 * np.pi * (np.arange(n_phase) + 0.5) / n_phase
    cross = 2.0 * np.sqrt(mu_a * mu_b) * np.cos(delta)
    i_c = arm_t * (mu_a + mu_b + cross) / 2.0
    i_d = arm_t * (mu_a + mu_b - cross) / 2.0
    p_c = 1.0 - (1.0 - p_dc) * np.exp(-i_c)
    p_d = 1.0 - (1.0 - p_dc) * np.exp(-i_d)
    return float(np.mean(p_c * (1.0 - p_d) + p_d * (1.0 - p_c)))


def sns_window_stats(p: SnsParams, arm_t: float, det: DetectorParams,
                     e_phi: float, e_theta: float = 0.02,
                     n_phase: int = PHASE_QUADRATURE_POINTS) -> SnsWindowStats:
    """Effective-window rates and decoy bounds for the signal basis.

    The four send patterns weight the click model by the sending choices;
    the single-photon bounds reuse the decoy formulas on the per-arm
    channel (each party sends half of each decoy intensity), and only the
    phase-error side sees the interferometric errors e_theta + e_phi.
    The bit-flip error e_z involves no interference and is therefore
    independent of e_phi by construction.
    """
    if not 0.0 < arm_t <= 1.0:
        raise DomainError("arm transmittance must lie in (0, 1]")
    p_dc = det.p_dc
    eps = p.epsilon
    n_ss = eps**2 * effective_click_probability(p.mu_z, p.mu_z, arm_t, p_dc, n_phase)
    n_sn = eps * (1 - eps) * effective_click_probability(p.mu_z, p.mu_0, arm_t, p_dc, n_phase)
    n_ns = (1 - eps) * eps * effective_click_probability(p.mu_0, p.mu_z, arm_t, p_dc, n_phase)
    n_nn = (1 - eps) ** 2 * effective_click_probability(p.mu_0, p.mu_0, arm_t, p_dc, n_phase)
    n_t = n_ss + n_sn + n_ns + n_nn
    e_z = (n_nn + n_ss) / n_t if n_t > 0 else 0.0

    m = ChannelErrorModel(eta_hat=arm_t, p_dc=p_dc, e_theta=e_theta, e_phi=e_phi)
    b = decoy_bounds(p.decoys, m)
    n1 = 2.0 * eps * (1 - eps) * p.mu_z * np.exp(-p.mu_z) * b.y1_low
    return SnsWindowStats(
        n_t=n_t, n_ss=n_ss, n_sn=n_sn, n_ns=n_ns, n_nn=n_nn, e_z=e_z,
        n1_low=float(n1), e1ph_up=b.e1ph_up, decoy_ok=b.ok)


def aopp_transform(s: SnsWindowStats, p: SnsParams) -> AoppStats:
    """Actively-odd-parity-paired statistics.

    The second party holds N0 = n_ss + n_ns zero bits and N1 = n_sn + n_nn
    one bits and forms min(N0, N1) odd-parity pairs; a pair survives when
    the first party's parity is odd as well, which happens when both bits
    are correct or both are flipped.  The kept (first) bit is then wrong
    only in the both-flipped case.  Untagged single photons scale with the
    surviving fraction; the phase error is untouched by pairing.
    """
    n0 = s.n_ss + s.n_ns
    n1_bits = s.n_sn + s.n_nn
    if n0 <= 0.0 or n1_bits <= 0.0:
        return AoppStats(0.0, 0.0, 0.0, s.e1ph_up, 0.0)
    e0 = s.n_ss / n0  # error rate among the second party's zeros
    e1 = s.n_nn / n1_bits  # and among the ones
    keep = (1.0 - e0) * (1.0 - e1) + e0 * e1
    pairs = min(n0, n1_bits)
    n_t_prime = pairs * keep
    e_z_prime = e0 * e1 / keep if keep > 0 else 0.0
    scale = n_t_prime / s.n_t if s.n_t > 0 else 0.0
    return AoppStats(
        n_t_prime=n_t_prime, n1_prime=s.n1_low * scale, e_z_prime=e_z_prime,
        e1ph_prime=s.e1ph_up, pair_rate=pairs)


def _rate(n1: float, e1ph: float, n_t: float, e_z: float, p: SnsParams) -> float:
    if n1 <= 0.0:
        return 0.0
    privacy = 1.0 - binary_entropy(min(e1ph, 0.5))
    ec = p.f_ec * n_t * binary_entropy(float(np.clip(e_z, 0.0, 1.0)))
    return max(0.0, p.p_z**2 * (n1 * privacy - ec))


def sns_rate(s: SnsWindowStats, p: SnsParams) -> float:
    """Plain protocol secret key per transmitted signal, floored at 0."""
    if not s.decoy_ok:
        return 0.0
    return _rate(s.n1_low, s.e1ph_up, s.n_t, s.e_z, p)


def sns_aopp_rate(a: AoppStats, p: SnsParams) -> float:
    """Secret key per transmitted signal after odd-parity pairing."""
    return _rate(a.n1_prime, a.e1ph_prime, a.n_t_prime, a.e_z_prime, p)
