"""Channel budget, detector figures of merit and the repeaterless key-capacity bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ChannelParams",
    "DetectorParams",
    "MisalignmentParams",
    "LinkBudget",
    "SNSPD",
    "SPAD",
    "balanced_link",
    "link_from_attenuation",
    "effective_transmittance",
    "arm_transmittance",
    "plob_bound",
]


@dataclass(frozen=True)
class ChannelParams:
    """Fiber channel: attenuation coefficient alpha (dB/km), instrumentation
    loss a_plus (dB) charged to the longer arm, and arm lengths in km."""

    alpha: float = 0.2
    a_plus: float = 0.0
    l_a: float = 114.0
    l_b: float = 114.0

    def __post_init__(self):
        if self.alpha < 0 or self.a_plus < 0:
            raise DomainError("attenuation terms must be >= 0")
        if not (self.l_a >= self.l_b >= 0):
            raise DomainError("arm lengths must satisfy l_a >= l_b >= 0")


@dataclass(frozen=True)
class DetectorParams:
    """Single-photon detector: efficiency, dark rate (Hz) and source clock (Hz)."""

    eta_d: float
    dark_rate: float
    clock_rate: float = 1e9

    def __post_init__(self):
        if not 0.0 < self.eta_d <= 1.0:
            raise DomainError("detector efficiency must lie in (0, 1]")
        if self.dark_rate < 0 or self.clock_rate <= 0:
            raise DomainError("dark rate must be >= 0 and clock rate > 0")
        if not 0.0 <= self.p_dc < 1.0:
            raise DomainError("dark counts per signal must lie in [0, 1)")

    @property
    def p_dc(self) -> float:
        """Dark counts per transmitted signal."""
        return self.dark_rate / self.clock_rate


SNSPD = DetectorParams(eta_d=0.9, dark_rate=10.0, clock_rate=1e9)
SPAD = DetectorParams(eta_d=0.25, dark_rate=50.0, clock_rate=1e9)


@dataclass(frozen=True)
class MisalignmentParams:
    """Polarization misalignment expressed as the error it induces."""

    e_theta: float = 0.02

    def __post_init__(self):
        if not 0.0 <= self.e_theta <= 0.5:
            raise DomainError("misalignment error must lie in [0, 0.5]")

    @property
    def theta(self) -> float:
        """Misalignment angle in rad, from e = sin(theta/2)^2."""
        return 2.0 * np.arcsin(np.sqrt(self.e_theta))


@dataclass(frozen=True)
class LinkBudget:
    """Balanced-link transmittances: total eta, per-arm eta_arm, effective length."""

    eta: float
    eta_arm: float
    l_eff_km: float


def balanced_link(ch: ChannelParams) -> LinkBudget:
    """Transmittance budget after balancing the arms at the middle node.

    The lossier arm (length l_a plus instrumentation loss) sets the pace;
    the other arm is padded to match, so eta = eta_arm^2 and the effective
    length is 2 l_a.
    """
    att_db = ch.alpha * ch.l_a + ch.a_plus
    eta_arm = 10.0 ** (-att_db / 10.0)
    return LinkBudget(eta=eta_arm**2, eta_arm=eta_arm, l_eff_km=2.0 * ch.l_a)


def link_from_attenuation(total_db: float) -> LinkBudget:
    """Budget for a given total (end-to-end) attenuation in dB, arms balanced."""
    if total_db < 0:
        raise DomainError("attenuation must be >= 0 dB")
    eta = 10.0 ** (-total_db / 10.0)
    return LinkBudget(eta=eta, eta_arm=float(np.sqrt(eta)), l_eff_km=float("nan"))


def effective_transmittance(eta: float, det: DetectorParams) -> float:
    """Total transmittance including detector efficiency."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError("transmittance must lie in [0, 1]")
    return eta * det.eta_d


def arm_transmittance(eta: float, det: DetectorParams,
                      split_detector: bool = True) -> float:
    """Per-arm effective transmittance used by the twin-field protocols.

    With split_detector the detector efficiency is shared evenly between
    the arms, t = sqrt(eta * eta_d), so the product of the two arms equals
    the full effective transmittance; otherwise the efficiency multiplies
    a single arm.
    """
    eta_hat = effective_transmittance(eta, det)
    if split_detector:
        return float(np.sqrt(eta_hat))
    return float(np.sqrt(eta)) * det.eta_d


def plob_bound(eta: float) -> float:
    """Repeaterless secret-key capacity -log2(1 - eta) in bits per signal."""
    if not 0.0 <= eta < 1.0:
        raise DomainError("plob_bound requires eta in [0, 1)")
    return float(-np.log2(1.0 - eta))
