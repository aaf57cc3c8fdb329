"""Instantaneous SINRs and per-trial rates.

Combines a geometry draw, a channel realization, and a beamformer pair
into the two link SINRs. The DL user sees internode interference from the
UL transmitter at distance exactly d (a drop invariant); the AP sees
residual loopback leakage through the effective channel w_r H_aa w_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .geometry import Drop, NetworkConfig, ul_pathloss_polar


@dataclass
class TrialOutcome:
    """SINRs and spectral efficiencies of one trial."""

    sinr_ul: float
    sinr_dl: float
    rate_ul: float
    rate_dl: float

    @property
    def rate_sum(self) -> float:
        return self.rate_ul + self.rate_dl


def sinr_dl(drop: Drop, chan: ChannelRealization, w_t: np.ndarray,
            config: NetworkConfig) -> float:
    """Downlink SINR: beamformed AP signal over internode leakage plus noise."""
    if drop.empty:
        raise ValueError("no scheduled DL user in this drop")
    pl = drop.scheduled_r ** (-config.alpha)
    sig = config.P_a * pl * abs(np.dot(chan.h_ad, w_t)) ** 2
    if config.P_u > 0.0 and config.d == 0.0:
        # colocated users: singular pathloss makes the internode term infinite
        return 0.0
    den = config.P_u * chan.g_ud * config.d ** (-config.alpha) + config.sigma_n2
    if den == 0.0:
        return math.inf
    return float(sig / den)


def sinr_ul(drop: Drop, chan: ChannelRealization, w_t: np.ndarray,
            w_r: np.ndarray, config: NetworkConfig) -> float:
    """Uplink SINR: combined user signal over residual loopback plus noise."""
    pl = ul_pathloss_polar(drop.scheduled_r, drop.scheduled_theta,
                           config.d, config.alpha)
    sig = config.P_u * pl * abs(np.dot(w_r, chan.h_ua)) ** 2
    li = config.P_a * abs(np.dot(w_r, chan.H_aa @ w_t)) ** 2
    den = li + config.sigma_n2
    if den == 0.0:
        return math.inf
    return float(sig / den)


def evaluate_trial(drop: Drop, chan: ChannelRealization, w_t: np.ndarray,
                   w_r: np.ndarray, config: NetworkConfig) -> TrialOutcome:
    """Both SINRs and the log rates for one beamformed trial.

    A zero denominator (noise-free operation with the interference term
    nulled) makes the rate meaningless; such trials are a configuration
    error and raise.
    """
    s_u = sinr_ul(drop, chan, w_t, w_r, config)
    s_d = sinr_dl(drop, chan, w_t, config)
    if not (math.isfinite(s_u) and math.isfinite(s_d)):
        raise ValueError("infinite SINR: zero noise with nulled interference")
    return TrialOutcome(sinr_ul=s_u, sinr_dl=s_d,
                        rate_ul=math.log2(1.0 + s_u),
                        rate_dl=math.log2(1.0 + s_d))
