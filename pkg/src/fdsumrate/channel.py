"""Small-scale fading draws for one trial.

Complex Gaussian convention: an entry of variance s has independent real and
imaginary parts, each N(0, s/2), so the squared magnitude has mean s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import NetworkConfig


@dataclass
class ChannelRealization:
    """Fading for one trial.

    h_ad: DL channel row, shape (n_d,), unit-variance entries
    h_ua: UL channel column, shape (n_u,), unit-variance entries
    H_aa: residual loopback matrix, shape (n_u, n_d), variance sigma_aa2
    g_ud: UL-to-DL interference power gain, Exp(1)
    """

    h_ad: np.ndarray
    h_ua: np.ndarray
    H_aa: np.ndarray
    g_ud: float


def _cn(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    if variance == 0.0:
        return np.zeros(shape, dtype=complex)
    s = np.sqrt(variance / 2.0)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_realization(config: NetworkConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw all fading quantities for one trial from `rng`."""
    h_ad = _cn(rng, (config.n_d,), 1.0)
    h_ua = _cn(rng, (config.n_u,), 1.0)
    H_aa = _cn(rng, (config.n_u, config.n_d), config.sigma_aa2)
    h_ud = _cn(rng, (), 1.0)
    g_ud = float(np.abs(h_ud) ** 2)
    return ChannelRealization(h_ad=h_ad, h_ua=h_ua, H_aa=H_aa, g_ud=g_ud)
