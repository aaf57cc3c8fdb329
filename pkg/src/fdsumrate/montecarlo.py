"""Seeded Monte Carlo estimation of rates, outage, and baselines.

Trials are organized in fixed blocks of 4096. Block c of a run with seed s
draws all its variates from a fresh Generator seeded with SeedSequence
((s, c)), in a layout that never depends on the trial count: geometry
uniforms first (nearest-user radius, placement angle, fallback anchor),
then the channel blocks in a fixed order. A partial final block draws the
full block and keeps a prefix. Consequences: reports are bit-identical
for identical inputs, trial t sees the same randomness no matter how
blocks are distributed across workers, and schemes consume no randomness
of their own, so comparisons between schemes ride on common random
numbers. Block partial sums are combined in block order with compensated
summation.

Empty drops (no DL user inside the cell) contribute a zero DL rate; the
UL user is anchored to a uniform point of the cell and, with the AP not
transmitting, its link is loopback-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import NetworkConfig
from .precoding import optimal_rates_batched

_BLOCK = 4096
_LN2 = math.log(2.0)

_FIXED_SCHEMES = ("MrcMrt", "MrcZf", "ZfMrt")
SCHEMES = _FIXED_SCHEMES + ("Optimal",)
HD_CONDITIONS = ("AC", "RC")


@dataclass
class RateReport:
    """Mean rates with normal-approximation errors from one seeded run."""

    scheme: str
    mean_rate_ul: float
    mean_rate_dl: float
    mean_sum: float
    se_ul: float
    se_dl: float
    se_sum: float
    outage_ul: float
    outage_dl: float
    trials: int
    seed: int


def _kahan_add(total: float, comp: float, x: float):
    y = x - comp
    t = total + y
    return t, (t - total) - y


class _Acc:
    """Order-stable accumulator of sums and squared sums per link."""

    __slots__ = ("n", "s", "c", "s2", "c2", "o")

    def __init__(self):
        self.n = 0
        self.s = [0.0, 0.0, 0.0]
        self.c = [0.0, 0.0, 0.0]
        self.s2 = [0.0, 0.0, 0.0]
        self.c2 = [0.0, 0.0, 0.0]
        self.o = [0, 0]

    def add_block(self, part):
        (n, sums, sqs, outs) = part
        self.n += n
        for i in range(3):
            self.s[i], self.c[i] = _kahan_add(self.s[i], self.c[i], sums[i])
            self.s2[i], self.c2[i] = _kahan_add(self.s2[i], self.c2[i], sqs[i])
        self.o[0] += outs[0]
        self.o[1] += outs[1]

    def report(self, scheme: str, seed: int) -> RateReport:
        n = self.n
        means = [s / n for s in self.s]
        ses = []
        for i in range(3):
            if n > 1:
                var = max(self.s2[i] - self.s[i] * self.s[i] / n, 0.0) / (n - 1)
            else:
                var = 0.0
            ses.append(math.sqrt(var / n))
        return RateReport(scheme=scheme,
                          mean_rate_ul=means[0], mean_rate_dl=means[1],
                          mean_sum=means[2],
                          se_ul=ses[0], se_dl=ses[1], se_sum=ses[2],
                          outage_ul=self.o[0] / n, outage_dl=self.o[1] / n,
                          trials=n, seed=seed)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, block)))


def _cgauss(g: np.random.Generator, shape) -> np.ndarray:
    z = g.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def _draw_geometry(g: np.random.Generator, cfg: NetworkConfig):
    """Radius, empty mask, and the two pathloss factors for one block."""
    u_r = g.random(_BLOCK)
    u_phi = g.random(_BLOCK)
    u_anchor = g.random(_BLOCK)
    if cfg.lambda_d > 0.0:
        with np.errstate(divide="ignore"):
            r = np.sqrt(-np.log(u_r) / (cfg.lambda_d * math.pi))
    else:
        r = np.full(_BLOCK, np.inf)
    empty = r > cfg.R_c
    r_use = np.where(empty, cfg.R_c * np.sqrt(u_anchor), r)
    phi = 2.0 * math.pi * u_phi
    cos_th = -np.cos(phi)  # scheduled angle is pi - phi
    ell_d = r_use ** (-cfg.alpha)
    s2 = r_use * r_use + cfg.d * cfg.d - 2.0 * r_use * cfg.d * cos_th
    ell_u = s2 ** (-cfg.alpha / 2.0)
    return r_use, empty, ell_d, ell_u


def _internode_plus_noise(cfg: NetworkConfig, g_ud: np.ndarray) -> np.ndarray:
    if cfg.P_u == 0.0:
        return np.full_like(g_ud, cfg.sigma_n2)
    if cfg.d == 0.0:
        # colocated users: singular pathloss puts infinite internode
        # interference at the DL user, so its SINR is exactly zero
        return np.full_like(g_ud, np.inf)
    return cfg.P_u * g_ud * cfg.d ** (-cfg.alpha) + cfg.sigma_n2


def _check_scheme(cfg: NetworkConfig, scheme: str) -> None:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme == "MrcZf" and cfg.n_d < 2:
        raise ValueError("MrcZf needs n_d >= 2")
    if scheme == "ZfMrt" and cfg.n_u < 2:
        raise ValueError("ZfMrt needs n_u >= 2")
    if scheme in ("MrcZf", "ZfMrt") and cfg.sigma_n2 == 0.0:
        raise ValueError("a nulled link with zero noise has no finite rate")
    if scheme == "Optimal" and cfg.sigma_n2 <= 0.0:
        raise ValueError("the joint design requires sigma_n2 > 0")


def _fd_block(cfg: NetworkConfig, scheme: str, seed: int, block: int, nt: int,
              gamma_th: float):
    """Partial sums of one block: (n, rate sums, squared sums, outage counts)."""
    g = _block_rng(seed, block)
    r_use, empty, ell_d, ell_u = _draw_geometry(g, cfg)
    h_ad = _cgauss(g, (_BLOCK, cfg.n_d))
    h_ua = _cgauss(g, (_BLOCK, cfg.n_u))
    H_aa = _cgauss(g, (_BLOCK, cfg.n_u, cfg.n_d)) * math.sqrt(cfg.sigma_aa2)
    h_ud = _cgauss(g, (_BLOCK,))
    g_ud = np.abs(h_ud) ** 2

    r_use = r_use[:nt]
    empty = empty[:nt]
    ell_d = ell_d[:nt]
    ell_u = ell_u[:nt]
    h_ad = h_ad[:nt]
    h_ua = h_ua[:nt]
    H_aa = H_aa[:nt]
    g_ud = g_ud[:nt]

    if cfg.sigma_n2 == 0.0 and bool(np.any(empty)):
        raise ValueError("zero-noise run hit an empty drop; no finite UL rate")

    A_ud = _internode_plus_noise(cfg, g_ud)
    T_ua = np.sum(np.abs(h_ua) ** 2, axis=1)
    T_ad = np.sum(np.abs(h_ad) ** 2, axis=1)

    if scheme == "Optimal":
        a1 = np.where(empty, 0.0, cfg.P_a * ell_d / A_ud)
        a2 = cfg.P_u * ell_u
        rate_ul, rate_dl = optimal_rates_batched(
            h_ad, h_ua, H_aa, a1, a2, cfg.sigma_n2, cfg.P_a)
        sinr_ul = np.expm1(rate_ul * _LN2)
        sinr_dl = np.expm1(rate_dl * _LN2)
    else:
        if scheme == "MrcMrt":
            dl_gain = T_ad
            ul_gain = T_ua
            e = np.einsum("bu,bud,bd->b", np.conj(h_ua), H_aa, np.conj(h_ad))
            li = np.abs(e) ** 2 / np.maximum(T_ua * T_ad, 1e-300)
        elif scheme == "MrcZf":
            gv = np.einsum("bud,bu->bd", np.conj(H_aa), h_ua)
            ng2 = np.sum(np.abs(gv) ** 2, axis=1)
            coef = np.einsum("bd,bd->b", np.conj(gv), np.conj(h_ad))
            coef = np.where(ng2 > 0.0, coef / np.maximum(ng2, 1e-300), 0.0)
            p = np.conj(h_ad) - coef[:, None] * gv
            pn = np.linalg.norm(p, axis=1)
            p = p / np.maximum(pn, 1e-300)[:, None]
            dl_gain = np.abs(np.einsum("bd,bd->b", h_ad, p)) ** 2
            ul_gain = T_ua
            e = np.einsum("bu,bud,bd->b", np.conj(h_ua), H_aa, p)
            li = np.abs(e) ** 2 / np.maximum(T_ua, 1e-300)
        else:  # ZfMrt
            wt = np.conj(h_ad) / np.maximum(np.sqrt(T_ad), 1e-300)[:, None]
            col = np.einsum("bud,bd->bu", H_aa, wt)
            nc2 = np.sum(np.abs(col) ** 2, axis=1)
            coef = np.einsum("bu,bu->b", col, np.conj(h_ua))
            coef = np.where(nc2 > 0.0, coef / np.maximum(nc2, 1e-300), 0.0)
            wr = np.conj(h_ua) - coef[:, None] * np.conj(col)
            wn = np.linalg.norm(wr, axis=1)
            wr = wr / np.maximum(wn, 1e-300)[:, None]
            dl_gain = T_ad
            ul_gain = np.abs(np.einsum("bu,bu->b", wr, h_ua)) ** 2
            li = np.abs(np.einsum("bu,bu->b", wr, col)) ** 2
        sinr_dl = np.where(empty, 0.0, cfg.P_a * ell_d * dl_gain / A_ud)
        den_full = cfg.P_a * li + cfg.sigma_n2
        num = cfg.P_u * ell_u
        with np.errstate(divide="ignore"):
            sinr_ul = np.where(
                empty,
                num * T_ua / cfg.sigma_n2 if cfg.sigma_n2 > 0.0 else 0.0,
                num * ul_gain / den_full)
        rate_ul = np.log1p(sinr_ul) / _LN2
        rate_dl = np.log1p(sinr_dl) / _LN2

    if not (np.all(np.isfinite(rate_ul)) and np.all(np.isfinite(rate_dl))):
        raise ValueError("non-finite rate; zero noise with a nulled link")
    rate_sum = rate_ul + rate_dl
    sums = (float(np.sum(rate_ul)), float(np.sum(rate_dl)),
            float(np.sum(rate_sum)))
    sqs = (float(np.sum(rate_ul * rate_ul)), float(np.sum(rate_dl * rate_dl)),
           float(np.sum(rate_sum * rate_sum)))
    outs = (int(np.sum(sinr_ul < gamma_th)), int(np.sum(sinr_dl < gamma_th)))
    return nt, sums, sqs, outs


def _run_blocks(block_fn, trials: int):
    acc = _Acc()
    n_blocks = (trials + _BLOCK - 1) // _BLOCK
    for c in range(n_blocks):
        nt = min(_BLOCK, trials - c * _BLOCK)
        acc.add_block(block_fn(c, nt))
    return acc


def estimate_fd(config: NetworkConfig, scheme: str, trials: int, seed: int,
                gamma_th: float = 1.0) -> RateReport:
    """Average full-duplex rates for one scheme under common random numbers."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_scheme(config, scheme)
    acc = _run_blocks(
        lambda c, nt: _fd_block(config, scheme, seed, c, nt, gamma_th), trials)
    return acc.report(scheme, seed)


def estimate_outage(config: NetworkConfig, scheme: str, gamma_th: float,
                    trials: int, seed: int):
    """Empirical outage probabilities (UL, DL) at threshold gamma_th."""
    if not gamma_th > 0.0:
        raise ValueError("gamma_th must be positive")
    rep = estimate_fd(config, scheme, trials, seed, gamma_th=gamma_th)
    return rep.outage_ul, rep.outage_dl


def _hd_block(cfg: NetworkConfig, m_d: int, m_u: int, seed: int, block: int,
              nt: int, delta: float, gamma_th: float):
    g = _block_rng(seed, block)
    r_use, empty, ell_d, ell_u = _draw_geometry(g, cfg)
    h_ad = _cgauss(g, (_BLOCK, m_d))
    h_ua = _cgauss(g, (_BLOCK, m_u))
    r_use, empty = r_use[:nt], empty[:nt]
    ell_d, ell_u = ell_d[:nt], ell_u[:nt]
    T_ad = np.sum(np.abs(h_ad[:nt]) ** 2, axis=1)
    T_ua = np.sum(np.abs(h_ua[:nt]) ** 2, axis=1)
    sinr_dl = np.where(empty, 0.0, (cfg.P_a / cfg.sigma_n2) * ell_d * T_ad)
    sinr_ul = (cfg.P_u / cfg.sigma_n2) * ell_u * T_ua
    rate_dl = delta * (np.log1p(sinr_dl) / _LN2)
    rate_ul = (1.0 - delta) * (np.log1p(sinr_ul) / _LN2)
    rate_sum = rate_ul + rate_dl
    sums = (float(np.sum(rate_ul)), float(np.sum(rate_dl)),
            float(np.sum(rate_sum)))
    sqs = (float(np.sum(rate_ul * rate_ul)), float(np.sum(rate_dl * rate_dl)),
           float(np.sum(rate_sum * rate_sum)))
    outs = (int(np.sum(sinr_ul < gamma_th)), int(np.sum(sinr_dl < gamma_th)))
    return nt, sums, sqs, outs


def _hd_antennas(config: NetworkConfig, condition: str):
    if condition == "RC":
        return config.n_d, config.n_u
    if condition == "AC":
        m = config.n_d + config.n_u
        return m, m
    raise ValueError(f"unknown HD condition {condition!r}")


def estimate_hd(config: NetworkConfig, condition: str, delta: float,
                trials: int, seed: int, gamma_th: float = 1.0) -> RateReport:
    """Half-duplex baseline: time share delta on DL, no loopback, no
    internode interference.

    RC keeps the FD antenna partition per phase; AC gives all n_d + n_u
    antennas to whichever link is active. Reported per-link means carry
    their time-share weights, so mean_sum is the time-shared sum rate.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly inside (0, 1)")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if config.sigma_n2 <= 0.0:
        raise ValueError("half-duplex baselines need sigma_n2 > 0")
    m_d, m_u = _hd_antennas(config, condition)
    acc = _run_blocks(
        lambda c, nt: _hd_block(config, m_d, m_u, seed, c, nt, delta, gamma_th),
        trials)
    return acc.report(f"hd_{condition.lower()}", seed)


def _large_array_block(cfg: NetworkConfig, seed: int, block: int, nt: int,
                       gamma_th: float):
    g = _block_rng(seed, block)
    r_use, empty, ell_d, ell_u = _draw_geometry(g, cfg)
    h_ad = _cgauss(g, (_BLOCK, cfg.n_d))
    h_ua = _cgauss(g, (_BLOCK, cfg.n_u))
    h_ud = _cgauss(g, (_BLOCK,))
    g_ud = np.abs(h_ud) ** 2
    empty = empty[:nt]
    ell_d, ell_u, g_ud = ell_d[:nt], ell_u[:nt], g_ud[:nt]
    T_ad = np.sum(np.abs(h_ad[:nt]) ** 2, axis=1)
    T_ua = np.sum(np.abs(h_ua[:nt]) ** 2, axis=1)
    A_ud = _internode_plus_noise(cfg, g_ud)
    sinr_dl = np.where(empty, 0.0, (cfg.P_a / cfg.n_u) * ell_d * T_ad / A_ud)
    sinr_ul = cfg.P_u * ell_u * T_ua / cfg.sigma_n2
    rate_dl = np.log1p(sinr_dl) / _LN2
    rate_ul = np.log1p(sinr_ul) / _LN2
    rate_sum = rate_ul + rate_dl
    sums = (float(np.sum(rate_ul)), float(np.sum(rate_dl)),
            float(np.sum(rate_sum)))
    sqs = (float(np.sum(rate_ul * rate_ul)), float(np.sum(rate_dl * rate_dl)),
           float(np.sum(rate_sum * rate_sum)))
    outs = (int(np.sum(sinr_ul < gamma_th)), int(np.sum(sinr_dl < gamma_th)))
    return nt, sums, sqs, outs


def estimate_large_array(config: NetworkConfig, trials: int, seed: int,
                         gamma_th: float = 1.0) -> RateReport:
    """Large receive-array regime: DL power split P_a/n_u, loopback-free
    MRC uplink; internode interference and noise kept on the DL."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if config.sigma_n2 <= 0.0:
        raise ValueError("the large-array regime needs sigma_n2 > 0")
    acc = _run_blocks(
        lambda c, nt: _large_array_block(config, seed, c, nt, gamma_th),
        trials)
    return acc.report("large_array", seed)


def rate_region(config: NetworkConfig, scheme: str, delta_grid, trials: int,
                seed: int):
    """FD rate pairs (R_ul, R_dl) under the power split (delta P_a,
    (1-delta) P_u), one point per grid value, all on the same seed."""
    pts = []
    for delta in delta_grid:
        if not 0.0 <= delta <= 1.0:
            raise ValueError("delta_grid values must lie in [0, 1]")
        cfg = replace(config, P_a=delta * config.P_a,
                      P_u=(1.0 - delta) * config.P_u)
        rep = estimate_fd(cfg, scheme, trials, seed)
        pts.append((rep.mean_rate_ul, rep.mean_rate_dl))
    return pts


def _hd_phase_means(config: NetworkConfig, condition: str, trials: int,
                    seed: int):
    """Unweighted per-phase mean rates (E_ul, E_dl) of the HD baseline."""
    rep = estimate_hd(config, condition, 0.5, trials, seed)
    return rep.mean_rate_ul / 0.5, rep.mean_rate_dl / 0.5


def hd_frontier(config: NetworkConfig, condition: str, delta_grid,
                trials: int, seed: int):
    """Time-sharing frontier of the HD baseline: ((1-delta) E_ul,
    delta E_dl) along the grid; linear between the single-link corners."""
    e_ul, e_dl = _hd_phase_means(config, condition, trials, seed)
    pts = []
    for delta in delta_grid:
        if not 0.0 <= delta <= 1.0:
            raise ValueError("delta_grid values must lie in [0, 1]")
        pts.append(((1.0 - delta) * e_ul, delta * e_dl))
    return pts


def fairness_delta_fd(config: NetworkConfig, scheme: str, trials: int,
                      seed: int, tol: float = 1e-3, iters: int = 40) -> float:
    """Time-share weight equalizing the FD link rates, by bisection.

    The DL mean grows and the UL mean shrinks with delta under the power
    split, so their gap is monotone and bisection converges.
    """
    lo, hi = 1e-6, 1.0 - 1e-6
    delta = 0.5
    for _ in range(iters):
        delta = 0.5 * (lo + hi)
        cfg = replace(config, P_a=delta * config.P_a,
                      P_u=(1.0 - delta) * config.P_u)
        rep = estimate_fd(cfg, scheme, trials, seed)
        gap = rep.mean_rate_dl - rep.mean_rate_ul
        if abs(gap) < tol:
            break
        if gap > 0.0:
            hi = delta
        else:
            lo = delta
    return delta


def fairness_delta_hd(config: NetworkConfig, condition: str, trials: int,
                      seed: int, iters: int = 60) -> float:
    """Time-share weight equalizing the HD per-link throughputs."""
    e_ul, e_dl = _hd_phase_means(config, condition, trials, seed)
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        delta = 0.5 * (lo + hi)
        if delta * e_dl > (1.0 - delta) * e_ul:
            hi = delta
        else:
            lo = delta
    return 0.5 * (lo + hi)


def relative_gain(fd_sum: float, hd_sum: float) -> float:
    """Fractional sum-rate advantage (R_fd - R_hd) / R_fd."""
    if fd_sum <= 0.0:
        raise ValueError("the FD sum rate must be positive")
    return (fd_sum - hd_sum) / fd_sum
