"""Closed-form and quadrature evaluators for link CDFs and average rates.

Four entry points mirror the quantities the simulator estimates:

    ul_cdf(config, z, variant)   UL SINR distribution at threshold z
    ul_rate(config, variant)     UL spatial average rate (bits/s/Hz)
    dl_cdf(config, z, variant)   DL SINR distribution at threshold z
    dl_rate(config, variant)     DL spatial average rate (bits/s/Hz)

Each variant is one evaluation strategy with its own validity
preconditions (antenna counts, path-loss exponent, noise mode); an
incompatible combination raises ValueError rather than silently
producing a number for the wrong model.  The docstring of each private
evaluator states the formula actually integrated.

Conventions shared by every variant:

* CDFs use the strict inequality P(SINR < z), so F(0) == 0 even though
  an empty cell (no DL user inside the disk) forces SINR_d = 0; the
  void probability exp(-lambda_d pi R_c^2) appears as a jump at z = 0+.
* The scheduled DL user is the nearest PPP point, radial density
  2 pi lambda r exp(-lambda pi r^2) on (0, R_c); the UL partner sits at
  distance d from it, angle uniform, giving the squared AP distance
  s = r^2 + d^2 - 2 r d cos(theta).
* Interference-limited variants require sigma_n2 == 0 exactly; this is
  a mode flag, not a numerical threshold.
* Rates are returned in bits/s/Hz via R = (1/ln 2) * int_0^inf
  survival(z) / (1+z) dz, evaluated on the compactified axis
  s = 1/(1+z).

Series evaluators (the *_series variants and the alpha=4 bound) sum
alternating terms whose magnitude peaks near exp(lambda pi R_c^2), far
above the O(1) result, so they run in mpmath fixed-point arithmetic
with a working precision chosen from lambda pi R_c^2.  K truncation is
adaptive: at least `k_min` terms, then continue until the terms are
past their peak, decreasing, and below `tail_threshold` relative to the
partial sum.  Hitting the hard cap instead raises SeriesNonConvergent.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import integrate

from . import specfun
from .geometry import NetworkConfig

log = logging.getLogger(__name__)

_LN2 = math.log(2.0)
_SERIES_CAP = 4000

UL_CDF_VARIANTS = ("case1_quadrature", "case1_alpha2_series",
                   "case1_alpha4_lb", "case2_il", "mrczf", "zfmrt",
                   "dual_alpha2")
UL_RATE_VARIANTS = ("case1_exact", "case1_alpha2", "case1_alpha4_ub",
                    "case2_il", "mrczf", "zfmrt", "dual_ub_alpha2")
DL_CDF_VARIANTS = ("exact", "il_integral", "il_series", "nd1_series",
                   "alpha2_tricomi", "dual")
DL_RATE_VARIANTS = ("exact", "il", "il_mrczf", "nd1", "dual_ub",
                    "hd_expectation")


class SeriesNonConvergent(RuntimeError):
    """A series evaluator hit its term cap before the tail stabilized."""

    def __init__(self, message: str, partial: float, terms: int):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


@dataclass(frozen=True)
class EvalSpec:
    """Evaluation controls; pass in place of a bare variant string.

    quad_rel_tol applies per quadrature axis.  k_min is the minimum
    series truncation; the tail rule may extend it well past that.
    z_grid, when set, is folded into rate quadratures as breakpoints.
    """

    variant: str
    quad_rel_tol: float = 1e-8
    k_min: int = 60
    tail_threshold: float = 1e-10
    z_grid: tuple = ()


@dataclass(frozen=True)
class SeriesCoeffs:
    """Parameters shared by the UL alpha=2 series and its relatives.

    b, c, varrho parameterize the radial integrand sqrt(u^2 + 2bu + c);
    beta is P_u / (P_a z sigma_aa2), the single knob the alpha=2 and
    alpha=4 survival integrals depend on; psi_u and psi_d are the
    noise-normalized power groupings used by the dual-antenna forms.
    """

    b: float
    c: float
    varrho: float
    beta: float
    psi_u: float
    psi_d: float


def series_coeffs(config: NetworkConfig, z: float) -> SeriesCoeffs:
    if z <= 0.0:
        raise ValueError("series_coeffs requires z > 0")
    lam_pi = math.pi * config.lambda_d
    denom = config.P_a * z * config.sigma_aa2
    q = config.P_u / denom if denom > 0.0 else math.inf
    d2 = config.d ** 2
    if math.isfinite(q):
        b = q - d2
        c = (q + d2) ** 2
        u = config.R_c ** 2
        s = math.sqrt(u * u + 2.0 * b * u + c)
        # (s - sqrt(c))/u without cancellation at large q
        varrho = (u + 2.0 * b) / (s + math.sqrt(c))
    else:
        b, c, varrho = math.inf, math.inf, 1.0
    psi_u = config.P_u * lam_pi / config.sigma_n2 \
        if config.sigma_n2 > 0.0 else math.inf
    psi_d = config.P_a * lam_pi ** 2 / config.sigma_n2 \
        if config.sigma_n2 > 0.0 else math.inf
    return SeriesCoeffs(b=b, c=c, varrho=varrho, beta=q,
                        psi_u=psi_u, psi_d=psi_d)


# ----------------------------------------------------------------------
# shared plumbing
# ----------------------------------------------------------------------

def _as_spec(variant) -> EvalSpec:
    if isinstance(variant, EvalSpec):
        return variant
    return EvalSpec(variant=str(variant))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _quad(f, a, b, rel, points=None, limit=300):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=rel,
                                points=points, limit=limit)
    return val


def _clip_prob(p: float) -> float:
    return min(1.0, max(0.0, p))


def _rate_from_sf(sf, rel, z_grid=()):
    """(1/ln2) int_0^inf sf(z)/(1+z) dz on the axis s = 1/(1+z)."""
    pts = None
    if z_grid:
        pts = sorted(1.0 / (1.0 + float(z)) for z in z_grid)
    val = _quad(lambda s: sf((1.0 - s) / s) / s, 0.0, 1.0, rel, points=pts)
    return val / _LN2


def _dist2(r: float, theta: float, d: float) -> float:
    # clamp: rounding can push r^2 + d^2 - 2 r d below zero at r = d
    return max(r * r + d * d - 2.0 * r * d * math.cos(theta), 0.0)


def _ul_spike_points(config: NetworkConfig, delta: float):
    """Radial breakpoints around r = d, where the UL transmitter can sit
    arbitrarily close to the AP and survival-type integrands spike with
    width delta.  Without these hints the adaptive panels can step over
    the peak entirely once z is large."""
    if config.d <= 0.0:
        return None
    pts = {config.d, config.d - delta, config.d + delta}
    pts = sorted(p for p in pts if 0.0 < p < config.R_c)
    return pts or None


def _theta_nodes(r: float, d: float, delta: float):
    """Gauss-Legendre nodes and weights for the angular integral on
    [0, pi].  When the survival integrand has angular structure at the
    scale theta_c ~ delta/sqrt(r d) (the AP-to-UL distance dips below
    delta only inside that cone), the interval is split there so neither
    panel straddles the transition."""
    theta_c = 0.0
    if r > 0.0 and d > 0.0 and delta > 0.0:
        theta_c = delta / math.sqrt(r * d)
    if theta_c <= 0.0 or theta_c >= 0.5 * math.pi:
        t = 0.5 * math.pi * (_GL64_X + 1.0)
        w = 0.5 * math.pi * _GL64_W
        return t, w
    t1 = 0.5 * theta_c * (_GL48_X + 1.0)
    w1 = 0.5 * theta_c * _GL48_W
    rest = math.pi - theta_c
    t2 = theta_c + 0.5 * rest * (_GL48_X + 1.0)
    w2 = 0.5 * rest * _GL48_W
    return np.concatenate([t1, t2]), np.concatenate([w1, w2])


def _void_mass(config: NetworkConfig) -> float:
    return math.exp(-math.pi * config.lambda_d * config.R_c ** 2)


_GLK_X, _GLK_W = np.polynomial.legendre.leggauss(96)


def gamma_log_kernel(n: int, a: float) -> float:
    """E[ln(1 + G/a)] for G ~ Gamma(n, 1), a > 0, in nats.

    Equals int_0^inf Q(n, a z)/(1+z) dz.  For a <= 1 the integral
    telescopes through t_j = a^j J_j / j! with J_j = int z^j e^(-az)/(1+z),
    J_0 = e^a E1(a) and t_j = (1 - a t_{j-1})/j; the subtraction is benign
    there.  For a > 1 that ladder cancels, so a Gauss-Legendre rule on the
    exponentially truncated support is used instead.
    """
    if n < 1 or n != int(n):
        raise ValueError("gamma_log_kernel: n must be a positive integer")
    if not a > 0.0:
        raise ValueError("gamma_log_kernel: a must be > 0")
    if a <= 1.0:
        t = specfun.exp_e1(a).value
        total = t
        for j in range(1, n):
            t = (1.0 - a * t) / j
            total += t
        return total
    hi = (n + 45.0) / a
    zz = 0.5 * hi * (_GLK_X + 1.0)
    w = 0.5 * hi * _GLK_W
    return float(np.sum(w * specfun.erlang_sf(n, a * zz) / (1.0 + zz)))


# ----------------------------------------------------------------------
# mpmath series engines
# ----------------------------------------------------------------------

def _series_dps(mass: float) -> int:
    # alternating-term peak is ~exp(mass); keep ~30 guard digits
    return max(50, 30 + int(0.434 * mass) + 1)


def _series_should_stop(k, mag, prev_mag, partial_mag, spec, peak_k):
    return (k >= spec.k_min and k > peak_k and mag < prev_mag
            and mag <= spec.tail_threshold * (partial_mag + 1e-300))


def _ul_alpha2_series_sum(config: NetworkConfig, z: float,
                          spec: EvalSpec) -> float:
    """Survival 1 - F for n_u=1, alpha=2, sigma_n2=0 as the alternating
    series pi lam q sum_k (-lam pi)^k I_k / k! with the moment ladder

        I_0 = ln((U + b + S)/(b + sqrt(c))),  I_1 = S - sqrt(c) - b I_0,
        I_{k+1} = (U^k S - (2k+1) b I_k - k c I_{k-1}) / (k+1),

    where I_k = int_0^U u^k / sqrt(u^2 + 2bu + c) du and U = R_c^2.

    The ladder run upward admits homogeneous solutions that outgrow I_k
    by roughly (2b/U) per step, so for b > U (small z sigma_aa2) rounding
    noise is amplified beyond any fixed digit budget.  Rather than model
    that growth, each evaluation is repeated 70 digits higher and the
    working precision doubles until two consecutive runs agree."""
    lam_pi = math.pi * config.lambda_d
    u_top = config.R_c ** 2
    mass = lam_pi * u_top
    peak_k = int(mass) + 2

    def run(dps):
        # returns (survival, converged flag)
        with mp.workdps(dps):
            q = mp.mpf(config.P_u) / (mp.mpf(config.P_a) * mp.mpf(z)
                                      * mp.mpf(config.sigma_aa2))
            d2 = mp.mpf(config.d) ** 2
            b = q - d2
            c = (q + d2) ** 2
            sqc = mp.sqrt(c)
            uu = mp.mpf(u_top)
            s = mp.sqrt(uu * uu + 2 * b * uu + c)
            lp = mp.mpf(math.pi) * mp.mpf(config.lambda_d)

            i_prev = mp.log((uu + b + s) / (b + sqc))
            i_cur = s - sqc - b * i_prev
            partial = i_prev
            coef = mp.mpf(1)
            upow = uu
            prev_mag = abs(i_prev)
            k = 1
            stopped = False
            while k <= _SERIES_CAP:
                coef *= -lp / k
                term = coef * i_cur
                partial += term
                mag = abs(term)
                if _series_should_stop(k, mag, prev_mag, abs(partial), spec,
                                       peak_k):
                    stopped = True
                    break
                prev_mag = mag
                i_next = (upow * s - (2 * k + 1) * b * i_cur
                          - k * c * i_prev) / (k + 1)
                i_prev, i_cur = i_cur, i_next
                upow *= uu
                k += 1
            return float(mp.pi * mp.mpf(config.lambda_d) * q * partial), \
                stopped

    dps = _series_dps(mass)
    agree_tol = 10.0 * spec.tail_threshold
    last = None
    for _ in range(4):
        lo, lo_ok = run(dps)
        hi, hi_ok = run(dps + 70)
        last = hi
        if lo_ok and hi_ok and math.isfinite(lo) and math.isfinite(hi) \
                and abs(lo - hi) <= max(1e-13, agree_tol * abs(hi)):
            return hi
        dps = 2 * dps + 70
    raise SeriesNonConvergent(
        "UL alpha=2 series did not stabilize under precision escalation",
        partial=1.0 - last, terms=_SERIES_CAP)


def _hyp_1_b_neg(beta, w, dps_tol):
    """2F1(1, beta; beta+1; -w) in mp arithmetic, w > 0, via the Pfaff
    series in u = w/(1+w); convergent for every positive w."""
    u = w / (1 + w)
    c = beta + 1
    term = mp.mpf(1)
    total = mp.mpf(1)
    m = 1
    while m < 100000:
        term *= u * m / (c + m - 1)
        total += term
        if abs(term) < dps_tol * abs(total):
            break
        m += 1
    return total / (1 + w)


class _Hyp1Chain:
    """Walks 2F1(1, beta; beta+1; -w) upward in integer steps of beta via
    F(beta+1) = (beta+1)/(beta w) (1 - F(beta)); used when w is large
    enough (>= 2) for the recurrence to damp rounding errors."""

    def __init__(self, beta0, w):
        self.beta = beta0
        self.w = w
        if beta0 == 1:
            self.val = mp.log(1 + w) / w
        elif beta0 == mp.mpf("0.5"):
            sw = mp.sqrt(w)
            self.val = mp.atan(sw) / sw
        else:
            raise ValueError("unsupported chain seed")

    def advance_to(self, beta):
        while self.beta < beta - mp.mpf("0.25"):
            self.val = (self.beta + 1) / (self.beta * self.w) * (1 - self.val)
            self.beta += 1
        return self.val


def _series_2f1_sum(config: NetworkConfig, w_of_z: float, beta_step: float,
                    spec: EvalSpec, label: str) -> float:
    """sum_k (-1)^k (lam pi R^2)^(k+1)/ (k+1)! * 2F1(1, b_k; b_k+1; -W)
    with b_k = beta_step (k+1).  beta_step must be 1 or 1/2, which keeps
    the hypergeometric factors on one or two integer-stepped chains."""
    lam_pi_r2 = math.pi * config.lambda_d * config.R_c ** 2
    peak_k = int(lam_pi_r2) + 2
    with mp.workdps(_series_dps(lam_pi_r2)):
        w = mp.mpf(w_of_z)
        a = mp.mpf(lam_pi_r2)
        step = mp.mpf(beta_step)
        tol = mp.mpf(10) ** (-mp.mp.dps + 5)
        chains = None
        if w >= 2:
            if step == 1:
                chains = {0: _Hyp1Chain(mp.mpf(1), w)}
            else:
                chains = {0: _Hyp1Chain(mp.mpf("0.5"), w),
                          1: _Hyp1Chain(mp.mpf(1), w)}

        def f21(k):
            beta = step * (k + 1)
            if chains is None:
                return _hyp_1_b_neg(beta, w, tol)
            if step == 1:
                return chains[0].advance_to(beta)
            return chains[k % 2].advance_to(beta)

        coef = a  # (-1)^k a^(k+1) / (k+1)! at k=0
        partial = mp.mpf(0)
        prev_mag = mp.inf
        k = 0
        while k <= _SERIES_CAP:
            term = coef * f21(k)
            partial += term
            mag = abs(term)
            if _series_should_stop(k, mag, prev_mag, abs(partial), spec,
                                   peak_k):
                break
            prev_mag = mag
            coef *= -a / (k + 2)
            k += 1
        else:
            raise SeriesNonConvergent(
                f"{label} series did not stabilize within "
                f"{_SERIES_CAP} terms",
                partial=float(partial), terms=_SERIES_CAP)
        return float(partial)


def _il_series_sum(config: NetworkConfig, z: float, nd: int,
                   spec: EvalSpec) -> float:
    """DL interference-limited CDF series (without the void mass):

        sum_k (-1)^k (lam pi R^2)^(k+1)/k! * I_k,
        I_k = int_0^1 v^k (1 + 1/(W v^(alpha/2)))^(-nd) dv,

    W = z (P_u/P_a)(R_c/d)^alpha.  I_k reduces to the binomial
    combination (2/alpha) sum_j (-1)^j C(nd,j) H_j(beta_k) of
    H_j(beta) = int_0^1 w^(beta-1) (1+
    W w)^(-j) dw at beta_k = 2(k+1)/alpha, advanced one unit of beta at
    a time through H_j(beta+1) = (H_{j-1}(beta) - H_j(beta))/W."""
    alpha = config.alpha
    w_val = z * (config.P_u / config.P_a) * (config.R_c / config.d) ** alpha
    lam_pi_r2 = math.pi * config.lambda_d * config.R_c ** 2
    peak_k = int(lam_pi_r2) + 2
    binom = [math.comb(nd, j) for j in range(nd + 1)]
    with mp.workdps(_series_dps(lam_pi_r2)):
        w = mp.mpf(w_val)
        a = mp.mpf(lam_pi_r2)
        two_over_alpha = mp.mpf(2) / mp.mpf(alpha)
        tol = mp.mpf(10) ** (-mp.mp.dps + 5)

        small_w = w < mp.mpf("0.5")
        chains = {}
        if not small_w:
            def seed(beta0):
                h = [mp.mpf(0)] * (nd + 1)
                if beta0 == 1:
                    h[0] = mp.mpf(1)
                    if nd >= 1:
                        h[1] = mp.log(1 + w) / w
                    for j in range(2, nd + 1):
                        h[j] = (1 - (1 + w) ** (1 - j)) / ((j - 1) * w)
                else:  # beta0 = 1/2: H_j(1/2) = 2 int_0^1 (1+W t^2)^(-j) dt
                    sw = mp.sqrt(w)
                    jj = mp.atan(sw) / sw
                    h[0] = mp.mpf(2)
                    if nd >= 1:
                        h[1] = 2 * jj
                    for j in range(1, nd):
                        jj = ((1 + w) ** (-j) + (2 * j - 1) * jj) / (2 * j)
                        h[j + 1] = 2 * jj
                return h

            if alpha == 2.0:
                chains[0] = [mp.mpf(1), seed(1)]
            else:
                chains[0] = [mp.mpf("0.5"), seed(mp.mpf("0.5"))]
                chains[1] = [mp.mpf(1), seed(1)]

        def i_term(k):
            beta = two_over_alpha * (k + 1)
            if small_w:
                # (1+1/(W v^(a/2)))^(-nd) expanded in powers of W
                tot = mp.mpf(0)
                term = w ** nd
                m = 0
                while m < 100000:
                    add = term / (beta + nd + m)
                    tot += add
                    if abs(add) < tol * abs(tot):
                        break
                    term *= -w * (nd + m) / (m + 1)
                    m += 1
                return two_over_alpha * tot
            key = 0 if alpha == 2.0 else (k % 2)
            cur_beta, h = chains[key]
            while cur_beta < beta - mp.mpf("0.25"):
                nh = [mp.mpf(1) / (cur_beta + 1)]
                for j in range(1, nd + 1):
                    nh.append((h[j - 1] - h[j]) / w)
                h = nh
                cur_beta += 1
                chains[key] = [cur_beta, h]
            tot = mp.mpf(0)
            for j in range(nd + 1):
                tot += (-1) ** j * binom[j] * h[j]
            return two_over_alpha * tot

        coef = a  # (-1)^k a^(k+1)/k! at k=0
        partial = mp.mpf(0)
        prev_mag = mp.inf
        k = 0
        while k <= _SERIES_CAP:
            term = coef * i_term(k)
            partial += term
            mag = abs(term)
            if _series_should_stop(k, mag, prev_mag, abs(partial), spec,
                                   peak_k):
                break
            prev_mag = mag
            coef *= -a / (k + 1)
            k += 1
        else:
            raise SeriesNonConvergent(
                "DL interference-limited series did not stabilize within "
                f"{_SERIES_CAP} terms",
                partial=float(partial), terms=_SERIES_CAP)
        return float(partial)


# ----------------------------------------------------------------------
# UL CDF variants
# ----------------------------------------------------------------------

def _ul_guard_common(config: NetworkConfig) -> None:
    _require(config.P_u > 0.0, "UL variants require P_u > 0")
    _require(config.sigma_n2 > 0.0 or config.sigma_aa2 > 0.0,
             "sigma_n2 and sigma_aa2 cannot both be zero: the UL SINR "
             "would be unbounded")


def _ul_alpha2_radial_survival(config: NetworkConfig, z: float,
                               rel: float) -> float:
    """1 - F for n_u=1, alpha=2, sigma_n2=0: the closed-theta form
    pi lam q int_0^U exp(-lam pi u)/sqrt(u^2+2bu+c) du."""
    q = config.P_u / (config.P_a * z * config.sigma_aa2)
    b = q - config.d ** 2
    floor = 4.0 * q * config.d ** 2  # c - b^2, computed without rounding
    lam_pi = math.pi * config.lambda_d

    def f(u):
        return math.exp(-lam_pi * u) / math.sqrt((u + b) ** 2 + floor)

    u_top = config.R_c ** 2
    brk = [p for p in (1.0 / lam_pi, 10.0 / lam_pi, -b) if 0.0 < p < u_top]
    val = _quad(f, 0.0, u_top, rel, points=sorted(set(brk)) or None)
    return math.pi * config.lambda_d * q * val


def _ul_alpha4_radial_survival(config: NetworkConfig, z: float,
                               rel: float) -> float:
    """1 - F lower-bound complement for n_u=1, alpha=4 (exact at d=0):
    pi lam beta int_0^U exp(-lam pi u)/(u^2+beta) du."""
    beta = config.P_u / (config.P_a * z * config.sigma_aa2)
    lam_pi = math.pi * config.lambda_d

    def f(u):
        return math.exp(-lam_pi * u) / (u * u + beta)

    u_top = config.R_c ** 2
    brk = [p for p in (math.sqrt(beta), 1.0 / lam_pi) if 0.0 < p < u_top]
    val = _quad(f, 0.0, u_top, rel, points=sorted(set(brk)) or None)
    return math.pi * config.lambda_d * beta * val


def _ul_cdf_case1_quadrature(config: NetworkConfig, z: float,
                             spec: EvalSpec) -> float:
    """General case-1 CDF: average over (r, theta) of the conditional
    survival exp(-z sigma_n2 L / P_u) / (1 + z (P_a/P_u) sigma_aa2 L)
    with L = s^(alpha/2)."""
    _require(config.n_u == 1, "case1 variants require n_u == 1")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    rel = spec.quad_rel_tol
    if config.sigma_n2 == 0.0 and config.alpha == 2.0:
        return _clip_prob(1.0 - _ul_alpha2_radial_survival(config, z, rel))

    lam = config.lambda_d
    lam_pi = math.pi * lam
    zs = z * config.sigma_n2 / config.P_u
    za = z * (config.P_a / config.P_u) * config.sigma_aa2
    half = config.alpha / 2.0
    scales = [s for s in (zs, za) if s > 0.0]
    delta = min(s ** (-1.0 / config.alpha) for s in scales) if scales \
        else config.R_c

    d = config.d

    def outer(r):
        t, w = _theta_nodes(r, d, delta)
        s = np.maximum(r * r + d * d - 2.0 * r * d * np.cos(t), 0.0)
        ell = s ** half
        vals = np.exp(-zs * ell) / (1.0 + za * ell)
        return 2.0 * r * math.exp(-lam_pi * r * r) * float(np.sum(w * vals))

    surv = lam * _quad(outer, 0.0, config.R_c, rel,
                       points=_ul_spike_points(config, delta))
    return _clip_prob(1.0 - surv)


def _ul_cdf_case1_alpha2_series(config: NetworkConfig, z: float,
                                spec: EvalSpec) -> float:
    _require(config.n_u == 1, "case1 variants require n_u == 1")
    _require(config.alpha == 2.0, "case1_alpha2_series requires alpha == 2")
    _require(config.sigma_n2 == 0.0,
             "case1_alpha2_series is interference-limited (sigma_n2 == 0)")
    _require(config.sigma_aa2 > 0.0 and config.P_a > 0.0,
             "case1_alpha2_series requires P_a * sigma_aa2 > 0")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    coeffs = series_coeffs(config, z)
    in_domain = False
    if config.d > 0.0:
        num = coeffs.b - math.sqrt(coeffs.c) * coeffs.varrho
        x = num / (coeffs.b + math.sqrt(coeffs.c))
        y = num / (coeffs.b - math.sqrt(coeffs.c))
        in_domain = abs(x) < 1.0 and abs(y) < 1.0
    if not in_domain:
        log.info("series arguments outside the F1 convergence domain "
                 "(z=%g); falling back to case1_quadrature", z)
        return _ul_cdf_case1_quadrature(config, z, spec)
    surv = _ul_alpha2_series_sum(config, z, spec)
    return _clip_prob(1.0 - surv)


def _ul_cdf_case1_alpha4_lb(config: NetworkConfig, z: float,
                            spec: EvalSpec) -> float:
    """Lower bound on the alpha=4 CDF (exact when d == 0): one minus the
    alternating series over 2F1(1, (k+1)/2; (k+3)/2; -W) factors with
    W = z sigma_aa2 (P_a/P_u) R_c^4."""
    _require(config.n_u == 1, "case1 variants require n_u == 1")
    _require(config.alpha == 4.0, "case1_alpha4_lb requires alpha == 4")
    _require(config.sigma_n2 == 0.0,
             "case1_alpha4_lb is interference-limited (sigma_n2 == 0)")
    _require(config.sigma_aa2 > 0.0 and config.P_a > 0.0,
             "case1_alpha4_lb requires P_a * sigma_aa2 > 0")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    w = z * config.sigma_aa2 * (config.P_a / config.P_u) * config.R_c ** 4
    surv = _series_2f1_sum(config, w, 0.5, spec, "UL alpha=4")
    return _clip_prob(1.0 - surv)


_GL48_X, _GL48_W = np.polynomial.legendre.leggauss(48)
_GL64_X, _GL64_W = np.polynomial.legendre.leggauss(64)


def _case2_cond_cdf(nu: int, kappa) -> np.ndarray:
    """Conditional case-2 CDF at loopback-to-signal ratio kappa:
    (nu-1) int_0^1 (1-y)^(nu-2) I_x(nu, nu) dy, x = kappa y/(1+kappa y).

    Vectorized over kappa.  The integrand's knee sits near y ~ 1/kappa,
    so the unit interval is split there into two Gauss-Legendre panels;
    the incomplete-beta factor is a fixed polynomial, which keeps the
    whole evaluation a single numpy expression."""
    kap = np.asarray(kappa, dtype=float)[..., None]
    knee = np.minimum(1.0, 10.0 / np.maximum(kap, 1e-300))
    y1 = 0.5 * knee * (_GL48_X + 1.0)
    w1 = 0.5 * knee * _GL48_W
    y2 = knee + 0.5 * (1.0 - knee) * (_GL48_X + 1.0)
    w2 = 0.5 * (1.0 - knee) * _GL48_W
    y = np.concatenate([y1, y2], axis=-1)
    w = np.concatenate([w1, w2], axis=-1)
    x = kap * y / (1.0 + kap * y)
    g = specfun.beta_inc_int(nu, x)
    base = (1.0 - y) ** (nu - 2)
    return np.clip((nu - 1) * np.sum(w * base * g, axis=-1), 0.0, 1.0)


def _ul_case2_survival(config: NetworkConfig, z: float, rel: float) -> float:
    lam = config.lambda_d
    lam_pi = math.pi * lam
    scale = z * config.P_a * config.sigma_aa2 / config.P_u
    half = config.alpha / 2.0
    nu = config.n_u
    d = config.d
    delta = scale ** (-1.0 / config.alpha)

    def outer(r):
        t, w = _theta_nodes(r, d, delta)
        s = np.maximum(r * r + d * d - 2.0 * r * d * np.cos(t), 0.0)
        fc = _case2_cond_cdf(nu, scale * s ** half)
        inner = float(np.sum(w * (1.0 - fc)))
        return 2.0 * r * math.exp(-lam_pi * r * r) * inner

    return lam * _quad(outer, 0.0, config.R_c, rel,
                       points=_ul_spike_points(config, delta))


def _ul_cdf_case2_il(config: NetworkConfig, z: float,
                     spec: EvalSpec) -> float:
    _require(config.n_d == 1, "case2_il requires n_d == 1")
    _require(config.n_u >= 2, "case2_il requires n_u >= 2")
    _require(config.sigma_n2 == 0.0,
             "case2_il is interference-limited (sigma_n2 == 0)")
    _require(config.sigma_aa2 > 0.0 and config.P_a > 0.0,
             "case2_il requires P_a * sigma_aa2 > 0")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    return _clip_prob(1.0 - _ul_case2_survival(config, z,
                                               spec.quad_rel_tol))


def _noise_ul_survival(config: NetworkConfig, z: float, m: int,
                       rel: float) -> float:
    """Survival of the loopback-free UL SINR with an m-fold diversity
    gain: E_{r,theta}[ Q(m, z sigma_n2 L / P_u) ]."""
    lam = config.lambda_d
    lam_pi = math.pi * lam
    zs = z * config.sigma_n2 / config.P_u
    half = config.alpha / 2.0
    delta = (m / zs) ** (1.0 / config.alpha)

    if config.d == 0.0:
        def radial(r):
            g = float(specfun.erlang_sf(m, zs * r ** config.alpha))
            return 2.0 * math.pi * r * math.exp(-lam_pi * r * r) * g
        return lam * _quad(radial, 0.0, config.R_c, rel)

    d = config.d

    def outer(r):
        t, w = _theta_nodes(r, d, delta)
        s = np.maximum(r * r + d * d - 2.0 * r * d * np.cos(t), 0.0)
        g = specfun.erlang_sf(m, zs * s ** half)
        return 2.0 * r * math.exp(-lam_pi * r * r) * float(np.sum(w * g))

    return lam * _quad(outer, 0.0, config.R_c, rel,
                       points=_ul_spike_points(config, delta))


def _ul_cdf_mrczf(config: NetworkConfig, z: float, spec: EvalSpec) -> float:
    _require(config.sigma_n2 > 0.0,
             "mrczf UL statistics need sigma_n2 > 0 (no interference term "
             "remains once the loopback channel is nulled)")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    return _clip_prob(1.0 - _noise_ul_survival(config, z, config.n_u,
                                               spec.quad_rel_tol))


def _ul_cdf_zfmrt(config: NetworkConfig, z: float, spec: EvalSpec) -> float:
    _require(config.n_u >= 2, "zfmrt requires n_u >= 2")
    _require(config.sigma_n2 > 0.0,
             "zfmrt UL statistics need sigma_n2 > 0")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    return _clip_prob(1.0 - _noise_ul_survival(config, z, config.n_u - 1,
                                               spec.quad_rel_tol))


def _ul_cdf_dual_alpha2(config: NetworkConfig, z: float,
                        spec: EvalSpec) -> float:
    """Two-antenna closed form (alpha=2, unbounded cell): survival
    exp(-lam pi d^2 z/(z+psi_u)) / (1 + z/psi_u)."""
    _require(config.alpha == 2.0, "dual_alpha2 requires alpha == 2")
    _require(config.n_u == 1, "dual_alpha2 models a single receive antenna")
    _require(config.sigma_n2 > 0.0, "dual_alpha2 requires sigma_n2 > 0")
    _ul_guard_common(config)
    if z <= 0.0:
        return 0.0
    psi = config.P_u * math.pi * config.lambda_d / config.sigma_n2
    surv = math.exp(-math.pi * config.lambda_d * config.d ** 2
                    * z / (z + psi)) / (1.0 + z / psi)
    return _clip_prob(1.0 - surv)


# ----------------------------------------------------------------------
# UL rate variants
# ----------------------------------------------------------------------

def _ul_rate_case1_exact(config: NetworkConfig, spec: EvalSpec) -> float:
    """Average of the conditional rate in closed form: with
    rho = (P_a/P_u) sigma_aa2 L and beta = sigma_n2 L / P_u,

        ln2 R(r,theta) = (e^b E1(b) - e^b0 E1(b0)) / (1 - rho),

    b0 = sigma_n2/(P_a sigma_aa2); interference-limited limit
    ln(rho)/(rho-1), and 1 - b e^b E1(b) on the rho = 1 ridge."""
    _require(config.n_u == 1, "case1 variants require n_u == 1")
    _ul_guard_common(config)
    rel = spec.quad_rel_tol
    lam = config.lambda_d
    lam_pi = math.pi * lam
    half = config.alpha / 2.0
    s_aa = (config.P_a / config.P_u) * config.sigma_aa2
    noise = config.sigma_n2 / config.P_u
    b0 = config.sigma_n2 / (config.P_a * config.sigma_aa2) \
        if config.P_a * config.sigma_aa2 > 0.0 else math.inf
    e0 = specfun.exp_e1(b0).value if math.isfinite(b0) and b0 > 0.0 else 0.0

    def cond(theta, r):
        ell = _dist2(r, theta, config.d) ** half
        rho = s_aa * ell
        if config.sigma_n2 == 0.0:
            if abs(rho - 1.0) < 1e-9:
                return 1.0
            return math.log(rho) / (rho - 1.0)
        beta = noise * ell
        if rho == 0.0:
            return specfun.exp_e1(beta).value
        if abs(rho - 1.0) < 1e-6:
            return 1.0 - beta * specfun.exp_e1(beta).value
        return (specfun.exp_e1(beta).value - e0) / (1.0 - rho)

    def outer(r):
        inner = _quad(lambda t: cond(t, r), 0.0, math.pi, rel)
        return 2.0 * r * math.exp(-lam_pi * r * r) * inner

    return lam * _quad(outer, 0.0, config.R_c, rel) / _LN2


def _ul_rate_case1_alpha2(config: NetworkConfig, spec: EvalSpec) -> float:
    _require(config.n_u == 1, "case1 variants require n_u == 1")
    _require(config.alpha == 2.0, "case1_alpha2 requires alpha == 2")
    _require(config.sigma_n2 == 0.0,
             "case1_alpha2 is interference-limited (sigma_n2 == 0)")
    _require(config.sigma_aa2 > 0.0 and config.P_a > 0.0,
             "case1_alpha2 requires P_a * sigma_aa2 > 0")
    _ul_guard_common(config)
    rel = spec.quad_rel_tol
    return _rate_from_sf(
        lambda z: _ul_alpha2_radial_survival(config, z, rel),
        rel, spec.z_grid)


def _ul_rate_case1_alpha4_ub(config: NetworkConfig, spec: EvalSpec) -> float:
    _require(config.n_u == 1, "case1 variants require n_u == 1")
    _require(config.alpha == 4.0, "case1_alpha4_ub requires alpha == 4")
    _require(config.sigma_n2 == 0.0,
             "case1_alpha4_ub is interference-limited (sigma_n2 == 0)")
    _require(config.sigma_aa2 > 0.0 and config.P_a > 0.0,
             "case1_alpha4_ub requires P_a * sigma_aa2 > 0")
    _ul_guard_common(config)
    rel = spec.quad_rel_tol
    return _rate_from_sf(
        lambda z: _ul_alpha4_radial_survival(config, z, rel),
        rel, spec.z_grid)


def _ul_rate_case2_il(config: NetworkConfig, spec: EvalSpec) -> float:
    _require(config.n_d == 1, "case2_il requires n_d == 1")
    _require(config.n_u >= 2, "case2_il requires n_u >= 2")
    _require(config.sigma_n2 == 0.0,
             "case2_il is interference-limited (sigma_n2 == 0)")
    _require(config.sigma_aa2 > 0.0 and config.P_a > 0.0,
             "case2_il requires P_a * sigma_aa2 > 0")
    _ul_guard_common(config)
    rel = spec.quad_rel_tol
    return _rate_from_sf(lambda z: _ul_case2_survival(config, z, rel),
                         rel, spec.z_grid)


def _noise_ul_rate(config: NetworkConfig, m: int, rel: float) -> float:
    lam = config.lambda_d
    lam_pi = math.pi * lam
    noise = config.sigma_n2 / config.P_u
    half = config.alpha / 2.0

    if config.d == 0.0:
        def radial(r):
            k = gamma_log_kernel(m, noise * r ** config.alpha)
            return 2.0 * math.pi * r * math.exp(-lam_pi * r * r) * k
        return lam * _quad(radial, 0.0, config.R_c, rel) / _LN2

    def cond(theta, r):
        return gamma_log_kernel(m, noise * _dist2(r, theta,
                                                  config.d) ** half)

    def outer(r):
        inner = _quad(lambda t: cond(t, r), 0.0, math.pi, rel)
        return 2.0 * r * math.exp(-lam_pi * r * r) * inner

    return lam * _quad(outer, 0.0, config.R_c, rel) / _LN2


def _ul_rate_mrczf(config: NetworkConfig, spec: EvalSpec) -> float:
    _require(config.sigma_n2 > 0.0,
             "mrczf UL statistics need sigma_n2 > 0")
    _ul_guard_common(config)
    return _noise_ul_rate(config, config.n_u, spec.quad_rel_tol)


def _ul_rate_zfmrt(config: NetworkConfig, spec: EvalSpec) -> float:
    _require(config.n_u >= 2, "zfmrt requires n_u >= 2")
    _require(config.sigma_n2 > 0.0, "zfmrt UL statistics need sigma_n2 > 0")
    _ul_guard_common(config)
    return _noise_ul_rate(config, config.n_u - 1, spec.quad_rel_tol)


def _ul_rate_dual_ub_alpha2(config: NetworkConfig, spec: EvalSpec) -> float:
    """Integral of the dual_alpha2 survival function, reduced to
    (psi_u/ln2) int_0^1 exp(-lam pi d^2 u)/(1+(psi_u-1)u) du."""
    _require(config.alpha == 2.0, "dual_ub_alpha2 requires alpha == 2")
    _require(config.n_u == 1, "dual_ub_alpha2 models a single receive antenna")
    _require(config.sigma_n2 > 0.0, "dual_ub_alpha2 requires sigma_n2 > 0")
    _ul_guard_common(config)
    psi = config.P_u * math.pi * config.lambda_d / config.sigma_n2
    a = math.pi * config.lambda_d * config.d ** 2

    def f(u):
        return math.exp(-a * u) / (1.0 + (psi - 1.0) * u)

    return psi * _quad(f, 0.0, 1.0, spec.quad_rel_tol) / _LN2


# ----------------------------------------------------------------------
# DL CDF variants
# ----------------------------------------------------------------------

def _dl_guard_common(config: NetworkConfig) -> None:
    _require(config.P_a > 0.0, "DL variants require P_a > 0")


def _dl_cdf_exact(config: NetworkConfig, z: float, spec: EvalSpec) -> float:
    """Full DL CDF with noise: E_{r,x}[ P(n_d, (z/P_a) r^alpha
    (P_u x d^-alpha + sigma_n2)) ], x ~ Exp(1) the internode fade."""
    _dl_guard_common(config)
    if z <= 0.0:
        return 0.0
    if config.d == 0.0 and config.P_u > 0.0:
        return 1.0  # co-located internode transmitter swamps the DL user
    rel = spec.quad_rel_tol
    lam = config.lambda_d
    lam_pi = math.pi * lam
    ud = config.P_u * config.d ** (-config.alpha) if config.P_u > 0.0 else 0.0
    nd = config.n_d

    def inner(r):
        ra = z * r ** config.alpha / config.P_a

        def f(v):
            x = -math.log(v)
            return float(specfun.erlang_cdf(nd, ra * (ud * x
                                                      + config.sigma_n2)))
        return _quad(f, 0.0, 1.0, rel)

    val = _quad(lambda r: 2.0 * math.pi * r * math.exp(-lam_pi * r * r)
                * inner(r), 0.0, config.R_c, rel)
    return _clip_prob(lam * val + _void_mass(config))


def _il_dl_a(config: NetworkConfig, r: float, z: float) -> float:
    return (r / config.d) ** config.alpha * (config.P_u / config.P_a) * z


def _dl_cdf_il_integral(config: NetworkConfig, z: float,
                        spec: EvalSpec) -> float:
    """Interference-limited DL CDF: 2 pi lam int r exp(-lam pi r^2)
    (1 + 1/a)^(-n_d) dr + void, a = (r/d)^alpha (P_u/P_a) z."""
    _dl_guard_common(config)
    _require(config.sigma_n2 == 0.0,
             "il_integral is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "il_integral needs internode interference (d > 0, P_u > 0)")
    if z <= 0.0:
        return 0.0
    lam_pi = math.pi * config.lambda_d

    def f(r):
        a = _il_dl_a(config, r, z)
        return r * math.exp(-lam_pi * r * r) * (1.0 + 1.0 / a) ** (-config.n_d)

    val = _quad(f, 0.0, config.R_c, spec.quad_rel_tol)
    return _clip_prob(2.0 * lam_pi * val + _void_mass(config))


def _dl_cdf_il_series(config: NetworkConfig, z: float,
                      spec: EvalSpec) -> float:
    _dl_guard_common(config)
    _require(config.sigma_n2 == 0.0,
             "il_series is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "il_series needs internode interference (d > 0, P_u > 0)")
    _require(config.alpha in (2.0, 4.0),
             "il_series is evaluated on hypergeometric chains that need "
             "alpha in {2, 4}; use il_integral for other exponents")
    if z <= 0.0:
        return 0.0
    val = _il_series_sum(config, z, config.n_d, spec)
    return _clip_prob(val + _void_mass(config))


def _dl_cdf_nd1_series(config: NetworkConfig, z: float,
                       spec: EvalSpec) -> float:
    """Single-transmit-antenna DL CDF as the alternating series over
    2F1(1, 2(k+1)/alpha; 2(k+1)/alpha + 1; -W), W = z (P_u/P_a)
    (R_c/d)^alpha."""
    _dl_guard_common(config)
    _require(config.n_d == 1, "nd1_series requires n_d == 1")
    _require(config.sigma_n2 == 0.0,
             "nd1_series is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "nd1_series needs internode interference (d > 0, P_u > 0)")
    _require(config.alpha in (2.0, 4.0),
             "nd1_series needs alpha in {2, 4}; use il_integral otherwise")
    if z <= 0.0:
        return 0.0
    w = z * (config.P_u / config.P_a) * (config.R_c / config.d) ** config.alpha
    surv = _series_2f1_sum(config, w, 2.0 / config.alpha, spec, "DL n_d=1")
    return _clip_prob(1.0 - surv)


def _dl_cdf_alpha2_tricomi(config: NetworkConfig, z: float,
                           spec: EvalSpec) -> float:
    """Unbounded-cell alpha=2 closed form Gamma(n_d + 1) U(n_d, 0, mu),
    mu = lam pi (P_a/P_u) d^2 / z."""
    _dl_guard_common(config)
    _require(config.alpha == 2.0, "alpha2_tricomi requires alpha == 2")
    _require(config.sigma_n2 == 0.0,
             "alpha2_tricomi is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "alpha2_tricomi needs internode interference (d > 0, P_u > 0)")
    if z <= 0.0:
        return 0.0
    mu = math.pi * config.lambda_d * (config.P_a / config.P_u) \
        * config.d ** 2 / z
    res = specfun.tricomi_u(float(config.n_d), 0.0, mu)
    return _clip_prob(math.gamma(config.n_d + 1) * res.value)


def _dl_cdf_dual(config: NetworkConfig, z: float, spec: EvalSpec) -> float:
    """Two-antenna noise-limited DL CDF, unbounded cell, no internode
    term: alpha=2 gives 1 - 1/(1 + z lam pi/psi_d); alpha=4 gives
    1 - x sqrt(pi/2) erfcx(x/sqrt2) with x = sqrt(psi_d/(2z))."""
    _dl_guard_common(config)
    _require(config.n_d == 1, "dual models a single transmit antenna")
    _require(config.sigma_n2 > 0.0, "dual requires sigma_n2 > 0")
    _require(config.alpha in (2.0, 4.0), "dual needs alpha in {2, 4}")
    if z <= 0.0:
        return 0.0
    psi_d = config.P_a * (math.pi * config.lambda_d) ** 2 / config.sigma_n2
    if config.alpha == 2.0:
        w = psi_d / (math.pi * config.lambda_d)
        return _clip_prob(z / (z + w))
    x = math.sqrt(psi_d / (2.0 * z))
    surv = x * specfun.parabolic_cyl_dm1(x, scaled=True).value
    return _clip_prob(1.0 - surv)


# ----------------------------------------------------------------------
# DL rate variants
# ----------------------------------------------------------------------

def _dl_rate_exact(config: NetworkConfig, spec: EvalSpec) -> float:
    """E_{r,x}[ E ln(1 + SINR_d) ] via the Gamma log kernel at
    a = (r^alpha/P_a)(P_u x d^-alpha + sigma_n2)."""
    _dl_guard_common(config)
    if config.d == 0.0 and config.P_u > 0.0:
        return 0.0
    _require(config.sigma_n2 > 0.0 or (config.d > 0.0 and config.P_u > 0.0),
             "noise-free DL rate without internode interference is "
             "unbounded")
    rel = spec.quad_rel_tol
    lam = config.lambda_d
    lam_pi = math.pi * lam
    ud = config.P_u * config.d ** (-config.alpha) if config.P_u > 0.0 else 0.0
    nd = config.n_d

    def inner(r):
        ra = r ** config.alpha / config.P_a

        def f(v):
            a = ra * (ud * -math.log(v) + config.sigma_n2)
            return gamma_log_kernel(nd, a) if a > 0.0 else 0.0
        return _quad(f, 0.0, 1.0, rel)

    val = _quad(lambda r: 2.0 * math.pi * r * math.exp(-lam_pi * r * r)
                * inner(r), 0.0, config.R_c, rel)
    return lam * val / _LN2


def _il_dl_survival(config: NetworkConfig, z: float, nd: int,
                    rel: float) -> float:
    lam_pi = math.pi * config.lambda_d

    def f(r):
        a = _il_dl_a(config, r, z)
        return r * math.exp(-lam_pi * r * r) \
            * (1.0 - (1.0 + 1.0 / a) ** (-nd))

    return 2.0 * lam_pi * _quad(f, 0.0, config.R_c, rel)


def _dl_rate_il(config: NetworkConfig, spec: EvalSpec) -> float:
    _dl_guard_common(config)
    _require(config.sigma_n2 == 0.0,
             "il is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "il needs internode interference (d > 0, P_u > 0)")
    rel = spec.quad_rel_tol
    return _rate_from_sf(
        lambda z: _il_dl_survival(config, z, config.n_d, rel),
        rel, spec.z_grid)


def _dl_rate_il_mrczf(config: NetworkConfig, spec: EvalSpec) -> float:
    """DL rate when one transmit degree of freedom is spent nulling the
    loopback channel: the diversity order drops to n_d - 1."""
    _dl_guard_common(config)
    _require(config.n_d >= 2, "il_mrczf requires n_d >= 2")
    _require(config.sigma_n2 == 0.0,
             "il_mrczf is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "il_mrczf needs internode interference (d > 0, P_u > 0)")
    rel = spec.quad_rel_tol
    return _rate_from_sf(
        lambda z: _il_dl_survival(config, z, config.n_d - 1, rel),
        rel, spec.z_grid)


def _dl_rate_nd1(config: NetworkConfig, spec: EvalSpec) -> float:
    """n_d = 1 interference-limited rate in the resummed radial form
    (the series collapses to int_0^1 exp(-lam pi R^2 v)/(1 + W v^(a/2)))."""
    _dl_guard_common(config)
    _require(config.n_d == 1, "nd1 requires n_d == 1")
    _require(config.sigma_n2 == 0.0,
             "nd1 is interference-limited (sigma_n2 == 0)")
    _require(config.d > 0.0 and config.P_u > 0.0,
             "nd1 needs internode interference (d > 0, P_u > 0)")
    rel = spec.quad_rel_tol
    return _rate_from_sf(lambda z: _il_dl_survival(config, z, 1, rel),
                         rel, spec.z_grid)


def _dl_rate_dual_ub(config: NetworkConfig, spec: EvalSpec) -> float:
    """Rate of the dual DL CDF.  alpha=2 closes to w ln w/((w-1) ln2),
    w = P_a lam pi / sigma_n2; alpha=4 integrates the parabolic-cylinder
    survival x sqrt(pi/2) erfcx(x/sqrt2)."""
    _dl_guard_common(config)
    _require(config.n_d == 1, "dual_ub models a single transmit antenna")
    _require(config.sigma_n2 > 0.0, "dual_ub requires sigma_n2 > 0")
    _require(config.alpha in (2.0, 4.0), "dual_ub needs alpha in {2, 4}")
    psi_d = config.P_a * (math.pi * config.lambda_d) ** 2 / config.sigma_n2
    if config.alpha == 2.0:
        w = psi_d / (math.pi * config.lambda_d)
        if abs(w - 1.0) < 1e-9:
            return (1.0 + 0.5 * (w - 1.0)) / _LN2
        return w * math.log(w) / ((w - 1.0) * _LN2)

    def sf(z):
        x = math.sqrt(psi_d / (2.0 * z))
        return x * specfun.parabolic_cyl_dm1(x, scaled=True).value

    return _rate_from_sf(sf, spec.quad_rel_tol, spec.z_grid)


def _dl_rate_hd_expectation(config: NetworkConfig, spec: EvalSpec) -> float:
    """Half-duplex DL phase mean E[log2(1 + (P_a/sigma_n2) r^-alpha G)]
    with G ~ Gamma(n_d, 1), no loopback and no internode term.  The
    duplexing time weight is NOT applied here."""
    _dl_guard_common(config)
    _require(config.sigma_n2 > 0.0, "hd_expectation requires sigma_n2 > 0")
    rel = spec.quad_rel_tol
    lam = config.lambda_d
    lam_pi = math.pi * lam
    noise = config.sigma_n2 / config.P_a
    nd = config.n_d

    def f(r):
        k = gamma_log_kernel(nd, noise * r ** config.alpha)
        return 2.0 * math.pi * r * math.exp(-lam_pi * r * r) * k

    return lam * _quad(f, 0.0, config.R_c, rel) / _LN2


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------

_UL_CDF = {
    "case1_quadrature": _ul_cdf_case1_quadrature,
    "case1_alpha2_series": _ul_cdf_case1_alpha2_series,
    "case1_alpha4_lb": _ul_cdf_case1_alpha4_lb,
    "case2_il": _ul_cdf_case2_il,
    "mrczf": _ul_cdf_mrczf,
    "zfmrt": _ul_cdf_zfmrt,
    "dual_alpha2": _ul_cdf_dual_alpha2,
}

_UL_RATE = {
    "case1_exact": _ul_rate_case1_exact,
    "case1_alpha2": _ul_rate_case1_alpha2,
    "case1_alpha4_ub": _ul_rate_case1_alpha4_ub,
    "case2_il": _ul_rate_case2_il,
    "mrczf": _ul_rate_mrczf,
    "zfmrt": _ul_rate_zfmrt,
    "dual_ub_alpha2": _ul_rate_dual_ub_alpha2,
}

_DL_CDF = {
    "exact": _dl_cdf_exact,
    "il_integral": _dl_cdf_il_integral,
    "il_series": _dl_cdf_il_series,
    "nd1_series": _dl_cdf_nd1_series,
    "alpha2_tricomi": _dl_cdf_alpha2_tricomi,
    "dual": _dl_cdf_dual,
}

_DL_RATE = {
    "exact": _dl_rate_exact,
    "il": _dl_rate_il,
    "il_mrczf": _dl_rate_il_mrczf,
    "nd1": _dl_rate_nd1,
    "dual_ub": _dl_rate_dual_ub,
    "hd_expectation": _dl_rate_hd_expectation,
}


def _dispatch(table, kind, config, variant, z=None):
    spec = _as_spec(variant)
    try:
        fn = table[spec.variant]
    except KeyError:
        raise ValueError(
            f"unsupported {kind} variant {spec.variant!r}; expected one of "
            f"{sorted(table)}") from None
    if z is None:
        return fn(config, spec)
    if not math.isfinite(z) or z < 0.0:
        raise ValueError("threshold z must be finite and >= 0")
    return fn(config, float(z), spec)


def ul_cdf(config: NetworkConfig, z: float, variant) -> float:
    """P(SINR_a < z) under the given evaluation variant."""
    return _dispatch(_UL_CDF, "ul_cdf", config, variant, z=z)


def ul_rate(config: NetworkConfig, variant) -> float:
    """Spatial average UL rate in bits/s/Hz."""
    return _dispatch(_UL_RATE, "ul_rate", config, variant)


def dl_cdf(config: NetworkConfig, z: float, variant) -> float:
    """P(SINR_d < z) under the given evaluation variant."""
    return _dispatch(_DL_CDF, "dl_cdf", config, variant, z=z)


def dl_rate(config: NetworkConfig, variant) -> float:
    """Spatial average DL rate in bits/s/Hz."""
    return _dispatch(_DL_RATE, "dl_rate", config, variant)
