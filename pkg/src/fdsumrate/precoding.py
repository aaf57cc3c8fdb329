"""Transmit/receive beamformer construction for all schemes.

Scheme labels name the receive side first: MrcMrt is MRC receive with MRT
transmit, MrcZf keeps MRC receive and forces the transmit beam into the
null space of the effective loopback row, ZfMrt keeps MRT transmit and
nulls on the receive side, and Optimal solves the joint design.

The joint design reduces to a line search over the auxiliary loopback level
t: for each t the transmit problem is max |h_ad w|^2 over unit vectors
with the quadratic equality w' (g g' - t M) w = a3 t / P_a, where
g = H_aa' h_ua and M = H_aa' H_aa. That sphere-constrained QCQP is solved
through its Lagrangian dual, which is exact here (two-quadratic problems
over complex spheres have no duality gap): bisection on the multiplier of
the equality constraint with an eigen-decomposition per step, a two-vector
mixing step when the top eigenvalue crosses, and a projected ascent polish
as fallback. The receive side is the MVDR-style closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class PrecoderPair:
    """Unit-norm transmit and receive beamformers plus the scheme label."""

    w_t: np.ndarray
    w_r: np.ndarray
    scheme: str


@dataclass
class OptCoefficients:
    """Effective scalars of the joint design.

    a1: DL gain coefficient P_a l(x_d) / (P_u g_ud d^-alpha + sigma_n2)
    a2: UL gain coefficient P_u l(x_u)
    a3: noise power; must be positive for the joint solver
    """

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if self.a1 < 0.0 or self.a2 < 0.0 or self.a3 < 0.0:
            raise ValueError("coefficients must be nonnegative")


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return v / n


def mrt(h_ad: np.ndarray) -> np.ndarray:
    """Matched transmit beam h_ad' / ||h_ad||."""
    return _unit(np.conj(np.asarray(h_ad, dtype=complex)))


def mrc(h_ua: np.ndarray) -> np.ndarray:
    """Matched receive combiner h_ua' / ||h_ua||."""
    return _unit(np.conj(np.asarray(h_ua, dtype=complex)))


def zf_tx(w_r: np.ndarray, H_aa: np.ndarray, h_ad: np.ndarray) -> np.ndarray:
    """Transmit beam: matched filter projected off the loopback row.

    Projects h_ad' onto the orthogonal complement of (w_r H_aa)' and
    normalizes. Needs n_d > 1; a vanishing loopback row (sigma_aa2 = 0)
    degenerates to plain MRT.
    """
    h_ad = np.asarray(h_ad, dtype=complex)
    if h_ad.shape[-1] < 2:
        raise ValueError("zf_tx requires n_d > 1")
    row = np.asarray(w_r, dtype=complex) @ np.asarray(H_aa, dtype=complex)
    nr2 = float(np.real(np.vdot(row, row)))
    target = np.conj(h_ad)
    if nr2 == 0.0:
        return _unit(target)
    u = np.conj(row) / math.sqrt(nr2)
    proj = target - u * np.vdot(u, target)
    if float(np.linalg.norm(proj)) == 0.0:
        # matched direction happens to be colinear with the loopback row;
        # any unit vector in the null space works, pick a deterministic one
        basis = np.eye(h_ad.shape[-1], dtype=complex)
        cand = basis - np.outer(u, np.conj(u)) @ basis
        k = int(np.argmax(np.linalg.norm(cand, axis=0)))
        proj = cand[:, k]
    return _unit(proj)


def zf_rx(w_t: np.ndarray, H_aa: np.ndarray, h_ua: np.ndarray) -> np.ndarray:
    """Receive combiner: matched filter projected off the loopback column.

    Projects h_ua' onto the orthogonal complement of H_aa w_t and
    normalizes; needs n_u > 1.
    """
    h_ua = np.asarray(h_ua, dtype=complex)
    if h_ua.shape[-1] < 2:
        raise ValueError("zf_rx requires n_u > 1")
    col = np.asarray(H_aa, dtype=complex) @ np.asarray(w_t, dtype=complex)
    nc2 = float(np.real(np.vdot(col, col)))
    target = np.conj(h_ua)
    if nc2 == 0.0:
        return _unit(target)
    u = np.conj(col) / math.sqrt(nc2)
    proj = target - u * np.vdot(u, target)
    if float(np.linalg.norm(proj)) == 0.0:
        basis = np.eye(h_ua.shape[-1], dtype=complex)
        cand = basis - np.outer(u, np.conj(u)) @ basis
        k = int(np.argmax(np.linalg.norm(cand, axis=0)))
        proj = cand[:, k]
    return _unit(proj)


def optimal_receiver(w_t: np.ndarray, H_aa: np.ndarray, h_ua: np.ndarray,
                     P_a: float, a3: float) -> np.ndarray:
    """MVDR-style receive combiner against the rank-one loopback.

    w_r proportional to h_ua' (P_a H_aa w_t w_t' H_aa' + a3 I)^-1,
    normalized. Maximizes the UL SINR for the given transmit beam.
    """
    if not a3 > 0.0:
        raise ValueError("optimal_receiver requires a3 > 0")
    h_ua = np.asarray(h_ua, dtype=complex)
    col = np.asarray(H_aa, dtype=complex) @ np.asarray(w_t, dtype=complex)
    # Sherman-Morrison: (a3 I + P_a c c')^-1 = (I - P_a c c'/(a3 + P_a||c||^2))/a3
    cc = float(np.real(np.vdot(col, col)))
    scale = P_a / (a3 + P_a * cc)
    u = h_ua - scale * col * np.vdot(col, h_ua)
    nv = float(np.linalg.norm(u))
    if nv == 0.0:
        return mrc(h_ua)
    return np.conj(u) / nv


def loopback_level(w_t: np.ndarray, H_aa: np.ndarray, h_ua: np.ndarray,
                   P_a: float, a3: float) -> float:
    """The auxiliary variable t(w_t) subtracted from the UL array gain."""
    h_ua = np.asarray(h_ua, dtype=complex)
    col = np.asarray(H_aa, dtype=complex) @ np.asarray(w_t, dtype=complex)
    num = abs(np.vdot(h_ua, col)) ** 2
    den = a3 + P_a * float(np.real(np.vdot(col, col)))
    return P_a * float(num) / den


def max_ul_rate_given_wt(w_t: np.ndarray, H_aa: np.ndarray, h_ua: np.ndarray,
                         P_a: float, a2: float, a3: float) -> float:
    """Best UL rate for a fixed transmit beam, in bits.

    log2(1 + (a2/a3)(||h_ua||^2 - t(w_t))); the optimal receiver achieves
    it, by the rank-one matrix-inversion identity.
    """
    if not a3 > 0.0:
        raise ValueError("max_ul_rate_given_wt requires a3 > 0")
    h_ua = np.asarray(h_ua, dtype=complex)
    T = float(np.real(np.vdot(h_ua, h_ua)))
    t = loopback_level(w_t, H_aa, h_ua, P_a, a3)
    return math.log2(1.0 + (a2 / a3) * max(T - t, 0.0))


# ----------------------------------------------------------------------
# inner QCQP at fixed t: h(t) = max |b' w|^2 over the unit sphere with
# equality w' C w = c0
# ----------------------------------------------------------------------

def _constraint_value(C: np.ndarray, w: np.ndarray) -> float:
    return float(np.real(np.conj(w) @ C @ w))


def _mix_for_constraint(b: np.ndarray, C: np.ndarray, u1: np.ndarray,
                        u2: np.ndarray, c0: float):
    """Best unit combo of two vectors meeting the quadratic equality.

    Over w = cos(s) u1 + e^(i g) sin(s) u2 the constraint is
    A cos(2s) + B(g) sin(2s) = rhs; per phase-grid point the solvable s
    values are closed-form, and the better |b' w|^2 is kept.
    """
    q11 = _constraint_value(C, u1)
    q22 = _constraint_value(C, u2)
    q12 = complex(np.conj(u1) @ C @ u2)
    b1 = complex(np.vdot(b, u1))
    b2 = complex(np.vdot(b, u2))
    rhs = c0 - 0.5 * (q11 + q22)
    A = 0.5 * (q11 - q22)
    best = None
    for g in np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False):
        e = complex(math.cos(g), math.sin(g))
        B = (e * q12).real
        amp = math.hypot(A, B)
        if amp < abs(rhs):
            continue
        base = math.atan2(B, A)
        delta = math.acos(max(-1.0, min(1.0, rhs / amp))) if amp > 0 else 0.0
        for two_s in (base + delta, base - delta):
            s = 0.5 * two_s
            w = math.cos(s) * u1 + e * math.sin(s) * u2
            val = abs(b1 * math.cos(s) + b2 * e * math.sin(s)) ** 2
            if best is None or val > best[0]:
                best = (val, w)
    return best


def _projected_ascent(b: np.ndarray, C: np.ndarray, c0: float,
                      w0: np.ndarray, iters: int = 120):
    """Fallback: ascend |b' w|^2 on the sphere, re-solving the equality.

    After each gradient step the iterate is pulled back onto the constraint
    by a one-dimensional correction along C w, then renormalized.
    """
    w = w0 / np.linalg.norm(w0)
    bb = np.conj(b)
    step = 0.25
    val = abs(np.dot(b, w)) ** 2
    for _ in range(iters):
        grad = bb * np.dot(b, w)
        cand = w + step * grad
        # correction: choose xi so that (cand + xi Cw)' C (cand + xi Cw) ~ c0
        for _ in range(30):
            cand = cand / np.linalg.norm(cand)
            viol = _constraint_value(C, cand) - c0
            if abs(viol) < 1e-12 * (1.0 + abs(c0)):
                break
            dirv = C @ cand
            denom = 2.0 * float(np.real(np.conj(dirv) @ dirv))
            if denom == 0.0:
                break
            cand = cand - (viol / denom) * dirv
        cand = cand / np.linalg.norm(cand)
        new = abs(np.dot(b, cand)) ** 2
        if new > val and abs(_constraint_value(C, cand) - c0) < 1e-9 * (1.0 + abs(c0)):
            w, val = cand, new
        else:
            step *= 0.5
            if step < 1e-6:
                break
    return val, w


def _solve_inner(b: np.ndarray, C: np.ndarray, c0: float):
    """h(t) by dual bisection; returns (value, w) or None when infeasible.

    The dual function mu -> lambda_max(b b' - mu C) + mu c0 is convex; its
    derivative is c0 minus the constraint value at the top eigenvector,
    which is nonincreasing, so bisection on that residual converges. The
    top-2 mixing step covers eigenvalue crossings where the eigenvector
    constraint value jumps across c0.
    """
    n = b.shape[0]
    evC = np.linalg.eigvalsh(C)
    lam_min, lam_max = float(evC[0]), float(evC[-1])
    scale = max(abs(lam_min), abs(lam_max), 1e-30)
    if c0 < lam_min - 1e-9 * scale or c0 > lam_max + 1e-9 * scale:
        return None
    B = np.outer(np.conj(b), b)

    def top_vec(mu):
        vals, vecs = np.linalg.eigh(B - mu * C)
        return vals, vecs

    def phi(mu):
        _, vecs = top_vec(mu)
        return _constraint_value(C, vecs[:, -1]), vecs

    # bracket: phi decreasing, phi(-inf) -> lam_max, phi(+inf) -> lam_min
    m = 1.0 + float(np.vdot(b, b).real) / scale
    lo, hi = -m, m
    for _ in range(80):
        p_lo, _ = phi(lo)
        if p_lo >= c0 - 1e-13 * scale:
            break
        lo *= 2.0
    for _ in range(80):
        p_hi, _ = phi(hi)
        if p_hi <= c0 + 1e-13 * scale:
            break
        hi *= 2.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        p, _ = phi(mid)
        if p >= c0:
            lo = mid
        else:
            hi = mid
    cands = []
    for mu in (lo, hi, 0.5 * (lo + hi)):
        vals, vecs = top_vec(mu)
        w = vecs[:, -1]
        viol = abs(_constraint_value(C, w) - c0)
        if viol <= 1e-8 * (scale + abs(c0)):
            cands.append((abs(np.dot(b, w)) ** 2, w))
        if n >= 2:
            mixed = _mix_for_constraint(np.conj(b), C, vecs[:, -1], vecs[:, -2], c0)
            if mixed is not None:
                cands.append(mixed)
    if not cands:
        # random-restart ascent from the better-violating eigenvector
        _, vecs = top_vec(0.5 * (lo + hi))
        val, w = _projected_ascent(b, C, c0, vecs[:, -1])
        if abs(_constraint_value(C, w) - c0) <= 1e-7 * (scale + abs(c0)):
            cands.append((val, w))
    if not cands:
        return None
    val, w = max(cands, key=lambda p: p[0])
    return val, w / np.linalg.norm(w)


def optimal_joint(h_ad: np.ndarray, h_ua: np.ndarray, H_aa: np.ndarray,
                  coeffs: OptCoefficients, P_a: float,
                  grid_size: int = 200):
    """Joint transmit/receive design by line search over the loopback level.

    Sweeps t over [0, ||h_ua||^2] on a uniform grid (plus the exact levels
    of the MRT and ZF beams so the fixed schemes are always dominated),
    solves the transmit QCQP at each feasible t, and keeps the pair
    maximizing the sum of the two log terms. Ties go to the smaller t.
    Returns (PrecoderPair, sum_rate_bits).
    """
    if not coeffs.a3 > 0.0:
        raise ValueError("optimal_joint requires a3 > 0")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    h_ad = np.asarray(h_ad, dtype=complex)
    h_ua = np.asarray(h_ua, dtype=complex)
    H_aa = np.asarray(H_aa, dtype=complex)
    a1, a2, a3 = coeffs.a1, coeffs.a2, coeffs.a3
    T = float(np.real(np.vdot(h_ua, h_ua)))
    b = h_ad  # |h_ad w|^2 = |b . w|^2 with row-vector convention

    def sum_rate(h_val, t):
        return (math.log2(1.0 + a1 * h_val)
                + math.log2(1.0 + (a2 / a3) * max(T - t, 0.0)))

    if float(np.sum(np.abs(H_aa) ** 2)) == 0.0:
        w_t = mrt(h_ad)
        w_r = mrc(h_ua)
        rate = sum_rate(float(np.real(np.vdot(h_ad, h_ad))), 0.0)
        return PrecoderPair(w_t=w_t, w_r=w_r, scheme="Optimal"), rate

    n_d = h_ad.shape[-1]
    if n_d == 1:
        w_t = np.ones(1, dtype=complex)
        t0 = loopback_level(w_t, H_aa, h_ua, P_a, a3)
        rate = sum_rate(float(np.abs(h_ad[0]) ** 2), t0)
        w_r = optimal_receiver(w_t, H_aa, h_ua, P_a, a3)
        return PrecoderPair(w_t=w_t, w_r=w_r, scheme="Optimal"), rate

    g = np.conj(H_aa.T) @ h_ua
    M = np.conj(H_aa.T) @ H_aa
    t_mrt = loopback_level(mrt(h_ad), H_aa, h_ua, P_a, a3)

    # exact anchors: the matched beam at its own loopback level, and the
    # projection of the matched beam off g (the t = 0 optimum); these make
    # the fixed schemes dominated by construction, grid noise aside
    anchors = []
    w_m = mrt(h_ad)
    anchors.append((t_mrt, w_m, float(np.real(np.vdot(h_ad, h_ad)))))
    ng2 = float(np.real(np.vdot(g, g)))
    if ng2 > 0.0:
        p = np.conj(h_ad) - g * (np.vdot(g, np.conj(h_ad)) / ng2)
        npn = float(np.linalg.norm(p))
        if npn > 0.0:
            p = p / npn
            anchors.append((0.0, p, abs(np.dot(h_ad, p)) ** 2))

    best = None
    for t, w, h_val in sorted(anchors, key=lambda a: a[0]):
        r = sum_rate(h_val, t)
        if best is None or r > best[0] + 1e-15:
            best = (r, w, t)
    ts = sorted(set(np.linspace(0.0, T, grid_size).tolist() + [t_mrt]))
    for t in ts:
        C = np.outer(g, np.conj(g)) - t * M
        c0 = a3 * t / P_a
        sol = _solve_inner(b, C, c0)
        if sol is None:
            continue
        h_val, w = sol
        r = sum_rate(h_val, t)
        if best is None or r > best[0] + 1e-15:
            best = (r, w, t)
    rate, w_t, _ = best
    w_t = w_t / np.linalg.norm(w_t)
    w_r = optimal_receiver(w_t, H_aa, h_ua, P_a, a3)
    return PrecoderPair(w_t=w_t, w_r=w_r, scheme="Optimal"), float(rate)


# ----------------------------------------------------------------------
# batched solver for the Monte Carlo path
# ----------------------------------------------------------------------

def _secular_top(d: np.ndarray, beta2: np.ndarray, iters: int = 20):
    """Largest root of 1 = sum_i beta2_i / (theta - d_i), vectorized.

    This is the top eigenvalue of diag(d) + beta beta'. The root lies in
    (dmax, dmax + sum beta2]; the branch is increasing but concave there,
    so an unguarded Newton step from above can land beyond the dmax pole.
    Each step is therefore kept inside a shrinking sign bracket, falling
    back to the bracket midpoint when Newton exits it. No convergence
    test is made; accuracy is at worst bisection-rate in `iters`.
    """
    dmax = np.max(d, axis=1)
    lo = dmax.copy()
    hi = dmax + np.sum(beta2, axis=1) + 1e-30
    theta = hi.copy()
    for _ in range(iters):
        r = np.maximum(theta[:, None] - d, 1e-300)
        f = 1.0 - np.sum(beta2 / r, axis=1)
        fp = np.sum((beta2 / r) / r, axis=1)
        hi = np.where(f > 0.0, theta, hi)
        lo = np.where(f > 0.0, lo, theta)
        step = theta - f / np.maximum(fp, 1e-300)
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        theta = np.where(bad, 0.5 * (lo + hi), step)
    return theta


def _secular_second(d: np.ndarray, beta2: np.ndarray, iters: int = 40):
    """Second-largest root of the same secular equation, by bisection.

    Interlacing puts it between the two largest d_i; the function is
    increasing there from -inf to +inf.
    """
    part = np.partition(d, d.shape[1] - 2, axis=1)
    d2 = part[:, -2]
    dmax = part[:, -1]
    spread = np.maximum(dmax - d2, 0.0) + 1e-30
    lo = d2 + 1e-14 * spread
    hi = dmax - 1e-14 * spread
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        r = mid[:, None] - d
        r = np.where(np.abs(r) < 1e-150, 1e-150, r)
        f = 1.0 - np.sum(beta2 / r, axis=1)
        up = f < 0.0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return 0.5 * (lo + hi)


def optimal_rates_batched(h_ad: np.ndarray, h_ua: np.ndarray, H_aa: np.ndarray,
                          a1: np.ndarray, a2: np.ndarray, a3: float,
                          P_a: float, n_tau: int = 33, n_bisect: int = 42):
    """Per-trial joint-design UL and DL rates for stacked instances.

    Same mathematics as optimal_joint, vectorized across trials: a shared
    normalized t-grid (scaled per trial by ||h_ua||^2, plus each trial's
    MRT loopback level as an extra column, plus t = 0) and dual bisection.
    Per column the constraint matrix is eigendecomposed once; with the
    rank-one objective every quantity the bisection and the two-vector
    mixing step need reduces to real functions of the eigenvalues and of
    |U' conj(h_ad)|^2, so the inner iterations are cheap array arithmetic.
    Returns (rate_ul, rate_dl) arrays in bits.

    Accuracy note: with the default column budget the per-trial optimum is
    within the grid resolution of the scalar solver; the acceptance oracle
    uses optimal_joint per instance instead.
    """
    if not a3 > 0.0:
        raise ValueError("optimal_rates_batched requires a3 > 0")
    h_ad = np.asarray(h_ad, dtype=complex)
    h_ua = np.asarray(h_ua, dtype=complex)
    H_aa = np.asarray(H_aa, dtype=complex)
    N, n_d = h_ad.shape
    T = np.sum(np.abs(h_ua) ** 2, axis=1)
    b = h_ad
    bb2 = np.sum(np.abs(b) ** 2, axis=1)
    log2 = math.log(2.0)

    # loopback level of the MRT beam, per trial
    wt_mrt = np.conj(h_ad) / np.maximum(np.linalg.norm(h_ad, axis=1, keepdims=True), 1e-300)
    col = np.einsum("nud,nd->nu", H_aa, wt_mrt)
    cc = np.sum(np.abs(col) ** 2, axis=1)
    t_mrt = P_a * np.abs(np.einsum("nu,nu->n", np.conj(h_ua), col)) ** 2 / (a3 + P_a * cc)

    best_ul = np.log1p((a2 / a3) * np.maximum(T - t_mrt, 0.0)) / log2
    best_dl = np.log1p(a1 * bb2) / log2
    best_rate = best_ul + best_dl

    if n_d == 1:
        # a scalar transmit beam has no design freedom
        return best_ul, best_dl

    Hh = np.conj(np.swapaxes(H_aa, 1, 2))
    g = np.einsum("ndu,nu->nd", Hh, h_ua)
    M = np.einsum("ndu,nue->nde", Hh, H_aa)
    gg = np.einsum("nd,ne->nde", g, np.conj(g))

    taus = np.linspace(0.0, 0.995, n_tau)
    t_cols = np.concatenate([taus[None, :] * T[:, None], t_mrt[:, None]], axis=1)
    J = t_cols.shape[1]

    for j in range(J):
        t = t_cols[:, j]
        C = gg - t[:, None, None] * M
        c0 = a3 * t / P_a
        lam, U = np.linalg.eigh(C)
        beta = np.einsum("nde,nd->ne", np.conj(U), np.conj(b))
        # normalize: unit spectral scale for C, unit objective vector
        scale = np.maximum(np.abs(lam[:, 0]), np.abs(lam[:, -1])) + 1e-300
        lamn = lam / scale[:, None]
        c0n = c0 / scale
        beta2 = np.abs(beta) ** 2 / np.maximum(bb2, 1e-300)[:, None]
        feas = (c0n >= lamn[:, 0] - 1e-9) & (c0n <= lamn[:, -1] + 1e-9)
        if not np.any(feas):
            continue

        def phi_of(mu, lamn=lamn, beta2=beta2):
            d = -mu[:, None] * lamn
            th = _secular_top(d, beta2, iters=12)
            r = np.maximum(th[:, None] - d, 1e-150)
            w2 = (beta2 / r) / r
            nrm = np.sum(w2, axis=1)
            return np.sum(lamn * w2, axis=1) / np.maximum(nrm, 1e-300)

        lo = np.full(N, -2.0)
        hi = np.full(N, 2.0)
        for _ in range(25):
            p = phi_of(lo)
            bad = feas & (p < c0n)
            if not np.any(bad):
                break
            lo[bad] *= 2.0
        for _ in range(25):
            p = phi_of(hi)
            bad = feas & (p > c0n)
            if not np.any(bad):
                break
            hi[bad] *= 2.0
        for _ in range(n_bisect):
            mid = 0.5 * (lo + hi)
            p = phi_of(mid)
            take_lo = p >= c0n
            lo = np.where(take_lo, mid, lo)
            hi = np.where(take_lo, hi, mid)
        mu = 0.5 * (lo + hi)

        # direct candidate and top-2 mixing, all in the eigenbasis of C
        d = -mu[:, None] * lamn
        th1 = _secular_top(d, beta2, iters=40)
        th2 = _secular_second(d, beta2)
        r1 = np.maximum(th1[:, None] - d, 1e-150)
        r2 = th2[:, None] - d
        r2 = np.where(np.abs(r2) < 1e-150, 1e-150, r2)
        n1 = np.sqrt(np.sum((beta2 / r1) / r1, axis=1))
        n2 = np.sqrt(np.sum((beta2 / r2) / r2, axis=1))
        n1 = np.maximum(n1, 1e-150)
        n2 = np.maximum(n2, 1e-150)
        q11 = np.sum(lamn * (beta2 / r1) / r1, axis=1) / (n1 * n1)
        q22 = np.sum(lamn * (beta2 / r2) / r2, axis=1) / (n2 * n2)
        q12 = np.sum(lamn * (beta2 / r1) / r2, axis=1) / (n1 * n2)
        b1 = np.sum(beta2 / r1, axis=1) / n1
        b2 = np.sum(beta2 / r2, axis=1) / n2

        h_direct = b1 * b1
        ok_direct = np.abs(q11 - c0n) <= 1e-7 * (1.0 + np.abs(c0n))

        rhs = c0n - 0.5 * (q11 + q22)
        A_ = 0.5 * (q11 - q22)
        h_mix = np.full(N, -np.inf)
        for cg in np.linspace(-1.0, 1.0, 9):
            B_ = cg * q12
            amp = np.hypot(A_, B_)
            solvable = amp >= np.abs(rhs)
            base = np.arctan2(B_, A_)
            delta = np.arccos(np.clip(rhs / np.maximum(amp, 1e-300), -1.0, 1.0))
            for sgn in (1.0, -1.0):
                s = 0.5 * (base + sgn * delta)
                val = (b1 * np.cos(s)) ** 2 + (b2 * np.sin(s)) ** 2 \
                    + 2.0 * cg * b1 * b2 * np.cos(s) * np.sin(s)
                val = np.where(solvable, val, -np.inf)
                h_mix = np.maximum(h_mix, val)
        h_hat = np.where(ok_direct, np.maximum(h_direct, h_mix), h_mix)
        usable = feas & (h_hat > -np.inf)
        if not np.any(usable):
            continue
        h_val = bb2 * np.maximum(h_hat, 0.0)
        ul = np.log1p((a2 / a3) * np.maximum(T - t, 0.0)) / log2
        dl = np.log1p(a1 * h_val) / log2
        r = np.where(usable, ul + dl, -np.inf)
        gain = r > best_rate
        best_rate = np.where(gain, r, best_rate)
        best_ul = np.where(gain, ul, best_ul)
        best_dl = np.where(gain, dl, best_dl)

    # second exact anchor: the projection of the matched beam off g at t = 0
    # (the matched-beam anchor seeded best_* before the sweep); with both in
    # place the fixed schemes are dominated by construction
    if n_d >= 2:
        ng2 = np.sum(np.abs(g) ** 2, axis=1)
        coef = np.where(ng2 > 0.0,
                        np.einsum("nd,nd->n", np.conj(g), np.conj(b)) / np.where(ng2 > 0.0, ng2, 1.0),
                        0.0)
        p = np.conj(b) - coef[:, None] * g
        pn = np.linalg.norm(p, axis=1)
        safe = pn > 0.0
        p = np.where(safe[:, None], p / np.where(safe, pn, 1.0)[:, None], p)
        h_zf = np.where(safe, np.abs(np.einsum("nd,nd->n", b, p)) ** 2, 0.0)
        ul_z = np.log1p((a2 / a3) * T) / log2
        dl_z = np.where(safe, np.log1p(a1 * h_zf) / log2, 0.0)
        r_z = np.where(safe, ul_z + dl_z, -np.inf)
        gain = r_z > best_rate
        best_rate = np.where(gain, r_z, best_rate)
        best_ul = np.where(gain, ul_z, best_ul)
        best_dl = np.where(gain, dl_z, best_dl)
    return best_ul, best_dl
