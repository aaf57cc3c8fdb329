"""Disk PPP sampling, scheduled-user selection, UL placement, path loss.

The access point sits at the origin. DL users form a homogeneous Poisson
field on a disk of radius R_c; one is scheduled (nearest or uniformly
random); the UL user stands at distance d from the scheduled DL user in a
uniformly random direction and may fall outside the disk.

Angle bookkeeping: `place_ul_user` draws the direction angle phi measured
from the AP->DL axis (phi = 0 walks straight away from the AP). The polar
path-loss formula, and the `scheduled_theta` stored in a Drop, use the
opposite reference (DL->AP direction), i.e. theta = pi - phi. Both are
uniform on [0, 2pi), so the conventions agree in law; the change-of-
coordinates identity ul_pathloss_polar(r, theta, d, a) == pathloss(ul,
origin, a) is exact with the stored theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

Point = tuple[float, float]


@dataclass(frozen=True)
class NetworkConfig:
    """Static network parameters (all linear units).

    lambda_d: DL user density (users/m^2)
    R_c: cell radius (m)
    alpha: path-loss exponent, >= 2
    d: UL-to-DL user separation (m)
    P_a, P_u: access point / UL user transmit powers
    sigma_n2: noise power
    sigma_aa2: residual loopback-interference variance per antenna pair
    n_u, n_d: receive / transmit antenna counts
    delta: half-duplex DL time fraction
    """

    lambda_d: float = 1e-3
    R_c: float = 200.0
    alpha: float = 2.0
    d: float = 25.0
    P_a: float = 316.22776601683794
    P_u: float = 316.22776601683794
    sigma_n2: float = 1.0
    sigma_aa2: float = 0.1
    n_u: int = 1
    n_d: int = 1
    delta: float = 0.5

    def __post_init__(self):
        if self.lambda_d < 0.0:
            raise ValueError("lambda_d must be >= 0")
        if self.R_c <= 0.0:
            raise ValueError("R_c must be > 0")
        if self.alpha < 2.0:
            raise ValueError("alpha must be >= 2")
        if self.d < 0.0:
            raise ValueError("d must be >= 0")
        if self.P_a < 0.0 or self.P_u < 0.0:
            raise ValueError("powers must be >= 0")
        if self.sigma_n2 < 0.0 or self.sigma_aa2 < 0.0:
            raise ValueError("variances must be >= 0")
        if int(self.n_u) != self.n_u or self.n_u < 1:
            raise ValueError("n_u must be a positive integer")
        if int(self.n_d) != self.n_d or self.n_d < 1:
            raise ValueError("n_d must be a positive integer")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")


@dataclass
class Drop:
    """One geometry realization.

    dl_points: the full DL field, shape (k, 2); empty array when no user fell
        in the disk.
    scheduled_r: AP distance of the scheduled DL user (or of the anchor used
        for UL placement when the drop is empty).
    scheduled_theta: UL direction angle at the scheduled user, measured from
        the DL->AP direction, in [0, 2pi).
    ul_point: UL user position.
    empty: True when no DL user fell in the disk this drop.
    """

    dl_points: np.ndarray
    scheduled_r: float
    scheduled_theta: float
    ul_point: Point
    empty: bool = field(default=False)


def sample_ppp(lambda_d: float, R_c: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one PPP realization on the disk; returns an (k, 2) array.

    Count is Poisson(lambda_d pi R_c^2), positions i.i.d. uniform on the
    disk via r = R_c sqrt(U).
    """
    if lambda_d < 0.0:
        raise ValueError("lambda_d must be >= 0")
    if R_c <= 0.0:
        raise ValueError("R_c must be > 0")
    if lambda_d == 0.0:
        return np.empty((0, 2))
    count = rng.poisson(lambda_d * math.pi * R_c * R_c)
    if count == 0:
        return np.empty((0, 2))
    r = R_c * np.sqrt(rng.random(count))
    ang = rng.random(count) * (2.0 * math.pi)
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def select_dl_user(points: np.ndarray, mode: str, rng: np.random.Generator):
    """Pick the scheduled DL user: 'NUS' nearest to the AP, 'RUS' uniform.

    Empty input returns None (the trial scores zero DL rate).
    """
    if mode not in ("NUS", "RUS"):
        raise ValueError("mode must be 'NUS' or 'RUS'")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        return None
    if mode == "NUS":
        idx = int(np.argmin(np.einsum("ij,ij->i", pts, pts)))
    else:
        idx = int(rng.integers(pts.shape[0]))
    return (float(pts[idx, 0]), float(pts[idx, 1]))


def place_ul_user(dl_point: Point, d: float, rng: np.random.Generator):
    """Place the UL user at distance d from dl_point, direction uniform.

    Returns (ul_point, phi) where phi is measured from the AP->DL axis, so
    phi = 0 moves radially outward: dl=(r,0), phi=0 gives ul=(r+d, 0).
    """
    if d < 0.0:
        raise ValueError("d must be >= 0")
    phi = float(rng.random()) * 2.0 * math.pi
    x, y = float(dl_point[0]), float(dl_point[1])
    r = math.hypot(x, y)
    if r > 0.0:
        ux, uy = x / r, y / r
    else:
        ux, uy = 1.0, 0.0
    # rotate the outward radial unit vector by phi
    dx = math.cos(phi) * ux - math.sin(phi) * uy
    dy = math.sin(phi) * ux + math.cos(phi) * uy
    return (x + d * dx, y + d * dy), phi


def pathloss(a: Point, b: Point, alpha: float) -> float:
    """Singular power-law path gain ||a - b||^(-alpha)."""
    dist = math.hypot(a[0] - b[0], a[1] - b[1])
    if dist == 0.0:
        raise ValueError("pathloss is singular at zero distance")
    return dist ** (-alpha)


def ul_pathloss_polar(r: float, theta: float, d: float, alpha: float) -> float:
    """UL-to-AP path gain (r^2 + d^2 - 2 r d cos theta)^(-alpha/2).

    r is the scheduled user's AP distance, theta the UL direction measured
    from the DL->AP direction. theta = 0 with r = d puts the UL user on the
    AP, which is rejected as a singular configuration.
    """
    s = r * r + d * d - 2.0 * r * d * math.cos(theta)
    if s <= 0.0:
        raise ValueError("degenerate geometry: UL user at the AP")
    return s ** (-0.5 * alpha)


def sample_drop(config: NetworkConfig, mode: str, rng: np.random.Generator) -> Drop:
    """Compose one full drop: field, scheduling, UL placement.

    An empty field still places the UL user, at distance d from a uniformly
    random in-disk anchor, and flags the drop; the caller scores DL rate 0.
    """
    pts = sample_ppp(config.lambda_d, config.R_c, rng)
    sel = select_dl_user(pts, mode, rng)
    empty = sel is None
    if empty:
        rr = config.R_c * math.sqrt(float(rng.random()))
        aa = float(rng.random()) * 2.0 * math.pi
        sel = (rr * math.cos(aa), rr * math.sin(aa))
    ul, phi = place_ul_user(sel, config.d, rng)
    theta = (math.pi - phi) % (2.0 * math.pi)
    return Drop(
        dl_points=pts,
        scheduled_r=math.hypot(sel[0], sel[1]),
        scheduled_theta=theta,
        ul_point=ul,
        empty=empty,
    )


def nus_radius_from_uniform(lambda_d: float, R_c: float, u):
    """Map uniform(0,1] variates to nearest-user radii by inverse CDF.

    The nearest-user distance satisfies P(r > rho) = exp(-lambda_d pi rho^2);
    values beyond R_c signal an empty disk. Vectorized; used by the bulk
    Monte Carlo path and distribution-tested against the object path.
    """
    u = np.asarray(u, dtype=float)
    if lambda_d <= 0.0:
        return np.full_like(u, np.inf)
    return np.sqrt(-np.log(u) / (lambda_d * math.pi))
