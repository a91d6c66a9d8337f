"""Closed-form moments: ensemble baselines, the measurement-doped coefficient
blocks, delta-method ratio expansions, and the repeated-measurement
(dephasing) formulas.

Assemblies run in extended-precision floats (x87 longdouble); everything
rational is cross-checked against exact small-d oracles in the tests.
Conventions: d = 2^n is the total dimension, d_a * d_b = d, and k counts
measurement layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import weingarten as wg
from .fold import fgh

LD = np.longdouble


@dataclass(frozen=True)
class PurityStats:
    mean: float
    variance: float
    regime_label: str

    def __post_init__(self):
        if self.variance < -1e-12:
            raise ValueError("negative variance")


@dataclass(frozen=True)
class NonNormalizedBlocks:
    """Moments of the unnormalized doped output state.

    avg_nk is the mean collapse weight after k measurements; avg_pur_hat the
    mean unnormalized subsystem purity; the deltas are their variances and
    cov their covariance, all over the Clifford ensemble.
    """

    d: int
    d_a: int
    k: int
    theta: float
    avg_nk: float
    avg_pur_hat: float
    delta_nk: float
    delta_pur_hat: float
    cov_pur_nk: float


# ---------------------------------------------------------------------------
# Ensemble baselines (no measurements)
# ---------------------------------------------------------------------------

def haar_stats(d: int, d_a: int) -> PurityStats:
    """Mean and variance of the subsystem purity over Haar states."""
    d_b, rem = divmod(d, d_a)
    if rem:
        raise ValueError("d_a must divide d")
    if d_a == 1:
        return PurityStats(1.0, 0.0, "haar")
    mean = Fraction(d_a + d_b, d_a * d_b + 1)
    var = Fraction(2 * (d * d - d_a * d_a) * (d_a * d_a - 1),
                   d_a * d_a * (d + 1) ** 2 * (d + 2) * (d + 3))
    return PurityStats(float(mean), float(var), "haar")


def clifford_stats(d: int, d_a: int) -> PurityStats:
    """Same mean as Haar (third moments agree); variance one power of d larger."""
    d_b, rem = divmod(d, d_a)
    if rem:
        raise ValueError("d_a must divide d")
    if d_a == 1:
        return PurityStats(1.0, 0.0, "clifford")
    mean = Fraction(d_a + d_b, d_a * d_b + 1)
    var = Fraction((d_a * d_a - 1) * (d * d - d_a * d_a),
                   (d + 1) ** 2 * (d + 2) * d_a * d_a)
    return PurityStats(float(mean), float(var), "clifford")


# ---------------------------------------------------------------------------
# One-shot doping: coefficient blocks on span{Q Pi_4, Pi_4}
# ---------------------------------------------------------------------------

def theta_q_moment(theta: float) -> float:
    """tr(P^{x4} Q) for a projector of the theta basis: (7 + cos 4 theta)/16."""
    return float((7.0 + np.cos(LD(4.0) * LD(theta))) / 16.0)


def collapse_ratio(d: int) -> Fraction:
    """Mean collapse weight per measurement, (d+2)/(4(d+1))."""
    return Fraction(d + 2, 4 * (d + 1))


def ijkl_coefficients(d: int, theta: float) -> tuple[float, float, float, float]:
    """Single-step transfer coefficients of the four-copy blocks.

    Built from the projector traces; equal to the direct trigonometric
    closed forms (the tests pin both routes against each other):
      I = (7+c4)(7d^2+21d-64+d(d+3)c4)/(1024(d^2-1)),   c4 = cos 4 theta
      J = (3d(d-1)+d(d+3)c4)/(64(d^2-1))
      K = (125+4c4-cos 8 theta)/(512(d^2-1))
      L = ((d+7)(d-1)-c4)/(16(d^2-1))
    """
    q = LD(theta_q_moment(theta))
    half = d // 2
    d_plus = LD(float(wg.tr_q_pi4(d)))
    d_minus = LD(float(wg.tr_pi4(d) - wg.tr_q_pi4(d)))
    d_plus_half = LD(float(wg.tr_q_pi4(half)))
    d_4_half = LD(float(wg.tr_pi4(half)))
    i_val = d_plus_half * q * (q / d_plus - (1 - q) / d_minus)
    j_val = q * d_plus_half / d_plus - (d_4_half - q * d_plus_half) / d_minus
    k_val = (d_plus_half / d_minus) * q * (1 - q)
    l_val = (d_4_half - q * d_plus_half) / d_minus
    return float(i_val), float(j_val), float(k_val), float(l_val)


def nonnormalized_blocks(d: int, d_a: int, k: int, theta: float) -> NonNormalizedBlocks:
    """All second-moment blocks of the unnormalized doped state after k layers."""
    d_b, rem = divmod(d, d_a)
    if rem:
        raise ValueError("d_a must divide d")
    if k < 0:
        raise ValueError("k must be nonnegative")
    tr = wg.pi4_traces(d, d_a, d_b)
    c0 = LD(6.0) / (LD(d + 1) * LD(d + 2) * LD(d + 4))
    b0 = LD(24.0) / (LD(d) * LD(d + 1) * LD(d + 2) * LD(d + 4))
    i_val, j_val, k_val, l_val = (LD(x) for x in ijkl_coefficients(d, theta))
    ck, bk = c0, b0
    for _ in range(k):
        ck, bk = i_val * ck + j_val * bk, k_val * ck + l_val * bk
    nu = LD(float(collapse_ratio(d)))
    pur_factor = LD(d_a + d_b) / LD(d_a * d_b + 1)
    avg_nk = nu**k
    avg_pur = avg_nk * pur_factor
    m2_n = LD(float(tr["D_plus"])) * ck + LD(float(tr["D_4"])) * bk
    m2_pur = LD(float(tr["D_plus"])) * ck + LD(float(tr["D_Pur"])) * bk
    m_pur_n = LD(float(tr["D_plus_12"])) * ck + LD(float(tr["D_4_12"])) * bk
    return NonNormalizedBlocks(
        d=d,
        d_a=d_a,
        k=k,
        theta=theta,
        avg_nk=float(avg_nk),
        avg_pur_hat=float(avg_pur),
        delta_nk=float(m2_n - avg_nk**2),
        delta_pur_hat=float(m2_pur - avg_pur**2),
        cov_pur_nk=float(m_pur_n - avg_pur * avg_nk),
    )


# ---------------------------------------------------------------------------
# Delta-method ratio expansions
# ---------------------------------------------------------------------------

def ratio_mean(mean_x: float, mean_y: float, cov_xy: float) -> float:
    """First-order expansion of <x/y>: mx/my - cov/my^2."""
    return float(mean_x / mean_y - cov_xy / mean_y**2)


def ratio_variance(
    mean_x: float, mean_y: float, var_x: float, var_y: float, cov_xy: float
) -> float:
    """First-order expansion of Var(x/y), including the 3 eps^2 term
    from the mean-shift eps = -cov/my^2."""
    mx, my = LD(mean_x), LD(mean_y)
    eps = LD(cov_xy) / my**2
    val = (
        LD(var_x) / my**2
        + LD(var_y) * mx**2 / my**4
        - 2 * LD(cov_xy) * mx / my**3
        + 3 * eps**2
    )
    return float(val)


# ---------------------------------------------------------------------------
# One-shot doped circuit predictions
# ---------------------------------------------------------------------------

def rmdc_mean_correction(d: int, k: int, theta: float) -> float:
    """The explicit O(k d^-3/2) mean correction for balanced bipartitions.

    Vanishes identically at the stabilizer angles theta in {0, pi/2}: there
    the doped ensemble is uniform over stabilizer states for every k and the
    mean stays exactly at the design value.
    """
    if k == 0:
        return 0.0
    if min(abs(theta), abs(theta - math.pi / 2)) < 1e-12:
        return 0.0
    t = LD(theta)
    c4, c8 = np.cos(4 * t), np.cos(8 * t)
    csc2 = 1.0 / np.sin(2 * t) ** 2
    beta2k = ((7 + c4) / 8) ** (2 * k)
    denom = 15 + c4
    bracket = (
        (29 * k + 24 - 24 * beta2k) / denom
        - 4 * c4 * (7 * k - 2 * (1 - beta2k)) / denom
        - k * c8 / denom
    )
    return float(2 * csc2 * bracket / LD(d) ** LD(1.5))


def rmdc_average_purity(d: int, k: int, theta: float) -> float:
    """Mean doped-circuit purity at d_a = d_b = sqrt(d): the ratio of means
    2 sqrt(d)/(d+1) plus the explicit correction."""
    base = 2.0 * math.sqrt(d) / (d + 1)
    return base + rmdc_mean_correction(d, k, theta)


def rmdc_fluctuation(d: int, d_a: int, k: int, theta: float) -> float:
    """Ensemble purity variance of the doped circuit, assembled exactly from
    the unnormalized blocks through the ratio-variance expansion."""
    blocks = nonnormalized_blocks(d, d_a, k, theta)
    return ratio_variance(
        blocks.avg_pur_hat,
        blocks.avg_nk,
        blocks.delta_pur_hat,
        blocks.delta_nk,
        blocks.cov_pur_nk,
    )


def small_subsystem_stats(d: int, d_a: int, k: int, theta: float) -> PurityStats:
    """Doped-circuit purity statistics for general (typically small) d_a."""
    if d_a == 1:
        # one-dimensional marginals are always exactly pure
        return PurityStats(1.0, 0.0, "rmdc")
    blocks = nonnormalized_blocks(d, d_a, k, theta)
    mean = ratio_mean(blocks.avg_pur_hat, blocks.avg_nk, blocks.cov_pur_nk)
    return PurityStats(mean, rmdc_fluctuation(d, d_a, k, theta), "rmdc")


# ---------------------------------------------------------------------------
# Repeated measurements (dephasing)
# ---------------------------------------------------------------------------

def dephasing_average_purity(d: int, k: int) -> float:
    """Mean purity after k dephasing layers at d_a = d_b = sqrt(d):
    (h^k (d-1) + (d+1)) / (sqrt(d) (d+1)), independent of the basis angle.

    The decay rate is h = (d^2-2)/(2(d^2-1)), the subleading eigenvalue of
    the order-2 transfer matrix.
    """
    h = LD(float(fgh(d)[2]))
    return float((h**k * (d - 1) + (d + 1)) / (np.sqrt(LD(d)) * (d + 1)))


def dephasing_fluctuation_pi2(d: int, k: int) -> float:
    """Purity variance after k dephasing layers in the theta = pi/2 basis:

        (d-1)(d-4)/(d(d+1)(d+2)) g^k + (d-1)/(d(d+1)) h^k
        - (d-1)^2/(d(d+1)^2) h^{2k}

    Collapses to the Clifford baseline at k = 0 and decays to zero.
    """
    _, g, h = (LD(float(v)) for v in fgh(d))
    val = (
        (d - 1) * (d - 4) * g**k / (d * (d + 1) * (d + 2))
        + (d - 1) * h**k / (d * (d + 1))
        - (d - 1) ** 2 * h ** (2 * k) / (d * (d + 1) ** 2)
    )
    return float(val)


def scaling_bounds(d: int, alpha: float) -> dict[str, float]:
    """Error exponents for k = alpha * n dephasing layers.

    The mean approaches d^{-1/2} like f^k = d^{alpha log2 f} and the
    pi/2 variance is bounded by h^k = d^{alpha log2 h}; both exponents are
    negative for d >= 4.  Small d where f <= 0 is out of domain.
    """
    f, _, h = (float(v) for v in fgh(d))
    if f <= 0:
        raise ValueError(f"decay rate nonpositive at d={d}; bounds need d >= 4")
    return {
        "purity_error_exp": alpha * math.log2(f),
        "fluct_exp": alpha * math.log2(h),
    }
