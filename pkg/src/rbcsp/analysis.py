"""Closed-form quantities for Model RB/RD: phase-transition thresholds and
their side conditions, solution-count moments, distance profiles of the
solution set, 3-SAT comparison exponents, and flawed-tuple probabilities.

All moment and profile computations run in natural-log space with
log-sum-exp; the raw counts overflow float64 already at toy sizes.  Profiles
are exact finite-n expressions over integer similarity S (binomials via
lgamma), not the asymptotic per-(n ln n) exponents.  The effective tightness
is p for Model RD and q/d^k for Model RB, with q the rounded integer drawn
by the generator, so formulas agree with what instances actually contain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .core import CspParams, ModelKind, ParameterError, SizeError, derive_sizes

__all__ = [
    "ThresholdReport",
    "ProfilePoint",
    "r_threshold",
    "p_threshold",
    "check_conditions",
    "threshold_report",
    "effective_tightness",
    "first_moment_log",
    "pair_sat_prob_log",
    "forced_expected_count_log",
    "distance_profile",
    "threesat_profile_exponent",
    "maximize_exponent",
    "flawed_prob_rd",
    "flawed_prob_rb",
]


@dataclass(frozen=True)
class Condition:
    name: str
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class ThresholdReport:
    r_cr: float
    p_cr: float
    conditions: tuple[Condition, ...]


@dataclass(frozen=True)
class ProfilePoint:
    """One similarity class: S agreeing variables, distance d_t = 1 - S/n,
    and ln of the expected number of solutions in the class."""

    S: int
    d_t: float
    log_expected: float


def r_threshold(alpha: float, p: float) -> float:
    """Critical constraint density r_cr = -alpha / ln(1 - p)."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must be in (0, 1) for the r-transition, got {p}")
    return -alpha / math.log1p(-p)


def p_threshold(alpha: float, r: float) -> float:
    """Critical tightness p_cr = 1 - exp(-alpha / r)."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if not r > 0:
        raise ParameterError(f"r must be positive, got {r}")
    return -math.expm1(-alpha / r)


def check_conditions(params: CspParams) -> tuple[Condition, ...]:
    """Side conditions under which the thresholds are exact, with numeric
    margins (value - bound): alpha > 1/k; k >= 1/(1-p) for the r-transition;
    k e^(-alpha/r) >= 1 for the p-transition.
    """
    k, alpha, r, p = params.k, params.alpha, params.r, params.p
    margin_a = alpha - 1.0 / k
    margin_k = (k - 1.0 / (1.0 - p)) if p < 1.0 else -math.inf
    margin_e = k * math.exp(-alpha / r) - 1.0
    return (
        Condition("alpha_gt_1_over_k", margin_a > 0, margin_a),
        Condition("k_ge_1_over_1mp", margin_k >= 0, margin_k),
        Condition("k_exp_ge_1", margin_e >= 0, margin_e),
    )


def threshold_report(params: CspParams) -> ThresholdReport:
    return ThresholdReport(
        r_cr=r_threshold(params.alpha, params.p),
        p_cr=p_threshold(params.alpha, params.r),
        conditions=check_conditions(params),
    )


def effective_tightness(params: CspParams) -> float:
    """p for RD; the realized q/d^k for RB (q is an integer rounding of p d^k)."""
    if params.model is ModelKind.RD:
        return params.p
    sizes = derive_sizes(params)
    return sizes.q / sizes.tuple_space


def first_moment_log(params: CspParams) -> float:
    """ln E[N] = n ln d + m ln(1 - p_eff); -inf when p_eff = 1."""
    sizes = derive_sizes(params)
    p_eff = effective_tightness(params)
    if p_eff >= 1.0:
        return -math.inf
    return params.n * math.log(sizes.d) + sizes.m * math.log1p(-p_eff)


def pair_sat_prob_log(params: CspParams, S: int) -> float:
    """ln Pr[one random constraint is satisfied by both assignments of a
    pair agreeing on S variables].

    With sigma = C(S,k)/C(n,k) the probability that the scope falls inside
    the agreeing variables (same induced tuple), the per-constraint value is

        RD:  (1-p) sigma + (1-p)^2 (1-sigma)
        RB:  (1-q/N) sigma + (1-sigma) (N-q)(N-q-1) / (N(N-1)),  N = d^k

    the RB off-sigma factor being the without-repetition probability that
    two distinct tuples both avoid the q-subset.
    """
    n, k = params.n, params.k
    if not 0 <= S <= n:
        raise ParameterError(f"similarity S must be in [0, {n}], got {S}")
    sizes = derive_sizes(params)
    sigma = math.comb(S, k) / math.comb(n, k)
    if params.model is ModelKind.RD:
        c1 = 1.0 - params.p
        both = c1 * c1
    else:
        N, q = sizes.tuple_space, sizes.q
        c1 = (N - q) / N
        both = (N - q) * (N - q - 1) / (N * (N - 1))
    value = c1 * sigma + both * (1.0 - sigma)
    if value <= 0.0:
        return -math.inf
    return math.log(value)


def _log_binomial(n: int, s: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(s + 1) - math.lgamma(n - s + 1)


def _logsumexp(values) -> float:
    values = [v for v in values if v != -math.inf]
    if not values:
        return -math.inf
    top = max(values)
    if top == math.inf:
        return math.inf
    return top + math.log(sum(math.exp(v - top) for v in values))


def forced_expected_count_log(params: CspParams) -> float:
    """ln of the expected solution count of forced instances,
    ln E_f[N] = ln E[N^2] - ln E[N].

    E[N^2] sums ordered assignment pairs by similarity class:
    ln E[N^2] = LSE_S [ ln C(n,S) + (n-S) ln(d-1) + n ln d
                        + m * pair_sat_prob_log(S) ].
    """
    sizes = derive_sizes(params)
    n, d, m = params.n, sizes.d, sizes.m
    terms = (
        _log_binomial(n, S)
        + (n - S) * math.log(d - 1)
        + n * math.log(d)
        + m * pair_sat_prob_log(params, S)
        for S in range(n + 1)
    )
    return _logsumexp(terms) - first_moment_log(params)


def distance_profile(params: CspParams, forced: bool) -> list[ProfilePoint]:
    """Expected solution counts per similarity class around a reference
    assignment (the hidden one, for forced instances).

    random:  ln C(n,S) + (n-S) ln(d-1) + m ln(1-p_eff)
    forced:  ln C(n,S) + (n-S) ln(d-1) + m [pair_sat_prob_log(S) - ln(1-p_eff)]

    Log-sum-exp over S recovers ln E[N] (random) and ln E_f[N] (forced).
    """
    sizes = derive_sizes(params)
    n, d, m = params.n, sizes.d, sizes.m
    p_eff = effective_tightness(params)
    log_c1 = math.log1p(-p_eff) if p_eff < 1.0 else -math.inf
    points = []
    for S in range(n + 1):
        base = _log_binomial(n, S) + (n - S) * math.log(d - 1)
        if forced:
            value = base + m * (pair_sat_prob_log(params, S) - log_c1)
        else:
            value = base + m * log_c1
        points.append(ProfilePoint(S=S, d_t=1.0 - S / n, log_expected=value))
    return points


def threesat_profile_exponent(d_t: float, r: float, forced: bool) -> float:
    """Per-variable growth exponent of the random 3-SAT solution-distance
    profile at clause ratio r.

    forced:  H(d_t) + r ln((6 + (1-d_t)^3) / 7)
    random:  H(d_t) + r ln(7/8)

    with H the natural-log binary entropy; H vanishes at d_t in {0, 1}.
    """
    if not 0.0 <= d_t <= 1.0:
        raise ParameterError(f"d_t must be in [0, 1], got {d_t}")
    if not r > 0:
        raise ParameterError(f"r must be positive, got {r}")
    entropy = 0.0
    if 0.0 < d_t < 1.0:
        entropy = -d_t * math.log(d_t) - (1.0 - d_t) * math.log(1.0 - d_t)
    if forced:
        return entropy + r * math.log((6.0 + (1.0 - d_t) ** 3) / 7.0)
    return entropy + r * math.log(7.0 / 8.0)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_exponent(f, grid_step: float = 1e-3, tol: float = 1e-6) -> tuple[float, float]:
    """Argmax of f on [0, 1]: coarse grid scan, then golden-section search
    on the bracketing cell pair down to `tol`."""
    steps = int(round(1.0 / grid_step))
    best_i, best_v = 0, -math.inf
    for i in range(steps + 1):
        v = f(i * grid_step)
        if v > best_v:
            best_i, best_v = i, v
    lo = max(0.0, (best_i - 1) * grid_step)
    hi = min(1.0, (best_i + 1) * grid_step)
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    arg = 0.5 * (a + b)
    return arg, f(arg)


def flawed_prob_rd(d: int, p: float, i: int) -> float:
    """Probability that i RD constraints around a variable flaw all d of its
    values: [1 - (1-p)^i]^d."""
    if d < 1 or i < 0 or not 0.0 <= p <= 1.0:
        raise ParameterError(f"invalid flawed-probability inputs d={d}, p={p}, i={i}")
    return (-math.expm1(i * math.log1p(-p))) ** d if p < 1.0 else float(i > 0)


def flawed_prob_rb(d: int, k: int, q: int, i: int) -> float:
    """Inclusion-exclusion probability that i RB constraints flaw all d
    values of a variable:

        1 + sum_{j=1..d} (-1)^j C(d,j) [ C(N-j, q) / C(N, q) ]^i,   N = d^k.

    The alternating sum cancels heavily, so terms are accumulated with
    60-digit mpmath arithmetic and the result clamped to [0, 1].  Capped at
    d <= 64, past which even extended precision is not trustworthy here.
    """
    if d < 1 or k < 1 or i < 0:
        raise ParameterError(f"invalid flawed-probability inputs d={d}, k={k}, i={i}")
    N = d ** k
    if not 0 <= q <= N:
        raise ParameterError(f"q must be in [0, {N}], got {q}")
    if d > 64:
        raise SizeError(f"exact inclusion-exclusion capped at d <= 64, got d = {d}")
    if q == 0 or i == 0:
        return 0.0
    with mpmath.workdps(60):
        total = mpmath.mpf(1)
        log_cnq = mpmath.log(mpmath.binomial(N, q))
        for j in range(1, d + 1):
            if q > N - j:
                ratio_pow = mpmath.mpf(0)
            else:
                log_ratio = mpmath.log(mpmath.binomial(N - j, q)) - log_cnq
                ratio_pow = mpmath.e ** (i * log_ratio)
            term = mpmath.binomial(d, j) * ratio_pow
            total += term if j % 2 == 0 else -term
        value = float(total)
    return min(1.0, max(0.0, value))
