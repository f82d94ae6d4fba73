"""
Closed-Form Runtime Bounds

Transition-probability bounds of the per-level chain, the upper bounds for the
(mu+1) GA (mu >= 3) and the (2+1) GA, the lower bound for the greedy (2+1)_S GA
via the fitness-level method for lower bounds, the takeover allowance and the
mutation constant minimising the leading coefficient.

All logarithms are natural. Asymptotic O(1/n) surcharges are instantiated either
as zero ("leading-order") or as kappa/n ("conservative"); every report names the mode.
"""

import math
from typing import List, Optional

import numpy as np

from ..core.config import BoundMode, settings
from ..core.errors import ViabilityError, require
from ..db.schemas import (
    BoundReport,
    FitnessLevelBounds,
    LevelInstantiation,
    LowerBoundParams,
    MarkovParams,
    OptimalMutation,
)

ROW_SUM_TOLERANCE = 1e-12
OPTIMAL_C_SEARCH_RANGE = (1e-6, 4.0)


def _mode(mode: Optional[BoundMode]) -> BoundMode:
    return mode or settings.BOUND_MODE


def _surcharge(n: int, mode: BoundMode, kappa: Optional[float] = None) -> float:
    if mode == "conservative":
        return (settings.KAPPA if kappa is None else kappa) / n
    return 0.0


def leading_coefficient(c: float, y: Optional[float] = None) -> float:
    """3e^c / (c(3+y)); y defaults to c (the upper-bound coefficient)."""
    y = c if y is None else y
    return 3.0 * math.exp(c) / (c * (3.0 + y))


# --- Transition probabilities of the level-i chain ---


def _transition_bounds(mu: int, c: float, n: int, i: int, p_r: float) -> MarkovParams:
    q = 1.0 - c / n
    p_d = (mu / (mu + 1)) * (i * (n - i) * c * c / (n * n)) * q ** (n - 2)
    p_c = ((mu - 1) / (2.0 * mu * mu)) * q**n
    p_m = (c * (n - i) / n) * q ** (n - 1)
    # keep each row a sub-distribution when the surcharge is large relative to n
    p_r = min(p_r, 1.0 - p_c)
    p_d = min(p_d, 1.0 - p_m)
    return MarkovParams(p_m=p_m, p_d=p_d, p_c=p_c, p_r=p_r)


def transition_bounds_mu3(
    mu: int, c: float, n: int, i: int, mode: Optional[BoundMode] = None, kappa: Optional[float] = None
) -> MarkovParams:
    """Lower bounds on p_d, p_c, p_m and an upper bound on p_r for mu >= 3."""
    require(mu >= 3, "transition_bounds_mu3 needs mu >= 3; use transition_bounds_mu2 for mu = 2")
    require(0 <= i < n, f"level must satisfy 0 <= i < n (i={i}, n={n})")
    require(0 < c <= n, "mutation constant must satisfy 0 < c <= n")
    p_r = (mu - 1) * (2 * mu - 1) / (2.0 * math.exp(c) * mu * mu * (mu + 1))
    return _transition_bounds(mu, c, n, i, p_r + _surcharge(n, _mode(mode), kappa))


def transition_bounds_mu2(
    c: float, n: int, i: int, mode: Optional[BoundMode] = None, kappa: Optional[float] = None
) -> MarkovParams:
    """As transition_bounds_mu3 at mu = 2, with the relapse bound 5/(24 e^c)."""
    require(0 <= i < n, f"level must satisfy 0 <= i < n (i={i}, n={n})")
    require(0 < c <= n, "mutation constant must satisfy 0 < c <= n")
    p_r = 5.0 / (24.0 * math.exp(c))
    return _transition_bounds(2, c, n, i, p_r + _surcharge(n, _mode(mode), kappa))


# --- Upper bounds ---


def upper_bound_theorem2(mu: int, c: float, n: int, per_level: bool = False, mode: Optional[BoundMode] = None) -> BoundReport:
    require(mu >= 3, "the (mu+1) GA upper bound needs mu >= 3; use upper_bound_2plus1 for mu = 2")
    require(c > 0 and n >= 2, "the upper bound needs c > 0 and n >= 2")
    coefficient = leading_coefficient(c)
    levels = None
    if per_level:
        factor = math.exp(c) * n / c * 3.0 / (3.0 + c)
        levels = (factor / (n - np.arange(n))).tolist()
    return BoundReport(
        kind="upper_theorem2",
        mu=mu,
        c=c,
        n=n,
        mode=_mode(mode),
        leading_term_value=coefficient * n * math.log(n),
        coefficient=coefficient,
        per_level_values=levels,
    )


def upper_bound_2plus1(c: float, n: int, mode: Optional[BoundMode] = None) -> BoundReport:
    require(c > 0 and n >= 2, "the upper bound needs c > 0 and n >= 2")
    coefficient = 4.0 * math.exp(c) / (c * (c + 4.0))
    return BoundReport(
        kind="upper_2plus1",
        mu=2,
        c=c,
        n=n,
        mode=_mode(mode),
        leading_term_value=coefficient * n * math.log(n),
        coefficient=coefficient,
    )


def takeover_bound(mu: int, c: float) -> float:
    """Expected generations until the whole population sits on the best level: 2(e^c+1) mu H_{mu-1}."""
    require(mu >= 1, "takeover_bound needs mu >= 1")
    harmonic = sum(1.0 / k for k in range(1, mu))
    return 2.0 * (math.exp(c) + 1.0) * mu * harmonic


def takeover_report(mu: int, c: float) -> BoundReport:
    require(mu >= 2, "the takeover bound needs mu >= 2")
    return BoundReport(kind="takeover_lemma3", mu=mu, c=c, mode=_mode(None), leading_term_value=takeover_bound(mu, c))


def optimal_mutation_constant(tol: float = 1e-9) -> float:
    """Ternary search for the minimiser of e^c / (c(3+c)) on (0, 4]."""

    def objective(c: float) -> float:
        return math.exp(c) / (c * (3.0 + c))

    lo, hi = OPTIMAL_C_SEARCH_RANGE
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if objective(m1) < objective(m2):
            hi = m2
        else:
            lo = m1
    return (lo + hi) / 2.0


def optimal_mutation() -> OptimalMutation:
    c = optimal_mutation_constant()
    return OptimalMutation(c=c, coefficient=leading_coefficient(c))


# --- Lower bound ---


def mutation_y(c: float, n: int) -> float:
    """y = max over 1 <= k <= n of c^k / (k!)^2.

    Consecutive terms have ratio c/(k+1)^2, so once it drops below 1 every later term is smaller.
    """
    require(c > 0 and n >= 1, "mutation_y needs c > 0 and n >= 1")
    term = best = c
    k = 1
    while k < n:
        ratio = c / (k + 1) ** 2
        if ratio < 1.0:
            break
        term *= ratio
        k += 1
        best = max(best, term)
    return best


def lower_bound_params(c: float, n: int) -> LowerBoundParams:
    require(c > 0 and n >= 3, "the lower bound needs c > 0 and n >= 3")
    p = c / n
    log_n = math.log(n)
    ell = math.ceil(n - min(n / log_n, n / (p * p * log_n)))
    return LowerBoundParams(c=c, n=n, y=mutation_y(c, n), ell=ell)


def theorem5_instantiation(params: LowerBoundParams, i: int, k: int) -> LevelInstantiation:
    """Level-i jump probabilities and fitness-level parameters near the optimum.

    The O(1/log n) term of u_i' is taken as 0 (leading order).
    """
    n, c = params.n, params.c
    require(i >= params.ell, f"level {i} lies below the start level {params.ell}")
    require(1 <= k <= n - i, f"jump length must satisfy 1 <= k <= n - i (k={k})")
    p = c / n
    q2 = (1.0 - p) ** 2
    base = p * (n - i) / q2
    log_common = n * math.log1p(-p) + k * math.log(base)
    p_mk = math.exp(log_common) * (1.0 + 0.6 * i * (n - i) * p * p / q2)
    # (np)^k / (k!)^2 in log space; k! overflows floats beyond k = 170
    p_dk = math.exp(log_common + k * math.log(n * p) - 2.0 * math.lgamma(k + 1))
    u_prime = math.exp(-c) * (n - i) * p / q2 * (3.0 + params.y) / 3.0
    gamma_prime = ((3.0 + 12.0 * c) * p * (n - i) / q2) ** (k - 1)
    return LevelInstantiation(u_i_prime=u_prime, gamma_prime=gamma_prime, p_mk=p_mk, p_dk=p_dk)


def _check_fitness_levels(flb: FitnessLevelBounds) -> None:
    m = flb.m
    if len(flb.gamma) != m - 1 or len(flb.start_distribution) != m - 1:
        raise ViabilityError(f"expected {m - 1} gamma rows and start probabilities")
    if any(u <= 0 for u in flb.u):
        raise ViabilityError("every u_i must be positive")
    if any(p < 0 for p in flb.start_distribution) or sum(flb.start_distribution) > 1 + ROW_SUM_TOLERANCE:
        raise ViabilityError("start_distribution must be a sub-distribution")
    for i, row in enumerate(flb.gamma, start=1):
        row = np.asarray(row, dtype=float)
        if row.size != m - i:
            raise ViabilityError(f"gamma row {i} must cover levels {i + 1}..{m}")
        if abs(row.sum() - 1.0) > ROW_SUM_TOLERANCE:
            raise ViabilityError(f"gamma row {i} sums to {row.sum()!r}, not 1")
        tails = np.cumsum(row[::-1])[::-1]
        if np.any(row < flb.chi * tails - ROW_SUM_TOLERANCE):
            raise ViabilityError(f"gamma row {i} violates gamma_ij >= chi * sum_(k>=j) gamma_ik")


def fitness_level_lower_bound(flb: FitnessLevelBounds) -> float:
    """sum_i Pr(start in A_i) (1/u_i + chi sum_{j=i+1}^{m-1} 1/u_j)."""
    _check_fitness_levels(flb)
    inverse = 1.0 / np.asarray(flb.u, dtype=float)
    # later[i] = sum of 1/u_j over levels after i
    later = np.concatenate([np.cumsum(inverse[::-1])[::-1][1:], [0.0]])
    start = np.asarray(flb.start_distribution, dtype=float)
    return float(np.sum(start * (inverse + flb.chi * later)))


def lower_bound_levels(c: float, n: int) -> FitnessLevelBounds:
    """Normalised fitness-level parameters for levels ell..n, all start mass at ell."""
    params = lower_bound_params(c, n)
    ell = params.ell
    u: List[float] = []
    gamma: List[List[float]] = []
    chi = 1.0
    p = c / n
    for i in range(ell, n):
        # gamma'_{i,i+k} = r^(k-1), normalised in log space
        log_r = math.log((3.0 + 12.0 * c) * p * (n - i) / (1.0 - p) ** 2)
        log_raw = np.arange(n - i) * log_r
        peak = log_raw.max()
        weights = np.exp(log_raw - peak)
        total = weights.sum()
        u.append(theorem5_instantiation(params, i, 1).u_i_prime * total * math.exp(peak))
        row = weights / total
        gamma.append(row.tolist())
        tails = np.cumsum(row[::-1])[::-1]
        chi = min(chi, float(np.min(row / tails)))
    start = [1.0] + [0.0] * (len(u) - 1)
    return FitnessLevelBounds(u=u, gamma=gamma, chi=max(0.0, min(1.0, chi)), start_distribution=start)


def lower_bound_theorem5(c: float, n: int, per_level: bool = False, mode: Optional[BoundMode] = None) -> BoundReport:
    params = lower_bound_params(c, n)
    coefficient = leading_coefficient(c, params.y)
    levels = finite = None
    if per_level:
        flb = lower_bound_levels(c, n)
        levels = (1.0 / np.asarray(flb.u)).tolist()
        finite = fitness_level_lower_bound(flb)
    return BoundReport(
        kind="lower_theorem5",
        c=c,
        n=n,
        mode=_mode(mode),
        leading_term_value=coefficient * n * math.log(n),
        coefficient=coefficient,
        per_level_values=levels,
        finite_n_value=finite,
        subtractive_term="O(n log log n)",
    )
