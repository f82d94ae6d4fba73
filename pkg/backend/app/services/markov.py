"""
Fitness-Level Markov Chain

Closed-form absorbing times of the three-state chain of one fitness level
(S1: no diversity, S2: diversity, S3: next level reached), the dominance
premises that let one chain bound another, and a Monte-Carlo oracle.
"""

import math
from typing import List, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import ChainBudgetExceeded, InfiniteExpectationError, require
from ..db.schemas import AbsorbingTimes, ChainSimulation, ChainState, MarkovParams

# oracle agreement tolerance, in standard errors
AGREEMENT_STDERRS = 4.0


def _denominator(params: MarkovParams) -> float:
    return params.p_c * params.p_d + params.p_c * params.p_m + params.p_m * params.p_r


def absorbing_times(params: MarkovParams) -> AbsorbingTimes:
    """Expected steps to absorption starting from S1 (E_T1) and from S2 (E_T2)."""
    den = _denominator(params)
    if den <= 0:
        raise InfiniteExpectationError(
            "p_c*p_d + p_c*p_m + p_m*p_r is zero: the absorbing time has no finite expectation"
        )
    e_t1 = (params.p_c + params.p_r + params.p_d) / den
    e_t2 = (params.p_m + params.p_r + params.p_d) / den
    return AbsorbingTimes(E_T1=e_t1, E_T2=e_t2)


def dominance_check(m: MarkovParams, m_prime: MarkovParams) -> bool:
    """True iff M' is a pessimistic version of M, so E_T1(M') bounds M's absorbing time."""
    return (
        m.p_m < m.p_c
        and m_prime.p_d <= m.p_d
        and m_prime.p_r >= m.p_r
        and m_prime.p_c <= m.p_c
        and m_prime.p_m <= m.p_m
    )


def dominance_final_bound(m_prime: MarkovParams) -> float:
    """(p_c'+p_r')/(p_c'p_d'+p_c'p_m'+p_m'p_r') + 1/p_c', which is at least E_T1(M')."""
    den = _denominator(m_prime)
    if den <= 0 or m_prime.p_c <= 0:
        raise InfiniteExpectationError("the dominating chain has no finite absorbing time")
    return (m_prime.p_c + m_prime.p_r) / den + 1.0 / m_prime.p_c


def _absorbs_from(params: MarkovParams, start: ChainState) -> bool:
    if start == ChainState.S3:
        return True
    if start == ChainState.S1:
        return params.p_m > 0 or (params.p_d > 0 and params.p_c > 0)
    return params.p_c > 0 or (params.p_r > 0 and params.p_m > 0)


def simulate_chain(
    params: MarkovParams,
    start: ChainState,
    rng: np.random.Generator,
    episodes: int,
    step_cap: Optional[int] = None,
) -> Tuple[float, float]:
    """Sample mean and standard error of the absorption time over independent episodes.

    Episodes advance together: each round draws a geometric sojourn for every
    active episode in its current state and then where it leaves to.
    """
    require(episodes >= 1, "simulate_chain needs at least one episode")
    start = ChainState(start)
    step_cap = settings.CHAIN_STEP_CAP if step_cap is None else step_cap
    if start == ChainState.S3:
        return 0.0, 0.0
    if not _absorbs_from(params, start):
        raise ChainBudgetExceeded(f"the chain started in {start.name} never reaches S3")

    leave = {ChainState.S1: params.p_m + params.p_d, ChainState.S2: params.p_c + params.p_r}
    absorb_share = {
        ChainState.S1: params.p_m / leave[ChainState.S1] if leave[ChainState.S1] > 0 else 0.0,
        ChainState.S2: params.p_c / leave[ChainState.S2] if leave[ChainState.S2] > 0 else 0.0,
    }
    other = {ChainState.S1: int(ChainState.S2), ChainState.S2: int(ChainState.S1)}

    times = np.zeros(episodes, dtype=np.int64)
    state = np.full(episodes, int(start), dtype=np.int8)
    active = np.arange(episodes)
    while active.size:
        for s in (ChainState.S1, ChainState.S2):
            idx = active[state[active] == int(s)]
            if idx.size == 0:
                continue
            if leave[s] <= 0:
                raise ChainBudgetExceeded(f"an episode is trapped in {s.name}")
            times[idx] += rng.geometric(leave[s], size=idx.size)
            absorbed = rng.random(idx.size) < absorb_share[s]
            state[idx[absorbed]] = int(ChainState.S3)
            state[idx[~absorbed]] = other[s]
        if times.max() > step_cap:
            raise ChainBudgetExceeded(f"an episode exceeded {step_cap} steps; the chain is near-reducible")
        active = active[state[active] != int(ChainState.S3)]

    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
    return mean, stderr


def oracle_check(params: MarkovParams, episodes: int, rng: np.random.Generator) -> List[ChainSimulation]:
    """Compare both closed-form absorbing times with simulation."""
    times = absorbing_times(params)
    checks = []
    for start, expected in ((ChainState.S1, times.E_T1), (ChainState.S2, times.E_T2)):
        mean, stderr = simulate_chain(params, start, rng, episodes)
        if stderr > 0:
            agrees = abs(mean - expected) <= AGREEMENT_STDERRS * stderr
        else:
            agrees = math.isclose(mean, expected, rel_tol=1e-12)
        checks.append(
            ChainSimulation(start=start, episodes=episodes, mean=mean, stderr=stderr, expected=expected, agrees=agrees)
        )
    return checks
