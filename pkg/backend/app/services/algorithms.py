"""
Algorithm State Machines

One generation of every compared algorithm, plus run_to_optimum which drives a
configuration from a uniformly random population until the optimum is first
evaluated or the evaluation budget is spent.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import require
from ..db.schemas import AlgorithmConfig, RunResult, Variant
from .operators import (
    Genome,
    Population,
    bitwise_or,
    environmental_selection,
    flip_positions,
    hamming_distance,
    select_parent,
    standard_bit_mutation,
    uniform_crossover,
)

logger = logging.getLogger(__name__)

# Self-adjusting (1+(λ,λ)) GA update factor (one-fifth rule)
LAMBDA_UPDATE_FACTOR = 1.5

# the OR shortcut only recombines equal-fitness individuals further apart than this
OR_SHORTCUT_MIN_DISTANCE = 2


@dataclass
class RunState:
    config: AlgorithmConfig
    population: Population
    evaluations: int = 0
    generations: int = 0
    # evaluation index at which a fitness-n genome was first evaluated
    found_at: Optional[int] = None
    best_seen: int = -1
    lam: float = 1.0
    trace: Optional[List[Tuple[int, int]]] = field(default=None)

    @property
    def found(self) -> bool:
        return self.found_at is not None


def _evaluate(state: RunState, g: Genome) -> None:
    state.evaluations += 1
    if g.fitness > state.best_seen:
        state.best_seen = g.fitness
        if state.trace is not None:
            state.trace.append((state.evaluations, g.fitness))
    if state.found_at is None and g.is_optimal():
        state.found_at = state.evaluations


def initial_state(config: AlgorithmConfig, rng: np.random.Generator, record_trace: bool = False) -> RunState:
    """Uniformly random population; each member costs one evaluation."""
    population = Population.random(config.mu, config.n, rng)
    state = RunState(config=config, population=population, trace=[] if record_trace else None)
    for g in population:
        _evaluate(state, g)
    if state.found_at is not None:
        # the initial population is evaluated as a whole
        state.found_at = state.evaluations
    return state


def _or_shortcut(best: List[Genome], z: Genome, rng: np.random.Generator) -> Genome:
    """OR an equal-fitness offspring with the farthest best-level member."""
    if z.fitness != best[0].fitness:
        return z
    distances = np.array([hamming_distance(w, z) for w in best])
    far = distances.max()
    if far <= OR_SHORTCUT_MIN_DISTANCE:
        return z
    ties = np.flatnonzero(distances == far)
    w = best[int(ties[rng.integers(ties.size)])] if ties.size > 1 else best[int(ties[0])]
    return bitwise_or(z, w)


def _recombine(state: RunState, rng: np.random.Generator) -> Genome:
    cfg = state.config
    pop = state.population
    policy = cfg.selection_policy
    x = select_parent(pop, policy, rng)
    y = select_parent(pop, policy, rng)
    if cfg.uses_greedy_crossover and x.fitness == y.fitness == pop.best_fitness and x != y:
        # best possible uniform-crossover offspring of two OneMax parents
        return bitwise_or(x, y)
    return uniform_crossover(x, y, rng)


def _finish_generation(state: RunState, z: Genome, rng: np.random.Generator) -> RunState:
    _evaluate(state, z)
    pool = state.population.with_offspring(z)
    state.population = environmental_selection(pool, rng, diversity=state.config.uses_diversity)
    state.generations += 1
    return state


def step_mu_plus_one_ga(state: RunState, rng: np.random.Generator) -> RunState:
    """One (mu+1) GA generation: select two parents, crossover, mutate, evaluate, select.

    The Sudholt diversity variants run through the same loop; their parent selection,
    greedy crossover and duplicate-aware replacement come from the config.
    """
    z = _recombine(state, rng)
    z = standard_bit_mutation(z, state.config.c, rng)
    return _finish_generation(state, z, rng)


def step_two_plus_one_greedy_s(state: RunState, rng: np.random.Generator) -> RunState:
    """One (2+1)_S GA generation: greedy selection, crossover, mutation, OR shortcut."""
    best = state.population.best_members()
    x = best[int(rng.integers(len(best)))]
    y = best[int(rng.integers(len(best)))]
    z = uniform_crossover(x, y, rng)
    z = standard_bit_mutation(z, state.config.c, rng)
    z = _or_shortcut(best, z, rng)
    return _finish_generation(state, z, rng)


def step_one_plus_one_ea(state: RunState, rng: np.random.Generator) -> RunState:
    """Mutation only: one parent (per policy when mu > 1), no crossover."""
    x = select_parent(state.population, state.config.selection_policy, rng)
    z = standard_bit_mutation(x, state.config.c, rng)
    return _finish_generation(state, z, rng)


def step_one_lambda_lambda(state: RunState, rng: np.random.Generator) -> RunState:
    """One iteration of the self-adjusting (1+(λ,λ)) GA.

    Mutation phase: lambda mutants each flipping the same Binomial(n, lambda/n) number of bits.
    Crossover phase: lambda offspring taking each bit of the best mutant with probability 1/lambda.
    The best offspring replaces the parent if not worse; lambda shrinks by F on improvement
    and grows by F^(1/4) otherwise, clamped to [1, n].
    """
    n = state.config.n
    x = state.population.members[0]
    lam = state.lam
    count = max(1, int(round(lam)))
    ell = int(rng.binomial(n, min(1.0, lam / n)))

    best_mutant = None
    for _ in range(count):
        positions = rng.choice(n, size=ell, replace=False) if ell else np.empty(0, dtype=np.int64)
        mutant = flip_positions(x, positions)
        _evaluate(state, mutant)
        if best_mutant is None or mutant.fitness > best_mutant.fitness:
            best_mutant = mutant

    # taking the mutant's bit at a differing position is flipping the parent there
    diff = np.flatnonzero(x.bits != best_mutant.bits)
    best_child = None
    for _ in range(count):
        taken = diff[rng.random(diff.size) < 1.0 / lam] if diff.size else diff
        child = flip_positions(x, taken)
        _evaluate(state, child)
        if best_child is None or child.fitness > best_child.fitness:
            best_child = child

    if best_child.fitness > x.fitness:
        state.population = Population([best_child], capacity=1)
        state.lam = max(lam / LAMBDA_UPDATE_FACTOR, 1.0)
    else:
        if best_child.fitness == x.fitness:
            state.population = Population([best_child], capacity=1)
        state.lam = min(lam * LAMBDA_UPDATE_FACTOR ** 0.25, float(n))
    state.generations += 1
    return state


StepFunction = Callable[[RunState, np.random.Generator], RunState]

STEP_FUNCTIONS: Dict[Variant, StepFunction] = {
    Variant.OnePlusOneEA: step_one_plus_one_ea,
    Variant.MuPlusOneEA: step_one_plus_one_ea,
    Variant.MuPlusOneGA: step_mu_plus_one_ga,
    Variant.TwoPlusOneGreedyS: step_two_plus_one_greedy_s,
    Variant.SudholtDiversity: step_mu_plus_one_ga,
    Variant.SudholtDiversityGreedySelection: step_mu_plus_one_ga,
    Variant.SudholtDiversityGreedySelectionGreedyXO: step_mu_plus_one_ga,
    Variant.OneLambdaLambdaSelfAdjusting: step_one_lambda_lambda,
}


def run_to_optimum(config: AlgorithmConfig, record_trace: bool = False) -> RunResult:
    """Run one seeded configuration until the optimum is first evaluated or the cap is reached."""
    require(config.n >= 1 and config.mu >= 1, "invalid configuration")
    rng = np.random.default_rng(config.seed)
    step = STEP_FUNCTIONS[config.variant]
    cap = config.evaluation_cap

    state = initial_state(config, rng, record_trace=record_trace)
    while not state.found and state.evaluations < cap:
        step(state, rng)

    hit_cap = not state.found
    if hit_cap:
        logger.debug("run hit the evaluation cap: %s n=%d seed=%d", config.variant.value, config.n, config.seed)
    return RunResult(
        evaluations=state.found_at if state.found else state.evaluations,
        generations=state.generations,
        seed=config.seed,
        hit_cap=hit_cap,
        best_fitness=state.best_seen,
        final_lambda=state.lam if config.variant == Variant.OneLambdaLambdaSelfAdjusting else None,
        trace=state.trace,
    )