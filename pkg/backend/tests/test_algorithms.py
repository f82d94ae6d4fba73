import math

import pytest
from pydantic import ValidationError

from app.db.schemas import AlgorithmConfig, ParentSelection, Variant
from app.services.algorithms import (
    LAMBDA_UPDATE_FACTOR,
    STEP_FUNCTIONS,
    RunState,
    _or_shortcut,
    _recombine,
    initial_state,
    run_to_optimum,
    step_one_lambda_lambda,
    step_two_plus_one_greedy_s,
)
from app.services.operators import Genome, Population, bitwise_or

STEADY_STATE = [
    Variant.OnePlusOneEA,
    Variant.MuPlusOneEA,
    Variant.MuPlusOneGA,
    Variant.TwoPlusOneGreedyS,
    Variant.SudholtDiversity,
    Variant.SudholtDiversityGreedySelection,
    Variant.SudholtDiversityGreedySelectionGreedyXO,
]


def _state(variant, *bitstrings, lam=1.0, **extra):
    members = [Genome.from_string(s) for s in bitstrings]
    config = AlgorithmConfig(variant=variant, n=members[0].n, mu=len(members), **extra)
    return RunState(config=config, population=Population(members, capacity=len(members)), lam=lam)


# --- Configuration ---


def test_single_parent_variants_force_mu_one():
    assert AlgorithmConfig(variant=Variant.OnePlusOneEA, n=10, mu=5).mu == 1
    assert AlgorithmConfig(variant=Variant.OneLambdaLambdaSelfAdjusting, n=10).mu == 1


def test_greedy_s_requires_mu_two():
    with pytest.raises(ValidationError):
        AlgorithmConfig(variant=Variant.TwoPlusOneGreedyS, n=10, mu=3)


def test_mutation_constant_may_not_exceed_n():
    with pytest.raises(ValidationError):
        AlgorithmConfig(variant=Variant.MuPlusOneGA, n=2, c=3.0)


def test_variant_defaults():
    greedy_xo = AlgorithmConfig(variant=Variant.SudholtDiversityGreedySelectionGreedyXO, n=10)
    assert greedy_xo.selection_policy == ParentSelection.greedy
    assert greedy_xo.uses_greedy_crossover and greedy_xo.uses_diversity
    plain = AlgorithmConfig(variant=Variant.MuPlusOneGA, n=10)
    assert plain.selection_policy == ParentSelection.uniform
    assert not plain.uses_greedy_crossover and not plain.uses_diversity
    assert AlgorithmConfig(variant=Variant.MuPlusOneGA, n=10, greedy_crossover=True).uses_greedy_crossover


def test_evaluation_cap():
    assert AlgorithmConfig(variant=Variant.MuPlusOneGA, n=2).evaluation_cap == 1000
    expected = math.ceil(100 * math.e * 1024 * math.log(1024))
    assert AlgorithmConfig(variant=Variant.MuPlusOneGA, n=1024).evaluation_cap == expected
    assert AlgorithmConfig(variant=Variant.MuPlusOneGA, n=1024, max_evaluations=7).evaluation_cap == 7


# --- Runs ---


@pytest.mark.parametrize("variant", STEADY_STATE + [Variant.OneLambdaLambdaSelfAdjusting])
def test_every_variant_reaches_the_optimum(variant):
    config = AlgorithmConfig(variant=variant, n=24, mu=2, seed=3)
    result = run_to_optimum(config)
    assert not result.hit_cap
    assert result.best_fitness == 24


@pytest.mark.parametrize("variant", STEADY_STATE)
def test_steady_state_evaluations_are_mu_plus_generations(variant):
    config = AlgorithmConfig(variant=variant, n=32, mu=2, seed=11)
    result = run_to_optimum(config)
    assert result.evaluations == config.mu + result.generations


def test_optimum_in_initial_population_costs_mu_evaluations():
    solved_at_start = 0
    for seed in range(50):
        result = run_to_optimum(AlgorithmConfig(variant=Variant.MuPlusOneGA, n=1, mu=5, seed=seed))
        assert result.evaluations == 5 + result.generations
        solved_at_start += result.generations == 0
    # a random 1-bit population of five misses the optimum with probability 1/32
    assert solved_at_start >= 40


def test_runs_are_reproducible():
    config = AlgorithmConfig(variant=Variant.MuPlusOneGA, n=40, mu=3, seed=2024)
    assert run_to_optimum(config) == run_to_optimum(config)
    other = run_to_optimum(config.with_seed(2025))
    assert other.seed == 2025


def test_one_bit_problem_is_solved_within_two_evaluations():
    for seed in range(20):
        result = run_to_optimum(AlgorithmConfig(variant=Variant.OnePlusOneEA, n=1, seed=seed))
        assert result.evaluations <= 2


def test_evaluation_cap_stops_the_run():
    config = AlgorithmConfig(variant=Variant.MuPlusOneGA, n=500, mu=2, max_evaluations=5, seed=1)
    result = run_to_optimum(config)
    assert result.hit_cap
    assert result.evaluations == 5


def test_trace_records_improvements():
    result = run_to_optimum(AlgorithmConfig(variant=Variant.MuPlusOneGA, n=30, seed=5), record_trace=True)
    evaluations, fitness = zip(*result.trace)
    assert list(evaluations) == sorted(evaluations)
    assert all(b > a for a, b in zip(fitness, fitness[1:]))
    assert fitness[-1] == 30
    assert evaluations[-1] == result.evaluations


# --- (2+1)_S GA and greedy crossover ---


def test_or_shortcut_applies_to_distant_equal_fitness_offspring(rng):
    best = [Genome.from_string("11110000")]
    z = Genome.from_string("00001111")
    assert _or_shortcut(best, z, rng) == Genome.ones(8)


def test_or_shortcut_ignores_close_or_unequal_offspring(rng):
    best = [Genome.from_string("1100")]
    close = Genome.from_string("1010")
    assert _or_shortcut(best, close, rng) is close
    worse = Genome.from_string("0001")
    assert _or_shortcut(best, worse, rng) is worse


def test_greedy_crossover_ors_distinct_best_parents(rng):
    state = _state(Variant.MuPlusOneGA, "110000", "000011", greedy_crossover=True, parent_selection=ParentSelection.greedy)
    x, y = state.population.members
    children = {str(_recombine(state, rng)) for _ in range(100)}
    assert children <= {str(x), str(y), str(bitwise_or(x, y))}
    assert str(bitwise_or(x, y)) in children


# --- Self-adjusting (1+(λ,λ)) GA ---


def test_lambda_grows_when_parent_is_optimal(rng):
    state = _state(Variant.OneLambdaLambdaSelfAdjusting, "1111111111")
    step_one_lambda_lambda(state, rng)
    assert state.lam == pytest.approx(LAMBDA_UPDATE_FACTOR ** 0.25)
    assert state.evaluations == 2


def test_lambda_is_clamped_to_n(rng):
    state = _state(Variant.OneLambdaLambdaSelfAdjusting, "11111111", lam=8.0)
    step_one_lambda_lambda(state, rng)
    assert state.lam == 8.0
    assert state.evaluations == 16


def test_lambda_follows_success(rng):
    for _ in range(30):
        state = _state(Variant.OneLambdaLambdaSelfAdjusting, "0" * 100, lam=4.0)
        step_one_lambda_lambda(state, rng)
        if state.population.members[0].fitness > 0:
            assert state.lam == pytest.approx(4.0 / LAMBDA_UPDATE_FACTOR)
        else:
            assert state.lam == pytest.approx(4.0 * LAMBDA_UPDATE_FACTOR ** 0.25)
        assert state.evaluations == 8


def test_lambda_never_drops_below_one(rng):
    state = _state(Variant.OneLambdaLambdaSelfAdjusting, "0" * 50, lam=1.0)
    for _ in range(20):
        step_one_lambda_lambda(state, rng)
        assert 1.0 <= state.lam <= 50


def test_lambda_run_reports_final_lambda():
    result = run_to_optimum(AlgorithmConfig(variant=Variant.OneLambdaLambdaSelfAdjusting, n=64, seed=8))
    assert result.final_lambda is not None
    assert 1.0 <= result.final_lambda <= 64
    assert not result.hit_cap


# --- Invariants across generations ---

SUDHOLT = [
    Variant.SudholtDiversity,
    Variant.SudholtDiversityGreedySelection,
    Variant.SudholtDiversityGreedySelectionGreedyXO,
]


@pytest.mark.parametrize("variant", STEADY_STATE + [Variant.OneLambdaLambdaSelfAdjusting])
def test_best_fitness_never_decreases(variant, rng):
    config = AlgorithmConfig(variant=variant, n=40, mu=2)
    step = STEP_FUNCTIONS[variant]
    for _ in range(5):
        state = initial_state(config, rng)
        best = state.population.best_fitness
        while not state.found and state.generations < 3000:
            step(state, rng)
            assert state.population.best_fitness >= best
            best = state.population.best_fitness


@pytest.mark.parametrize("variant", SUDHOLT)
def test_diversity_keeps_distinct_best_genotypes(variant, rng):
    config = AlgorithmConfig(variant=variant, n=30, mu=2)
    step = STEP_FUNCTIONS[variant]
    checked = 0
    for _ in range(20):
        state = initial_state(config, rng)
        while not state.found and state.generations < 3000:
            best, distinct = state.population.best_fitness, state.population.distinct_best()
            step(state, rng)
            if distinct >= 2 and state.population.best_fitness == best:
                assert state.population.distinct_best() >= distinct
                checked += 1
    assert checked > 0


def test_or_shortcut_never_lowers_fitness(rng):
    for _ in range(2000):
        best = Population.random(3, 12, rng).best_members()
        z = Genome.random(12, rng)
        assert _or_shortcut(best, z, rng).fitness >= z.fitness


def test_or_shortcut_example(rng):
    w = Genome.from_string("110000")
    z = Genome.from_string("001100")
    assert str(_or_shortcut([w], z, rng)) == "111100"
    assert str(_or_shortcut([w, z], z, rng)) == "111100"


def test_greedy_s_generation_applies_the_or_shortcut(rng):
    seen = 0
    for _ in range(200):
        state = _state(Variant.TwoPlusOneGreedyS, "110000", "001100")
        step_two_plus_one_greedy_s(state, rng)
        assert state.evaluations == 1 and state.generations == 1
        assert state.population.best_fitness >= 2
        seen += any(str(g) == "111100" for g in state.population)
    # an unmutated copy of either parent is ORed with the other
    assert seen > 0
