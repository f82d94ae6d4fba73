from collections import Counter

import numpy as np
import pytest
from scipy import stats

from app.core.errors import ContractViolation
from app.db.schemas import ParentSelection
from app.services.operators import (
    Genome,
    Population,
    bitwise_or,
    environmental_selection,
    hamming_distance,
    onemax,
    select_parent,
    selection_probabilities,
    standard_bit_mutation,
    uniform_crossover,
)


def test_onemax_counts_ones():
    assert onemax(Genome.from_string("10110")) == 3
    assert Genome.from_string("10110").fitness == 3
    assert Genome.ones(7).is_optimal()
    assert Genome.zeros(7).fitness == 0


def test_genome_rejects_non_bits():
    with pytest.raises(ContractViolation):
        Genome([0, 2, 1])
    with pytest.raises(ContractViolation):
        Genome([])


def test_genomes_compare_by_genotype():
    a = Genome.from_string("0110")
    assert a == Genome.from_string("0110")
    assert a != Genome.from_string("0111")
    assert len({a, Genome.from_string("0110")}) == 1


def test_hamming_distance_and_or():
    x = Genome.from_string("11110000")
    y = Genome.from_string("00111100")
    assert hamming_distance(x, y) == 4
    z = bitwise_or(x, y)
    assert str(z) == "11111100"
    assert z.fitness == 6


def test_uniform_crossover_keeps_agreeing_bits(rng):
    x = Genome.from_string("1100110011")
    y = Genome.from_string("1010101010")
    agree = x.bits == y.bits
    for _ in range(200):
        child = uniform_crossover(x, y, rng)
        assert np.array_equal(child.bits[agree], x.bits[agree])
        assert child.fitness == int(child.bits.sum())


def test_uniform_crossover_of_clones_is_the_parent(rng):
    x = Genome.from_string("1011")
    assert uniform_crossover(x, Genome.from_string("1011"), rng) == x


def test_uniform_crossover_takes_each_differing_bit_half_the_time(rng):
    x = Genome.zeros(40)
    y = Genome.ones(40)
    gained = [uniform_crossover(x, y, rng).fitness for _ in range(2000)]
    # Binomial(40, 1/2): mean 20, standard error of the sample mean ~0.07
    assert np.mean(gained) == pytest.approx(20.0, abs=0.5)


def test_mutation_flips_c_bits_on_average(rng):
    parent = Genome.zeros(100)
    flips = [standard_bit_mutation(parent, 1.0, rng).fitness for _ in range(4000)]
    assert np.mean(flips) == pytest.approx(1.0, abs=0.1)
    # Pr(no flip) = (1 - 1/n)^n ~ 0.366
    assert np.mean(np.asarray(flips) == 0) == pytest.approx(0.366, abs=0.03)


def test_mutation_keeps_cached_fitness_consistent(rng):
    parent = Genome.random(64, rng)
    for _ in range(200):
        child = standard_bit_mutation(parent, 3.0, rng)
        assert child.fitness == int(child.bits.sum())


def test_mutation_with_c_equal_n_flips_every_bit(rng):
    g = Genome.from_string("1100")
    assert str(standard_bit_mutation(g, 4.0, rng)) == "0011"


def test_mutation_rejects_c_above_n(rng):
    with pytest.raises(ContractViolation):
        standard_bit_mutation(Genome.zeros(3), 4.0, rng)


def test_selection_probabilities(make_population):
    pop = make_population("100", "100", "111")
    assert selection_probabilities(pop, ParentSelection.uniform).tolist() == pytest.approx([1 / 3] * 3)
    assert selection_probabilities(pop, ParentSelection.greedy).tolist() == pytest.approx([0, 0, 1])
    assert selection_probabilities(pop, ParentSelection.fitness_proportional).tolist() == pytest.approx([0.2, 0.2, 0.6])
    # tied members share the average rank 1.5
    assert selection_probabilities(pop, ParentSelection.rank).tolist() == pytest.approx([0.25, 0.25, 0.5])


def test_fitness_proportional_falls_back_to_uniform_at_zero_fitness(make_population):
    pop = make_population("000", "000")
    assert selection_probabilities(pop, ParentSelection.fitness_proportional).tolist() == pytest.approx([0.5, 0.5])


def test_greedy_selection_only_picks_best_members(make_population, rng):
    pop = make_population("1000", "1110", "1101")
    picked = {str(select_parent(pop, ParentSelection.greedy, rng)) for _ in range(100)}
    assert picked == {"1110", "1101"}


def test_environmental_selection_removes_a_worst_member(make_population, rng):
    pool = make_population("1111", "1000", "1100", capacity=2)
    survivors = environmental_selection(pool, rng)
    assert sorted(g.fitness for g in survivors) == [2, 4]
    assert survivors.capacity == 2


def test_environmental_selection_requires_mu_plus_one(make_population, rng):
    with pytest.raises(ContractViolation):
        environmental_selection(make_population("11", "10", capacity=2), rng)


def test_diversity_removes_duplicate_first(make_population, rng):
    for _ in range(50):
        pool = make_population("1100", "1010", "1100", capacity=2)
        survivors = environmental_selection(pool, rng, diversity=True)
        assert {str(g) for g in survivors} == {"1100", "1010"}


def test_population_best_members(make_population):
    pop = make_population("0110", "0110", "0011", "1000")
    assert pop.best_fitness == 2
    assert len(pop.best_members()) == 3
    assert pop.distinct_best() == 2
    assert isinstance(pop.with_offspring(Genome.ones(4)), Population)


# --- Distributional checks ---

TRIALS = 100_000
ALPHA = 0.001


def test_crossover_ones_among_differing_bits_are_binomial(rng):
    x = Genome.from_string("111000")
    y = Genome.from_string("000111")
    counts = np.bincount([uniform_crossover(x, y, rng).fitness for _ in range(TRIALS)], minlength=7)
    expected = TRIALS * stats.binom.pmf(np.arange(7), 6, 0.5)
    assert stats.chisquare(counts, expected).pvalue > ALPHA


def test_mutation_flip_count_is_binomial(rng):
    n, c = 100, 1.0
    parent = Genome.zeros(n)
    flips = np.array([standard_bit_mutation(parent, c, rng).fitness for _ in range(TRIALS)])
    # counts for 0..4 flips, then 5 or more pooled
    observed = np.append(np.bincount(np.minimum(flips, 5), minlength=6)[:5], np.count_nonzero(flips >= 5))
    expected = TRIALS * np.append(stats.binom.pmf(np.arange(5), n, c / n), stats.binom.sf(4, n, c / n))
    assert stats.chisquare(observed, expected).pvalue > ALPHA
    assert abs(flips.mean() - c) <= 3 * flips.std(ddof=1) / np.sqrt(TRIALS)


def _frequencies(pop, policy, rng, draws=TRIALS):
    picks = Counter(str(select_parent(pop, policy, rng)) for _ in range(draws))
    freq = np.array([picks[str(g)] / draws for g in pop])
    return freq, np.sqrt(freq * (1 - freq) / draws)


def test_uniform_selection_picks_each_member_a_quarter_of_the_time(make_population, rng):
    pop = make_population("0001", "0011", "0111", "1111")
    freq, se = _frequencies(pop, ParentSelection.uniform, rng)
    assert np.all(np.abs(freq - 0.25) <= 3 * se)


def test_fitness_proportional_frequencies(make_population, rng):
    pop = make_population("100", "111")
    freq, se = _frequencies(pop, ParentSelection.fitness_proportional, rng)
    assert np.all(np.abs(freq - np.array([0.25, 0.75])) <= 3 * se)


@pytest.mark.parametrize("policy", list(ParentSelection))
def test_selection_frequency_is_monotone_in_fitness(make_population, rng, policy):
    pop = make_population("00001", "00011", "11000", "00111", "01111", "11111")
    freq, se = _frequencies(pop, policy, rng, draws=20_000)
    fit = pop.fitnesses()
    for i in range(len(pop)):
        for j in range(len(pop)):
            if fit[i] < fit[j]:
                assert freq[j] >= freq[i] - 3 * np.hypot(se[i], se[j])


def test_standard_removal_breaks_ties_evenly(make_population, rng):
    removed = 0
    for _ in range(TRIALS):
        pool = make_population("11111", "11100", "00111", capacity=2)
        survivors = environmental_selection(pool, rng)
        removed += "11100" not in {str(g) for g in survivors}
    p = removed / TRIALS
    assert abs(p - 0.5) <= 3 * np.sqrt(p * (1 - p) / TRIALS)
