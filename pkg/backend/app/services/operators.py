"""
Bitstring Operators

Genome and Population containers plus the variation and selection operators
shared by every algorithm variant. All randomness comes from a caller-owned
numpy Generator so that seeded runs are bit-for-bit reproducible.
"""

from collections import Counter
from typing import Iterable, Iterator, List, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from ..core.errors import require
from ..db.schemas import ParentSelection


class Genome:
    """Immutable bit vector with its OneMax value cached at construction."""

    __slots__ = ("_bits", "_fitness", "_key")

    def __init__(self, bits: Iterable[int], fitness: Optional[int] = None):
        arr = np.array(bits, dtype=np.uint8)
        require(arr.ndim == 1 and arr.size >= 1, "a genome needs at least one bit")
        require(bool(np.all(arr <= 1)), "genome bits must be 0 or 1")
        computed = int(np.count_nonzero(arr))
        require(fitness is None or fitness == computed, "cached fitness does not match the bits")
        arr.setflags(write=False)
        self._bits = arr
        self._fitness = computed
        self._key = None

    @classmethod
    def _trusted(cls, arr: np.ndarray, fitness: int) -> "Genome":
        # Internal constructor for operator outputs whose fitness was updated incrementally
        g = cls.__new__(cls)
        arr.setflags(write=False)
        g._bits = arr
        g._fitness = fitness
        g._key = None
        return g

    @classmethod
    def from_string(cls, text: str) -> "Genome":
        return cls([int(ch) for ch in text.strip()])

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Genome":
        arr = rng.integers(0, 2, size=n, dtype=np.uint8)
        return cls._trusted(arr, int(np.count_nonzero(arr)))

    @classmethod
    def zeros(cls, n: int) -> "Genome":
        return cls._trusted(np.zeros(n, dtype=np.uint8), 0)

    @classmethod
    def ones(cls, n: int) -> "Genome":
        return cls._trusted(np.ones(n, dtype=np.uint8), n)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def fitness(self) -> int:
        return self._fitness

    @property
    def n(self) -> int:
        return self._bits.size

    @property
    def key(self) -> bytes:
        """Compact genotype identity used for duplicate detection."""
        if self._key is None:
            self._key = np.packbits(self._bits).tobytes() + self._bits.size.to_bytes(4, "little")
        return self._key

    def is_optimal(self) -> bool:
        return self._fitness == self._bits.size

    def __len__(self) -> int:
        return self._bits.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def __repr__(self) -> str:
        if self.n <= 64:
            return f"Genome('{self}', fitness={self._fitness})"
        return f"Genome(n={self.n}, fitness={self._fitness})"


class Population:
    """Multiset of equal-length genomes with capacity mu."""

    def __init__(self, members: Sequence[Genome], capacity: Optional[int] = None):
        members = list(members)
        require(len(members) > 0, "a population needs at least one member")
        n = members[0].n
        require(all(g.n == n for g in members), "population members must share their length")
        self.members: List[Genome] = members
        self.capacity = capacity if capacity is not None else len(members)

    @classmethod
    def random(cls, mu: int, n: int, rng: np.random.Generator) -> "Population":
        return cls([Genome.random(n, rng) for _ in range(mu)], capacity=mu)

    @property
    def n(self) -> int:
        return self.members[0].n

    def fitnesses(self) -> np.ndarray:
        return np.fromiter((g.fitness for g in self.members), dtype=np.int64, count=len(self.members))

    @property
    def best_fitness(self) -> int:
        return max(g.fitness for g in self.members)

    def best_members(self) -> List[Genome]:
        """P*: the members on the current best fitness level."""
        best = self.best_fitness
        return [g for g in self.members if g.fitness == best]

    def distinct_best(self) -> int:
        return len({g.key for g in self.best_members()})

    def with_offspring(self, offspring: Genome) -> "Population":
        return Population(self.members + [offspring], capacity=self.capacity)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Genome]:
        return iter(self.members)

    def __repr__(self) -> str:
        return f"Population(mu={self.capacity}, fitnesses={sorted(self.fitnesses().tolist(), reverse=True)})"


def onemax(g: Genome) -> int:
    """Number of 1-bits."""
    return int(np.count_nonzero(g.bits))


def hamming_distance(x: Genome, y: Genome) -> int:
    require(x.n == y.n, "hamming distance needs equal lengths")
    return int(np.count_nonzero(x.bits != y.bits))


def bitwise_or(x: Genome, y: Genome) -> Genome:
    require(x.n == y.n, "bitwise OR needs equal lengths")
    arr = np.bitwise_or(x.bits, y.bits)
    return Genome._trusted(arr, int(np.count_nonzero(arr)))


def uniform_crossover(x: Genome, y: Genome, rng: np.random.Generator) -> Genome:
    """Each bit comes from x or y with probability 1/2; agreeing positions are copied."""
    require(x.n == y.n, f"crossover parents differ in length ({x.n} != {y.n})")
    diff = np.flatnonzero(x.bits != y.bits)
    if diff.size == 0:
        return x
    from_y = diff[rng.random(diff.size) < 0.5]
    if from_y.size == 0:
        return x
    child = x.bits.copy()
    child[from_y] = y.bits[from_y]
    # at a differing position y holds a 1 exactly where x holds a 0
    gained = int(np.count_nonzero(y.bits[from_y]))
    fitness = x.fitness + gained - (from_y.size - gained)
    return Genome._trusted(child, fitness)


def flip_positions(g: Genome, positions: np.ndarray) -> Genome:
    if positions.size == 0:
        return g
    child = g.bits.copy()
    ones_flipped = int(np.count_nonzero(child[positions]))
    child[positions] ^= 1
    return Genome._trusted(child, g.fitness + positions.size - 2 * ones_flipped)


def standard_bit_mutation(g: Genome, c: float, rng: np.random.Generator) -> Genome:
    """Flip each bit independently with probability c/n.

    The flip count is drawn from Binomial(n, c/n) and that many distinct positions
    are chosen uniformly, which has the same distribution as per-bit coin flips.
    """
    n = g.n
    require(0 < c <= n, f"mutation constant must satisfy 0 < c <= n (c={c}, n={n})")
    k = int(rng.binomial(n, c / n))
    if k == 0:
        return g
    if k == n:
        return flip_positions(g, np.arange(n))
    return flip_positions(g, rng.choice(n, size=k, replace=False))


def selection_probabilities(pop: Population, policy: ParentSelection) -> np.ndarray:
    """Per-member selection probabilities; all policies are monotone in fitness."""
    mu = len(pop)
    fit = pop.fitnesses().astype(float)
    if policy == ParentSelection.uniform:
        return np.full(mu, 1.0 / mu)
    if policy == ParentSelection.greedy:
        weights = (fit == fit.max()).astype(float)
    elif policy == ParentSelection.fitness_proportional:
        weights = fit
    elif policy == ParentSelection.rank:
        # tied fitness values share the average rank
        weights = rankdata(fit, method="average")
    else:
        raise ValueError(f"unknown parent selection policy: {policy}")
    total = weights.sum()
    if total <= 0:
        return np.full(mu, 1.0 / mu)
    return weights / total


def select_parent(pop: Population, policy: ParentSelection, rng: np.random.Generator) -> Genome:
    require(len(pop) > 0, "cannot select from an empty population")
    if len(pop) == 1:
        return pop.members[0]
    if policy == ParentSelection.uniform:
        return pop.members[int(rng.integers(len(pop)))]
    if policy == ParentSelection.greedy:
        best = pop.best_members()
        return best[int(rng.integers(len(best)))]
    p = selection_probabilities(pop, policy)
    return pop.members[int(rng.choice(len(pop), p=p))]


def environmental_selection(pool: Population, rng: np.random.Generator, diversity: bool = False) -> Population:
    """Remove one genome of minimal fitness from mu+1 candidates.

    With diversity enabled, a minimal-fitness genome that has an identical copy in the
    pool is removed first so that distinct genotypes survive; otherwise ties are broken
    uniformly at random.
    """
    require(len(pool) == pool.capacity + 1, f"environmental selection expects mu+1={pool.capacity + 1} genomes, got {len(pool)}")
    fit = pool.fitnesses()
    candidates = np.flatnonzero(fit == fit.min())
    if diversity and candidates.size > 1:
        counts = Counter(g.key for g in pool.members)
        duplicated = [i for i in candidates if counts[pool.members[i].key] >= 2]
        if duplicated:
            candidates = np.asarray(duplicated)
    if candidates.size == 1:
        drop = int(candidates[0])
    else:
        drop = int(candidates[rng.integers(candidates.size)])
    survivors = pool.members[:drop] + pool.members[drop + 1:]
    return Population(survivors, capacity=pool.capacity)
