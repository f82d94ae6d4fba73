import math
from datetime import datetime
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import BoundMode, settings

# --- Algorithm Configuration ---


class Variant(str, Enum):
    """The eight algorithm behaviours; values double as CLI --algo names."""

    OnePlusOneEA = "one-plus-one-ea"
    MuPlusOneEA = "mu-plus-one-ea"
    MuPlusOneGA = "mu-plus-one-ga"
    TwoPlusOneGreedyS = "two-plus-one-greedy-s"
    SudholtDiversity = "sudholt-diversity"
    SudholtDiversityGreedySelection = "sudholt-diversity-greedy-selection"
    SudholtDiversityGreedySelectionGreedyXO = "sudholt-diversity-greedy-selection-greedy-xo"
    OneLambdaLambdaSelfAdjusting = "one-lambda-lambda"


class ParentSelection(str, Enum):
    uniform = "uniform"
    fitness_proportional = "fitness_proportional"
    rank = "rank"
    greedy = "greedy"  # uniform among the current best-fitness members


SINGLE_PARENT_VARIANTS = {Variant.OnePlusOneEA, Variant.OneLambdaLambdaSelfAdjusting}
GREEDY_SELECTION_VARIANTS = {
    Variant.TwoPlusOneGreedyS,
    Variant.SudholtDiversityGreedySelection,
    Variant.SudholtDiversityGreedySelectionGreedyXO,
}
DIVERSITY_VARIANTS = {
    Variant.SudholtDiversity,
    Variant.SudholtDiversityGreedySelection,
    Variant.SudholtDiversityGreedySelectionGreedyXO,
}

SEED_LIMIT = 2**64


class AlgorithmConfig(BaseModel):
    """One algorithm behaviour plus its parameters (mutation probability c/n)."""

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    variant: Variant
    n: int = Field(ge=1)
    mu: int = Field(default=2, ge=1)
    c: float = Field(default=1.0, gt=0)
    parent_selection: ParentSelection = ParentSelection.uniform
    greedy_crossover: Optional[bool] = None
    max_evaluations: Optional[int] = Field(default=None, gt=0)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    label: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def _single_parent_mu(cls, data):
        # (1+1) EA and (1+(λ,λ)) GA always carry a single individual
        if isinstance(data, dict) and data.get("variant") is not None:
            if Variant(data["variant"]) in SINGLE_PARENT_VARIANTS:
                data = {**data, "mu": 1}
        return data

    @model_validator(mode="after")
    def _check_variant(self):
        if self.c > self.n:
            raise ValueError(f"mutation constant c={self.c} exceeds n={self.n}")
        if self.variant == Variant.TwoPlusOneGreedyS and self.mu != 2:
            raise ValueError("two-plus-one-greedy-s requires mu = 2")
        return self

    @property
    def selection_policy(self) -> ParentSelection:
        if self.variant in GREEDY_SELECTION_VARIANTS:
            return ParentSelection.greedy
        return self.parent_selection

    @property
    def uses_greedy_crossover(self) -> bool:
        if self.variant == Variant.SudholtDiversityGreedySelectionGreedyXO:
            return True
        if self.variant in (Variant.MuPlusOneGA, Variant.SudholtDiversity):
            return bool(self.greedy_crossover)
        return False

    @property
    def uses_diversity(self) -> bool:
        return self.variant in DIVERSITY_VARIANTS

    @property
    def is_steady_state(self) -> bool:
        return self.variant != Variant.OneLambdaLambdaSelfAdjusting

    @property
    def evaluation_cap(self) -> int:
        if self.max_evaluations is not None:
            return self.max_evaluations
        n = self.n
        budget = settings.MAX_EVALUATIONS_FACTOR * math.e * n * math.log(n) if n > 1 else 0.0
        return max(1000, math.ceil(budget))

    @property
    def display_name(self) -> str:
        if self.label:
            return self.label
        return self.variant.value

    def with_seed(self, seed: int) -> "AlgorithmConfig":
        return self.model_copy(update={"seed": seed})


class RunResult(BaseModel):
    evaluations: int
    generations: int
    seed: int
    hit_cap: bool
    best_fitness: int
    final_lambda: Optional[float] = None
    trace: Optional[List[Tuple[int, int]]] = None


# --- Markov Chain ---

_PROB_TOLERANCE = 1e-12


class MarkovParams(BaseModel):
    """Transition probabilities of the three-state chain of one fitness level.

    S1 (no diversity) -> S3 with p_m, -> S2 with p_d; S2 (diversity) -> S3 with p_c, -> S1 with p_r.
    """

    model_config = ConfigDict(frozen=True)

    p_m: float = Field(ge=0, le=1)
    p_d: float = Field(ge=0, le=1)
    p_c: float = Field(ge=0, le=1)
    p_r: float = Field(ge=0, le=1)

    @model_validator(mode="after")
    def _check_rows(self):
        if self.p_m + self.p_d > 1 + _PROB_TOLERANCE:
            raise ValueError("p_m + p_d must not exceed 1")
        if self.p_c + self.p_r > 1 + _PROB_TOLERANCE:
            raise ValueError("p_c + p_r must not exceed 1")
        return self


class ChainState(int, Enum):
    S1 = 1
    S2 = 2
    S3 = 3


class AbsorbingTimes(BaseModel):
    E_T1: float
    E_T2: float


class ChainSimulation(BaseModel):
    start: ChainState
    episodes: int
    mean: float
    stderr: float
    expected: float
    agrees: bool


class ChainSolution(BaseModel):
    params: MarkovParams
    times: AbsorbingTimes
    simulation: Optional[List[ChainSimulation]] = None


class ChainSolveRequest(MarkovParams):
    episodes: Optional[int] = Field(default=None, ge=1)
    seed: int = 0


# --- Bounds ---

BoundKind = Literal["upper_theorem2", "upper_2plus1", "lower_theorem5", "takeover_lemma3"]


class BoundReport(BaseModel):
    kind: BoundKind
    mu: Optional[int] = None
    c: float
    n: Optional[int] = None
    mode: BoundMode = "leading-order"
    leading_term_value: float
    coefficient: Optional[float] = None
    per_level_values: Optional[List[float]] = None
    finite_n_value: Optional[float] = None
    subtractive_term: Optional[str] = None


class OptimalMutation(BaseModel):
    c: float
    coefficient: float


class FitnessLevelBounds(BaseModel):
    """Fitness-level lower-bound inputs over levels 1..m.

    u[i-1] is u_i for levels 1..m-1; gamma[i-1][j-i-1] is gamma_{i,j} for j = i+1..m;
    start_distribution[i-1] is Pr(start in level i).
    """

    u: List[float]
    gamma: List[List[float]]
    chi: float = Field(ge=0, le=1)
    start_distribution: List[float]

    @property
    def m(self) -> int:
        return len(self.u) + 1


class LowerBoundParams(BaseModel):
    c: float
    n: int
    y: float
    ell: int


class LevelInstantiation(BaseModel):
    u_i_prime: float
    gamma_prime: float
    p_mk: float
    p_dk: float


# --- Experiments ---

Normalization = Literal["none", "vs_2plus1_ga", "vs_1plus1_ea", "vs_c_equal_1"]
SweepAxis = Literal["n", "mu", "c"]


class SeriesSpec(BaseModel):
    """One algorithm template swept over n, mu or c."""

    template: AlgorithmConfig
    sweep: SweepAxis = "n"
    values: List[Union[int, float]]

    @field_validator("values")
    @classmethod
    def _strictly_increasing(cls, values):
        if not values:
            raise ValueError("a series needs at least one sweep value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        return values


class ExperimentSpec(BaseModel):
    name: str
    series: List[SeriesSpec]
    runs_per_point: int = Field(ge=1)
    master_seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    normalization: Normalization = "none"
    # problem size -> reduced number of runs (desk scale)
    runs_by_n: Dict[int, int] = Field(default_factory=dict)

    def runs_for(self, n: int) -> int:
        return max(1, self.runs_by_n.get(n, self.runs_per_point))


class StatsSummary(BaseModel):
    mean: float
    std_dev: float = Field(ge=0)
    count: int
    normalized_mean: Optional[float] = None
    normalized_std: Optional[float] = None


class TableRow(BaseModel):
    """One experiment point; field order is the CSV column order."""

    name: str
    algorithm: str
    n: int
    mu: int
    c: float
    runs: int
    mean: float
    std_dev: float
    normalized_mean: Optional[float] = None
    normalized_std: Optional[float] = None
    capped_count: int = 0


class RunRequest(BaseModel):
    algo: Variant
    n: int = Field(ge=1)
    c: float = Field(default=1.0, gt=0)
    mu: int = Field(default=2, ge=1)
    selection: ParentSelection = ParentSelection.uniform
    greedy_crossover: Optional[bool] = None
    runs: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)


# --- Experiment History Schemas ---


class ExperimentRecordBase(BaseModel):
    name: str
    master_seed: int
    normalization: str
    rows: List[TableRow]


class ExperimentRecord(ExperimentRecordBase):
    id: int
    created_at: datetime

    model_config = ConfigDict(from_attributes=True)
