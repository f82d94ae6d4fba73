"""
Builtin Experiment Specs

The experiment grids behind the runtime comparison figures and the statistics
table: n-sweeps of the compared algorithms, mu-sweeps of the (mu+1) GA and a
mutation-rate sweep of the (5+1) GA.

Desk scale keeps 1000 runs for n <= 2048 and reduces to 200 runs for
n in {4096, 8192} and 100 runs for n = 16384; full scale runs 1000 everywhere.
"""

import math
from typing import Dict, List, Literal, Optional

from ..core.config import settings
from ..db.schemas import AlgorithmConfig, ExperimentSpec, ParentSelection, SeriesSpec, Variant

Scale = Literal["desk", "full"]

FULL_RUNS = 1000
DESK_RUNS_BY_N = {4096: 200, 8192: 200, 16384: 100}
# mutation-rate sweep keeps enough runs at n = 4096 to separate c = 1.0 from c = 1.6
DESK_RATE_SWEEP_RUNS = 500

N_SWEEP = [64, 128, 256, 512, 1024, 2048, 4096, 8192]
MU_SWEEP = list(range(2, 17))
MU_SWEEP_SIZES = [256, 4096, 16384]
# the gain over the (1+1) EA is also read off at n = 8192
EA_MU_SWEEP_SIZES = [256, 4096, 8192, 16384]
C_SWEEP = [round(0.9 + 0.1 * k, 1) for k in range(11)]
RATE_SWEEP_N = 4096

# Sudholt's optimal rate for the diversity-enforcing (2+1) GA is (1+sqrt 5)/(2n)
GOLDEN_C = (1.0 + math.sqrt(5.0)) / 2.0

# Table/figure series labels
EA = "(1+1) EA"
GA2 = "(2+1) GA"
GREEDY_GA2 = "Greedy (2+1) GA"
GREEDY_XO_GA2 = "Greedy selection + greedy XO (2+1) GA"
GA5 = "(5+1) GA"
GA_MU = "(mu+1) GA"
S_GA = "(2+1)_S GA"
SUDHOLT = "Sudholt (2+1) GA 1/n"
SUDHOLT_OPT = "Sudholt (2+1) GA opt"
SUDHOLT_GS_GX = "Sudholt greedy selection + greedy XO (2+1) GA 1/n"
SUDHOLT_GS = "Sudholt greedy selection (2+1) GA 1/n"
SUDHOLT_DXO_OPT = "Sudholt (2+1) GA diverse crossover opt"
LAMBDA_GA = "Self-adjusting (1+(lambda,lambda)) GA"


def _cfg(label: str, variant: Variant, mu: int = 2, c: float = 1.0, n: int = 64, **extra) -> AlgorithmConfig:
    return AlgorithmConfig(label=label, variant=variant, mu=mu, c=c, n=n, **extra)


ALGORITHMS: Dict[str, AlgorithmConfig] = {
    EA: _cfg(EA, Variant.OnePlusOneEA, mu=1),
    GA2: _cfg(GA2, Variant.MuPlusOneGA, mu=2),
    GREEDY_GA2: _cfg(GREEDY_GA2, Variant.MuPlusOneGA, mu=2, parent_selection=ParentSelection.greedy),
    GREEDY_XO_GA2: _cfg(
        GREEDY_XO_GA2, Variant.MuPlusOneGA, mu=2, parent_selection=ParentSelection.greedy, greedy_crossover=True
    ),
    GA5: _cfg(GA5, Variant.MuPlusOneGA, mu=5),
    S_GA: _cfg(S_GA, Variant.TwoPlusOneGreedyS, mu=2),
    SUDHOLT: _cfg(SUDHOLT, Variant.SudholtDiversity, mu=2),
    SUDHOLT_OPT: _cfg(SUDHOLT_OPT, Variant.SudholtDiversity, mu=2, c=GOLDEN_C),
    SUDHOLT_GS_GX: _cfg(SUDHOLT_GS_GX, Variant.SudholtDiversityGreedySelectionGreedyXO, mu=2),
    SUDHOLT_GS: _cfg(SUDHOLT_GS, Variant.SudholtDiversityGreedySelection, mu=2),
    SUDHOLT_DXO_OPT: _cfg(SUDHOLT_DXO_OPT, Variant.SudholtDiversity, mu=2, c=GOLDEN_C, greedy_crossover=True),
    LAMBDA_GA: _cfg(LAMBDA_GA, Variant.OneLambdaLambdaSelfAdjusting, mu=1),
}

FIG1_ALGORITHMS = [EA, GA2, GA5, SUDHOLT, SUDHOLT_OPT, SUDHOLT_GS_GX, LAMBDA_GA]
FIG2_ALGORITHMS = [GA2, GREEDY_GA2, GREEDY_XO_GA2, S_GA, SUDHOLT, SUDHOLT_GS, SUDHOLT_GS_GX]
TABLE1_ALGORITHMS = [
    EA, GA2, GREEDY_GA2, GA5, SUDHOLT, SUDHOLT_OPT, S_GA, SUDHOLT_GS_GX, SUDHOLT_GS, SUDHOLT_DXO_OPT, LAMBDA_GA,
]


def _runs_by_n(scale: Scale) -> Dict[int, int]:
    return dict(DESK_RUNS_BY_N) if scale == "desk" else {}


def _n_sweep(name: str, labels: List[str], scale: Scale, seed: int) -> ExperimentSpec:
    return ExperimentSpec(
        name=name,
        series=[SeriesSpec(template=ALGORITHMS[label], sweep="n", values=N_SWEEP) for label in labels],
        runs_per_point=FULL_RUNS,
        master_seed=seed,
        runs_by_n=_runs_by_n(scale),
    )


def _mu_sweeps(name: str, with_ea: bool, scale: Scale, seed: int) -> ExperimentSpec:
    series = []
    for n in (EA_MU_SWEEP_SIZES if with_ea else MU_SWEEP_SIZES):
        template = _cfg(GA_MU, Variant.MuPlusOneGA, n=n)
        series.append(SeriesSpec(template=template, sweep="mu", values=MU_SWEEP))
        if with_ea:
            series.append(SeriesSpec(template=ALGORITHMS[EA], sweep="n", values=[n]))
    return ExperimentSpec(
        name=name,
        series=series,
        runs_per_point=FULL_RUNS,
        master_seed=seed,
        normalization="vs_1plus1_ea" if with_ea else "vs_2plus1_ga",
        runs_by_n=_runs_by_n(scale),
    )


def _rate_sweep(scale: Scale, seed: int) -> ExperimentSpec:
    template = _cfg(GA5, Variant.MuPlusOneGA, mu=5, n=RATE_SWEEP_N)
    return ExperimentSpec(
        name="fig5",
        series=[SeriesSpec(template=template, sweep="c", values=C_SWEEP)],
        runs_per_point=FULL_RUNS if scale == "full" else DESK_RATE_SWEEP_RUNS,
        master_seed=seed,
        normalization="vs_c_equal_1",
    )


def builtin_specs(scale: Scale = "desk", master_seed: Optional[int] = None) -> List[ExperimentSpec]:
    seed = settings.MASTER_SEED if master_seed is None else master_seed
    return [
        _n_sweep("fig1", FIG1_ALGORITHMS, scale, seed),
        _n_sweep("fig2", FIG2_ALGORITHMS, scale, seed),
        _mu_sweeps("fig3", False, scale, seed),
        _mu_sweeps("fig4", True, scale, seed),
        _rate_sweep(scale, seed),
        _n_sweep("table1", TABLE1_ALGORITHMS, scale, seed),
    ]


def get_spec(name: str, scale: Scale = "desk", master_seed: Optional[int] = None) -> ExperimentSpec:
    for spec in builtin_specs(scale, master_seed):
        if spec.name == name:
            return spec
    raise KeyError(f"unknown builtin spec: {name}")
