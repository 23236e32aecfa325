"""Statistic response equilibria for finite normal-form games.

Solvers for logit and best-response play driven by monotone additive
statistics of payoff lotteries, a composite-game algebra, named test-game
generators, statistic elicitation, and an executable axiom harness.
"""

from .games import (
    Game,
    MixedProfile,
    PlayerPermutation,
    action_lottery,
    blend_games,
    blow_up,
    compose,
    compose_generalized,
    expected_payoffs,
    is_strategically_equivalent,
    marginal_profiles,
    permute_players,
    permute_profile,
    product_profile,
    push_profile,
    scale_game,
    strategic_shift,
)
from .lotteries import (
    DominanceVerdict,
    LargeNumbersResult,
    Lottery,
    convolve,
    dominates_in_large_numbers,
    fosd_compare,
    grid_lower,
    grid_upper,
    iid_sum,
    mix,
    scale_shift,
    weakly_dominates,
)
from .statistics import (
    EXPECTATION,
    MAStatistic,
    cara_certainty_equivalent,
    evaluate,
    is_positively_homogeneous,
    k_a,
)
from .solvers import (
    ConceptSpec,
    HomotopyBreakdown,
    SolveResult,
    SolverConfig,
    SolverError,
    homotopy_trace,
    logit_response,
    solve_lqre,
    solve_nash_phi,
    verify_fosd_nash,
    verify_fosd_qre,
    verify_lqre,
    verify_nash_phi,
)
from .axioms import (
    AxiomReport,
    check_anonymity,
    check_bracketing,
    check_consequentialism,
    check_consistency,
    check_distribution_monotonicity,
    check_expectation_monotonicity,
    check_interiority,
    check_neutrality,
    check_rationality,
    check_scale_invariance,
    check_strategic_invariance,
)
from .testgames import (
    ElicitationResult,
    elicit_fosd,
    elicit_qre,
    fixture,
    fixture_ids,
)

__all__ = [name for name in dir() if not name.startswith("_")]
