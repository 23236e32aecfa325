"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass line per
criterion.
"""

import math

import numpy as np

from sre_lab.axioms import (
    check_consequentialism,
    check_consistency,
    check_rationality,
)
from sre_lab.games import compose, product_profile
from sre_lab.lotteries import (
    DominanceVerdict,
    Lottery,
    convolve,
    dominates_in_large_numbers,
    fosd_compare,
    iid_sum,
)
from sre_lab.statistics import (
    EXPECTATION,
    MAStatistic,
    cara_certainty_equivalent,
    evaluate,
    is_positively_homogeneous,
    k_a,
)
from sre_lab.solvers import (
    ConceptSpec,
    SolverConfig,
    solve_lqre,
    solve_nash_phi,
    verify_fosd_nash,
    verify_lqre,
    verify_nash_phi,
)
from sre_lab.testgames import (
    elicit_fosd,
    elicit_qre,
    make_allais_lotteries,
    make_card_game,
    make_iia_game,
    make_matching_pennies,
    make_no_extremal_eq_game,
    make_sure_thing_game,
    make_table2_lotteries,
    make_test_game_gx,
    random_game,
)

FAST = SolverConfig(multistarts=2, max_iters=20_000)
MMM_THIRDS = MAStatistic.min_max_mean(1 / 3, 1 / 3, 1 / 3)
K_PAIR = MAStatistic(((-1.0, 0.5), (1.0, 0.5)))


def _report(number: int, message: str) -> None:
    print(f"[criterion {number:2d}] PASS  {message}")


def test_criterion_01_logit_product_consistency():
    """Solved two-action games reproduce the logit closed form and the
    product-consistency identity across stakes."""
    lambdas = (0.5, 1.0, 2.0)
    stakes = (0.5, 1.0, 2.0)
    needed = sorted({x for x in stakes} | {x + y for x in stakes for y in stakes})
    worst_closed = 0.0
    worst_identity = 0.0
    for lam in lambdas:
        r = {}
        for v in needed:
            res = solve_lqre(make_test_game_gx(v), EXPECTATION, lam, FAST)
            assert len(res.profiles) == 1
            r[v] = float(res.profiles[0].distributions[0][0])
            closed = math.exp(lam * v) / (1.0 + math.exp(lam * v))
            worst_closed = max(worst_closed, abs(r[v] - closed))
            assert abs(r[v] - closed) <= 1e-9
        for x in stakes:
            for y in stakes:
                lhs = r[x] * r[y] * (1.0 - r[x + y])
                rhs = (1.0 - r[x]) * (1.0 - r[y]) * r[x + y]
                worst_identity = max(worst_identity, abs(lhs - rhs))
                assert abs(lhs - rhs) <= 1e-8
    _report(1, f"closed-form gap {worst_closed:.2e}, identity residual {worst_identity:.2e}")


def _bracketing_corpus():
    rng = np.random.default_rng(20240)
    return [
        (
            random_game(rng, players=(2, 2), actions=(2, 3)),
            random_game(rng, players=(2, 2), actions=(2, 3)),
        )
        for _ in range(50)
    ]


def test_criterion_02_bracketing_suite():
    """Products of component solutions solve the composite, for logit play
    under three statistics and for best-response play under the mean."""
    pairs = _bracketing_corpus()
    worst = 0.0
    products = 0
    for phi in (EXPECTATION, MMM_THIRDS, K_PAIR):
        for g, h in pairs:
            rg = solve_lqre(g, phi, 1.0, FAST)
            rh = solve_lqre(h, phi, 1.0, FAST)
            combo = compose(g, h)
            for p in rg.profiles:
                for q in rh.profiles:
                    residual = verify_lqre(combo, phi, 1.0, product_profile(p, q))
                    worst = max(worst, residual)
                    products += 1
                    assert residual <= 1e-8
    nash_products = 0
    for g, h in pairs:
        rg = solve_nash_phi(g, EXPECTATION, FAST)
        rh = solve_nash_phi(h, EXPECTATION, FAST)
        combo = compose(g, h)
        for p in rg.profiles:
            for q in rh.profiles:
                nash_products += 1
                assert verify_nash_phi(combo, EXPECTATION, product_profile(p, q))
    _report(2, f"{products} logit products (worst residual {worst:.2e}), {nash_products} best-response products")


def test_criterion_03_logit_existence():
    """A converged logit fixed point is found on every corpus game for every
    lambda, including statistics weighting the extremes."""
    rng = np.random.default_rng(777)
    phis = [
        EXPECTATION,
        MMM_THIRDS,
        MAStatistic(((-math.inf, 0.3), (2.0, 0.7))),
        K_PAIR,
    ]
    failures = 0
    for idx in range(200):
        g = random_game(rng)
        phi = phis[idx % len(phis)]
        for lam in (0.0, 1.0, 5.0):
            res = solve_lqre(g, phi, lam, FAST)
            if not res.profiles:
                failures += 1
    assert failures == 0
    _report(3, "200 games x 3 lambdas solved with zero failures")


def test_criterion_04_extreme_statistic_nonexistence():
    """Full support enumeration certifies that no best-response equilibrium
    exists under the extreme-weighted statistic, while the mean-response
    equilibrium matches the hand-derived indifference point."""
    game = make_no_extremal_eq_game(0.25)
    phi = MAStatistic(((-math.inf, 0.125), (math.inf, 0.125), (0.0, 0.75)))
    res = solve_nash_phi(game, phi, FAST)
    assert res.profiles == []
    assert res.diagnostics["enumeration_truncated"] is False
    mean_res = solve_nash_phi(game, EXPECTATION, FAST)
    assert len(mean_res.profiles) == 1
    np.testing.assert_allclose(mean_res.profiles[0].distributions[0], [0.5, 0.5], atol=1e-6)
    np.testing.assert_allclose(mean_res.profiles[0].distributions[1], [0.1, 0.9], atol=1e-6)
    _report(4, "no equilibrium under the extreme mixture; mean equilibrium ((.5,.5),(.1,.9))")


def test_criterion_05_opponent_uniformity():
    """The card opponent mixes uniformly in every verified best-response
    solution; the sure-thing opponent mixes uniformly in every logit fixed
    point."""
    checked = 0
    for x, eps in (([0.0, 1.0], 0.1), ([0.0, 1.0], 0.01), ([0.0, 1.0, 2.0], 0.1), ([0.0, 1.0, 2.0], 0.01)):
        game = make_card_game(0.4, x, eps)
        res = solve_nash_phi(game, EXPECTATION, FAST)
        assert res.profiles
        for p in res.profiles:
            assert verify_fosd_nash(game, p) == []
            uniform = np.full(len(x), 1.0 / len(x))
            np.testing.assert_allclose(p.distributions[1], uniform, atol=1e-6)
            checked += 1
    lqre_checked = 0
    for r, x in ((0.2, [0.0, 1.0]), (0.7, [0.0, 0.5, 2.0])):
        game = make_sure_thing_game(r, x)
        res = solve_lqre(game, MMM_THIRDS, 1.5, FAST)
        for p in res.profiles:
            uniform = np.full(len(x), 1.0 / len(x))
            np.testing.assert_allclose(p.distributions[1], uniform, atol=1e-9)
            lqre_checked += 1
    _report(5, f"{checked} best-response and {lqre_checked} logit solutions, opponent uniform")


def _random_statistic(rng) -> MAStatistic:
    n = int(rng.integers(1, 4))
    locations = list(rng.uniform(-3.0, 3.0, size=n))
    if rng.random() < 0.3:
        locations[0] = -math.inf
    if n > 1 and rng.random() < 0.3:
        locations[-1] = math.inf
    weights = rng.dirichlet(np.ones(len(locations)))
    return MAStatistic(tuple(zip(locations, weights)))


def test_criterion_06_elicitation_consistency():
    """Bisection on the sure-thing and card games recovers the statistic."""
    rng = np.random.default_rng(4242)
    lambdas = (0.5, 1.0, 5.0)
    worst_qre = 0.0
    for trial in range(20):
        phi = _random_statistic(rng)
        length = int(rng.integers(2, 5))
        x = rng.uniform(-2.0, 2.0, size=length)
        spec = ConceptSpec.lqre(lambdas[trial % 3], phi, FAST)
        target = evaluate(phi, Lottery.from_vector(x))
        got = elicit_qre(spec, x)
        worst_qre = max(worst_qre, abs(got - target))
        assert abs(got - target) <= 1e-6
    worst_fosd = 0.0
    fosd_cases = [
        (EXPECTATION, [0.0, 1.0]),
        (K_PAIR, [0.0, 1.0]),
        (K_PAIR, [0.0, 1.0, 2.0]),
    ]
    for phi, x in fosd_cases:
        spec = ConceptSpec.nash_phi(phi, FAST)
        result = elicit_fosd(spec, x, eps_schedule=(1e-1, 1e-2, 1e-3), bisection_iters=13)
        assert result.notes == ""
        target = evaluate(phi, Lottery.from_vector(x))
        worst_fosd = max(worst_fosd, abs(result.extrapolated - target))
        assert abs(result.extrapolated - target) <= 2e-3
    _report(6, f"worst logit-side gap {worst_qre:.2e}, worst best-response-side gap {worst_fosd:.2e}")


def test_criterion_07_risk_attitude_demos():
    """Min-heavy weightings pick the sure options in the common-consequence
    quadruple, and the balanced extreme weighting inverts the mean ranking
    on the three-lottery menu."""
    allais = make_allais_lotteries()
    grid_points = 0
    for w_max in (0.01, 0.02, 0.05):
        for ratio in (10.0, 15.0, 30.0):
            w_min = ratio * w_max
            w_mean = 1.0 - w_min - w_max
            if w_mean < 0:
                continue
            phi = MAStatistic.min_max_mean(w_min, w_mean, w_max)
            vals = {name: evaluate(phi, lot) for name, lot in allais.items()}
            assert vals["a"] > vals["b"]
            assert vals["d"] > vals["c"]
            grid_points += 1
    assert grid_points >= 6
    table2 = make_table2_lotteries()
    phi = MAStatistic.min_max_mean(0.45, 0.10, 0.45)
    vals = {name: evaluate(phi, lot) for name, lot in table2.items()}
    assert vals["b"] > vals["a"] and vals["b"] > vals["c"]
    means = {name: lot.mean() for name, lot in table2.items()}
    assert means["b"] < means["a"] and means["b"] < means["c"]
    _report(7, f"{grid_points} weight-grid points ordered as required; menu ranking inverts")


def test_criterion_08_statistics_kernel():
    """Kernel additivity on independent sums, agreement with the
    certainty-equivalent oracle, and the homogeneity dichotomy."""
    rng = np.random.default_rng(9090)
    a_grid = [-2.0, -1.0, -0.5, -1e-3, -5e-5, 5e-5, 1e-3, 0.5, 1.0, 2.0]
    worst_add = 0.0
    for _ in range(100):
        nx, ny = rng.integers(2, 5, size=2)
        x = Lottery(np.sort(rng.uniform(-2, 2, nx)), rng.dirichlet(np.ones(nx)))
        y = Lottery(np.sort(rng.uniform(-2, 2, ny)), rng.dirichlet(np.ones(ny)))
        z = convolve(x, y)
        for a in a_grid:
            gap = abs(k_a(z, a) - k_a(x, a) - k_a(y, a))
            worst_add = max(worst_add, gap)
            assert gap <= 1e-9
    worst_cara = 0.0
    for _ in range(25):
        n = int(rng.integers(2, 5))
        x = Lottery(np.sort(rng.uniform(-2, 2, n)), rng.dirichlet(np.ones(n)))
        for a in (-5.0, -2.0, -1.0, 0.5, 1.0, 5.0):
            gap = abs(cara_certainty_equivalent(x, a) - k_a(x, a))
            worst_cara = max(worst_cara, gap)
            assert gap <= 1e-9
    assert is_positively_homogeneous(MAStatistic.min_max_mean(0.2, 0.5, 0.3), trials=64, tol=1e-9)
    assert not is_positively_homogeneous(MAStatistic.single(1.0), trials=64, tol=1e-9)
    half_coin = Lottery.from_vector([0.0, 0.5])
    coin = Lottery.from_vector([0.0, 1.0])
    assert abs(k_a(half_coin, 1.0) - 0.5 * k_a(coin, 1.0)) > 0.02
    _report(8, f"additivity gap {worst_add:.2e}, oracle gap {worst_cara:.2e}, homogeneity split confirmed")


def test_criterion_09_dominance_in_large_numbers():
    """The scan finds a finite onset certified by brute-force convolution."""
    x = Lottery.from_vector([1.0, 4.0])
    y = Lottery.from_pairs([(0.0, 0.1), (2.2, 0.9)])
    result = dominates_in_large_numbers(x, y, cap=512)
    assert result.found and result.m is not None and result.m <= 512
    m = result.m
    assert fosd_compare(iid_sum(x, m), iid_sum(y, m)) is DominanceVerdict.STRICT_FOSD
    assert m > 1
    assert fosd_compare(iid_sum(x, m - 1), iid_sum(y, m - 1)) is not DominanceVerdict.STRICT_FOSD
    _report(9, f"onset at m = {m}, certified at m and refuted at m-1")


def test_criterion_10_consistency_consequentialism_rationality():
    """Best-response play passes the three structural checks; logit play
    fails the duplicated-action one."""
    nash = ConceptSpec.nash(FAST)
    lqre = ConceptSpec.lqre(1.0, solver=FAST)
    mp = make_matching_pennies()
    dup_maps = [[0, 0, 1], [0, 1]]
    assert check_consistency(nash, mp, make_matching_pennies(stake=2.0)).passed
    assert check_consequentialism(nash, mp, dup_maps).passed
    g1 = make_test_game_gx(1.0)
    for p in nash.solve(g1).profiles:
        assert check_rationality(g1, p).passed
    for p in lqre.solve(g1).profiles:
        assert check_rationality(g1, p).passed
    assert not check_consequentialism(lqre, mp, dup_maps).passed
    _report(10, "best-response checks green; duplicated-action check flags logit play")


def test_criterion_11_added_action_shifts_logit_play():
    """An added action with asymmetric opponent payoffs breaks the tie
    between two otherwise identical actions."""
    game = make_iia_game(beta=1.0, delta=0.0)
    res = solve_lqre(game, EXPECTATION, 1.0, FAST)
    assert len(res.profiles) == 1
    q1 = res.profiles[0].distributions[0]
    gap = abs(float(q1[0] - q1[1]))
    assert gap > 1e-3
    _report(11, f"probability gap between the twin actions is {gap:.4f}")
