"""Executable checks of solution-concept axioms on concrete games.

Every check returns an AxiomReport listing the violations it found; a report
passes exactly when the list is empty.  Universally quantified axioms are
checked over whatever instances the caller supplies (or the seeded random
corpus in run_suite) — reports describe what was checked and never claim a
universal proof.  Membership is always residual-based through the concept's
verifier, since solutions are numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .games import (
    Game,
    MixedProfile,
    PlayerPermutation,
    action_lottery,
    blend_games,
    blow_up,
    compose,
    expected_payoffs,
    permute_players,
    permute_profile,
    product_profile,
    push_profile,
    scale_game,
    strategic_shift,
)
from .lotteries import DominanceVerdict, fosd_compare
from .solvers import ConceptSpec, SolveResult


@dataclass
class AxiomReport:
    """Outcome of one axiom check; passed is equivalent to 'no violations'."""

    axiom: str
    instances_checked: int
    violations: list[dict] = field(default_factory=list)
    vacuous: bool = False
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "instances_checked": int(self.instances_checked),
            "violations": self.violations,
            "passed": self.passed,
            "vacuous": self.vacuous,
            "notes": self.notes,
        }


def _describe(game: Game) -> str:
    return f"{game.num_players}p:{'x'.join(str(k) for k in game.action_counts)}"


# ---------------------------------------------------------------------------
# monotonicity and interiority of a concrete profile
# ---------------------------------------------------------------------------


def check_distribution_monotonicity(game: Game, p: MixedProfile, tol: float = 1e-9) -> AxiomReport:
    """Strictly dominated lotteries may not be played more than their dominators."""
    violations = []
    instances = 0
    strict_pairs = 0
    for i in range(game.num_players):
        lots = [action_lottery(game, i, a, p) for a in range(game.action_counts[i])]
        dist = p.distributions[i]
        for a in range(game.action_counts[i]):
            for b in range(game.action_counts[i]):
                if a == b:
                    continue
                instances += 1
                if fosd_compare(lots[a], lots[b]) is DominanceVerdict.STRICT_FOSD:
                    strict_pairs += 1
                    if dist[a] < dist[b] - tol:
                        violations.append(
                            {
                                "game": _describe(game),
                                "player": i,
                                "pair": [a, b],
                                "magnitude": float(dist[b] - dist[a]),
                            }
                        )
    return AxiomReport(
        "distribution-monotonicity",
        instances,
        violations,
        vacuous=strict_pairs == 0,
        notes="no strictly ranked pairs under this profile" if strict_pairs == 0 else "",
    )


def check_expectation_monotonicity(game: Game, p: MixedProfile, tol: float = 1e-9) -> AxiomReport:
    """Higher expected payoff may not come with strictly lower probability."""
    violations = []
    instances = 0
    for i in range(game.num_players):
        means = expected_payoffs(game, i, p)
        dist = p.distributions[i]
        for a in range(game.action_counts[i]):
            for b in range(game.action_counts[i]):
                if a == b:
                    continue
                instances += 1
                if means[a] > means[b] + tol and dist[a] < dist[b] - tol:
                    violations.append(
                        {
                            "game": _describe(game),
                            "player": i,
                            "pair": [a, b],
                            "magnitude": float(dist[b] - dist[a]),
                        }
                    )
    return AxiomReport("expectation-monotonicity", instances, violations)


def check_interiority(p: MixedProfile, tol: float = 1e-9) -> AxiomReport:
    violations = []
    for i, dist in enumerate(p.distributions):
        for a, prob in enumerate(dist):
            if prob <= tol:
                violations.append(
                    {"player": i, "action": a, "magnitude": float(prob)}
                )
    return AxiomReport("interiority", sum(len(d) for d in p.distributions), violations)


def check_neutrality(
    game: Game, p: MixedProfile, mode: str = "expectation", tol: float = 1e-9
) -> AxiomReport:
    """Actions with equal payoffs (in expectation or in distribution) get equal mass."""
    if mode not in ("expectation", "distribution"):
        raise ValueError("mode must be 'expectation' or 'distribution'")
    violations = []
    instances = 0
    for i in range(game.num_players):
        dist = p.distributions[i]
        if mode == "expectation":
            means = expected_payoffs(game, i, p)
        else:
            lots = [action_lottery(game, i, a, p) for a in range(game.action_counts[i])]
        for a in range(game.action_counts[i]):
            for b in range(a + 1, game.action_counts[i]):
                instances += 1
                if mode == "expectation":
                    equal = abs(means[a] - means[b]) <= tol
                else:
                    equal = fosd_compare(lots[a], lots[b]) is DominanceVerdict.EQUAL
                if equal and abs(dist[a] - dist[b]) > tol:
                    violations.append(
                        {
                            "game": _describe(game),
                            "player": i,
                            "pair": [a, b],
                            "magnitude": float(abs(dist[a] - dist[b])),
                        }
                    )
    return AxiomReport(f"{mode}-neutrality", instances, violations)


def check_rationality(game: Game, p: MixedProfile, tol: float = 1e-7) -> AxiomReport:
    """Strictly dominant actions must receive positive probability."""
    violations = []
    dominant_found = 0
    for i in range(game.num_players):
        table = np.moveaxis(game.player_payoffs(i), i, 0).reshape(game.action_counts[i], -1)
        for a in range(game.action_counts[i]):
            others = [b for b in range(game.action_counts[i]) if b != a]
            if not others:
                continue
            if all(np.all(table[a] > table[b]) for b in others):
                dominant_found += 1
                if p.distributions[i][a] <= tol:
                    violations.append(
                        {
                            "game": _describe(game),
                            "player": i,
                            "action": a,
                            "magnitude": float(p.distributions[i][a]),
                        }
                    )
    return AxiomReport(
        "rationality",
        dominant_found,
        violations,
        vacuous=dominant_found == 0,
        notes="no strictly dominant actions" if dominant_found == 0 else "",
    )


# ---------------------------------------------------------------------------
# axioms that quantify over solved games
# ---------------------------------------------------------------------------


def _solutions(spec: ConceptSpec, game: Game) -> SolveResult:
    if not spec.solvable:
        raise ValueError(f"{spec.kind} cannot be solved for; use a solvable concept")
    return spec.solve(game)


def check_bracketing(spec: ConceptSpec, g: Game, h: Game, tol: float = 1e-8) -> AxiomReport:
    """Products of component solutions must solve the composite game."""
    sols_g = _solutions(spec, g)
    sols_h = _solutions(spec, h)
    composite = compose(g, h)
    violations = []
    instances = 0
    for p in sols_g.profiles:
        for q in sols_h.profiles:
            instances += 1
            prod = product_profile(p, q)
            report = spec.membership_report(composite, prod, tol=tol)
            if not report["member"]:
                violations.append(
                    {
                        "game": f"{_describe(g)} (x) {_describe(h)}",
                        "residual": report.get("residual"),
                        "magnitude": float(report.get("residual") or 1.0),
                    }
                )
    return AxiomReport("bracketing", instances, violations, vacuous=instances == 0)


def check_anonymity(
    spec: ConceptSpec, game: Game, pi: PlayerPermutation, tol: float = 1e-8
) -> AxiomReport:
    """Permuting player names must permute the solution set."""
    sols = _solutions(spec, game)
    permuted_game = permute_players(game, pi)
    violations = []
    for p in sols.profiles:
        permuted = permute_profile(p, pi)
        report = spec.membership_report(permuted_game, permuted, tol=tol)
        if not report["member"]:
            violations.append(
                {
                    "game": _describe(game),
                    "permutation": list(pi.mapping),
                    "magnitude": float(report.get("residual") or 1.0),
                }
            )
    return AxiomReport("anonymity", len(sols.profiles), violations)


def check_scale_invariance(
    spec: ConceptSpec,
    game: Game,
    alphas: Sequence[float] = (0.25, 0.5, 0.75),
    tol: float = 1e-8,
) -> AxiomReport:
    """Uniform solutions must stay solutions when all payoffs shrink by alpha."""
    for alpha in alphas:
        if not 0 < alpha < 1:
            raise ValueError("alphas must lie in (0, 1)")
    sols = _solutions(spec, game)
    uniform_sols = [p for p in sols.profiles if p.is_uniform(1e-9)]
    if not uniform_sols:
        return AxiomReport(
            "scale-invariance",
            0,
            vacuous=True,
            notes="no uniform solution found; check is vacuous",
        )
    violations = []
    instances = 0
    for alpha in alphas:
        scaled = scale_game(game, alpha)
        for p in uniform_sols:
            instances += 1
            report = spec.membership_report(scaled, p, tol=tol)
            if not report["member"]:
                violations.append(
                    {
                        "game": _describe(game),
                        "alpha": alpha,
                        "magnitude": float(report.get("residual") or 1.0),
                    }
                )
    return AxiomReport("scale-invariance", instances, violations)


def check_strategic_invariance(
    spec: ConceptSpec, game: Game, shifts: Sequence[np.ndarray], tol: float = 1e-8
) -> AxiomReport:
    """Opponent-dependent payoff shifts must not change the solution set."""
    shifted = strategic_shift(game, shifts)
    violations = []
    instances = 0
    for source, target, direction in (
        (game, shifted, "forward"),
        (shifted, game, "backward"),
    ):
        for p in _solutions(spec, source).profiles:
            instances += 1
            report = spec.membership_report(target, p, tol=tol)
            if not report["member"]:
                violations.append(
                    {
                        "game": _describe(game),
                        "direction": direction,
                        "magnitude": float(report.get("residual") or 1.0),
                    }
                )
    return AxiomReport("strategic-invariance", instances, violations)


def check_consistency(
    spec: ConceptSpec,
    game_u: Game,
    game_v: Game,
    alphas: Sequence[float] = (0.25, 0.5, 0.75),
    tol: float = 1e-8,
) -> AxiomReport:
    """Common solutions of two games must solve every convex payoff blend."""
    if game_u.action_counts != game_v.action_counts:
        raise ValueError("consistency needs games on the same action sets")
    sols_u = _solutions(spec, game_u).profiles
    sols_v = _solutions(spec, game_v).profiles
    common = []
    for p in sols_u:
        if any(p.sup_distance(q) <= 1e-6 for q in sols_v):
            common.append(p)
    if not common:
        return AxiomReport(
            "consistency",
            0,
            vacuous=True,
            notes="solution sets do not intersect; check is vacuous",
        )
    violations = []
    instances = 0
    for alpha in alphas:
        blended = blend_games(game_u, game_v, alpha)
        for p in common:
            instances += 1
            report = spec.membership_report(blended, p, tol=tol)
            if not report["member"]:
                violations.append(
                    {
                        "game": f"blend({_describe(game_u)}, alpha={alpha})",
                        "magnitude": float(report.get("residual") or 1.0),
                    }
                )
    return AxiomReport("consistency", instances, violations)


def _lifts(q: MixedProfile, maps: Sequence[Sequence[int]], blown: Game) -> list[MixedProfile]:
    """Two canonical lifts of a base-game profile onto a blow-up.

    The definition quantifies over every split of duplicated mass, which is
    infinite; mass-on-first-preimage and even-split give a sound falsifier
    and a deliberately incomplete certifier.
    """
    first, even = [], []
    for i, f in enumerate(maps):
        arr = np.asarray(f, dtype=int)
        vec_first = np.zeros(len(arr))
        vec_even = np.zeros(len(arr))
        for b in range(int(arr.max()) + 1):
            pre = np.flatnonzero(arr == b)
            vec_first[pre[0]] = q.distributions[i][b]
            vec_even[pre] = q.distributions[i][b] / pre.size
        first.append(vec_first)
        even.append(vec_even)
    return [MixedProfile(tuple(first)), MixedProfile(tuple(even))]


def check_consequentialism(
    spec: ConceptSpec, base: Game, maps: Sequence[Sequence[int]], tol: float = 1e-8
) -> AxiomReport:
    """Duplicating actions must only split probabilities, in both directions."""
    blown = blow_up(base, maps)
    violations = []
    instances = 0
    for p in _solutions(spec, blown).profiles:
        instances += 1
        pushed = push_profile(p, maps, base)
        report = spec.membership_report(base, pushed, tol=tol)
        if not report["member"]:
            violations.append(
                {
                    "game": _describe(blown),
                    "direction": "push",
                    "magnitude": float(report.get("residual") or 1.0),
                }
            )
    for q in _solutions(spec, base).profiles:
        for lift in _lifts(q, maps, blown):
            instances += 1
            report = spec.membership_report(blown, lift, tol=tol)
            if not report["member"]:
                violations.append(
                    {
                        "game": _describe(blown),
                        "direction": "lift",
                        "magnitude": float(report.get("residual") or 1.0),
                    }
                )
    return AxiomReport("consequentialism", instances, violations)
