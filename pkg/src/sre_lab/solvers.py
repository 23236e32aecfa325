"""Equilibrium solvers and membership checks.

Logit response uses a continuity-preserving payoff functional: finite-kernel
atoms evaluate the normalized CGF of the realized action lottery, while atoms
at -inf/+inf use the pure-strategy minimum and maximum over all opponent
profiles (independent of the mixing).  The two coincide whenever opponents
are totally mixed, which every logit fixed point is.

Best-response (Nash-type) membership instead evaluates the statistic of the
realized lottery itself, extremes included, so that profiles with boundary
opponents are judged by the payoffs they can actually reach.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .games import (
    Game,
    MixedProfile,
    action_payoff_matrix,
)
from .statistics import MAStatistic, TAYLOR_CUTOFF

DEDUP_TOL = 1e-6
THREADS_ENV = "SRE_LAB_THREADS"


class SolverError(RuntimeError):
    """No start converged, or a continuation could not be completed."""


class HomotopyBreakdown(SolverError):
    def __init__(self, message: str, trace: list, last_lambda: float):
        super().__init__(message)
        self.trace = trace
        self.last_lambda = last_lambda


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the fixed-point and enumeration machinery."""

    tol_fixed_point: float = 1e-10
    max_iters: int = 100_000
    damping: float = 0.5
    multistarts: int = 16
    homotopy_lambda_max: float = 200.0
    homotopy_steps: int = 400
    support_tol: float = 1e-7
    seed: int = 0
    # Enumeration limits: supports larger than support_cap in total size are
    # skipped, and at most max_enum_supports support profiles are examined.
    support_cap: int = 12
    max_enum_supports: int = 4096

    def __post_init__(self):
        if self.tol_fixed_point <= 0 or self.max_iters <= 0 or self.multistarts < 0:
            raise ValueError("tolerances and iteration budgets must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.homotopy_lambda_max <= 0 or self.homotopy_steps < 2:
            raise ValueError("homotopy grid is too small")
        if self.support_tol <= 0:
            raise ValueError("support_tol must be positive")


@dataclass
class SolveResult:
    """Converged profiles with their fixed-point or argmax residuals."""

    profiles: list[MixedProfile]
    residuals: list[float]
    diagnostics: dict

    def __len__(self) -> int:
        return len(self.profiles)

    def to_json(self) -> dict:
        return {
            "profiles": [p.to_json() for p in self.profiles],
            "residuals": [float(r) for r in self.residuals],
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# payoff functional
# ---------------------------------------------------------------------------


class PhiEvaluator:
    """Per-(game, statistic) cache for evaluating action values quickly."""

    def __init__(self, game: Game, phi: MAStatistic):
        self.game = game
        self.phi = phi
        self.n = game.num_players
        self.tables = [action_payoff_matrix(game, i) for i in range(self.n)]
        self.pure_min = [t.min(axis=1) for t in self.tables]
        self.pure_max = [t.max(axis=1) for t in self.tables]
        self.w_min = phi.weight_at(-math.inf)
        self.w_max = phi.weight_at(math.inf)
        self.w_mean = phi.weight_at(0.0)
        self.finite = [(a, w) for a, w in phi.atoms if math.isfinite(a) and a != 0.0]

    def joint(self, i: int, dists: Sequence[np.ndarray]) -> np.ndarray:
        out = np.array([1.0])
        for j in range(self.n):
            if j != i:
                out = np.multiply.outer(out, dists[j]).ravel()
        return out

    def _finite_kernel(self, table: np.ndarray, joint: np.ndarray, a: float, shift: np.ndarray) -> np.ndarray:
        if abs(a) < TAYLOR_CUTOFF:
            m1 = table @ joint
            m2 = (table**2) @ joint
            m3 = (table**3) @ joint
            var = m2 - m1**2
            kappa3 = m3 - 3 * m1 * m2 + 2 * m1**3
            return m1 + a * var / 2.0 + a * a * kappa3 / 6.0
        weighted = np.exp(a * (table - shift[:, None])) @ joint
        # Underflow guard: fall back to a support-aware shift if needed.
        if np.any(weighted <= 0):
            mask = joint > 0
            sub = table[:, mask]
            shift = sub.max(axis=1) if a > 0 else sub.min(axis=1)
            weighted = np.exp(a * (table - shift[:, None])) @ joint
        return shift + np.log(weighted) / a

    def values(self, i: int, dists: Sequence[np.ndarray], boundary_pure: bool) -> np.ndarray:
        """Action values for player i against the given opponent mixes.

        boundary_pure=True evaluates the -inf/+inf atoms as pure-strategy
        min/max over all opponent profiles (the continuous logit functional);
        False restricts them to the support actually reached, i.e. the raw
        statistic of the realized lottery.
        """
        table = self.tables[i]
        joint = self.joint(i, dists)
        out = np.zeros(table.shape[0])
        if boundary_pure or (self.w_min == 0 and self.w_max == 0):
            lo, hi = self.pure_min[i], self.pure_max[i]
        else:
            mask = joint > 0
            sub = table[:, mask]
            lo, hi = sub.min(axis=1), sub.max(axis=1)
        if self.w_min:
            out += self.w_min * lo
        if self.w_max:
            out += self.w_max * hi
        if self.w_mean:
            out += self.w_mean * (table @ joint)
        for a, w in self.finite:
            shift = self.pure_max[i] if a > 0 else self.pure_min[i]
            out += w * self._finite_kernel(table, joint, a, shift)
        return out


def _logit(values: np.ndarray, lam: float) -> np.ndarray:
    z = lam * values
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def _response(evaluator: PhiEvaluator, lam: float, dists: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [
        _logit(evaluator.values(i, dists, boundary_pure=True), lam) for i in range(evaluator.n)
    ]


def logit_response(game: Game, phi: MAStatistic, lam: float, p: MixedProfile) -> MixedProfile:
    """One application of the logit better-response operator (totally mixed output)."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if not p.matches(game):
        raise ValueError("profile does not match the game")
    evaluator = PhiEvaluator(game, phi)
    return MixedProfile(tuple(_response(evaluator, lam, list(p.distributions))))


def verify_lqre(game: Game, phi: MAStatistic, lam: float, p: MixedProfile) -> float:
    """Sup-norm fixed-point residual of p under the logit response operator."""
    response = logit_response(game, phi, lam, p)
    return p.sup_distance(response)


# ---------------------------------------------------------------------------
# fixed-point iteration
# ---------------------------------------------------------------------------


def _flatten(dists: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate(dists)


def _unflatten(vec: np.ndarray, counts: Sequence[int]) -> list[np.ndarray]:
    out = []
    pos = 0
    for k in counts:
        out.append(vec[pos : pos + k])
        pos += k
    return out


def _project(dists: list[np.ndarray]) -> list[np.ndarray]:
    fixed = []
    for d in dists:
        d = np.clip(d, 0.0, None)
        total = d.sum()
        if total <= 0:
            d = np.full(d.size, 1.0 / d.size)
        else:
            d = d / total
        fixed.append(d)
    return fixed


def _sup_residual(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> float:
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))


def _newton_polish(
    step_fn: Callable[[list[np.ndarray]], list[np.ndarray]],
    dists: list[np.ndarray],
    counts: Sequence[int],
    tol: float,
    max_steps: int = 40,
) -> tuple[list[np.ndarray], float]:
    """Newton iteration on p - T(p) = 0; works at unstable fixed points too.

    Each player's last coordinate is eliminated (it equals one minus the
    rest), which removes the normalization null space that would otherwise
    let finite-difference noise hijack the least-squares step.
    """

    def from_free(theta: np.ndarray) -> list[np.ndarray]:
        parts = []
        pos = 0
        for k in counts:
            head = theta[pos : pos + k - 1]
            pos += k - 1
            parts.append(np.concatenate([head, [1.0 - head.sum()]]))
        return _project(parts)

    def to_free(parts: Sequence[np.ndarray]) -> np.ndarray:
        return np.concatenate([d[:-1] for d in parts])

    def residual_free(theta: np.ndarray) -> np.ndarray:
        parts = from_free(theta)
        return to_free(parts) - to_free(step_fn(parts))

    def full_residual(theta: np.ndarray) -> float:
        parts = from_free(theta)
        return _sup_residual(parts, step_fn(parts))

    theta = to_free(dists)
    dim = theta.size
    if dim == 0:
        only = [np.array([1.0]) for _ in counts]
        return only, _sup_residual(only, step_fn(only))
    f0 = residual_free(theta)
    res = float(np.max(np.abs(f0)))
    best, best_res = theta, res
    h = 1e-7
    # The eliminated coordinate's residual is minus the block sum of the
    # free ones, so drive the free residual below tol / max block size.
    free_tol = tol / max(counts)
    for _ in range(max_steps):
        if res <= free_tol:
            break
        jac = np.empty((dim, dim))
        for d in range(dim):
            bumped = theta.copy()
            bumped[d] += h
            jac[:, d] = (residual_free(bumped) - f0) / h
        try:
            step, *_ = np.linalg.lstsq(jac, -f0, rcond=None)
        except np.linalg.LinAlgError:
            break
        norm = float(np.max(np.abs(step)))
        if not math.isfinite(norm) or norm == 0.0:
            break
        if norm > 0.5:
            step = step * (0.5 / norm)
        # Backtrack: a full step from a near-solution can be dominated by
        # finite-difference noise, so only accept residual improvements.
        improved = False
        for _ in range(8):
            cand = theta + step
            f_cand = residual_free(cand)
            res_cand = float(np.max(np.abs(f_cand)))
            if res_cand < res:
                theta, f0, res = cand, f_cand, res_cand
                improved = True
                break
            step = 0.5 * step
        if not improved:
            break
        if res < best_res:
            best, best_res = theta, res
    final = from_free(best)
    return final, _sup_residual(final, step_fn(final))


def _solve_fixed_point(
    step_fn: Callable[[list[np.ndarray]], list[np.ndarray]],
    start: list[np.ndarray],
    counts: Sequence[int],
    cfg: SolverConfig,
    first_polish: int = 250,
    newton_first: bool = False,
) -> tuple[Optional[list[np.ndarray]], float, int]:
    """Damped iteration with stall-adaptive damping, then a Newton polish.

    Returns (dists or None, residual, iterations).  Fixed damping alone can
    orbit cycling fixed points once the response becomes stiff, so the step
    size shrinks on stall and Newton finishes from the best iterate.  With
    newton_first=True (warm starts near a solution) Newton runs immediately.
    """
    p = [d.copy() for d in start]
    if newton_first:
        polished, pres = _newton_polish(step_fn, p, counts, cfg.tol_fixed_point, max_steps=12)
        if pres <= cfg.tol_fixed_point:
            return polished, pres, 12
        p = polished if pres < math.inf else p
    alpha = cfg.damping
    best = p
    best_res = math.inf
    stall = 0
    iters = 0
    next_polish = min(cfg.max_iters, first_polish)
    while iters < cfg.max_iters:
        t = step_fn(p)
        res = _sup_residual(p, t)
        iters += 1
        if res < best_res * 0.95:
            stall = 0
        else:
            stall += 1
        if res < best_res:
            best, best_res = p, res
        if res <= cfg.tol_fixed_point:
            return p, res, iters
        if stall >= 60:
            alpha = max(alpha * 0.5, 1e-3)
            stall = 0
        p = [(1 - alpha) * a + alpha * b for a, b in zip(p, t)]
        if iters >= next_polish:
            polished, pres = _newton_polish(step_fn, best, counts, cfg.tol_fixed_point)
            iters += 40
            if pres <= cfg.tol_fixed_point:
                return polished, pres, iters
            if pres < best_res:
                best, best_res = polished, pres
                p = [d.copy() for d in polished]
            next_polish = min(cfg.max_iters, next_polish * 4)
    polished, res = _newton_polish(step_fn, best, counts, cfg.tol_fixed_point)
    iters += 40
    if res <= cfg.tol_fixed_point:
        return polished, res, iters
    return None, best_res, iters


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _interior_starts(game: Game, cfg: SolverConfig) -> list[list[np.ndarray]]:
    rng = np.random.default_rng(cfg.seed)
    starts = [[np.full(k, 1.0 / k) for k in game.action_counts]]
    for _ in range(cfg.multistarts):
        starts.append([rng.dirichlet(np.ones(k)) for k in game.action_counts])
    return starts


def _dedup(
    found: list[tuple[list[np.ndarray], float]], tol: float = DEDUP_TOL
) -> list[tuple[list[np.ndarray], float]]:
    keyed = sorted(found, key=lambda item: tuple(np.round(_flatten(item[0]), 9)))
    kept: list[tuple[list[np.ndarray], float]] = []
    for dists, res in keyed:
        dup = False
        for other, other_res in kept:
            if _sup_residual(dists, other) <= tol:
                dup = True
                break
        if not dup:
            kept.append((dists, res))
    return kept


def solve_lqre(game: Game, phi: MAStatistic, lam: float, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """All logit fixed points found by damped multistart iteration.

    At least one fixed point exists for every game and lambda >= 0; if no
    start converges a SolverError is raised rather than returning an empty
    result.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    cfg = cfg or SolverConfig()
    evaluator = PhiEvaluator(game, phi)

    def step(dists: list[np.ndarray]) -> list[np.ndarray]:
        return _response(evaluator, lam, dists)

    starts = _interior_starts(game, cfg)

    def run(start: list[np.ndarray]):
        # Newton-first makes each start a root-finding attempt as well:
        # unstable fixed points trap the damped map in limit cycles but are
        # perfectly reachable for a Newton step from a nearby start.
        return _solve_fixed_point(step, start, game.action_counts, cfg, newton_first=True)

    workers = min(_thread_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, starts))
    else:
        outcomes = [run(s) for s in starts]

    found = [(dists, res) for dists, res, _ in outcomes if dists is not None]
    total_iters = sum(it for _, _, it in outcomes)
    if not found:
        raise SolverError(
            f"no start converged within {cfg.max_iters} iterations (lambda={lam})"
        )
    kept = _dedup(found)
    profiles = [MixedProfile(tuple(d)) for d, _ in kept]
    residuals = [res for _, res in kept]
    diagnostics = {
        "iterations": int(total_iters),
        "starts": len(starts),
        "starts_converged": len(found),
    }
    return SolveResult(profiles, residuals, diagnostics)


def homotopy_lambda_grid(lambda_max: float, steps: int) -> np.ndarray:
    """Zero followed by a geometric ramp spanning four decades up to lambda_max."""
    positive = np.geomspace(lambda_max / 1e4, lambda_max, steps - 1)
    return np.concatenate([[0.0], positive])


def homotopy_trace(
    game: Game,
    phi: MAStatistic,
    lambda_max: float,
    steps: int,
    cfg: Optional[SolverConfig] = None,
) -> list[tuple[float, MixedProfile]]:
    """Warm-started continuation of logit fixed points along increasing lambda.

    Raises HomotopyBreakdown (carrying the partial trace and last good
    lambda) if some step cannot be re-converged.
    """
    if lambda_max <= 0 or steps < 2:
        raise ValueError("need lambda_max > 0 and steps >= 2")
    cfg = cfg or SolverConfig()
    evaluator = PhiEvaluator(game, phi)
    trace: list[tuple[float, MixedProfile]] = []
    current = [np.full(k, 1.0 / k) for k in game.action_counts]
    for lam in homotopy_lambda_grid(lambda_max, steps):
        def step(dists: list[np.ndarray], _lam=lam) -> list[np.ndarray]:
            return _response(evaluator, _lam, dists)

        dists, res, _ = _solve_fixed_point(
            step, current, game.action_counts, cfg, first_polish=80, newton_first=lam > 0
        )
        if dists is None:
            last = trace[-1][0] if trace else 0.0
            raise HomotopyBreakdown(
                f"continuation stalled at lambda={lam:g} (last good {last:g})", trace, last
            )
        current = dists
        trace.append((float(lam), MixedProfile(tuple(dists))))
    return trace


# ---------------------------------------------------------------------------
# best-response (Nash-type) equilibria
# ---------------------------------------------------------------------------


def statistic_values(game: Game, phi: MAStatistic, p: MixedProfile, i: int) -> np.ndarray:
    """Raw statistic of each action lottery of player i under p."""
    evaluator = PhiEvaluator(game, phi)
    return evaluator.values(i, list(p.distributions), boundary_pure=False)


def verify_nash_phi(
    game: Game,
    phi: MAStatistic,
    p: MixedProfile,
    tol: float = 1e-9,
    support_tol: float = 1e-7,
) -> bool:
    """True when every action played above support_tol is within tol of the best value."""
    if not p.matches(game):
        raise ValueError("profile does not match the game")
    evaluator = PhiEvaluator(game, phi)
    dists = list(p.distributions)
    for i in range(game.num_players):
        vals = evaluator.values(i, dists, boundary_pure=False)
        ceiling = vals.max() - tol
        for a in range(game.action_counts[i]):
            if p.distributions[i][a] > support_tol and vals[a] < ceiling:
                return False
    return True


def _support_residual(
    evaluator: PhiEvaluator, supports: Sequence[Sequence[int]], dists: list[np.ndarray]
) -> np.ndarray:
    parts = []
    for i, sup in enumerate(supports):
        if len(sup) < 2:
            continue
        vals = evaluator.values(i, dists, boundary_pure=False)[list(sup)]
        parts.append(vals[:-1] - vals[-1])
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)


def _dists_from_theta(
    theta: np.ndarray, supports: Sequence[Sequence[int]], counts: Sequence[int]
) -> list[np.ndarray]:
    dists = []
    pos = 0
    for sup, k in zip(supports, counts):
        vec = np.zeros(k)
        if len(sup) == 1:
            vec[sup[0]] = 1.0
        else:
            free = np.clip(theta[pos : pos + len(sup) - 1], 0.0, 1.0)
            pos += len(sup) - 1
            last = max(0.0, 1.0 - free.sum())
            vec[list(sup[:-1])] = free
            vec[sup[-1]] = last
            total = vec.sum()
            if total > 0:
                vec /= total
        dists.append(vec)
    return dists


def _solve_support(
    evaluator: PhiEvaluator,
    supports: Sequence[Sequence[int]],
    cfg: SolverConfig,
    rng: np.random.Generator,
    scale: float,
) -> Optional[list[np.ndarray]]:
    """Find within-support indifference by Newton on the value differences."""
    counts = evaluator.game.action_counts
    dim = sum(len(s) - 1 for s in supports)
    if dim == 0:
        return _dists_from_theta(np.zeros(0), supports, counts)

    def residual(theta: np.ndarray) -> np.ndarray:
        return _support_residual(evaluator, supports, _dists_from_theta(theta, supports, counts))

    tol = 1e-10 * scale
    starts = [np.concatenate([np.full(len(s) - 1, 1.0 / len(s)) for s in supports if len(s) > 1])]
    for _ in range(2):
        starts.append(
            np.concatenate([rng.dirichlet(np.ones(len(s)))[:-1] for s in supports if len(s) > 1])
        )
    h = 1e-7
    insensitive = False
    for theta in starts:
        if insensitive:
            break
        theta = theta.copy()
        ok = False
        initial = None
        for it in range(24):
            f0 = residual(theta)
            gap = float(np.max(np.abs(f0)))
            if initial is None:
                initial = gap
            if gap <= tol:
                ok = True
                break
            # No progress after a few steps means this support is hopeless.
            if it == 8 and gap > 0.5 * initial:
                break
            jac = np.empty((f0.size, dim))
            for d in range(dim):
                bumped = theta.copy()
                bumped[d] += h
                jac[:, d] = (residual(bumped) - f0) / h
            if float(np.max(np.abs(jac))) < 1e-9 * scale:
                insensitive = True  # values do not react to this support's mixing
                break
            try:
                step, *_ = np.linalg.lstsq(jac, -f0, rcond=None)
            except np.linalg.LinAlgError:
                break
            norm = float(np.max(np.abs(step)))
            if not math.isfinite(norm):
                break
            if norm > 0.4:
                step = step * (0.4 / norm)
            theta = theta + step
        if not ok:
            continue
        dists = _dists_from_theta(theta, supports, counts)
        valid = True
        for sup, vec in zip(supports, dists):
            probs = vec[list(sup)]
            if probs.min() <= 1e-9:
                valid = False  # boundary case; a smaller support covers it
                break
        if valid:
            return dists
    return None


def _support_profiles(counts: Sequence[int]):
    per_player = []
    for k in counts:
        subsets = []
        for size in range(1, k + 1):
            subsets.extend(itertools.combinations(range(k), size))
        per_player.append(subsets)
    yield from sorted(
        itertools.product(*per_player), key=lambda sups: sum(len(s) for s in sups)
    )


def solve_nash_phi(game: Game, phi: MAStatistic, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Best-response equilibria for a monotone additive statistic.

    Two stages: candidates from a logit continuation in lambda, then support
    enumeration with within-support indifference solving.  An empty result is
    a legitimate outcome (equilibria can fail to exist when the statistic
    weights the extremes) and is reported, not raised.
    """
    cfg = cfg or SolverConfig()
    evaluator = PhiEvaluator(game, phi)
    scale = 1.0 + float(np.max(np.abs(game.payoffs)))
    rng = np.random.default_rng(cfg.seed + 1)
    found: list[tuple[list[np.ndarray], float]] = []
    diagnostics: dict = {}

    # Stage 1: limit candidates along the logit continuation.
    homotopy_candidates = 0
    trace: list[tuple[float, MixedProfile]] = []
    try:
        trace = homotopy_trace(
            game, phi, cfg.homotopy_lambda_max, min(cfg.homotopy_steps, 160), cfg
        )
    except HomotopyBreakdown as breakdown:
        trace = breakdown.trace
        diagnostics["homotopy_breakdown_lambda"] = breakdown.last_lambda
    candidate_supports = set()
    if trace:
        end = trace[-1][1]
        for cut in (1e-2, 1e-4):
            sups = tuple(
                tuple(np.flatnonzero(d > cut * d.max())) for d in end.distributions
            )
            if all(len(s) > 0 for s in sups):
                candidate_supports.add(sups)
        candidate_supports.add(tuple((int(np.argmax(d)),) for d in end.distributions))
        # Probability-ranked prefixes catch near-tied classes that a fixed
        # threshold splits the wrong way; bounded so the product stays small.
        prefix_lists = []
        for d in end.distributions:
            order = np.argsort(-d, kind="stable")
            prefix_lists.append(
                [tuple(sorted(order[:size].tolist())) for size in range(1, min(d.size, cfg.support_cap) + 1)]
            )
        n_combos = 1
        for choices in prefix_lists:
            n_combos *= len(choices)
        if n_combos <= 256:
            for sups in itertools.product(*prefix_lists):
                if sum(len(s) for s in sups) <= cfg.support_cap:
                    candidate_supports.add(tuple(sups))
    for sups in sorted(candidate_supports):
        dists = _solve_support(evaluator, sups, cfg, rng, scale)
        if dists is None:
            continue
        profile = MixedProfile(tuple(dists))
        if verify_nash_phi(game, phi, profile, support_tol=cfg.support_tol):
            found.append((dists, 0.0))
            homotopy_candidates += 1
    diagnostics["homotopy_candidates"] = homotopy_candidates

    # Stage 2: support enumeration.
    examined = 0
    skipped_by_cap = 0
    truncated = False
    if cfg.max_enum_supports > 0:
        for sups in _support_profiles(game.action_counts):
            if sum(len(s) for s in sups) > cfg.support_cap:
                skipped_by_cap += 1
                continue
            if examined >= cfg.max_enum_supports:
                truncated = True
                break
            examined += 1
            dists = _solve_support(evaluator, sups, cfg, rng, scale)
            if dists is None:
                continue
            profile = MixedProfile(tuple(dists))
            if verify_nash_phi(game, phi, profile, support_tol=cfg.support_tol):
                found.append((dists, 0.0))
    diagnostics["enumeration_examined"] = examined
    diagnostics["enumeration_truncated"] = truncated or skipped_by_cap > 0
    diagnostics["enumeration_skipped_by_cap"] = skipped_by_cap
    diagnostics["support_cap"] = cfg.support_cap

    kept = _dedup(found)
    profiles = [MixedProfile(tuple(d)) for d, _ in kept]
    residuals = []
    for prof in profiles:
        gaps = []
        for i in range(game.num_players):
            vals = evaluator.values(i, list(prof.distributions), boundary_pure=False)
            played = prof.distributions[i] > cfg.support_tol
            gaps.append(float(vals.max() - vals[played].min()) if played.any() else 0.0)
        residuals.append(max(gaps))
    return SolveResult(profiles, residuals, diagnostics)


# ---------------------------------------------------------------------------
# ordinal membership checks
# ---------------------------------------------------------------------------


def verify_fosd_nash(game: Game, p: MixedProfile, support_tol: float = 1e-7) -> list[dict]:
    """Violations of 'never play a strictly dominated lottery'; empty means member."""
    from .games import action_lottery
    from .lotteries import DominanceVerdict, fosd_compare

    if not p.matches(game):
        raise ValueError("profile does not match the game")
    violations = []
    for i in range(game.num_players):
        lotteries = [action_lottery(game, i, a, p) for a in range(game.action_counts[i])]
        for a in range(game.action_counts[i]):
            if p.distributions[i][a] <= support_tol:
                continue
            for b in range(game.action_counts[i]):
                if b == a:
                    continue
                if fosd_compare(lotteries[b], lotteries[a]) is DominanceVerdict.STRICT_FOSD:
                    violations.append(
                        {
                            "kind": "dominated_action_played",
                            "player": i,
                            "action": a,
                            "dominated_by": b,
                            "probability": float(p.distributions[i][a]),
                        }
                    )
    return violations


def verify_fosd_qre(game: Game, p: MixedProfile, tol: float = 1e-7) -> list[dict]:
    """Violations of interiority or of weak-dominance-respecting probabilities."""
    from .games import action_lottery
    from .lotteries import weakly_dominates

    if not p.matches(game):
        raise ValueError("profile does not match the game")
    violations = []
    for i in range(game.num_players):
        dist = p.distributions[i]
        for a in range(game.action_counts[i]):
            if dist[a] <= tol:
                violations.append(
                    {"kind": "interiority", "player": i, "action": a, "probability": float(dist[a])}
                )
        lotteries = [action_lottery(game, i, a, p) for a in range(game.action_counts[i])]
        for a in range(game.action_counts[i]):
            for b in range(game.action_counts[i]):
                if a == b:
                    continue
                if weakly_dominates(lotteries[a], lotteries[b]) and dist[a] < dist[b] - tol:
                    violations.append(
                        {
                            "kind": "monotonicity",
                            "player": i,
                            "action": a,
                            "below": b,
                            "gap": float(dist[b] - dist[a]),
                        }
                    )
    return violations


# ---------------------------------------------------------------------------
# solution concepts
# ---------------------------------------------------------------------------

CONCEPT_KINDS = ("nash", "nash-phi", "lqre", "fosd-nash", "fosd-qre")


@dataclass(frozen=True)
class ConceptSpec:
    """A solution concept plus the solver configuration used to compute it."""

    kind: str
    phi: MAStatistic = field(default_factory=MAStatistic.expectation)
    lam: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.kind not in CONCEPT_KINDS:
            raise ValueError(f"unknown concept kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.kind == "nash" and not self.phi.is_expectation:
            raise ValueError("plain nash responds to the expectation; use nash-phi")

    # -- constructors ------------------------------------------------------

    @classmethod
    def nash(cls, solver: Optional[SolverConfig] = None) -> "ConceptSpec":
        return cls("nash", solver=solver or SolverConfig())

    @classmethod
    def nash_phi(cls, phi: MAStatistic, solver: Optional[SolverConfig] = None) -> "ConceptSpec":
        return cls("nash-phi", phi=phi, solver=solver or SolverConfig())

    @classmethod
    def lqre(
        cls,
        lam: float,
        phi: Optional[MAStatistic] = None,
        solver: Optional[SolverConfig] = None,
    ) -> "ConceptSpec":
        return cls("lqre", phi=phi or MAStatistic.expectation(), lam=lam, solver=solver or SolverConfig())

    @classmethod
    def fosd_nash(cls) -> "ConceptSpec":
        return cls("fosd-nash")

    @classmethod
    def fosd_qre(cls) -> "ConceptSpec":
        return cls("fosd-qre")

    def with_solver(self, solver: SolverConfig) -> "ConceptSpec":
        return replace(self, solver=solver)

    def label(self) -> str:
        if self.kind == "lqre":
            return f"lqre(lambda={self.lam:g}, phi={self.phi.describe()})"
        if self.kind in ("nash", "nash-phi"):
            return f"nash(phi={self.phi.describe()})"
        return self.kind

    @property
    def solvable(self) -> bool:
        return self.kind in ("nash", "nash-phi", "lqre")

    # -- behavior ----------------------------------------------------------

    def solve(self, game: Game) -> SolveResult:
        if self.kind == "lqre":
            return solve_lqre(game, self.phi, self.lam, self.solver)
        if self.kind in ("nash", "nash-phi"):
            return solve_nash_phi(game, self.phi, self.solver)
        raise ValueError(f"{self.kind} is check-only and cannot be solved for")

    def membership_residual(self, game: Game, p: MixedProfile) -> Optional[float]:
        if self.kind == "lqre":
            return verify_lqre(game, self.phi, self.lam, p)
        return None

    def is_member(self, game: Game, p: MixedProfile, tol: float = 1e-8) -> bool:
        if self.kind == "lqre":
            return verify_lqre(game, self.phi, self.lam, p) <= tol
        if self.kind in ("nash", "nash-phi"):
            return verify_nash_phi(game, self.phi, p, tol=tol, support_tol=self.solver.support_tol)
        if self.kind == "fosd-nash":
            return not verify_fosd_nash(game, p, support_tol=self.solver.support_tol)
        return not verify_fosd_qre(game, p, tol=self.solver.support_tol)

    def membership_report(self, game: Game, p: MixedProfile, tol: float = 1e-8) -> dict:
        report: dict = {"concept": self.label(), "tolerance": tol}
        if self.kind == "lqre":
            residual = verify_lqre(game, self.phi, self.lam, p)
            report["residual"] = residual
            report["member"] = residual <= tol
        elif self.kind in ("nash", "nash-phi"):
            report["member"] = verify_nash_phi(
                game, self.phi, p, tol=tol, support_tol=self.solver.support_tol
            )
        elif self.kind == "fosd-nash":
            violations = verify_fosd_nash(game, p, support_tol=self.solver.support_tol)
            report["violations"] = violations
            report["member"] = not violations
        else:
            violations = verify_fosd_qre(game, p, tol=self.solver.support_tol)
            report["violations"] = violations
            report["member"] = not violations
        return report
