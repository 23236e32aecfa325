"""Finitely supported lotteries on the real line.

A lottery is a finite list of (outcome, weight) atoms with positive weights
summing to one.  This module provides construction, convolution (sums of
independent draws), first-order stochastic dominance comparison, grid
approximations of the CDF, probability mixtures, affine rescaling, and a
brute-force scan for dominance of iterated independent sums.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

# Outcomes closer than this are merged into a single atom.
MERGE_TOL = 1e-12
# Atoms lighter than this are dropped and the rest renormalized.
WEIGHT_FLOOR = 1e-15
# Total weight must be within this of 1 on construction.
WEIGHT_SUM_TOL = 1e-12
# CDF comparison tolerance for Equal / weak verdicts.
CDF_TOL = 1e-10
# Gap beyond which a CDF difference counts as a strict dominance margin.
CDF_STRICT_TOL = 10 * CDF_TOL


def _canonical(outcomes: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort, merge near-equal outcomes, drop dust, renormalize."""
    order = np.argsort(outcomes, kind="stable")
    xs, ws = outcomes[order], weights[order]
    out_x: list[float] = []
    out_w: list[float] = []
    for x, w in zip(xs, ws):
        if out_x and x - out_x[-1] <= MERGE_TOL:
            out_w[-1] += w
        else:
            out_x.append(float(x))
            out_w.append(float(w))
    xs = np.array(out_x)
    ws = np.array(out_w)
    keep = ws >= WEIGHT_FLOOR
    if not keep.all():
        xs, ws = xs[keep], ws[keep]
    if xs.size == 0:
        raise ValueError("lottery has no atoms left after filtering")
    ws = ws / ws.sum()
    return xs, ws


@dataclass(frozen=True, eq=False)
class Lottery:
    """A finitely supported probability distribution over the reals.

    Atoms are kept sorted with strictly increasing outcomes; constructing a
    Lottery merges outcomes closer than ``MERGE_TOL`` and renormalizes after
    dropping weights below ``WEIGHT_FLOOR``.
    """

    outcomes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.outcomes, dtype=float).ravel()
        ws = np.asarray(self.weights, dtype=float).ravel()
        if xs.size == 0:
            raise ValueError("a lottery needs at least one atom")
        if xs.shape != ws.shape:
            raise ValueError("outcomes and weights must have equal length")
        if not np.all(np.isfinite(xs)):
            raise ValueError("outcomes must be finite")
        if np.any(ws < 0):
            raise ValueError("weights must be nonnegative")
        if abs(ws.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {ws.sum()!r}, expected 1")
        xs, ws = _canonical(xs, ws)
        xs.setflags(write=False)
        ws.setflags(write=False)
        object.__setattr__(self, "outcomes", xs)
        object.__setattr__(self, "weights", ws)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_vector(cls, values: Sequence[float]) -> "Lottery":
        """Uniform lottery over the coordinates of a vector (duplicates merge)."""
        xs = np.asarray(values, dtype=float).ravel()
        if xs.size == 0:
            raise ValueError("empty vector")
        return cls(xs, np.full(xs.size, 1.0 / xs.size))

    @classmethod
    def degenerate(cls, value: float) -> "Lottery":
        return cls(np.array([float(value)]), np.array([1.0]))

    @classmethod
    def from_pairs(cls, atoms: Iterable[tuple[float, float]]) -> "Lottery":
        pairs = list(atoms)
        return cls(np.array([x for x, _ in pairs]), np.array([w for _, w in pairs]))

    # -- basic queries -----------------------------------------------------

    def __len__(self) -> int:
        return int(self.outcomes.size)

    def __repr__(self) -> str:
        atoms = ", ".join(f"{x:g}: {w:.6g}" for x, w in zip(self.outcomes, self.weights))
        return f"Lottery({{{atoms}}})"

    def mean(self) -> float:
        return float(self.weights @ self.outcomes)

    def min(self) -> float:
        return float(self.outcomes[0])

    def max(self) -> float:
        return float(self.outcomes[-1])

    def cdf(self, thresholds: np.ndarray) -> np.ndarray:
        """P(X <= t) for each t, treating outcomes within MERGE_TOL of t as <= t."""
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        idx = np.searchsorted(self.outcomes, np.asarray(thresholds, dtype=float) + MERGE_TOL)
        return cum[idx]

    def is_close(self, other: "Lottery", tol: float = 1e-9) -> bool:
        return (
            len(self) == len(other)
            and np.allclose(self.outcomes, other.outcomes, atol=tol, rtol=0)
            and np.allclose(self.weights, other.weights, atol=tol, rtol=0)
        )

    # -- JSON --------------------------------------------------------------

    def to_json(self) -> dict:
        return {"atoms": [{"x": float(x), "p": float(w)} for x, w in zip(self.outcomes, self.weights)]}

    @classmethod
    def from_json(cls, obj: dict) -> "Lottery":
        atoms = obj["atoms"]
        return cls.from_pairs((a["x"], a["p"]) for a in atoms)

    @classmethod
    def load(cls, path: str) -> "Lottery":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


class DominanceVerdict(Enum):
    """Outcome of a CDF comparison between two lotteries.

    STRICT_FOSD means the left lottery first-order dominates the right with a
    margin above ``CDF_STRICT_TOL``.  WEAK_ONLY means one-sided dominance was
    detected but the largest gap sits between the equality tolerance and the
    strictness threshold, so neither Equal nor a strict call is safe.
    """

    EQUAL = "equal"
    STRICT_FOSD = "strict_fosd"
    STRICT_FOSD_REVERSED = "strict_fosd_reversed"
    WEAK_ONLY = "weak_only"
    INCOMPARABLE = "incomparable"


def fosd_compare(left: Lottery, right: Lottery, tol: float = CDF_TOL) -> DominanceVerdict:
    """Compare CDFs on the merged outcome grid.

    Dominance is lower-CDF: left dominates when F_left <= F_right everywhere
    and is strictly below somewhere.
    """
    grid = np.union1d(left.outcomes, right.outcomes)
    diff = left.cdf(grid) - right.cdf(grid)
    d_max = float(diff.max())
    d_min = float(diff.min())
    strict = max(CDF_STRICT_TOL, 10 * tol)
    if d_max <= tol and d_min >= -tol:
        return DominanceVerdict.EQUAL
    if d_max <= tol:
        return DominanceVerdict.STRICT_FOSD if d_min < -strict else DominanceVerdict.WEAK_ONLY
    if d_min >= -tol:
        return DominanceVerdict.STRICT_FOSD_REVERSED if d_max > strict else DominanceVerdict.WEAK_ONLY
    return DominanceVerdict.INCOMPARABLE


def weakly_dominates(left: Lottery, right: Lottery, tol: float = CDF_TOL) -> bool:
    """True when F_left <= F_right + tol everywhere (left >= right in FOSD)."""
    grid = np.union1d(left.outcomes, right.outcomes)
    return bool(np.max(left.cdf(grid) - right.cdf(grid)) <= tol)


def convolve(x: Lottery, y: Lottery) -> Lottery:
    """Distribution of the sum of independent draws from x and y."""
    sums = np.add.outer(x.outcomes, y.outcomes).ravel()
    wts = np.multiply.outer(x.weights, y.weights).ravel()
    return Lottery(sums, wts)


def iid_sum(x: Lottery, m: int) -> Lottery:
    """Sum of m independent copies of x, computed by iterated doubling."""
    if m < 1:
        raise ValueError("m must be >= 1")
    result: Optional[Lottery] = None
    base = x
    while m:
        if m & 1:
            result = base if result is None else convolve(result, base)
        m >>= 1
        if m:
            base = convolve(base, base)
    assert result is not None
    return result


def mix(x: Lottery, beta: float, z: Lottery) -> Lottery:
    """Compound lottery equal to x with probability beta and z otherwise."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    if beta == 1.0:
        return x
    if beta == 0.0:
        return z
    return Lottery(
        np.concatenate([x.outcomes, z.outcomes]),
        np.concatenate([beta * x.weights, (1.0 - beta) * z.weights]),
    )


def scale_shift(x: Lottery, alpha: float, shift: float = 0.0) -> Lottery:
    """Lottery of alpha * X + shift; alpha = 0 collapses to the point mass at shift."""
    if alpha == 0.0:
        return Lottery.degenerate(shift)
    return Lottery(alpha * x.outcomes + shift, x.weights)


def _grid_cdf(x: Lottery, n: int, round_up: bool) -> Lottery:
    if n < 1 or n > 20:
        raise ValueError("n must be in 1..20 so that n! stays representable")
    fact = math.factorial(n)
    cdf = np.cumsum(x.weights)
    scaled = cdf * fact
    # Snap to integers before rounding: float noise must not flip ceil/floor.
    snapped = np.rint(scaled)
    near = np.abs(scaled - snapped) <= 1e-6
    rounded = np.where(near, snapped, np.ceil(scaled) if round_up else np.floor(scaled))
    rounded[-1] = fact
    rounded = np.maximum.accumulate(np.clip(rounded, 0, fact))
    new_cdf = rounded / fact
    wts = np.diff(np.concatenate([[0.0], new_cdf]))
    keep = wts > 0
    return Lottery(x.outcomes[keep], wts[keep])


def grid_lower(x: Lottery, n: int) -> Lottery:
    """FOSD lower approximation: CDF rounded up to the 1/n! grid on x's support."""
    return _grid_cdf(x, n, round_up=True)


def grid_upper(x: Lottery, n: int) -> Lottery:
    """FOSD upper approximation: CDF rounded down to the 1/n! grid on x's support."""
    return _grid_cdf(x, n, round_up=False)


def _normalized_cgf(x: Lottery, a: float) -> float:
    # Local CGF used only by the large-numbers precondition probe; the public
    # statistic evaluator lives in sre_lab.statistics.
    if a == 0.0:
        return x.mean()
    if math.isinf(a):
        return x.max() if a > 0 else x.min()
    shift = x.max() if a > 0 else x.min()
    return shift + math.log(float(x.weights @ np.exp(a * (x.outcomes - shift)))) / a


# Probe locations standing in for "all a in the extended reals".  A finite
# grid can miss a violation, so the scan below stays the ground truth.
PROBE_GRID: tuple[float, ...] = tuple(
    [0.0]
    + [s * (2.0**k) * 0.01 for k in range(15) for s in (1.0, -1.0)]
    + [math.inf, -math.inf]
)

MAX_LARGE_NUMBERS_CAP = 512


@dataclass(frozen=True)
class LargeNumbersResult:
    """Outcome of a dominance-in-large-numbers scan.

    verdict is one of "found" (m holds the least threshold), "cap_exceeded"
    (hypothesis probe passed but no dominance run reached the cap), or
    "hypothesis_violated" (the CGF probe found a failure; probe_failures
    lists the offending locations).
    """

    verdict: str
    m: Optional[int] = None
    probe_failures: tuple[float, ...] = ()

    @property
    def found(self) -> bool:
        return self.verdict == "found"


def dominates_in_large_numbers(x: Lottery, y: Lottery, cap: int = MAX_LARGE_NUMBERS_CAP) -> LargeNumbersResult:
    """Scan for the least M with X^m strictly dominating Y^m for all m in [M, cap].

    Precondition: the normalized CGF of x strictly exceeds that of y on the
    probe grid (a heuristic stand-in for all extended reals).  The scan uses
    brute-force convolution and is the actual certificate; not finding M by
    the cap is reported, not raised.
    """
    if cap < 1 or cap > MAX_LARGE_NUMBERS_CAP:
        raise ValueError(f"cap must be in 1..{MAX_LARGE_NUMBERS_CAP}")
    failures = tuple(a for a in PROBE_GRID if not _normalized_cgf(x, a) > _normalized_cgf(y, a))
    if failures:
        return LargeNumbersResult("hypothesis_violated", probe_failures=failures)
    x_m, y_m = x, y
    dominant = np.zeros(cap, dtype=bool)
    for m in range(1, cap + 1):
        if m > 1:
            x_m = convolve(x_m, x)
            y_m = convolve(y_m, y)
        dominant[m - 1] = fosd_compare(x_m, y_m) is DominanceVerdict.STRICT_FOSD
    run_start = None
    for i in range(cap - 1, -1, -1):
        if dominant[i]:
            run_start = i + 1
        else:
            break
    if run_start is None:
        return LargeNumbersResult("cap_exceeded")
    return LargeNumbersResult("found", m=run_start)
