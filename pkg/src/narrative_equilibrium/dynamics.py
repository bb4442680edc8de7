"""Dominant-platform learning dynamics.

Each period the platform with the highest payoff under the current
empirical distribution wins, and its point mass is folded into the history:
``sigma_{t+1} = (t * sigma_t + delta_winner) / (t + 1)``.

Two engines share one state layout (see :class:`HistoryCounters`): an exact
integer engine in pure Python and a float64 engine compiled with numba for
long horizons.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .beliefs import HistoryCounters, PlatformDistribution, counters_init, monotonicity_violations
from .errors import EmptyTail
from .society import (
    DEFAULT_PLATFORM_LIMIT,
    HIGH,
    NarrativeDomain,
    Platform,
    Society,
    enumerate_admissible_platforms,
    expand_narrative_domain,
)

MODES = ("auto", "exact", "fast")
TIES = ("canonical", "random")
EXACT_AUTO_LIMIT = 10**4
DENSE_SAMPLES = 10**4
SAMPLES_PER_DECADE = 2000
TIE_TOLERANCE = 1e-12


@dataclass
class Trace:
    platforms: list[Platform]
    dominant: np.ndarray            # winner index for periods 1..T
    max_payoff: np.ndarray          # float64 payoff of the winner
    sample_t: np.ndarray            # periods at which tracked payoffs were sampled
    tracked: np.ndarray             # [len(sample_t), len(track)]
    track: list[Platform]
    u_star: Fraction
    mode: str
    tie: str
    seed: int | None
    warnings: list[str] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.dominant)

    def pair_index(self):
        """Map each platform to an (a, C) id; returns (ids, pairs)."""
        pairs: dict = {}
        ids = np.array([pairs.setdefault((p.policy, p.coalition), len(pairs))
                        for p in self.platforms], dtype=np.int64)
        return ids, list(pairs)

    def marginal(self, start: int = 0) -> dict:
        """Frequency of each dominant (a, C) pair over periods ``start+1..T``."""
        ids, pairs = self.pair_index()
        window = ids[self.dominant[start:]]
        if len(window) == 0:
            raise EmptyTail("no periods in the requested window")
        counts = np.bincount(window, minlength=len(pairs))
        return {pairs[k]: counts[k] / len(window) for k in range(len(pairs)) if counts[k]}

    def h_frequency(self) -> np.ndarray:
        high = np.array([p.policy is HIGH for p in self.platforms])
        return np.cumsum(high[self.dominant]) / np.arange(1, self.horizon + 1)


@dataclass
class DynamicsRun:
    trace: Trace
    counters: HistoryCounters


def sample_times(horizon: int, dense: int = DENSE_SAMPLES, per_decade: int = SAMPLES_PER_DECADE) -> np.ndarray:
    """Every period up to ``dense``, then logarithmically spaced."""
    head = np.arange(1, min(horizon, dense) + 1, dtype=np.int64)
    if horizon <= dense:
        return head
    decades = math.log10(horizon / dense)
    k = max(2, int(math.ceil(decades * per_decade)) + 1)
    tail = np.unique(np.round(np.geomspace(dense, horizon, k)).astype(np.int64))
    tail = tail[tail > dense]
    return np.concatenate([head, tail])


# -- engines ------------------------------------------------------------------

@njit(cache=True)
def _fast_kernel(horizon, high, total, cells_of, own_cell, is_high, weight, scale,
                 draws, use_draws, tol, track_idx, sample_t, dominant, max_payoff, tracked):
    n_platforms = own_cell.shape[0]
    n_narr = cells_of.shape[1]
    payoff = np.empty(n_platforms)
    candidates = np.empty(n_platforms, dtype=np.int64)
    s = 0
    for t in range(horizon):
        best = -1.0
        for j in range(n_platforms):
            c = own_cell[j]
            u = weight[j] * high[c] / total[c]
            payoff[j] = u
            if u > best:
                best = u
        threshold = best - tol * abs(best)
        k = 0
        for j in range(n_platforms):
            if payoff[j] >= threshold:
                candidates[k] = j
                k += 1
        win = candidates[0]
        if use_draws and k > 1:
            win = candidates[int(draws[t] * k)]
        dominant[t] = win
        max_payoff[t] = payoff[win]
        if s < sample_t.shape[0] and sample_t[s] == t + 1:
            for m in range(track_idx.shape[0]):
                tracked[s, m] = payoff[track_idx[m]]
            s += 1
        for m in range(n_narr):
            c = cells_of[win, m]
            total[c] += scale
            if is_high[win]:
                high[c] += scale


def _exact_loop(counters: HistoryCounters, weights: list[Fraction], horizon: int, draws,
                track_idx, sample_t, dominant, max_payoff, tracked, *, check_every: int, scratch_every: int, u_star):
    """Integer engine; payoff_j = weight_j * high / total, compared by cross-multiplying."""
    den = 1
    for w in weights:
        den = math.lcm(den, w.denominator)
    wnum = [int(w * den) for w in weights]
    own = [int(c) for c in counters.own_cell]
    n_platforms = len(own)
    high, total = counters.high, counters.total
    problems: list[str] = []
    sample_pos = 0
    sample_list = sample_t.tolist()
    for t in range(horizon):
        nums = [wnum[j] * high[own[j]] for j in range(n_platforms)]
        dens = [total[own[j]] for j in range(n_platforms)]
        best = 0
        for j in range(1, n_platforms):
            if nums[j] * dens[best] > nums[best] * dens[j]:
                best = j
        ties = [j for j in range(n_platforms) if nums[j] * dens[best] == nums[best] * dens[j]]
        win = ties[0]
        if draws is not None and len(ties) > 1:
            win = ties[int(draws[t] * len(ties))]
        value = Fraction(nums[win], dens[win] * den)
        if value < u_star:
            problems.append(f"t={t + 1}: max payoff {value} below U* {u_star}")
        if counters.platforms[win].policy is HIGH and value != u_star:
            problems.append(f"t={t + 1}: HIGH winner with payoff {value} != U*")
        dominant[t] = win
        max_payoff[t] = float(value)
        if sample_pos < len(sample_list) and sample_list[sample_pos] == t + 1:
            for m, j in enumerate(track_idx):
                tracked[sample_pos, m] = nums[j] / (dens[j] * den)
            sample_pos += 1
        if check_every and (t + 1) % check_every == 0:
            before_high, before_total = list(high), list(total)
            counters.record(win)
            problems.extend(f"t={t + 1}: {msg}" for msg in
                            monotonicity_violations(counters, win, before_high, before_total))
        else:
            counters.record(win)
        if scratch_every and (t + 1) % scratch_every == 0 and not counters.matches_scratch():
            problems.append(f"t={t + 1}: incremental counters drifted from recomputation")
    return problems


def run_dynamics(
    society: Society,
    domain: NarrativeDomain | None = None,
    horizon: int = 10**4,
    seed: int | None = None,
    *,
    tie: str = "canonical",
    mode: str = "auto",
    track: Sequence[Platform] = (),
    initial: PlatformDistribution | None = None,
    check_every: int = 0,
    scratch_every: int = 0,
    limit: int = DEFAULT_PLATFORM_LIMIT,
    tie_tolerance: float = TIE_TOLERANCE,
) -> DynamicsRun:
    """Simulate ``horizon`` periods of the dominant-platform process.

    ``sigma_1`` defaults to the uniform distribution over admissible
    platforms.  In exact mode ``check_every`` > 0 runs the belief
    monotonicity checks every that many steps and ``scratch_every`` > 0
    compares the counters with a from-scratch recomputation; any problem
    ends up in ``trace.warnings``.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if tie not in TIES:
        raise ValueError(f"unknown tie rule {tie!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "auto":
        mode = "exact" if horizon <= EXACT_AUTO_LIMIT else "fast"
    if domain is None:
        domain = expand_narrative_domain(society)
    platforms = enumerate_admissible_platforms(society, domain, limit)
    if initial is None:
        initial = PlatformDistribution.uniform(platforms)
    fast = mode == "fast"
    counters = counters_init(initial, platforms, domain.narratives(), society.q, fast=fast)
    index = {p: k for k, p in enumerate(platforms)}
    track = list(track)
    track_idx = np.array([index[p] for p in track], dtype=np.int64)
    samples = sample_times(horizon)
    dominant = np.empty(horizon, dtype=np.int64)
    max_payoff = np.empty(horizon, dtype=np.float64)
    tracked = np.full((len(samples), len(track)), np.nan)
    draws = np.random.default_rng(seed).random(horizon) if tie == "random" else None
    weights = [society.q * society.F(p.policy, p.coalition) for p in platforms]
    u_star = society.u_star

    if fast:
        _fast_kernel(
            horizon, counters.high, counters.total, counters.cells_of, counters.own_cell,
            counters.is_high, np.array([float(w) for w in weights]), float(counters.scale),
            draws if draws is not None else np.zeros(1), draws is not None, tie_tolerance,
            track_idx, samples, dominant, max_payoff, tracked,
        )
        counters.dominant_counts += np.bincount(dominant, minlength=len(platforms))
        counters.t += horizon
        problems = []
    else:
        problems = _exact_loop(counters, weights, horizon, draws, track_idx, samples,
                               dominant, max_payoff, tracked, check_every=check_every,
                               scratch_every=scratch_every, u_star=u_star)
    trace = Trace(platforms, dominant, max_payoff, samples, tracked, track, u_star,
                  mode, tie, seed, warnings=problems)
    return DynamicsRun(trace, counters)


# -- diagnostics --------------------------------------------------------------

def check_trace_invariants(trace: Trace, alpha: Fraction | None = None, *, rel_tol: float = 1e-9) -> list[str]:
    """Lower bound on the winning payoff, HIGH winners earn exactly U*, and
    (given the equilibrium ``alpha``) no over-long streak of LOW winners."""
    u = float(trace.u_star)
    slack = rel_tol * max(abs(u), 1.0)
    problems = []
    below = np.flatnonzero(trace.max_payoff < u - slack)
    if len(below):
        problems.append(f"max payoff below U* at {len(below)} periods (first t={below[0] + 1})")
    high = np.array([p.policy is HIGH for p in trace.platforms])
    win_high = high[trace.dominant]
    off = np.flatnonzero(win_high & (np.abs(trace.max_payoff - u) > slack))
    if len(off):
        problems.append(f"HIGH winner off U* at {len(off)} periods (first t={off[0] + 1})")
    if alpha is not None and alpha > 0:
        cap = 10 / float(alpha)
        longest = _longest_run(~win_high[len(win_high) // 2:])
        if longest > cap:
            msg = f"{longest} consecutive LOW periods in the tail (threshold {cap:.0f})"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            problems.append(msg)
    return problems


def _longest_run(mask: np.ndarray) -> int:
    if not mask.any():
        return 0
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return int((edges[1::2] - edges[::2]).max())


def cycle_amplitudes(trace: Trace, max_cycles: int | None = None) -> list[float]:
    """Largest ``max_payoff - U*`` within each completed cycle.

    A cycle runs from one period in which a HIGH platform wins up to (not
    including) the next such period.  Periods before the first HIGH win are
    a transient inherited from ``sigma_1`` and are not a cycle.
    """
    high = np.array([p.policy is HIGH for p in trace.platforms])
    starts = np.flatnonzero(high[trace.dominant])
    excess = trace.max_payoff - float(trace.u_star)
    out = []
    for a, b in zip(starts[:-1], starts[1:]):
        out.append(float(excess[a:b].max()))
        if max_cycles is not None and len(out) >= max_cycles:
            break
    return out


@dataclass
class LimitEstimate:
    marginal: dict                  # (policy, coalition) -> frequency over the tail
    max_deviation: float            # max |U_bar - U*| over the tail
    amplitude_ratio: float | None   # mean ratio of successive cycle amplitudes
    tail_periods: int
    narrative_frequencies: dict     # Platform -> tail frequency (diagnostic only)

    def as_dict(self) -> dict:
        return {
            "marginal": [{"a": a.value, "C": list(_groups(c)), "frequency": f}
                         for (a, c), f in self.marginal.items()],
            "max_deviation": self.max_deviation,
            "amplitude_ratio": self.amplitude_ratio,
            "tail_periods": self.tail_periods,
        }


def _groups(bits: int):
    return [i + 1 for i in range(bits.bit_length()) if bits >> i & 1]


def limit_estimate(trace: Trace, tail_fraction=Fraction(1, 2)) -> LimitEstimate:
    """Tail-window frequencies and convergence diagnostics for a trace."""
    tail_fraction = Fraction(tail_fraction)
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    n_tail = int(math.floor(trace.horizon * tail_fraction))
    if n_tail < 1:
        raise EmptyTail(f"tail of {tail_fraction} over {trace.horizon} periods is empty")
    start = trace.horizon - n_tail
    marginal = trace.marginal(start)
    deviation = float(np.abs(trace.max_payoff[start:] - float(trace.u_star)).max())
    amps = cycle_amplitudes(trace)
    ratio = None
    pairs = [(a, b) for a, b in zip(amps, amps[1:]) if a > 0]
    if pairs:
        ratio = float(np.mean([b / a for a, b in pairs]))
    counts = np.bincount(trace.dominant[start:], minlength=len(trace.platforms))
    narratives = {trace.platforms[k]: counts[k] / n_tail for k in np.flatnonzero(counts)}
    return LimitEstimate(marginal, deviation, ratio, n_tail, narratives)


def compare_modes(society: Society, domain: NarrativeDomain | None = None, horizon: int = 10**4) -> dict:
    """Run exact and fast engines side by side and report their drift."""
    exact = run_dynamics(society, domain, horizon, mode="exact").trace
    fast = run_dynamics(society, domain, horizon, mode="fast").trace
    denom = np.maximum(np.abs(exact.max_payoff), 1e-300)
    drift = float((np.abs(exact.max_payoff - fast.max_payoff) / denom).max())
    return {
        "same_winners": bool(np.array_equal(exact.dominant, fast.dominant)),
        "max_relative_drift": drift,
    }


# -- export -------------------------------------------------------------------

def platform_label(p: Platform) -> str:
    s = ([0] if p.narrative.includes_policy else []) + _groups(p.narrative.groups)
    return f"{p.policy.value}|{','.join(map(str, _groups(p.coalition)))}|{','.join(map(str, s))}"


def write_trace_csv(trace: Trace, path) -> Path:
    """Write the sampled trace plus a ``.platforms.json`` sidecar; returns the sidecar path."""
    path = Path(path)
    hfreq = trace.h_frequency()
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "dominant_platform_id", "max_payoff"]
                        + [f"payoff[{platform_label(p)}]" for p in trace.track]
                        + ["h_frequency_so_far"])
        for row, t in enumerate(trace.sample_t):
            k = t - 1
            writer.writerow([int(t), int(trace.dominant[k]), repr(float(trace.max_payoff[k]))]
                            + [repr(float(v)) for v in trace.tracked[row]]
                            + [repr(float(hfreq[k]))])
    sidecar = path.with_suffix(".platforms.json")
    sidecar.write_text(json.dumps([
        {"id": k, "a": p.policy.value, "C": _groups(p.coalition),
         "S": ([0] if p.narrative.includes_policy else []) + _groups(p.narrative.groups),
         "uses_policy_cause": p.narrative.includes_policy}
        for k, p in enumerate(trace.platforms)
    ], indent=1))
    return sidecar
