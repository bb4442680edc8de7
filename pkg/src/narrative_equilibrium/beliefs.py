"""Narrative-conditional outcome beliefs.

A narrative ``S`` looks at the restriction ``x_S(a, C)`` of a platform's
policy/power-status profile and reads off ``p(y=1 | x_S)`` from the
long-run distribution over platforms.  Two platforms fall in the same
*cell* of narrative ``S`` when their restrictions agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import NotFullSupport, NotNormalized
from .society import HIGH, LOW, Narrative, Platform, Policy, groups_of, platform_sort_key


class _Undefined:
    """Belief conditioned on a zero-probability event."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()


class Signature(NamedTuple):
    narrative: Narrative
    bits: tuple[int, ...]


def signature_of(narrative: Narrative, policy: Policy, coalition: int) -> Signature:
    """Values of ``x_S(a, C)``: policy bit first (if 0 is in S), then one
    membership bit per group of S in ascending order."""
    bits = []
    if narrative.includes_policy:
        bits.append(policy.bit)
    for i in groups_of(narrative.groups):
        bits.append(coalition >> (i - 1) & 1)
    return Signature(narrative, tuple(bits))


def cell_key(narrative: Narrative, policy: Policy, coalition: int) -> int:
    """Packed form of the signature used as a dictionary key."""
    key = (coalition & narrative.groups) << 1
    if narrative.includes_policy:
        key |= policy.bit
    return key


class PlatformDistribution:
    """Exact probability distribution over platforms."""

    __slots__ = ("_masses",)

    def __init__(self, masses: Mapping[Platform, Fraction], *, normalize: bool = False):
        clean = {}
        for p, m in masses.items():
            m = Fraction(m)
            if m < 0:
                raise NotNormalized(f"negative mass {m} on {p}")
            if m:
                clean[p] = clean.get(p, Fraction(0)) + m
        total = sum(clean.values(), Fraction(0))
        if normalize:
            if total == 0:
                raise NotNormalized("distribution has zero total mass")
            clean = {p: m / total for p, m in clean.items()}
        elif total != 1:
            raise NotNormalized(f"masses sum to {total}, not 1")
        self._masses = dict(sorted(clean.items(), key=lambda kv: platform_sort_key(kv[0])))

    @classmethod
    def uniform(cls, platforms: Iterable[Platform]) -> "PlatformDistribution":
        platforms = list(platforms)
        w = Fraction(1, len(platforms))
        return cls({p: w for p in platforms})

    def mass(self, platform: Platform) -> Fraction:
        return self._masses.get(platform, Fraction(0))

    def items(self):
        return self._masses.items()

    @property
    def support(self) -> list[Platform]:
        return list(self._masses)

    def __len__(self):
        return len(self._masses)

    def __eq__(self, other):
        return isinstance(other, PlatformDistribution) and self._masses == other._masses

    def __repr__(self):
        body = ", ".join(f"{p}: {m}" for p, m in self._masses.items())
        return f"PlatformDistribution({{{body}}})"

    def mixed_with(self, other: "PlatformDistribution", eps: Fraction) -> "PlatformDistribution":
        """``(1 - eps) * self + eps * other``."""
        eps = Fraction(eps)
        out = {p: (1 - eps) * m for p, m in self.items()}
        for p, m in other.items():
            out[p] = out.get(p, Fraction(0)) + eps * m
        return PlatformDistribution(out)

    def marginal(self) -> dict[tuple[Policy, int], Fraction]:
        """Induced distribution over (policy, coalition) pairs."""
        out: dict[tuple[Policy, int], Fraction] = {}
        for p, m in self.items():
            key = (p.policy, p.coalition)
            out[key] = out.get(key, Fraction(0)) + m
        return out

    def policy_probability(self, a: Policy = HIGH) -> Fraction:
        return sum((m for p, m in self.items() if p.policy is a), Fraction(0))


def conditional_outcome_probability(
    sigma: PlatformDistribution,
    q: Fraction,
    target: Signature,
):
    """``p_sigma(y=1 | x_S = target)`` or ``UNDEFINED``.

    When the target fixes the policy the answer follows from the outcome law
    alone (``q`` under HIGH, ``0`` under LOW) and is returned even if the
    conditioning event has no mass.
    """
    narrative = target.narrative
    if narrative.includes_policy:
        return Fraction(q) if target.bits[0] == HIGH.bit else Fraction(0)
    high = Fraction(0)
    total = Fraction(0)
    for p, m in sigma.items():
        if signature_of(narrative, p.policy, p.coalition) == target:
            total += m
            if p.policy is HIGH:
                high += m
    if total == 0:
        return UNDEFINED
    return Fraction(q) * high / total


def platform_belief(sigma: PlatformDistribution, q: Fraction, platform: Platform):
    return conditional_outcome_probability(
        sigma, q, signature_of(platform.narrative, platform.policy, platform.coalition))


# -- incremental history ------------------------------------------------------

@dataclass
class HistoryCounters:
    """Unnormalized empirical-frequency state of the dominant-platform process.

    ``sigma_t = (sigma_1 + sum of dominant point masses) / t``.  Everything is
    multiplied by ``scale`` (the common denominator of ``sigma_1``) so exact
    counters stay integers; ``fast`` mode keeps the same scaled numbers in
    float64 arrays.
    """

    platforms: list[Platform]
    narratives: list[Narrative]
    q: Fraction
    initial: PlatformDistribution
    scale: int
    initial_weight: np.ndarray          # scaled sigma_1 per platform (int64)
    cells_of: np.ndarray                # [platform, narrative] -> cell id
    own_cell: np.ndarray                # cell id of each platform's own narrative
    cell_keys: list[tuple[int, int]]    # cell id -> (narrative index, packed signature)
    is_high: np.ndarray
    fast: bool = False
    t: int = 1
    dominant_counts: np.ndarray = field(default=None)
    high: object = None                 # list[int] (exact) or float64 array (fast)
    total: object = None

    # -- reads --
    def cell_belief(self, cell: int):
        total = self.total[cell]
        if total == 0:
            return UNDEFINED
        if self.fast:
            return float(self.q) * self.high[cell] / total
        return self.q * Fraction(int(self.high[cell]), int(total))

    def belief(self, platform_index: int):
        return self.cell_belief(int(self.own_cell[platform_index]))

    def sigma(self) -> PlatformDistribution:
        """Current ``sigma_t`` as an exact distribution."""
        denom = self.scale * self.t
        return PlatformDistribution({
            p: Fraction(int(self.initial_weight[k]) + self.scale * int(self.dominant_counts[k]), denom)
            for k, p in enumerate(self.platforms)
        })

    # -- writes --
    def record(self, dominant: int) -> None:
        """Fold one more dominant platform into the history."""
        s = self.scale
        cells = self.cells_of[dominant]
        if self.fast:
            self.total[cells] += s
            if self.is_high[dominant]:
                self.high[cells] += s
        else:
            high = self.is_high[dominant]
            for c in cells:
                c = int(c)
                self.total[c] += s
                if high:
                    self.high[c] += s
        self.dominant_counts[dominant] += 1
        self.t += 1

    def recompute(self):
        """From-scratch aggregates ``(high, total)`` as exact integer lists."""
        weights = [int(self.initial_weight[k]) + self.scale * int(self.dominant_counts[k])
                   for k in range(len(self.platforms))]
        n_cells = len(self.cell_keys)
        high = [0] * n_cells
        total = [0] * n_cells
        for k, w in enumerate(weights):
            for c in self.cells_of[k]:
                c = int(c)
                total[c] += w
                if self.is_high[k]:
                    high[c] += w
        return high, total

    def matches_scratch(self) -> bool:
        high, total = self.recompute()
        if self.fast:
            return np.array_equal(np.asarray(high, float), self.high) and \
                np.array_equal(np.asarray(total, float), self.total)
        return high == list(self.high) and total == list(self.total)


def counters_init(
    initial: PlatformDistribution,
    platforms: list[Platform],
    narratives: list[Narrative],
    q: Fraction,
    *,
    fast: bool = False,
) -> HistoryCounters:
    """Build counters for ``sigma_1 = initial`` over the given platform list."""
    if len(initial) != len(platforms) or any(initial.mass(p) == 0 for p in platforms):
        raise NotFullSupport("the initial distribution must put positive mass on every platform")
    scale = 1
    for p in platforms:
        scale = math.lcm(scale, initial.mass(p).denominator)
    initial_weight = np.array([int(initial.mass(p) * scale) for p in platforms], dtype=np.int64)

    cell_ids: dict[tuple[int, int], int] = {}
    cells_of = np.empty((len(platforms), len(narratives)), dtype=np.int64)
    own_cell = np.empty(len(platforms), dtype=np.int64)
    narrative_index = {s: k for k, s in enumerate(narratives)}
    for j, p in enumerate(platforms):
        for k, s in enumerate(narratives):
            key = (k, cell_key(s, p.policy, p.coalition))
            c = cell_ids.setdefault(key, len(cell_ids))
            cells_of[j, k] = c
        own_cell[j] = cells_of[j, narrative_index[p.narrative]]
    cell_keys = [None] * len(cell_ids)
    for key, c in cell_ids.items():
        cell_keys[c] = key

    counters = HistoryCounters(
        platforms=list(platforms),
        narratives=list(narratives),
        q=Fraction(q),
        initial=initial,
        scale=scale,
        initial_weight=initial_weight,
        cells_of=cells_of,
        own_cell=own_cell,
        cell_keys=cell_keys,
        is_high=np.array([p.policy is HIGH for p in platforms], dtype=np.bool_),
        fast=fast,
        dominant_counts=np.zeros(len(platforms), dtype=np.int64),
    )
    high, total = counters.recompute()
    if fast:
        counters.high = np.asarray(high, dtype=np.float64)
        counters.total = np.asarray(total, dtype=np.float64)
    else:
        counters.high = high
        counters.total = total
    return counters


def counters_record_dominant(counters: HistoryCounters, dominant) -> HistoryCounters:
    """Record ``dominant`` (a Platform or its index); returns the same counters."""
    if isinstance(dominant, Platform):
        dominant = counters.platforms.index(dominant)
    counters.record(int(dominant))
    return counters


def monotonicity_violations(
    counters: HistoryCounters,
    dominant: int,
    before_high,
    before_total,
) -> list[str]:
    """Check one step of belief drift against the history before it.

    A HIGH dominant platform pushes up every LOW-platform cell sharing its
    signature and leaves the rest alone; a LOW dominant platform pushes its
    own cells down (strictly unless the belief was already zero).
    """
    problems = []
    dom = counters.platforms[dominant]
    dom_cells = set(int(c) for c in counters.cells_of[dominant])
    for j, p in enumerate(counters.platforms):
        if p.policy is not LOW:
            continue
        c = int(counters.own_cell[j])
        h0, n0 = int(before_high[c]), int(before_total[c])
        h1, n1 = int(counters.high[c]), int(counters.total[c])
        rises, falls = h1 * n0 > h0 * n1, h1 * n0 < h0 * n1
        if c not in dom_cells:
            if rises or falls:
                problems.append(f"{p}: belief moved although signature differs from {dom}")
        elif dom.policy is HIGH:
            if not rises:
                problems.append(f"{p}: belief did not rise after HIGH dominant {dom}")
        else:
            if rises or (h0 > 0 and not falls):
                problems.append(f"{p}: belief did not fall after LOW dominant {dom}")
    return problems
