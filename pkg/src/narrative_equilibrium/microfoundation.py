"""Individual participation behind the mobilization potentials.

A group of mass ``m`` has members with participation costs drawn uniformly
on ``[0, cap]``; a member turns out when the anticipated probability of the
good outcome exceeds their cost.  The mobilized mass is then
``m * min(p / cap, 1)``, i.e. ``f * p`` with ``f = m / cap``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .society import parse_rational


@dataclass(frozen=True)
class GroupPopulation:
    mass: Fraction
    cost_caps: dict          # policy value ("h" / "l") -> cap

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("group mass must be positive")
        if any(c <= 0 for c in self.cost_caps.values()):
            raise ValueError("cost caps must be positive")

    def potential(self, policy: str) -> Fraction:
        return self.mass / self.cost_caps[policy]


@dataclass(frozen=True)
class MobilizationReport:
    empirical: float
    analytic: Fraction
    std_error: float
    samples: int
    clamped: bool

    def within(self, k: float = 3.0) -> bool:
        if self.std_error == 0:
            return self.empirical == float(self.analytic)
        return abs(self.empirical - float(self.analytic)) <= k * self.std_error

    def as_dict(self) -> dict:
        return {
            "empirical_mass": self.empirical,
            "analytic_mass": f"{self.analytic.numerator}/{self.analytic.denominator}",
            "analytic_mass_decimal": float(self.analytic),
            "std_error": self.std_error,
            "samples": self.samples,
            "clamped": self.clamped,
        }


def analytic_mass(mass, cap, belief) -> tuple[Fraction, bool]:
    """``m * min(p / cap, 1)`` and whether the clamp was active."""
    mass, cap, belief = (parse_rational(v) for v in (mass, cap, belief))
    share = belief / cap
    if share > 1:
        return mass, True
    return mass * max(share, Fraction(0)), False


def simulate_mobilization(pop: GroupPopulation, policy: str, belief, sample_size: int,
                          seed: int | None = None) -> MobilizationReport:
    """Monte Carlo turnout for one group; compares with the analytic mass."""
    if sample_size < 1:
        raise ValueError("sample_size must be at least 1")
    cap = pop.cost_caps[policy]
    belief = parse_rational(belief)
    exact, clamped = analytic_mass(pop.mass, cap, belief)
    if clamped:
        warnings.warn(f"belief {belief} exceeds the cost cap {cap}; every member mobilizes",
                      RuntimeWarning, stacklevel=2)
    costs = np.random.default_rng(seed).uniform(0.0, float(cap), sample_size)
    share = np.count_nonzero(costs < float(belief)) / sample_size
    pi = float(exact / pop.mass)
    se = float(pop.mass) * math.sqrt(pi * (1 - pi) / sample_size)
    return MobilizationReport(float(pop.mass) * share, exact, se, sample_size, clamped)
