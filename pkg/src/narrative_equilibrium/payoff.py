"""Group support, platform payoffs and dominant platforms."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .beliefs import UNDEFINED, PlatformDistribution, platform_belief
from .errors import GroupNotInCoalition
from .society import Platform, Society, groups_of, platform_sort_key


@dataclass(frozen=True)
class PayoffReport:
    payoffs: dict            # Platform -> Fraction (or UNDEFINED)
    max_payoff: Fraction
    argmax: tuple[Platform, ...]

    @property
    def winner(self) -> Platform:
        return self.argmax[0]


def group_support(society: Society, sigma: PlatformDistribution, platform: Platform, group: int):
    """Support of ``group`` for ``platform``: belief times f_i(a)."""
    if not platform.coalition >> (group - 1) & 1 or society.f(group, platform.policy) == 0:
        raise GroupNotInCoalition(f"group {group} cannot support {platform}")
    belief = platform_belief(sigma, society.q, platform)
    if belief is UNDEFINED:
        return UNDEFINED
    return belief * society.f(group, platform.policy)


def platform_payoff(society: Society, sigma: PlatformDistribution, platform: Platform):
    """Total coalition support; factorizes as belief * F(a, C)."""
    belief = platform_belief(sigma, society.q, platform)
    if belief is UNDEFINED:
        return UNDEFINED
    return belief * society.F(platform.policy, platform.coalition)


def platform_payoff_by_groups(society: Society, sigma: PlatformDistribution, platform: Platform):
    """Same as :func:`platform_payoff` but summed group by group."""
    total = Fraction(0)
    for i in groups_of(platform.coalition):
        u = group_support(society, sigma, platform, i)
        if u is UNDEFINED:
            return UNDEFINED
        total += u
    return total


def dominant_set(
    society: Society,
    sigma: PlatformDistribution,
    platforms: Sequence[Platform],
    *,
    rng: random.Random | None = None,
) -> PayoffReport:
    """All payoff maximizers in canonical order.

    With ``rng`` the first entry is a uniform draw from the maximizers (the
    rest stay canonical); otherwise the canonical-first platform wins.
    Platforms whose belief is undefined are reported but never dominant.
    """
    payoffs = {p: platform_payoff(society, sigma, p) for p in platforms}
    defined = [v for v in payoffs.values() if v is not UNDEFINED]
    best = max(defined)
    argmax = sorted((p for p, v in payoffs.items() if v is not UNDEFINED and v == best),
                    key=platform_sort_key)
    if rng is not None and len(argmax) > 1:
        pick = argmax.pop(rng.randrange(len(argmax)))
        argmax.insert(0, pick)
    return PayoffReport(payoffs, best, tuple(argmax))
