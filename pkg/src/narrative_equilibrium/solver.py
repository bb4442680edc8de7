"""Essential-equilibrium computation.

The general route peels the family of candidate scapegoat sets into layers
of maximal elements and assigns each set a weight ``w(S)``; the LOW
platform carried by ``S`` then gets mass ``alpha * w(S)`` with
``alpha = 1 / (1 + sum w)``.  Closed forms for two-group societies,
taxonomies and the rich domain are provided as fast paths and cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .beliefs import PlatformDistribution
from .errors import AssumptionViolated, CrossCheckMismatch, NotTwoGroups, TwoGroupOrderingViolated
from .society import (
    DENIAL,
    HIGH,
    LOW,
    TRUE_NARRATIVE,
    Narrative,
    NarrativeDomain,
    Platform,
    RichDomain,
    Society,
    TaxonomyDomain,
    bits_of,
    expand_narrative_domain,
    groups_of,
    is_subset,
    popcount,
)

METHODS = ("auto", "general", "two-group", "taxonomy", "rich")


@dataclass(frozen=True)
class LayerDecomposition:
    s_bar: tuple[int, ...]
    layers: tuple[tuple[int, ...], ...]
    parents: dict = field(default_factory=dict)   # S -> tuple of strict supersets in s_bar


@dataclass(frozen=True)
class EquilibriumResult:
    alpha: Fraction
    narrative_masses: dict          # group bits of S -> sigma-bar(S)
    weights: dict                   # group bits of S -> w(S)
    u_star: Fraction
    distribution: PlatformDistribution
    method: str
    layers: tuple = ()
    notes: tuple[str, ...] = ()

    @property
    def marginal(self):
        return self.distribution.marginal()

    @property
    def h_probability(self) -> Fraction:
        return self.distribution.policy_probability(HIGH)

    def same_equilibrium(self, other: "EquilibriumResult") -> bool:
        return self.alpha == other.alpha and self.distribution == other.distribution


def _require_three_categories(society: Society) -> None:
    if society.n == 2:
        return
    cats = society.categories
    if not (cats.left and cats.center and cats.right):
        raise AssumptionViolated("left, center and right must all be nonempty")


def layer_decomposition(society: Society, domain: NarrativeDomain) -> LayerDecomposition:
    """Candidate scapegoat sets and their maximal-first layers."""
    right = society.categories.right
    d = society.d
    s_bar = tuple(sorted(s for s in domain.family
                         if is_subset(s, right) and society.F(LOW, s) < d))
    parents = {s: tuple(t for t in s_bar if t != s and is_subset(s, t)) for s in s_bar}
    remaining = set(s_bar)
    layers = []
    while remaining:
        top = tuple(sorted(
            s for s in remaining
            if not any(t != s and is_subset(s, t) for t in remaining)
        ))
        layers.append(top)
        remaining.difference_update(top)
    return LayerDecomposition(s_bar, tuple(layers), parents)


def _low_platform(society: Society, s: int) -> Platform:
    return Platform(LOW, society.categories.n_l & ~s, Narrative(False, s))


def _assemble(society, alpha, masses, weights, method, layers=(), notes=()):
    platforms = {Platform(HIGH, society.best_high_coalition, TRUE_NARRATIVE): alpha}
    for s, m in masses.items():
        if m > 0:
            platforms[_low_platform(society, s)] = m
    return EquilibriumResult(
        alpha=alpha,
        narrative_masses=dict(masses),
        weights=dict(weights),
        u_star=society.u_star,
        distribution=PlatformDistribution(platforms),
        method=method,
        layers=tuple(layers),
        notes=tuple(notes),
    )


def solve_general(society: Society, domain: NarrativeDomain | None = None) -> EquilibriumResult:
    """Unique essential equilibrium via the layered weight recursion."""
    if society.n == 2:
        # the grand coalition is excluded, so N^h cannot carry the true
        # narrative when N^h = N; the two-group characterization applies
        result = solve_two_group(society)
        return EquilibriumResult(**{**result.__dict__, "notes": result.notes + (
            "two-group society: solved by the two-group characterization",)})
    _require_three_categories(society)
    if domain is None:
        domain = expand_narrative_domain(society)
    fh = society.F(HIGH, society.everyone)
    d = society.d
    if d <= 0:
        return _assemble(society, Fraction(1), {}, {}, "general",
                         notes=("F(h,N) >= F(l,N): HIGH policy with probability one",))
    decomposition = layer_decomposition(society, domain)
    weights: dict[int, Fraction] = {}
    for layer in decomposition.layers:
        for s in layer:
            above = sum((weights[t] for t in decomposition.parents[s]), Fraction(0))
            weights[s] = max(Fraction(0), (d - society.F(LOW, s)) / fh - above)
    alpha = 1 / (1 + sum(weights.values(), Fraction(0)))
    masses = {s: alpha * w for s, w in weights.items()}
    return _assemble(society, alpha, masses, weights, "general", decomposition.layers)


def solve_two_group(society: Society) -> EquilibriumResult:
    """Closed form for two groups: true, denial and tribal platforms."""
    if society.n != 2:
        raise NotTwoGroups(f"expected two groups, got {society.n}")
    f1h, f2h = society.f(1, HIGH), society.f(2, HIGH)
    f1l, f2l = society.f(1, LOW), society.f(2, LOW)
    if not (f1h > f2h and f2l > f1l):
        raise TwoGroupOrderingViolated("need f_1(h) > f_2(h) and f_2(l) > f_1(l)")
    one, two = bits_of([1]), bits_of([2])
    if f1h >= f2l:
        alpha, denial, tribal = Fraction(1), Fraction(0), Fraction(0)
    elif f1h >= f1l:
        alpha, denial, tribal = f1h / f2l, (f2l - f1h) / f2l, Fraction(0)
    else:
        alpha, denial, tribal = f1h / f2l, (f2l - f1l) / f2l, (f1l - f1h) / f2l
    platforms = {Platform(HIGH, one, TRUE_NARRATIVE): alpha}
    if denial:
        platforms[Platform(LOW, two, DENIAL)] = denial
    if tribal:
        platforms[Platform(LOW, one, Narrative(False, one))] = tribal
    return EquilibriumResult(
        alpha=alpha,
        narrative_masses={0: denial, one: tribal},
        weights={0: denial / alpha, one: tribal / alpha},
        u_star=society.u_star,
        distribution=PlatformDistribution(platforms),
        method="two-group",
        notes=("tribal narratives {1} and {2} are belief-equivalent; {1} is reported",),
    )


def solve_taxonomy_closed_form(society: Society, domain: NarrativeDomain | None = None) -> EquilibriumResult:
    """Closed form for nested-partition narrative families."""
    if domain is None:
        domain = expand_narrative_domain(society)
    if not isinstance(domain.origin, TaxonomyDomain):
        raise AssumptionViolated("taxonomy closed form needs a taxonomy domain")
    if society.n == 2:
        raise AssumptionViolated("taxonomy closed form needs more than two groups")
    _require_three_categories(society)
    cats = society.categories
    right = cats.right
    fh = society.F(HIGH, society.everyone)
    fl_h = society.F(LOW, cats.n_h)
    fl_right = society.F(LOW, right)
    if not fl_h > society.F(HIGH, cats.n_h):
        raise AssumptionViolated("taxonomy closed form needs F(l,N^h) > F(h,N^h)")
    R = domain.R
    alpha = fh / (fl_h + max(R, 1) * fl_right)
    d = society.d
    masses = {right: alpha * (d - fl_right) / fh}
    for k in range(1, domain.K):
        for cell in domain.partitions[k]:
            if not is_subset(cell, right):
                continue
            parent = next(p for p in domain.partitions[k - 1] if is_subset(cell, p))
            masses[cell] = alpha * society.F(LOW, parent & ~cell) / fh
    masses[0] = alpha * fl_right / fh if R == 0 else Fraction(0)
    notes = ("cells outside N\\N^h carry no mass",)
    return _assemble(society, alpha, masses, {s: m / alpha for s, m in masses.items()},
                     "taxonomy", notes=notes)


def solve_rich_closed_form(society: Society, domain: NarrativeDomain | None = None) -> EquilibriumResult:
    """Closed form for the rich domain (every subset of every category)."""
    if domain is not None and not isinstance(domain.origin, RichDomain):
        raise AssumptionViolated("rich closed form needs the rich domain")
    if society.n == 2:
        raise AssumptionViolated("rich closed form needs more than two groups")
    _require_three_categories(society)
    cats = society.categories
    right = cats.right
    fh = society.F(HIGH, society.everyone)
    fl_h = society.F(LOW, cats.n_h)
    if not fl_h > fh:
        raise AssumptionViolated("rich closed form needs F(l,N^h) > F(h,N)")
    alpha = fh / society.F(LOW, society.everyone)
    masses = {right: alpha * (fl_h - fh) / fh}
    for i in groups_of(right):
        masses[right & ~bits_of([i])] = alpha * society.f(i, LOW) / fh
    return _assemble(society, alpha, masses, {s: m / alpha for s, m in masses.items()}, "rich")


def _closed_form_applies(society: Society, domain: NarrativeDomain) -> str:
    if society.n == 2:
        return "two-group"
    cats = society.categories
    if isinstance(domain.origin, TaxonomyDomain) and society.F(LOW, cats.n_h) > society.F(HIGH, cats.n_h):
        return "taxonomy"
    if isinstance(domain.origin, RichDomain) and society.F(LOW, cats.n_h) > society.F(HIGH, society.everyone):
        return "rich"
    return "general"


def solve(
    society: Society,
    domain: NarrativeDomain | None = None,
    method: str = "auto",
    *,
    check: bool = False,
) -> EquilibriumResult:
    """Dispatch to a solver; with ``check`` a closed form must match the general route."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if domain is None:
        domain = expand_narrative_domain(society)
    if method == "auto":
        method = _closed_form_applies(society, domain)
    if method == "general":
        return solve_general(society, domain)
    if method == "two-group":
        result = solve_two_group(society)
    elif method == "taxonomy":
        result = solve_taxonomy_closed_form(society, domain)
    else:
        result = solve_rich_closed_form(society, domain)
    if check:
        if society.n == 2:
            from .certifier import oracle_solve
            reference = oracle_solve(society, domain)
        else:
            reference = solve_general(society, domain)
        if not result.same_equilibrium(reference):
            raise CrossCheckMismatch(
                f"{method} closed form disagrees with the reference solution")
    return result


def support_sizes(result: EquilibriumResult) -> list[int]:
    """Sizes of the scapegoat sets used on the support, ascending."""
    return sorted(popcount(s) for s, m in result.narrative_masses.items() if m > 0)
