"""Societies, narrative domains and platform enumeration.

Groups are numbered ``1..n`` and group sets are stored as integer bit fields
(group ``i`` lives at bit ``i - 1``).  A narrative is the pair
``(includes_policy, groups)``; the policy component is kept separately so
that the group part can be tested against the narrative family directly.
"""

from __future__ import annotations

import enum
import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .errors import (
    EmptyCategory,
    GroupSupportsNothing,
    InvalidQ,
    MalformedConfig,
    MalformedTaxonomy,
    NarrativeOutsideCategories,
    PlatformSpaceTooLarge,
    PolicyUnsupported,
    TwoGroupOrderingViolated,
)

MAX_GROUPS = 64
DEFAULT_PLATFORM_LIMIT = 10**6


class Policy(enum.Enum):
    HIGH = "h"
    LOW = "l"

    @property
    def bit(self) -> int:
        """Value of ``x_0`` in a signature: 1 for HIGH, 0 for LOW."""
        return 1 if self is Policy.HIGH else 0

    @property
    def rank(self) -> int:
        # canonical order lists HIGH platforms first
        return 0 if self is Policy.HIGH else 1

    @classmethod
    def parse(cls, text: str) -> "Policy":
        key = str(text).strip().lower()
        if key in ("h", "high"):
            return cls.HIGH
        if key in ("l", "low", "ℓ"):
            return cls.LOW
        raise MalformedConfig(f"unknown policy {text!r}")


HIGH = Policy.HIGH
LOW = Policy.LOW
POLICIES = (HIGH, LOW)


# -- rationals and bit sets ---------------------------------------------------

def parse_rational(value) -> Fraction:
    """Convert ``"p/q"``, decimal strings, ints or floats to an exact Fraction.

    Floats go through ``repr`` so that ``0.1`` becomes ``1/10`` rather than
    its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise MalformedConfig(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedConfig(f"not a rational: {value!r}") from exc
    raise MalformedConfig(f"not a rational: {value!r}")


def bits_of(groups: Iterable[int]) -> int:
    bits = 0
    for i in groups:
        bits |= 1 << (i - 1)
    return bits


def groups_of(bits: int) -> tuple[int, ...]:
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return tuple(out)


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def subsets_of(bits: int) -> Iterator[int]:
    """All subsets of ``bits`` (including 0 and ``bits``), ascending."""
    members = [1 << k for k in range(bits.bit_length()) if bits >> k & 1]
    out = []
    for r in range(len(members) + 1):
        for combo in itertools.combinations(members, r):
            out.append(sum(combo))
    return iter(sorted(out))


# -- domain specifications ----------------------------------------------------

@dataclass(frozen=True)
class ExplicitDomain:
    sets: tuple[int, ...]


@dataclass(frozen=True)
class TaxonomyLayer:
    r: int | None = None
    cells: tuple[int, ...] | None = None


@dataclass(frozen=True)
class TaxonomyDomain:
    layers: tuple[TaxonomyLayer, ...] = ()


@dataclass(frozen=True)
class RichDomain:
    pass


DomainSpec = Union[ExplicitDomain, TaxonomyDomain, RichDomain]


# -- core types ---------------------------------------------------------------

class Narrative(NamedTuple):
    includes_policy: bool
    groups: int

    @property
    def key(self) -> int:
        return self.groups << 1 | int(self.includes_policy)

    @property
    def indices(self) -> tuple[int, ...]:
        """Narrative as a subset of ``{0, ..., n}``."""
        return ((0,) if self.includes_policy else ()) + groups_of(self.groups)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.indices)) + "}"


TRUE_NARRATIVE = Narrative(True, 0)
DENIAL = Narrative(False, 0)


class Platform(NamedTuple):
    policy: Policy
    coalition: int
    narrative: Narrative

    def __str__(self) -> str:
        c = ",".join(map(str, groups_of(self.coalition)))
        return f"({self.policy.value},{{{c}}},{self.narrative})"


def platform_sort_key(p: Platform) -> tuple[int, int, int]:
    return (p.policy.rank, p.coalition, p.narrative.key)


@dataclass(frozen=True)
class Categories:
    n_h: int
    n_l: int
    center: int
    left: int
    right: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.left, self.center, self.right)


@dataclass(frozen=True)
class Society:
    n: int
    f_high: tuple[Fraction, ...]
    f_low: tuple[Fraction, ...]
    q: Fraction
    domain_spec: DomainSpec = field(default_factory=RichDomain)

    def f(self, i: int, a: Policy) -> Fraction:
        return (self.f_high if a is HIGH else self.f_low)[i - 1]

    def F(self, a: Policy, groups: int) -> Fraction:
        """Aggregate mobilization potential of ``groups`` for ``a``."""
        table = self.f_high if a is HIGH else self.f_low
        total = Fraction(0)
        for i in groups_of(groups):
            total += table[i - 1]
        return total

    @property
    def everyone(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def categories(self) -> Categories:
        n_h = bits_of(i for i in range(1, self.n + 1) if self.f_high[i - 1] > 0)
        n_l = bits_of(i for i in range(1, self.n + 1) if self.f_low[i - 1] > 0)
        return Categories(
            n_h=n_h,
            n_l=n_l,
            center=n_h & n_l,
            left=self.everyone & ~n_l,
            right=self.everyone & ~n_h,
        )

    @cached_property
    def d(self) -> Fraction:
        """Aggregate intrinsic advantage of the low policy, F(l,N) - F(h,N)."""
        return self.F(LOW, self.everyone) - self.F(HIGH, self.everyone)

    @cached_property
    def best_high_coalition(self) -> int:
        """Admissible HIGH coalition with the largest aggregate potential.

        This is ``N^h`` whenever ``N^h`` is a strict subset of ``N``; with two
        groups and ``N^h = N`` it is the strongest single group.
        """
        n_h = self.categories.n_h
        if n_h != self.everyone:
            return n_h
        return max(admissible_coalitions(self, HIGH),
                   key=lambda c: (self.F(HIGH, c), -c))

    @cached_property
    def u_star(self) -> Fraction:
        return self.q * self.F(HIGH, self.best_high_coalition)

    def scaled(self, q: Fraction | None = None, f_factor: Fraction = Fraction(1)) -> "Society":
        return Society(
            n=self.n,
            f_high=tuple(x * f_factor for x in self.f_high),
            f_low=tuple(x * f_factor for x in self.f_low),
            q=self.q if q is None else Fraction(q),
            domain_spec=self.domain_spec,
        )


@dataclass(frozen=True)
class NarrativeDomain:
    family: frozenset[int]
    origin: DomainSpec
    # taxonomy origin only: pi_1 .. pi_K as tuples of cell bit fields
    partitions: tuple[tuple[int, ...], ...] = ()
    split_counts: tuple[int, ...] = ()

    @property
    def K(self) -> int:
        return len(self.partitions)

    @property
    def R(self) -> int:
        return sum(r - 1 for r in self.split_counts)

    def sorted_family(self) -> list[int]:
        return sorted(self.family)

    def narratives(self) -> list[Narrative]:
        out = [Narrative(p, g) for g in self.family for p in (False, True)]
        return sorted(out, key=lambda s: s.key)

    def is_feasible(self, narrative: Narrative) -> bool:
        return narrative.groups in self.family


# -- loading ------------------------------------------------------------------

def _parse_group_list(raw, n: int, what: str) -> int:
    if not isinstance(raw, (list, tuple)):
        raise MalformedConfig(f"{what} must be a list of group indices")
    for i in raw:
        if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= n:
            raise MalformedConfig(f"{what}: group index {i!r} outside 1..{n}")
    return bits_of(raw)


def _parse_domain(raw, n: int) -> DomainSpec:
    if raw is None:
        return RichDomain()
    if not isinstance(raw, dict) or "kind" not in raw:
        raise MalformedConfig("domain must be an object with a 'kind'")
    kind = raw["kind"]
    if kind == "rich":
        return RichDomain()
    if kind == "explicit":
        sets = raw.get("sets")
        if not isinstance(sets, list):
            raise MalformedConfig("explicit domain needs a 'sets' list")
        return ExplicitDomain(tuple(_parse_group_list(s, n, "domain.sets") for s in sets))
    if kind == "taxonomy":
        layers = []
        for k, layer in enumerate(raw.get("layers", [])):
            if not isinstance(layer, dict):
                raise MalformedConfig(f"domain.layers[{k}] must be an object")
            r = layer.get("r")
            if r is not None and (isinstance(r, bool) or not isinstance(r, int) or r < 1):
                raise MalformedConfig(f"domain.layers[{k}].r must be a positive integer")
            cells = layer.get("cells")
            if cells is not None:
                cells = tuple(_parse_group_list(c, n, f"domain.layers[{k}].cells") for c in cells)
            if r is None and cells is None:
                raise MalformedConfig(f"domain.layers[{k}] needs 'r' or 'cells'")
            layers.append(TaxonomyLayer(r=r, cells=cells))
        return TaxonomyDomain(tuple(layers))
    raise MalformedConfig(f"unknown domain kind {kind!r}")


def _as_mapping(raw_config) -> dict:
    if isinstance(raw_config, dict):
        return raw_config
    if isinstance(raw_config, os.PathLike):
        with open(raw_config) as fh:
            return _as_mapping(fh.read())
    if isinstance(raw_config, str):
        text = raw_config
        if not text.lstrip().startswith("{") and os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedConfig(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise MalformedConfig("config must be a JSON object")
        return data
    raise MalformedConfig(f"unsupported config type {type(raw_config).__name__}")


def load_and_validate_society(raw_config) -> Society:
    """Parse a config document (mapping, JSON text or path) into a Society."""
    data = _as_mapping(raw_config)
    n = data.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise MalformedConfig("'n' must be an integer")
    if not 2 <= n <= MAX_GROUPS:
        raise MalformedConfig(f"'n' must lie in 2..{MAX_GROUPS}, got {n}")
    f = data.get("f")
    if not isinstance(f, list) or len(f) != n:
        raise MalformedConfig(f"'f' must list exactly {n} groups")
    f_high, f_low = [], []
    for i, row in enumerate(f, start=1):
        if not isinstance(row, dict) or set(row) - {"h", "l"}:
            raise MalformedConfig(f"f[{i - 1}] must be an object with keys 'h' and 'l'")
        fh = parse_rational(row.get("h", 0))
        fl = parse_rational(row.get("l", 0))
        if fh < 0 or fl < 0:
            raise MalformedConfig(f"group {i}: mobilization potentials must be nonnegative")
        f_high.append(fh)
        f_low.append(fl)
    if "q" not in data:
        raise MalformedConfig("missing 'q'")
    society = Society(
        n=n,
        f_high=tuple(f_high),
        f_low=tuple(f_low),
        q=parse_rational(data["q"]),
        domain_spec=_parse_domain(data.get("domain"), n),
    )
    validate_society(society)
    return society


def validate_society(society: Society) -> None:
    n = society.n
    if not 0 < society.q <= 1:
        raise InvalidQ(f"q must lie in (0,1], got {society.q}")
    for i in range(1, n + 1):
        if society.f(i, HIGH) == 0 and society.f(i, LOW) == 0:
            raise GroupSupportsNothing(f"group {i} has zero potential for both policies")
    for a in POLICIES:
        if all(society.f(i, a) == 0 for i in range(1, n + 1)):
            raise PolicyUnsupported(f"no group supports policy {a.value}")
    if n == 2:
        f1h, f2h = society.f(1, HIGH), society.f(2, HIGH)
        f1l, f2l = society.f(1, LOW), society.f(2, LOW)
        if not (f1h > f2h and f2l > f1l):
            raise TwoGroupOrderingViolated(
                "two-group societies need f_1(h) > f_2(h) and f_2(l) > f_1(l)"
            )
    else:
        cats = society.categories
        for name in ("left", "center", "right"):
            if getattr(cats, name) == 0:
                raise EmptyCategory(f"the {name} category is empty")


# -- narrative domains --------------------------------------------------------

def _nonempty_categories(society: Society) -> tuple[int, ...]:
    return tuple(c for c in society.categories.as_tuple() if c)


def _expand_taxonomy(society: Society, spec: TaxonomyDomain):
    everyone = society.everyone
    right = society.categories.right
    previous = tuple(sorted(_nonempty_categories(society)))
    partitions = [previous]
    split_counts = [1]
    layers = list(spec.layers)
    # a leading r=1 layer restates pi_1
    if layers and layers[0].r == 1:
        first = layers.pop(0)
        if first.cells is not None and sorted(first.cells) != sorted(previous):
            raise MalformedTaxonomy("first taxonomy layer must be the three categories")
    for k, layer in enumerate(layers, start=2):
        if layer.cells is None:
            cells = []
            for parent in previous:
                if parent & right:
                    members = groups_of(parent)
                    r = layer.r
                    if len(members) < r:
                        raise MalformedTaxonomy(
                            f"layer {k}: cell {list(members)} cannot split into {r} parts")
                    size, extra = divmod(len(members), r)
                    start = 0
                    for j in range(r):
                        stop = start + size + (1 if j < extra else 0)
                        cells.append(bits_of(members[start:stop]))
                        start = stop
                else:
                    cells.append(parent)
            cells = tuple(sorted(cells))
        else:
            cells = tuple(sorted(layer.cells))
        if any(c == 0 for c in cells):
            raise MalformedTaxonomy(f"layer {k}: empty cell")
        union = 0
        for c in cells:
            if union & c:
                raise MalformedTaxonomy(f"layer {k}: cells overlap")
            union |= c
        if union != everyone:
            raise MalformedTaxonomy(f"layer {k}: cells do not cover every group")
        counts = {}
        for c in cells:
            parents = [p for p in previous if is_subset(c, p)]
            if len(parents) != 1:
                raise MalformedTaxonomy(f"layer {k}: cell {list(groups_of(c))} is not nested")
            counts[parents[0]] = counts.get(parents[0], 0) + 1
        right_counts = {counts[p] for p in previous if is_subset(p, right)}
        if len(right_counts) > 1:
            raise MalformedTaxonomy(f"layer {k}: right-wing cells split unevenly {sorted(right_counts)}")
        r = right_counts.pop() if right_counts else (layer.r or 2)
        if right and r < 2:
            raise MalformedTaxonomy(f"layer {k}: every right-wing cell must split at least in two")
        if layer.r is not None and right and layer.r != r:
            raise MalformedTaxonomy(f"layer {k}: declared r={layer.r} but cells split into {r}")
        partitions.append(cells)
        split_counts.append(r)
        previous = cells
    family = {0}
    for cells in partitions:
        family.update(cells)
    return frozenset(family), tuple(partitions), tuple(split_counts)


def expand_narrative_domain(society: Society) -> NarrativeDomain:
    """Expand the society's domain specification into the family of group sets."""
    spec = society.domain_spec
    cats = _nonempty_categories(society)
    if isinstance(spec, ExplicitDomain):
        everyone = society.everyone
        for s in spec.sets:
            if not is_subset(s, everyone):
                raise MalformedConfig(f"narrative set {list(groups_of(s))} names unknown groups")
            if society.n > 2 and not any(is_subset(s, c) for c in cats):
                raise NarrativeOutsideCategories(
                    f"narrative set {list(groups_of(s))} is not inside left, center or right")
        family = set(spec.sets) | {0}
        if society.n > 2:
            family.update(cats)
        return NarrativeDomain(frozenset(family), spec)
    if isinstance(spec, RichDomain):
        family = {0}
        for c in cats:
            family.update(subsets_of(c))
        return NarrativeDomain(frozenset(family), spec)
    if isinstance(spec, TaxonomyDomain):
        family, partitions, split_counts = _expand_taxonomy(society, spec)
        return NarrativeDomain(family, spec, partitions, split_counts)
    raise MalformedConfig(f"unknown domain specification {spec!r}")


# -- platforms ----------------------------------------------------------------

def admissible_coalitions(society: Society, a: Policy) -> list[int]:
    """Nonempty strict subsets of ``N^a``, ascending by bit value."""
    support = society.categories.n_h if a is HIGH else society.categories.n_l
    return [c for c in subsets_of(support) if c and c != society.everyone]


def count_platforms(society: Society, domain: NarrativeDomain) -> int:
    cats = society.categories
    total = 0
    for support in (cats.n_h, cats.n_l):
        k = popcount(support)
        total += (1 << k) - 1 - (support == society.everyone)
    return total * 2 * len(domain.family)


def is_admissible(society: Society, platform: Platform) -> bool:
    support = society.categories.n_h if platform.policy is HIGH else society.categories.n_l
    c = platform.coalition
    return c != 0 and c != society.everyone and is_subset(c, support)


def enumerate_admissible_platforms(
    society: Society,
    domain: NarrativeDomain,
    limit: int = DEFAULT_PLATFORM_LIMIT,
) -> list[Platform]:
    """Every admissible (policy, coalition, narrative) triple in canonical order."""
    count = count_platforms(society, domain)
    if count > limit:
        raise PlatformSpaceTooLarge(f"{count} platforms exceed the guard of {limit}")
    narratives = domain.narratives()
    out = []
    for a in POLICIES:
        for c in admissible_coalitions(society, a):
            for s in narratives:
                out.append(Platform(a, c, s))
    return out


def make_society(
    f: Sequence[tuple],
    q=1,
    domain: DomainSpec | None = None,
) -> Society:
    """Convenience constructor from ``[(f_i(h), f_i(l)), ...]``; validates."""
    society = Society(
        n=len(f),
        f_high=tuple(parse_rational(h) for h, _ in f),
        f_low=tuple(parse_rational(l) for _, l in f),
        q=parse_rational(q),
        domain_spec=domain if domain is not None else RichDomain(),
    )
    if not 2 <= society.n <= MAX_GROUPS:
        raise MalformedConfig(f"'n' must lie in 2..{MAX_GROUPS}")
    validate_society(society)
    return society


def explicit(*sets: Iterable[int]) -> ExplicitDomain:
    return ExplicitDomain(tuple(bits_of(s) for s in sets))


def taxonomy(*layers) -> TaxonomyDomain:
    """Build a taxonomy spec: ints are split counts, lists are explicit cells."""
    out = []
    for layer in layers:
        if isinstance(layer, int):
            out.append(TaxonomyLayer(r=layer))
        else:
            out.append(TaxonomyLayer(cells=tuple(bits_of(c) for c in layer)))
    return TaxonomyDomain(tuple(out))
