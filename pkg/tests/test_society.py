import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from narrative_equilibrium.errors import (
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
from narrative_equilibrium.society import (
    HIGH,
    LOW,
    Narrative,
    Platform,
    RichDomain,
    bits_of,
    count_platforms,
    enumerate_admissible_platforms,
    expand_narrative_domain,
    explicit,
    groups_of,
    is_admissible,
    load_and_validate_society,
    make_society,
    parse_rational,
    platform_sort_key,
    subsets_of,
    taxonomy,
)

from instances import example4, fig1

FIG1_CONFIG = {
    "n": 2, "q": "1/2",
    "f": [{"h": "1", "l": "2"}, {"h": "1/2", "l": "3"}],
    "domain": {"kind": "explicit", "sets": [[1], [2]]},
}


def test_fig1_config_loads():
    s = load_and_validate_society(FIG1_CONFIG)
    assert s.categories.n_h == bits_of([1, 2])
    assert s.categories.n_l == bits_of([1, 2])
    assert s.q == Fraction(1, 2)


def test_config_from_json_text_and_path(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(FIG1_CONFIG))
    assert load_and_validate_society(str(path)) == load_and_validate_society(json.dumps(FIG1_CONFIG))


def test_group_supporting_nothing():
    with pytest.raises(GroupSupportsNothing):
        make_society([(0, 0), (1, 1), (0, 1)])


def test_example4_categories():
    cats = example4().categories
    assert (cats.center, cats.left, cats.right) == (bits_of([2]), bits_of([1]), bits_of([3, 4]))


def test_categories_partition_everyone():
    cats = example4().categories
    assert cats.center | cats.left | cats.right == bits_of([1, 2, 3, 4])
    assert not (cats.center & cats.left or cats.center & cats.right or cats.left & cats.right)


@pytest.mark.parametrize("f, err", [
    ([(1, 0), (1, 0), (1, 0)], PolicyUnsupported),
    ([(1, 0), (1, 1), (1, 1)], EmptyCategory),        # nobody on the right
    ([(1, 2), (1, 3)], TwoGroupOrderingViolated),      # f_1(h) = f_2(h)
    ([(1, 3), ("1/2", 3)], TwoGroupOrderingViolated),  # f_2(l) = f_1(l)
])
def test_validation_errors(f, err):
    with pytest.raises(err):
        make_society(f)


@pytest.mark.parametrize("q", ["0", "3/2", "-1"])
def test_invalid_q(q):
    with pytest.raises(InvalidQ):
        make_society([(1, 2), ("1/2", 3)], q)


@pytest.mark.parametrize("bad", [
    {"n": 2},
    {"n": "two", "q": "1", "f": []},
    {"n": 2, "q": "1", "f": [{"h": "1"}]},
    {"n": 2, "q": "x", "f": [{"h": "1", "l": "2"}, {"h": "1/2", "l": "3"}]},
    {"n": 2, "q": "1", "f": [{"h": "1", "l": "2"}, {"h": "1/2", "l": "3"}], "domain": {"kind": "odd"}},
    {"n": 2, "q": "1", "f": [{"h": "1", "l": "2"}, {"h": "1/2", "l": "3"}],
     "domain": {"kind": "explicit", "sets": [[3]]}},
])
def test_malformed_configs(bad):
    with pytest.raises(MalformedConfig):
        load_and_validate_society(bad)


def test_decimal_inputs_are_exact():
    assert parse_rational("0.1") == Fraction(1, 10)
    assert parse_rational(0.1) == Fraction(1, 10)
    assert parse_rational("2/6") == Fraction(1, 3)


# -- domains ------------------------------------------------------------------

def test_single_layer_taxonomy_is_the_categories():
    d = expand_narrative_domain(example4(domain=taxonomy()))
    assert d.family == {0, bits_of([1]), bits_of([2]), bits_of([3, 4])}
    assert (d.K, d.R) == (1, 0)


def test_rich_family_matches_brute_force():
    d = expand_narrative_domain(example4(domain=RichDomain()))
    cats = [[1], [2], [3, 4]]
    brute = {0}
    for cat in cats:
        for r in range(1, len(cat) + 1):
            for combo in itertools.combinations(cat, r):
                brute.add(bits_of(combo))
    assert d.family == brute
    assert d.family == {0, bits_of([1]), bits_of([2]), bits_of([3]), bits_of([4]), bits_of([3, 4])}


def test_explicit_family_adds_denial():
    d = expand_narrative_domain(example4())
    assert d.family == {bits_of(s) for s in ([1], [2], [3], [4], [3, 4])} | {0}


def test_explicit_family_adds_categories():
    d = expand_narrative_domain(example4(domain=explicit([3])))
    assert bits_of([3, 4]) in d.family and bits_of([1]) in d.family and bits_of([2]) in d.family


def test_narrative_outside_categories():
    with pytest.raises(NarrativeOutsideCategories):
        expand_narrative_domain(example4(domain=explicit([2, 3])))


def test_taxonomy_split_counts():
    s = make_society([(1, 0), (1, 3)] + [(0, 1)] * 4, 1, taxonomy(2, 2))
    d = expand_narrative_domain(s)
    assert d.split_counts == (1, 2, 2)
    assert d.R == 2
    assert d.partitions[-1][-4:] == tuple(bits_of([i]) for i in (3, 4, 5, 6))


def test_taxonomy_rejects_uneven_or_unnested_cells():
    base = [(1, 0), (1, 3)] + [(0, 1)] * 4
    with pytest.raises(MalformedTaxonomy):   # {2,3} straddles center and right
        expand_narrative_domain(make_society(base, 1, taxonomy([[1], [2, 3], [4, 5, 6]])))
    with pytest.raises(MalformedTaxonomy):   # second layer splits {3,4} in 2 but {5,6} not at all
        expand_narrative_domain(make_society(base, 1, taxonomy([[1], [2], [3, 4], [5, 6]],
                                                               [[1], [2], [3], [4], [5, 6]])))
    with pytest.raises(MalformedTaxonomy):   # cannot split 4 right groups into 5
        expand_narrative_domain(make_society(base, 1, taxonomy(5)))


# -- platforms ----------------------------------------------------------------

def test_two_group_platform_count():
    s = fig1()
    d = expand_narrative_domain(s)
    platforms = enumerate_admissible_platforms(s, d)
    assert len(d.narratives()) == 6
    assert len(platforms) == 24 == count_platforms(s, d)


def test_no_low_platform_contains_group_one_in_example4():
    s = example4()
    for p in enumerate_admissible_platforms(s, expand_narrative_domain(s)):
        if p.policy is LOW:
            assert not p.coalition & bits_of([1])


def test_grand_coalition_excluded():
    s = make_society([(1, 2), (1, 0), (0, 1)])     # N^h = {1,2}, N^l = {1,3}
    d = expand_narrative_domain(s)
    everyone = bits_of([1, 2, 3])
    assert not is_admissible(s, Platform(HIGH, everyone, Narrative(True, 0)))
    assert all(p.coalition != everyone for p in enumerate_admissible_platforms(s, d))


def test_enumeration_matches_brute_force_and_is_stable():
    s = example4(domain=RichDomain())
    d = expand_narrative_domain(s)
    first = enumerate_admissible_platforms(s, d)
    assert first == enumerate_admissible_platforms(s, d)
    assert first == sorted(first, key=platform_sort_key)
    brute = set()
    everyone = bits_of([1, 2, 3, 4])
    for a in (HIGH, LOW):
        for c in range(1, everyone):
            if all(s.f(i, a) > 0 for i in groups_of(c)):
                for g in d.family:
                    for with_policy in (False, True):
                        brute.add(Platform(a, c, Narrative(with_policy, g)))
    assert set(first) == brute


def test_platform_guard():
    s = example4(domain=RichDomain())
    with pytest.raises(PlatformSpaceTooLarge):
        enumerate_admissible_platforms(s, expand_narrative_domain(s), limit=10)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**8 - 1))
def test_subsets_of_enumerates_every_subset(bits):
    subs = list(subsets_of(bits))
    assert len(subs) == 2 ** bin(bits).count("1")
    assert all(s & ~bits == 0 for s in subs)
    assert subs == sorted(set(subs))
