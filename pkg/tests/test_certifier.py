import json
import random
from fractions import Fraction

import pytest

from narrative_equilibrium.beliefs import PlatformDistribution
from narrative_equilibrium.certifier import oracle_solve, verify_equilibrium
from narrative_equilibrium.errors import OracleBoundExceeded
from narrative_equilibrium.serialize import distribution_from_json, distribution_to_json, report_to_json
from narrative_equilibrium.society import (
    HIGH,
    LOW,
    TRUE_NARRATIVE,
    Narrative,
    Platform,
    RichDomain,
    bits_of,
    enumerate_admissible_platforms,
    expand_narrative_domain,
    explicit,
    make_society,
)
from narrative_equilibrium.solver import solve_general

from instances import example4, fig1, random_explicit_society, random_oracle_society

TRUE_12 = Platform(HIGH, bits_of([1, 2]), TRUE_NARRATIVE)
LOW_2_34 = Platform(LOW, bits_of([2]), Narrative(False, bits_of([3, 4])))


def shifted(sigma, moves):
    masses = dict(sigma.items())
    for p, delta in moves.items():
        masses[p] = masses.get(p, Fraction(0)) + delta
    return PlatformDistribution(masses)


def test_example4_solution_certifies():
    s = example4()
    report = verify_equilibrium(s, None, solve_general(s).distribution)
    assert report.passed
    assert sorted(report.binding) == sorted([bits_of([3]), bits_of([4]), bits_of([3, 4])])
    assert report.sensitivity["eps_pass"] and report.sensitivity["eps_div_10_pass"]


def test_mass_shift_breaks_scapegoat_equality():
    s = example4()
    sigma = shifted(solve_general(s).distribution, {TRUE_12: Fraction(-1, 20), LOW_2_34: Fraction(1, 20)})
    report = verify_equilibrium(s, None, sigma)
    assert not report.passed
    flagged = {v.narrative.groups for v in report.violations if v.kind == "scapegoat_equality"}
    assert bits_of([3, 4]) in flagged
    v = next(v for v in report.violations if v.kind == "scapegoat_equality" and v.narrative.groups == bits_of([3, 4]))
    # alpha = 7/20, d = 3, F(h,N) = 2, F(l,{3,4}) = 2; supersets of {3,4}: only itself with 1/4
    assert (v.lhs, v.rhs) == (Fraction(7, 20) * (3 - 2) / 2, Fraction(1, 4))


def test_wrong_coalition_shape():
    s = example4()
    wrong = Platform(LOW, bits_of([2, 3]), Narrative(False, bits_of([3, 4])))
    sigma = shifted(solve_general(s).distribution, {LOW_2_34: Fraction(-1, 5), wrong: Fraction(1, 5)})
    kinds = verify_equilibrium(s, None, sigma).kinds()
    assert "coalition_shape" in kinds


def test_inclusionary_narrative_on_support():
    s = example4()
    left_story = Platform(LOW, bits_of([2, 3, 4]), Narrative(False, bits_of([1])))
    sigma = shifted(solve_general(s).distribution, {LOW_2_34: Fraction(-1, 5), left_story: Fraction(1, 5)})
    report = verify_equilibrium(s, None, sigma)
    assert "narrative_not_exclusionary" in report.kinds()
    below = [v for v in report.violations if v.kind == "support_below_u_star" and v.platform == left_story]
    assert below and below[0].lhs == 0


def test_fig1_solution_certifies():
    s = fig1()
    assert verify_equilibrium(s, None, solve_general(s).distribution).passed


def test_two_group_tampering_detected():
    s = fig1()
    sol = solve_general(s).distribution
    one, two = bits_of([1]), bits_of([2])
    tribal = Platform(LOW, one, Narrative(False, one))
    denial = Platform(LOW, two, Narrative(False, 0))
    report = verify_equilibrium(s, None, shifted(sol, {tribal: Fraction(-1, 10), denial: Fraction(1, 10)}))
    # thinner tribal mass lets the tribal platform out-earn U*
    flagged = [v for v in report.violations if v.kind == "scapegoat_inequality"]
    assert [v.narrative for v in flagged] == [tribal.narrative]
    assert "payoff_exceeds_u_star" in report.kinds()


def test_single_coordinate_perturbations_fail():
    s = example4()
    d = expand_narrative_domain(s)
    sol = solve_general(s, d).distribution
    platforms = enumerate_admissible_platforms(s, d)
    rng = random.Random(0)
    targets = list(sol.support) + rng.sample(platforms, 15)
    for p in targets:
        for delta in (Fraction(1, 1000), Fraction(1, 20)):
            masses = dict(sol.items())
            masses[p] = masses.get(p, Fraction(0)) + delta
            perturbed = PlatformDistribution(masses, normalize=True)
            assert not verify_equilibrium(s, d, perturbed).passed, p


def test_solutions_certify_on_random_instances():
    rng = random.Random(9)
    for _ in range(60):
        s = random_explicit_society(rng)
        d = expand_narrative_domain(s)
        assert verify_equilibrium(s, d, solve_general(s, d).distribution).passed


def test_uniform_tremble_can_flag_a_true_equilibrium():
    # cell x_2 = 0 of narrative {2} carries no equilibrium mass; spreading the
    # tremble evenly over HIGH and LOW lends (l,{3},{2}) an inflated belief
    s = make_society([("1/2", 0), (2, 2), (0, 6)], 1, explicit([2]))
    sol = solve_general(s).distribution
    assert verify_equilibrium(s, None, sol).passed
    uniform = verify_equilibrium(s, None, sol, tremble="uniform")
    assert "payoff_exceeds_u_star" in uniform.kinds()


def test_unknown_tremble():
    with pytest.raises(ValueError):
        verify_equilibrium(fig1(), None, solve_general(fig1()).distribution, tremble="odd")


def test_report_json_shape():
    s = example4()
    sigma = shifted(solve_general(s).distribution, {TRUE_12: Fraction(-1, 20), LOW_2_34: Fraction(1, 20)})
    doc = report_to_json(verify_equilibrium(s, None, sigma))
    text = json.dumps(doc)
    assert doc["passed"] is False
    assert {"kind", "lhs", "rhs"} <= set(doc["violations"][0])
    assert json.loads(text) == doc


def test_candidate_round_trip():
    sol = solve_general(example4()).distribution
    assert distribution_from_json({"platforms": distribution_to_json(sol)}) == sol


# -- oracle -------------------------------------------------------------------

def test_oracle_matches_example4():
    s = example4()
    assert oracle_solve(s).same_equilibrium(solve_general(s))


def test_oracle_high_only():
    s = make_society([(3, 0), (2, 1), (0, 1)], 1, RichDomain())
    r = oracle_solve(s)
    assert r.alpha == 1 and len(r.distribution) == 1


def test_oracle_bound():
    s = make_society([(1, 0), (1, 20)] + [(0, 1)] * 4, 1, RichDomain())   # 16 candidate sets
    with pytest.raises(OracleBoundExceeded):
        oracle_solve(s, bound=12)


def test_oracle_matches_general_on_random_instances():
    rng = random.Random(21)
    for k in range(30):
        s = random_oracle_society(rng, 1 + k % 8)
        assert oracle_solve(s).same_equilibrium(solve_general(s))
