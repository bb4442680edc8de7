"""The ten acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (also repeated in the terminal
summary).  Expected values come from hand derivations or independent
computations inside this file, not from the solver under test.
"""

import random
import statistics
import time
from fractions import Fraction

import numpy as np

from narrative_equilibrium.beliefs import PlatformDistribution
from narrative_equilibrium.certifier import oracle_solve, verify_equilibrium
from narrative_equilibrium.dynamics import cycle_amplitudes, limit_estimate, run_dynamics
from narrative_equilibrium.microfoundation import GroupPopulation, simulate_mobilization
from narrative_equilibrium.society import (
    DENIAL,
    HIGH,
    LOW,
    TRUE_NARRATIVE,
    Narrative,
    Platform,
    RichDomain,
    bits_of,
    expand_narrative_domain,
    groups_of,
    is_subset,
    make_society,
    popcount,
)
from narrative_equilibrium.solver import (
    layer_decomposition,
    solve_general,
    solve_rich_closed_form,
    solve_taxonomy_closed_form,
    solve_two_group,
)

from instances import (
    example4,
    fig1,
    random_explicit_society,
    random_oracle_society,
    random_rich_society,
    random_taxonomy_society,
)

ONE, TWO = bits_of([1]), bits_of([2])


def low(coalition, scapegoats):
    return Platform(LOW, bits_of(coalition), Narrative(False, bits_of(scapegoats)))


def shifted(sigma, moves):
    masses = dict(sigma.items())
    for p, delta in moves.items():
        masses[p] = masses.get(p, Fraction(0)) + delta
    return PlatformDistribution(masses)


# 1 --------------------------------------------------------------------------

def test_c1_two_group_closed_form(acceptance):
    with acceptance("C1 two-group closed form at the reference values, exact, < 1 ms"):
        s = fig1()
        # f1h = 1, f1l = 2, f2l = 3: alpha = f1h / (f2l - f1l + f1h) = 1/3,
        # tribal = alpha (f1l - f1h) / f1h = 1/3, denial = 1 - 2/3
        want = {
            Platform(HIGH, ONE, TRUE_NARRATIVE): Fraction(1, 3),
            Platform(LOW, TWO, DENIAL): Fraction(1, 3),
            Platform(LOW, ONE, Narrative(False, ONE)): Fraction(1, 3),
        }
        result = solve_two_group(s)
        assert dict(result.distribution.items()) == want
        times = []
        for _ in range(50):
            t0 = time.perf_counter()
            solve_two_group(s)
            times.append(time.perf_counter() - t0)
        median = statistics.median(times)
        assert median < 1e-3, f"median solve time {median * 1e3:.3f} ms"


# 2 --------------------------------------------------------------------------

def test_c2_four_group_example(acceptance):
    with acceptance("C2 four-group example gives (2/5, 1/5, 1/5, 1/5) exactly"):
        result = solve_general(example4())
        want = {
            Platform(HIGH, bits_of([1, 2]), TRUE_NARRATIVE): Fraction(2, 5),
            low([2], [3, 4]): Fraction(1, 5),
            low([2, 3], [4]): Fraction(1, 5),
            low([2, 4], [3]): Fraction(1, 5),
        }
        assert dict(result.distribution.items()) == want


# 3 --------------------------------------------------------------------------

def test_c3_taxonomy_formula(acceptance):
    with acceptance("C3 taxonomy closed form == general solver on 100 instances, (i), (ii), < 10 s"):
        rng = random.Random(2024)
        t0 = time.perf_counter()
        for _ in range(100):
            s = random_taxonomy_society(rng, max_n=10, max_k=3)
            d = expand_narrative_domain(s)
            assert s.n <= 10 and d.K <= 3
            closed = solve_taxonomy_closed_form(s, d)
            general = solve_general(s, d)
            assert closed.same_equilibrium(general)
            right = s.categories.right
            R = sum(layer.r - 1 for layer in s.domain_spec.layers)
            fl_right = s.F(LOW, right)
            assert closed.alpha == s.F(HIGH, s.everyone) / (s.F(LOW, s.categories.n_h) + max(R, 1) * fl_right)
            masses = general.narrative_masses
            for partition in d.partitions:
                for cell in partition:
                    if is_subset(cell, right):
                        assert masses.get(cell, 0) > 0, "eligible cell without mass"
            assert (masses.get(0, 0) > 0) == (d.K == 1)
        elapsed = time.perf_counter() - t0
        assert elapsed < 10, f"{elapsed:.1f} s"


# 4 --------------------------------------------------------------------------

def test_c4_rich_domain(acceptance):
    with acceptance("C4 rich domain: alpha = F(h,N)/F(l,N) and scapegoat sizes |N\\N^h|, |N\\N^h|-1"):
        rng = random.Random(77)
        for _ in range(100):
            s = random_rich_society(rng, max_right=6)
            right = s.categories.right
            k = popcount(right)
            assert k <= 6
            result = solve_general(s, expand_narrative_domain(s))
            assert result.alpha == s.F(HIGH, s.everyone) / s.F(LOW, s.everyone)
            support = {x for x, m in result.narrative_masses.items() if m > 0}
            assert support == {right} | {right & ~bits_of([i]) for i in groups_of(right)}
            assert {popcount(x) for x in support} == ({k, k - 1})
            assert solve_rich_closed_form(s).same_equilibrium(result)


# 5 --------------------------------------------------------------------------

def test_c5_oracle_equivalence(acceptance):
    with acceptance("C5 support-enumeration oracle == general solver, 100 seeds, |S_bar| <= 10"):
        sizes = []
        for seed in range(100):
            rng = random.Random(seed)
            s = random_oracle_society(rng, 1 + seed % 10)
            d = expand_narrative_domain(s)
            size = len(layer_decomposition(s, d).s_bar)
            assert size <= 10
            sizes.append(size)
            assert oracle_solve(s, d).same_equilibrium(solve_general(s, d)), f"seed {seed}"
        assert set(sizes) == set(range(1, 11))


# 6 --------------------------------------------------------------------------

def test_c6_two_group_dynamics(acceptance):
    with acceptance("C6 two-group dynamics, T=1e6 fast: marginal, payoff deviation, amplitudes, < 60 s"):
        s = fig1()
        t0 = time.perf_counter()
        trace = run_dynamics(s, horizon=10**6, mode="fast", tie="canonical").trace
        elapsed = time.perf_counter() - t0
        marginal = limit_estimate(trace).marginal
        want = {(HIGH, ONE): 1 / 3, (LOW, TWO): 1 / 3, (LOW, ONE): 1 / 3}
        assert set(marginal) == set(want)
        for key, v in want.items():
            assert abs(marginal[key] - v) < 1e-2, (key, marginal[key])
        # q f_1(h) = 1/2
        deviation = np.abs(trace.max_payoff[-10**5:] - 0.5).max()
        assert deviation < 1e-2, deviation
        amps = cycle_amplitudes(trace, 5)
        assert len(amps) == 5 and all(b < a for a, b in zip(amps, amps[1:])), amps
        assert elapsed < 60, f"{elapsed:.1f} s"


# 7 --------------------------------------------------------------------------

def test_c7_four_group_dynamics(acceptance):
    with acceptance("C7 four-group dynamics, T=1e6: (2/5,1/5,1/5,1/5) under canonical and random ties"):
        s = example4()
        want = {(HIGH, bits_of([1, 2])): 0.4, (LOW, bits_of([2])): 0.2,
                (LOW, bits_of([2, 3])): 0.2, (LOW, bits_of([2, 4])): 0.2}
        found = []
        for tie, seed in (("canonical", None), ("random", 12345)):
            trace = run_dynamics(s, horizon=10**6, mode="fast", tie=tie, seed=seed).trace
            marginal = limit_estimate(trace).marginal
            assert set(marginal) == set(want), (tie, marginal)
            for key, v in want.items():
                assert abs(marginal[key] - v) < 1e-2, (tie, key, marginal[key])
            found.append(marginal)
        assert all(abs(found[0][k] - found[1][k]) < 1e-2 for k in want)


# 8 --------------------------------------------------------------------------

def test_c8_property_suite(acceptance):
    with acceptance("C8 q/f invariance exact; monotonicity on 1e4 exact steps; scratch check every 1e3"):
        for base in (example4(), example4(domain=RichDomain()), fig1()):
            f = [(base.f(i, HIGH), base.f(i, LOW)) for i in range(1, base.n + 1)]
            ref = solve_general(make_society(f, 1, base.domain_spec)).distribution
            for q in (Fraction(1, 10), Fraction(1, 2), Fraction(1)):
                assert solve_general(make_society(f, q, base.domain_spec)).distribution == ref
            scaled = [(h * Fraction(7, 3), l * Fraction(7, 3)) for h, l in f]
            assert solve_general(make_society(scaled, base.q, base.domain_spec)).distribution == ref
        for s in (fig1(), example4()):
            run = run_dynamics(s, horizon=10**4, mode="exact", check_every=1, scratch_every=10**3)
            assert run.trace.warnings == [], run.trace.warnings[:3]
            assert run.counters.matches_scratch()


# 9 --------------------------------------------------------------------------

def test_c9_certifier(acceptance):
    with acceptance("C9 certifier passes 100 solver outputs and names the three constructed violations"):
        rng = random.Random(99)
        for _ in range(100):
            s = random_explicit_society(rng)
            d = expand_narrative_domain(s)
            report = verify_equilibrium(s, d, solve_general(s, d).distribution)
            assert report.passed, report.kinds()

        s = example4()
        sol = solve_general(s).distribution
        true12 = Platform(HIGH, bits_of([1, 2]), TRUE_NARRATIVE)
        scape34 = low([2], [3, 4])
        mass_shift = shifted(sol, {true12: Fraction(-1, 20), scape34: Fraction(1, 20)})
        wrong_shape = shifted(sol, {scape34: Fraction(-1, 5), low([2, 3], [3, 4]): Fraction(1, 5)})
        inclusionary = shifted(sol, {scape34: Fraction(-1, 5), low([2, 3, 4], [1]): Fraction(1, 5)})
        for sigma, kind in ((mass_shift, "scapegoat_equality"), (wrong_shape, "coalition_shape"),
                            (inclusionary, "narrative_not_exclusionary")):
            report = verify_equilibrium(s, None, sigma)
            assert not report.passed and kind in report.kinds(), (kind, report.kinds())


# 10 -------------------------------------------------------------------------

def test_c10_microfoundation(acceptance):
    with acceptance("C10 turnout m=10, cap=2, p=1/2: within 3 SE of 5/2 for >= 99 of 100 seeds"):
        pop = GroupPopulation(Fraction(10), {"h": Fraction(2)})
        hits = 0
        for seed in range(100):
            report = simulate_mobilization(pop, "h", Fraction(1, 2), 10**6, seed=seed)
            assert report.analytic == Fraction(5, 2)
            hits += report.within(3)
        assert hits >= 99, f"{hits}/100 seeds within 3 SE"
