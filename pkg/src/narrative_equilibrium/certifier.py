"""Equilibrium certification and the binding-set oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .beliefs import PlatformDistribution, cell_key
from .errors import MultipleSolutions, NoSolutionFound, OracleBoundExceeded
from .linalg import solve_linear_system
from .society import (
    DEFAULT_PLATFORM_LIMIT,
    DENIAL,
    HIGH,
    LOW,
    TRUE_NARRATIVE,
    Narrative,
    NarrativeDomain,
    Platform,
    Society,
    admissible_coalitions,
    bits_of,
    enumerate_admissible_platforms,
    expand_narrative_domain,
    is_admissible,
    is_subset,
    popcount,
)
from .solver import EquilibriumResult

DEFAULT_EPS = Fraction(1, 10**9)
DEFAULT_ORACLE_BOUND = 12
TREMBLES = ("graded", "uniform")


@dataclass(frozen=True)
class Violation:
    kind: str
    platform: Platform | None = None
    narrative: Narrative | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None
    detail: str = ""


@dataclass
class CertReport:
    violations: list[Violation] = field(default_factory=list)
    binding: list[int] = field(default_factory=list)   # positive mass, equality required
    tight: list[int] = field(default_factory=list)     # zero mass, equality happens to hold
    slack: list[int] = field(default_factory=list)
    sensitivity: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


# -- beliefs with trembles ----------------------------------------------------

class _Beliefs:
    """Candidate beliefs, with zero-mass cells resolved by a tremble.

    The tremble puts weight 1 on every LOW platform and ``eps`` on every HIGH
    platform (``graded``), or weight 1 everywhere (``uniform``).  Only the
    relative weights inside a zero-mass cell matter, so the counts of
    admissible coalitions matching the cell are all that is needed.
    """

    def __init__(self, society: Society, candidate: PlatformDistribution, eps: Fraction, tremble: str):
        self.society = society
        self.q = society.q
        self.eps = eps
        self.tremble = tremble
        self.cells: dict[tuple[Narrative, int], list[Fraction]] = {}
        self.coalitions = {a: admissible_coalitions(society, a) for a in (HIGH, LOW)}
        self._candidate = candidate
        self._seen_narratives: set[Narrative] = set()

    def _load(self, narrative: Narrative) -> None:
        for p, m in self._candidate.items():
            key = (narrative, cell_key(narrative, p.policy, p.coalition))
            agg = self.cells.setdefault(key, [Fraction(0), Fraction(0)])
            agg[1] += m
            if p.policy is HIGH:
                agg[0] += m
        self._seen_narratives.add(narrative)

    def _tremble_belief(self, narrative: Narrative, key: int) -> Fraction:
        v = key >> 1
        counts = {}
        for a in (HIGH, LOW):
            counts[a] = sum(1 for c in self.coalitions[a] if c & narrative.groups == v)
        w_high = self.eps if self.tremble == "graded" else Fraction(1)
        num = w_high * counts[HIGH]
        den = num + counts[LOW]
        return self.q * num / den

    def belief(self, platform: Platform) -> Fraction:
        narrative = platform.narrative
        if narrative.includes_policy:
            return self.q if platform.policy is HIGH else Fraction(0)
        if narrative not in self._seen_narratives:
            self._load(narrative)
        key = cell_key(narrative, platform.policy, platform.coalition)
        agg = self.cells.get((narrative, key))
        if agg is None or agg[1] == 0:
            return self._tremble_belief(narrative, key)
        return self.q * agg[0] / agg[1]

    def payoff(self, platform: Platform) -> Fraction:
        return self.belief(platform) * self.society.F(platform.policy, platform.coalition)


# -- structural checks --------------------------------------------------------

def _structure_violations(society: Society, candidate: PlatformDistribution) -> list[Violation]:
    out = []
    cats = society.categories
    for p, m in candidate.items():
        s = p.narrative
        if p.policy is HIGH:
            if p.coalition != society.best_high_coalition or s != TRUE_NARRATIVE:
                out.append(Violation("high_platform_shape", platform=p,
                                     detail="HIGH is only carried by the true narrative and the full HIGH coalition"))
            continue
        if s.includes_policy:
            out.append(Violation("policy_in_low_narrative", platform=p, narrative=s))
            continue
        if society.n == 2:
            one, two = bits_of([1]), bits_of([2])
            if not ((p.coalition == two and s == DENIAL) or (p.coalition == one and s.groups)):
                out.append(Violation("coalition_shape", platform=p, narrative=s,
                                     detail="LOW is carried by ({2}, denial) or ({1}, tribal)"))
            continue
        if not is_subset(s.groups, cats.right):
            out.append(Violation("narrative_not_exclusionary", platform=p, narrative=s,
                                 detail="scapegoat set must lie inside N\\N^h"))
        if p.coalition != cats.n_l & ~s.groups:
            out.append(Violation("coalition_shape", platform=p, narrative=s,
                                 detail="coalition must be N^l minus the scapegoat set"))
    return out


def _scapegoat_system(society: Society, domain: NarrativeDomain, candidate: PlatformDistribution, report: CertReport):
    cats = society.categories
    alpha = candidate.mass(Platform(HIGH, society.best_high_coalition, TRUE_NARRATIVE))
    fh = society.F(HIGH, society.everyone)
    d = society.d
    sets = sorted(s for s in domain.family if is_subset(s, cats.right))
    masses = {s: candidate.mass(Platform(LOW, cats.n_l & ~s, Narrative(False, s))) for s in sets}
    for s in sets:
        lhs = alpha * (d - society.F(LOW, s)) / fh
        rhs = sum((masses[t] for t in sets if is_subset(s, t)), Fraction(0))
        narrative = Narrative(False, s)
        if lhs > rhs:
            report.violations.append(Violation("scapegoat_inequality", narrative=narrative, lhs=lhs, rhs=rhs))
        elif masses[s] > 0 and lhs != rhs:
            report.violations.append(Violation("scapegoat_equality", narrative=narrative, lhs=lhs, rhs=rhs))
        _classify(report, s, lhs, rhs, masses[s])


def _classify(report: CertReport, s: int, lhs, rhs, mass) -> None:
    if mass > 0:
        report.binding.append(s)
    elif lhs == rhs:
        report.tight.append(s)
    else:
        report.slack.append(s)


def _two_group_conditions(society: Society, candidate: PlatformDistribution, report: CertReport):
    one, two = bits_of([1]), bits_of([2])
    f1h, f1l, f2l = society.f(1, HIGH), society.f(1, LOW), society.f(2, LOW)
    alpha = candidate.mass(Platform(HIGH, one, TRUE_NARRATIVE))
    denial = candidate.mass(Platform(LOW, two, DENIAL))
    tribal = sum((m for p, m in candidate.items()
                  if p.policy is LOW and p.coalition == one and not p.narrative.includes_policy
                  and p.narrative.groups), Fraction(0))
    checks = [
        (DENIAL, alpha * f2l, f1h, denial),
        (Narrative(False, one), alpha * f1l, f1h * (alpha + tribal), tribal),
    ]
    for narrative, lhs, rhs, mass in checks:
        if lhs > rhs:
            report.violations.append(Violation("scapegoat_inequality", narrative=narrative, lhs=lhs, rhs=rhs))
        elif mass > 0 and lhs != rhs:
            report.violations.append(Violation("scapegoat_equality", narrative=narrative, lhs=lhs, rhs=rhs))
        _classify(report, narrative.groups, lhs, rhs, mass)


def _payoff_and_essential(society, domain, candidate, platforms, eps, tremble) -> list[Violation]:
    beliefs = _Beliefs(society, candidate, eps, tremble)
    u_star = society.u_star
    out = []
    support = set(candidate.support)
    for p in platforms:
        u = beliefs.payoff(p)
        if u > u_star:
            out.append(Violation("payoff_exceeds_u_star", platform=p, lhs=u, rhs=u_star))
        elif p in support and u < u_star:
            out.append(Violation("support_below_u_star", platform=p, lhs=u, rhs=u_star))
    for p in candidate.support:
        u = beliefs.payoff(p)
        s = p.narrative
        if s != TRUE_NARRATIVE:
            u_true = beliefs.payoff(Platform(p.policy, p.coalition, TRUE_NARRATIVE))
            if not u_true < u:
                out.append(Violation("essential_true_over_false", platform=p, narrative=s,
                                     lhs=u_true, rhs=u))
        if not s.includes_policy:
            for sub in domain.family:
                if sub != s.groups and is_subset(sub, s.groups):
                    u_sub = beliefs.payoff(Platform(p.policy, p.coalition, Narrative(False, sub)))
                    if not u_sub < u:
                        out.append(Violation("essential_simple_over_complex", platform=p,
                                             narrative=Narrative(False, sub), lhs=u_sub, rhs=u))
    return out


def verify_equilibrium(
    society: Society,
    domain: NarrativeDomain | None,
    candidate: PlatformDistribution,
    *,
    eps: Fraction = DEFAULT_EPS,
    tremble: str = "graded",
    limit: int = DEFAULT_PLATFORM_LIMIT,
) -> CertReport:
    """Check a candidate against the essential-equilibrium conditions.

    Covers support shape, the linear inequality system on scapegoat masses,
    the payoff test on every admissible platform and both refinement
    conditions.  Violations are collected, never raised.
    """
    if tremble not in TREMBLES:
        raise ValueError(f"unknown tremble {tremble!r}")
    if domain is None:
        domain = expand_narrative_domain(society)
    eps = Fraction(eps)
    report = CertReport()
    for p in candidate.support:
        if not is_admissible(society, p) or not domain.is_feasible(p.narrative):
            report.violations.append(Violation("inadmissible_platform", platform=p))
    report.violations.extend(_structure_violations(society, candidate))
    if society.n == 2:
        _two_group_conditions(society, candidate, report)
    else:
        _scapegoat_system(society, domain, candidate, report)
    platforms = enumerate_admissible_platforms(society, domain, limit)
    at_eps = _payoff_and_essential(society, domain, candidate, platforms, eps, tremble)
    at_tenth = _payoff_and_essential(society, domain, candidate, platforms, eps / 10, tremble)
    report.violations.extend(at_eps)
    report.sensitivity = {"eps": eps, "eps_pass": not at_eps, "eps_div_10_pass": not at_tenth}
    return report


# -- oracle -------------------------------------------------------------------

def _enumerate_binding_sets(n_vars, build, check):
    solutions = {}
    for mask in range(1 << n_vars):
        chosen = [k for k in range(n_vars) if mask >> k & 1]
        system = build(chosen)
        if system is None:
            continue
        x = solve_linear_system(*system)
        if x is None or any(v < 0 for v in x) or x[0] <= 0:
            continue
        values = [Fraction(0)] * n_vars
        for k, v in zip(chosen, x[1:]):
            values[k] = v
        if check(x[0], values):
            solutions[(x[0], tuple(values))] = True
    return list(solutions)


def oracle_solve(
    society: Society,
    domain: NarrativeDomain | None = None,
    bound: int = DEFAULT_ORACLE_BOUND,
) -> EquilibriumResult:
    """Enumerate binding sets of the inequality system and solve each exactly.

    Exactly one nonnegative solution must satisfy every inequality; anything
    else means the characterization (or this code) is wrong.
    """
    if domain is None:
        domain = expand_narrative_domain(society)
    if society.n == 2:
        return _oracle_two_group(society)
    cats = society.categories
    fh = society.F(HIGH, society.everyone)
    d = society.d
    candidates = sorted(s for s in domain.family
                        if is_subset(s, cats.right) and society.F(LOW, s) < d)
    if len(candidates) > bound:
        raise OracleBoundExceeded(f"{len(candidates)} candidate sets exceed the oracle bound {bound}")
    coef = [(d - society.F(LOW, s)) / fh for s in candidates]
    supersets = [[j for j, t in enumerate(candidates) if is_subset(s, t)] for s in candidates]

    def build(chosen):
        col = {k: 1 + pos for pos, k in enumerate(chosen)}
        width = 1 + len(chosen)
        matrix, rhs = [], []
        for k in chosen:
            row = [Fraction(0)] * width
            row[0] = coef[k]
            for j in supersets[k]:
                if j in col:
                    row[col[j]] -= 1
            matrix.append(row)
            rhs.append(0)
        matrix.append([Fraction(1)] * width)
        rhs.append(1)
        return matrix, rhs

    def check(alpha, values):
        for k in range(len(candidates)):
            if coef[k] * alpha > sum(values[j] for j in supersets[k]):
                return False
        return True

    solutions = _enumerate_binding_sets(len(candidates), build, check)
    if not solutions:
        raise NoSolutionFound("no binding set yields an equilibrium")
    if len(solutions) > 1:
        raise MultipleSolutions(f"{len(solutions)} distinct equilibria found")
    alpha, values = solutions[0]
    platforms = {Platform(HIGH, society.best_high_coalition, TRUE_NARRATIVE): alpha}
    masses = {}
    for s, m in zip(candidates, values):
        masses[s] = m
        if m:
            platforms[Platform(LOW, cats.n_l & ~s, Narrative(False, s))] = m
    return EquilibriumResult(
        alpha=alpha,
        narrative_masses=masses,
        weights={s: m / alpha for s, m in masses.items()},
        u_star=society.u_star,
        distribution=PlatformDistribution(platforms),
        method="oracle",
    )


def _oracle_two_group(society: Society) -> EquilibriumResult:
    one, two = bits_of([1]), bits_of([2])
    f1h, f1l, f2l = society.f(1, HIGH), society.f(1, LOW), society.f(2, LOW)
    # variables: alpha, denial, tribal
    equations = [([f2l, 0, 0], f1h), ([f1l - f1h, 0, -f1h], 0)]

    def build(chosen):
        cols = [0] + [1 + k for k in chosen]
        matrix = [[row[c] for c in cols] for k, (row, _) in enumerate(equations) if k in chosen]
        rhs = [r for k, (_, r) in enumerate(equations) if k in chosen]
        matrix.append([1] * len(cols))
        rhs.append(1)
        return matrix, rhs

    def check(alpha, values):
        denial, tribal = values
        return alpha * f2l <= f1h and alpha * f1l <= f1h * (alpha + tribal)

    solutions = _enumerate_binding_sets(2, build, check)
    if not solutions:
        raise NoSolutionFound("no binding set yields an equilibrium")
    if len(solutions) > 1:
        raise MultipleSolutions(f"{len(solutions)} distinct equilibria found")
    alpha, (denial, tribal) = solutions[0]
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
        method="oracle",
    )


def scapegoat_sizes(result: EquilibriumResult) -> set[int]:
    return {popcount(s) for s, m in result.narrative_masses.items() if m > 0}
