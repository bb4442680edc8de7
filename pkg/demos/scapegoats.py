"""Four groups and a narrative menu: who gets blamed?

Groups 3 and 4 only ever support the low policy, so low-policy platforms
can win extra support by telling a story in which keeping them out of power
is what brings good outcomes.  The exact equilibrium mixes the true platform
with three scapegoating platforms; the certifier then confirms it and
rejects a tampered copy.

    python3 demos/scapegoats.py
"""

from fractions import Fraction
from pathlib import Path

from narrative_equilibrium import load_and_validate_society, solve, verify_equilibrium
from narrative_equilibrium.beliefs import PlatformDistribution
from narrative_equilibrium.society import HIGH

CONFIG = Path(__file__).with_name("configs") / "example4.json"


def show(report) -> None:
    print(f"  passed: {report.passed}")
    for v in report.violations[:4]:
        print(f"  {v.kind} at {v.platform or v.narrative}: {v.lhs} vs {v.rhs}")


def main() -> None:
    society = load_and_validate_society(CONFIG)
    eq = solve(society)
    print(f"alpha = {eq.alpha}, d = {society.d}")
    for p, m in eq.distribution.items():
        print(f"  {m!s:>5}  {p}")

    print("\ncertifying the solver output:")
    show(verify_equilibrium(society, None, eq.distribution))

    masses = dict(eq.distribution.items())
    top = next(p for p in masses if p.policy is HIGH)
    blame_both = max(masses, key=lambda p: bin(p.narrative.groups).count("1"))
    masses[top] -= Fraction(1, 20)
    masses[blame_both] += Fraction(1, 20)
    print("\nmoving 1/20 of mass from the true platform to the two-group scapegoat:")
    show(verify_equilibrium(society, None, PlatformDistribution(masses)))


if __name__ == "__main__":
    main()
