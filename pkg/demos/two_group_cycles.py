"""Two groups, three platforms: watch the history cycle toward the equilibrium.

Group 1 backs both policies, group 2 prefers the low policy.  The solver
says the long-run history splits evenly between the true platform, a
denialist low platform and a tribal low platform that blames group 1.  The
simulation below shows the empirical frequencies getting there while the
winning payoff oscillates around U* with shrinking swings.

    python3 demos/two_group_cycles.py [steps]
"""

import sys
from pathlib import Path

from narrative_equilibrium import load_and_validate_society, solve
from narrative_equilibrium.society import groups_of
from narrative_equilibrium.dynamics import cycle_amplitudes, limit_estimate, run_dynamics

CONFIG = Path(__file__).with_name("configs") / "fig1.json"


def main(steps: int = 10**6) -> None:
    society = load_and_validate_society(CONFIG)
    eq = solve(society)
    print(f"equilibrium ({eq.method}), U* = {eq.u_star}")
    for p, m in eq.distribution.items():
        print(f"  {m!s:>5}  {p}")

    trace = run_dynamics(society, horizon=steps, mode="fast").trace
    est = limit_estimate(trace)
    print(f"\nafter {steps} periods, second-half frequencies of (policy, coalition):")
    for (a, c), freq in est.marginal.items():
        print(f"  {a.value} {str(list(groups_of(c))):<5} {freq:.4f}")
    print(f"largest |max payoff - U*| over the tail: {est.max_deviation:.2e}")

    amps = cycle_amplitudes(trace, 8)
    print("\nexcess payoff over U* in the first cycles (HIGH win to HIGH win):")
    print("  " + "  ".join(f"{a:.4f}" for a in amps))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10**6)
