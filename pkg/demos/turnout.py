"""Where mobilization potentials come from.

Members of a group with mass m pay a participation cost drawn uniformly
from [0, cap] and turn out when their belief in the good outcome exceeds
it.  Turnout is then m * p / cap, so the potential is m / cap.

    python3 demos/turnout.py
"""

from fractions import Fraction

from narrative_equilibrium.microfoundation import GroupPopulation, simulate_mobilization


def main() -> None:
    pop = GroupPopulation(Fraction(10), {"h": Fraction(2)})
    print(f"potential f = m / cap = {pop.potential('h')}")
    for p in ("1/8", "1/4", "1/2", "1"):
        r = simulate_mobilization(pop, "h", p, 10**6, seed=0)
        print(f"  belief {p:>4}: simulated {r.empirical:.4f}  exact {r.analytic}  "
              f"(se {r.std_error:.4f}, within 3 se: {r.within(3)})")


if __name__ == "__main__":
    main()
