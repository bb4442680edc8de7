"""When any subset of a category can be a story, only big scapegoats survive.

Under the rich domain the low-policy platforms blame either the whole
right-wing bloc or the bloc minus one group; nothing smaller is used.

    python3 demos/rich_domain.py
"""

from narrative_equilibrium import solve
from narrative_equilibrium.society import RichDomain, make_society, popcount


def main() -> None:
    f = [(2, 0), (1, 4), (0, 1), (0, "1/2"), (0, 2), (0, 1)]
    society = make_society(f, "1/2", RichDomain())
    eq = solve(society, check=True)
    right = popcount(society.categories.right)
    print(f"method {eq.method}, alpha = {eq.alpha} = F(h,N)/F(l,N)")
    print(f"{right} right-wing groups; scapegoat sets in the support:")
    for s, m in sorted(eq.narrative_masses.items(), key=lambda kv: -popcount(kv[0])):
        if m:
            members = [i + 1 for i in range(society.n) if s >> i & 1]
            print(f"  size {len(members)}  {members}  mass {m}")


if __name__ == "__main__":
    main()
