"""Finer social taxonomies breed more false narratives.

Seven groups, four of them right-wing.  Splitting the right-wing bloc into
more sub-categories gives low-policy platforms more ways to scapegoat, and
the share of periods in which the true platform wins falls.

    python3 demos/fragmentation.py
"""

import json
from pathlib import Path

from narrative_equilibrium import load_and_validate_society, solve
from narrative_equilibrium.society import expand_narrative_domain

CONFIG = Path(__file__).with_name("configs") / "taxonomy7.json"


def main() -> None:
    raw = json.loads(CONFIG.read_text())
    print(" r   R   alpha   denialist mass")
    for r in (1, 2, 3, 4):
        raw["domain"]["layers"] = [{"r": r}]
        society = load_and_validate_society(raw)
        domain = expand_narrative_domain(society)
        eq = solve(society, domain)
        denial = eq.narrative_masses.get(0, 0)
        print(f" {r}   {domain.R}   {eq.alpha!s:<6}  {denial}")


if __name__ == "__main__":
    main()
