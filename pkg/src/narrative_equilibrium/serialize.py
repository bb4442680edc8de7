"""JSON encoding of rationals, platforms, equilibria and certificates."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .beliefs import PlatformDistribution
from .certifier import CertReport, Violation
from .errors import MalformedConfig
from .society import Narrative, Platform, Policy, Society, bits_of, groups_of, parse_rational
from .solver import EquilibriumResult


def rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_pair(x: Fraction) -> dict:
    return {"exact": rational(x), "decimal": float(x)}


def narrative_to_json(s: Narrative) -> dict:
    return {"S": ([0] if s.includes_policy else []) + list(groups_of(s.groups)),
            "uses_policy_cause": s.includes_policy}


def platform_to_json(p: Platform) -> dict:
    return {"a": p.policy.value, "C": list(groups_of(p.coalition)), **narrative_to_json(p.narrative)}


def platform_from_json(raw: dict, n: int | None = None) -> Platform:
    try:
        policy = Policy.parse(raw["a"])
        coalition = raw["C"]
        members = raw["S"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedConfig(f"bad platform {raw!r}") from exc
    for i in list(coalition) + list(members):
        if isinstance(i, bool) or not isinstance(i, int) or i < 0 or (n is not None and i > n):
            raise MalformedConfig(f"bad group index {i!r} in platform {raw!r}")
    if 0 in coalition:
        raise MalformedConfig("coalitions contain groups 1..n only")
    uses_policy = 0 in members
    if raw.get("uses_policy_cause", uses_policy) != uses_policy:
        raise MalformedConfig("'uses_policy_cause' disagrees with whether 0 is in S")
    return Platform(policy, bits_of(coalition),
                    Narrative(uses_policy, bits_of(i for i in members if i != 0)))


def distribution_to_json(sigma: PlatformDistribution) -> list[dict]:
    return [{"platform": platform_to_json(p), "mass": rational(m), "mass_decimal": float(m)}
            for p, m in sigma.items()]


def distribution_from_json(raw, n: int | None = None) -> PlatformDistribution:
    """Read ``{"platforms": [{"platform": {...}, "mass": "p/q"}, ...]}`` or the bare list."""
    if isinstance(raw, (str, Path)):
        raw = json.loads(Path(raw).read_text())
    entries = raw.get("platforms") if isinstance(raw, dict) else raw
    if not isinstance(entries, list):
        raise MalformedConfig("candidate must carry a 'platforms' list")
    masses: dict[Platform, Fraction] = {}
    for entry in entries:
        if not isinstance(entry, dict) or "platform" not in entry or "mass" not in entry:
            raise MalformedConfig(f"bad candidate entry {entry!r}")
        p = platform_from_json(entry["platform"], n)
        masses[p] = masses.get(p, Fraction(0)) + parse_rational(entry["mass"])
    return PlatformDistribution(masses)


def result_to_json(result: EquilibriumResult, society: Society | None = None) -> dict:
    out = {
        "method": result.method,
        "alpha": rational_pair(result.alpha),
        "u_star": rational_pair(result.u_star),
        "platforms": distribution_to_json(result.distribution),
        "narrative_masses": [
            {**narrative_to_json(Narrative(False, s)), "mass": rational(m), "mass_decimal": float(m),
             "weight": rational(result.weights.get(s, Fraction(0)))}
            for s, m in sorted(result.narrative_masses.items())
        ],
        "marginal": [
            {"a": a.value, "C": list(groups_of(c)), "mass": rational(m), "mass_decimal": float(m)}
            for (a, c), m in result.marginal.items()
        ],
        "layers": [[list(groups_of(s)) for s in layer] for layer in result.layers],
        "notes": list(result.notes),
    }
    if society is not None:
        out["d"] = rational_pair(society.d)
    return out


def violation_to_json(v: Violation) -> dict:
    out: dict = {"kind": v.kind}
    if v.platform is not None:
        out["platform"] = platform_to_json(v.platform)
    if v.narrative is not None:
        out["narrative"] = narrative_to_json(v.narrative)
    if v.lhs is not None:
        out["lhs"] = rational(v.lhs)
    if v.rhs is not None:
        out["rhs"] = rational(v.rhs)
    if v.detail:
        out["detail"] = v.detail
    return out


def report_to_json(report: CertReport) -> dict:
    sens = report.sensitivity
    return {
        "passed": report.passed,
        "violations": [violation_to_json(v) for v in report.violations],
        "binding": [list(groups_of(s)) for s in report.binding],
        "tight": [list(groups_of(s)) for s in report.tight],
        "slack": [list(groups_of(s)) for s in report.slack],
        "sensitivity": {
            "eps": rational(sens["eps"]),
            "passed_at_eps": sens["eps_pass"],
            "passed_at_eps_over_10": sens["eps_div_10_pass"],
        } if sens else {},
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)
