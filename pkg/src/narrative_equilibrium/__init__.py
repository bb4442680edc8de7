"""Narrative competition over political platforms.

Exact essential equilibria, an independent certifier, and the
dominant-platform learning dynamics that converge to them.
"""

from .beliefs import (
    UNDEFINED,
    HistoryCounters,
    PlatformDistribution,
    Signature,
    conditional_outcome_probability,
    counters_init,
    counters_record_dominant,
    platform_belief,
    signature_of,
)
from .certifier import CertReport, Violation, oracle_solve, verify_equilibrium
from .dynamics import Trace, check_trace_invariants, cycle_amplitudes, limit_estimate, run_dynamics
from .errors import NarrativeError, ResourceGuard, ValidationError, VerificationFailed
from .microfoundation import GroupPopulation, simulate_mobilization
from .payoff import dominant_set, group_support, platform_payoff
from .society import (
    DENIAL,
    HIGH,
    LOW,
    TRUE_NARRATIVE,
    Narrative,
    NarrativeDomain,
    Platform,
    Policy,
    Society,
    bits_of,
    enumerate_admissible_platforms,
    expand_narrative_domain,
    explicit,
    load_and_validate_society,
    make_society,
    taxonomy,
)
from .solver import (
    EquilibriumResult,
    layer_decomposition,
    solve,
    solve_general,
    solve_rich_closed_form,
    solve_taxonomy_closed_form,
    solve_two_group,
)

__version__ = "0.1.0"
