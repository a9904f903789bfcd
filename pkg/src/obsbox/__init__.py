"""Deterministic observer and black-box partition experiments.

The package simulates a minimal observer embedded in a presented world: a
one-bit meter stick with a thermodynamic cost ledger, reconstruction of a
unitary description from recorded bit streams, constructions showing that
distinct hidden mechanisms reproduce the same observations, and a two-slit
detection instrument exposed through a CLI and an HTTP session API.
"""

from .ambiguity import (
    GodsEyeHistory,
    MooreBox,
    ReversalCounts,
    reversal_counts,
    substitution_pair,
    surprise_pair,
)
from .doubleslit import (
    DetectionEvents,
    SlitConfig,
    events_due,
    fringe_spacing,
    intensity,
    pattern_csv,
    pattern_table,
    sample_events,
    source_representation,
    visibility,
)
from .errors import ConfigurationError, ContractViolation, DomainError
from .kernels import numba_available, using_numba
from .observer import (
    BOLTZMANN_K,
    PLANCK_H,
    EnergyLedger,
    MeterStick,
    ObserverClock,
    OutcomeStream,
    action_quantum,
    measure,
    record,
    run_session,
)
from .quantum import (
    BornEstimate,
    PhaseFunctions,
    ProjectionFamily,
    QuantumDescription,
    born_estimate,
    check_unitary,
    infer_amplitudes,
    propagator_at,
    standard_projections,
    state_at,
    step,
)
from .rng import SplitMix64, splitmix64_at
from .world import (
    BlockSums,
    CyclicSchedule,
    SeededUniformSchedule,
    WorldObject,
    WorldSpec,
    decompose,
    dump_world,
    load_world,
    next_presentation,
    presentation_ids,
    presentation_positions,
    reverse_window,
)

__version__ = "0.1.0"

__all__ = [
    "BOLTZMANN_K",
    "PLANCK_H",
    "BlockSums",
    "BornEstimate",
    "ConfigurationError",
    "ContractViolation",
    "CyclicSchedule",
    "DetectionEvents",
    "DomainError",
    "EnergyLedger",
    "GodsEyeHistory",
    "MeterStick",
    "MooreBox",
    "ObserverClock",
    "OutcomeStream",
    "PhaseFunctions",
    "ProjectionFamily",
    "QuantumDescription",
    "ReversalCounts",
    "SeededUniformSchedule",
    "SlitConfig",
    "SplitMix64",
    "WorldObject",
    "WorldSpec",
    "action_quantum",
    "born_estimate",
    "check_unitary",
    "decompose",
    "dump_world",
    "events_due",
    "fringe_spacing",
    "infer_amplitudes",
    "intensity",
    "load_world",
    "measure",
    "next_presentation",
    "numba_available",
    "pattern_csv",
    "pattern_table",
    "presentation_ids",
    "presentation_positions",
    "propagator_at",
    "record",
    "reversal_counts",
    "reverse_window",
    "run_session",
    "sample_events",
    "source_representation",
    "splitmix64_at",
    "standard_projections",
    "state_at",
    "step",
    "substitution_pair",
    "surprise_pair",
    "using_numba",
    "visibility",
]
