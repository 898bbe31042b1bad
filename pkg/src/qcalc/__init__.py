"""Finite-dimensional observation calculus, criteria lab, and Bell toolkit."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConsonanceError,
    DegenerateOrbitError,
    DisjointnessError,
    InvariantError,
    LabelError,
    LengthError,
    PeggingError,
    QcalcError,
    ShapeError,
    SpaceError,
)
from .tensor import (
    DIM_CAP,
    FactorSpace,
    Operator,
    basis_projector,
    conjugate,
    embed,
    fspace,
    hermitian_basis,
    identity,
    partial_trace,
    random_density,
    random_effect,
    random_effect_bindle,
    random_unitary,
    reindex,
    sqrt_psd,
    tensor,
    validate,
)
from .calculus import (
    Bambino,
    Bindle,
    CoOrbit,
    InstrumentedObservation,
    Orbit,
    born,
    condition,
    consonant,
    divide_coorbit,
    divide_orbit,
    extend_coorbit,
    future_product,
    normalize,
    past_product,
    reduce_look,
    scale,
)
from .criteria import (
    CriterionReport,
    ExamineeSpace,
    SCENARIO_EXPECTATIONS,
    SCENARIO_FAMILY,
    SCENARIO_NAMES,
    build_scenario,
    chain_invisibility,
    chain_transparency,
    check_bearing,
    check_sequential_conditioning,
    check_staged_reduction,
    check_import,
    check_innocence,
    check_instrumented_innocence,
    check_invisibility,
    check_transparency,
)
from .bell import (
    AnalyzerConfig,
    CorrelationTable,
    CredibleSetSpec,
    OutcomeSequence,
    break_stats,
    exhaustive_break_bound_check,
    singlet_setup,
    pair_correlation,
    qq_empty,
    sample_pair,
    tail_log10,
    triangle_bound,
)
from .report import Report, RunConfig, canonical_json, emit_report, render_report
