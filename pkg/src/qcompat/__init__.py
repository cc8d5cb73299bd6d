"""Numerical toolkit for state compatibility, decomposition overlap
measures, and symmetry reconstruction from pure-state data."""

from .errors import (
    DimensionMismatchError,
    FileFormatError,
    IncompleteMapError,
    InfeasibleError,
    InvalidRankError,
    InvalidWeightsError,
    NotAnEffectError,
    NotASymmetryError,
    NotHermitianError,
    NotPSDError,
    NotUnitaryError,
    NotUnitVectorError,
    QCompatError,
    TraceNotOneError,
    ValidationError,
)
from .measure import (
    Decomposition,
    MeasureConfig,
    MeasureResult,
    example_measure,
    fidelity,
    is_compatible,
    measure_symmetric,
)
from .states import (
    DensityOperator,
    Effect,
    PureState,
    Subspace,
    SymmetryOp,
    as_effect,
    haar_unitary,
    kernel_overlap_sq,
    pure_state,
    random_density,
    random_pure,
    random_symmetry,
    range_membership,
    sqrt_psd,
    subspace,
    subspace_intersection_dim,
    support,
    symmetry_op,
    validate_density,
    validate_effect,
)
from .strength import (
    StrengthResult,
    effects_equal_by_strength,
    strength,
    strength_oracle,
    two_state_formula,
)
from .symmetry import (
    CharacterizationProbe,
    PureStateMap,
    VerificationResult,
    apply_symmetry,
    ic_set_member,
    independent,
    probe_pure_states,
    pure_characterization_probe,
    pure_state_map,
    rank_via_compatibility,
    symmetry_overlap,
    symmetry_probe_map,
    transform_pure,
    transition_prob,
    verify_theorem,
    wigner_reconstruct,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
