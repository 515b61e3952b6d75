"""Branched self-coverings of the marked 2-sphere: obstructions,
decomposition, extension, and desk-scale realizability verdicts."""

from .curves import (
    Multicurve,
    PreimageComponent,
    PullbackTable,
    TRIVIAL,
    compose_table,
    curve,
    is_full,
    is_stable,
    peripheral,
    pullback_classes,
    validate_table,
)
from .decomposition import (
    DecompositionResult,
    Piece,
    PieceMap,
    StandardFormSpec,
    carrier_piece,
    classify_component,
    decomposition_report,
    piece_map,
    validate_standard_form,
)
from .extension import (
    ExtendedCovering,
    PeriodicPieceData,
    Verdict,
    classify_extended,
    extend,
    induced_pullback,
    realizability_report,
    validate_extension,
)
from .linalg import (
    LengthTrace,
    SpectralCertificate,
    ThurstonMatrix,
    is_irreducible,
    is_obstruction,
    length_decay_diagnostic,
    search_obstructions,
    spectral_radius,
    thurston_matrix,
)
from .model import (
    AccumulationCycle,
    CoveringSpec,
    INF,
    MarkedPoint,
    OrbifoldSignature,
    ShieldedStructure,
    classify_type,
    compute_signature,
    euler_characteristic,
    orbifold_type,
    postcritical_set,
    validate_spec,
)

__version__ = "0.1.0"
