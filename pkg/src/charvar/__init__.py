"""Numerical laboratory for representation varieties into SL(n, C):
moment-map flow, deformation retractions onto the compact-group locus,
and a component census for star-shaped right-angled Artin groups.
"""

from .census import (
    CaseLabel,
    CaseRow,
    ComponentReport,
    Group,
    RetractReport,
    RetractRow,
    classify_fiber,
    retract_census,
    run_census,
)
from .errors import (
    BadInput,
    CharvarError,
    InvalidParams,
    NoConvergence,
    NotElliptic,
    NotInHom0,
    NotNormal,
    ParseError,
    UnsupportedFamily,
)
from .kempfness import (
    FlowOptions,
    FlowStatus,
    FlowStep,
    FlowTrace,
    PolystabilityVerdict,
    kn_flow,
    normal_retract,
    polystable_probe,
)
from .matgroup import (
    ElementClass,
    KakFactors,
    classify_element,
    eig_decompose,
    frobenius,
    is_unitary,
    kak_decompose,
    kak_interpolate,
    sample_sl,
    sample_su,
    spectral_scale,
)
from .presentation import (
    Family,
    GraphSpec,
    GroupPresentation,
    Word,
    abelian_group,
    build_family,
    commutator,
    direct_with_finite,
    evaluate_word,
    free_group,
    free_product,
    free_reduce,
    generator,
    parse_presentation,
    presentation_to_text,
    raag,
    star_raag,
    torus_knot_group,
    word_to_text,
)
from .repvar import (
    Rep,
    ResidualReport,
    commutant_basis,
    conjugate,
    finite_subgroup,
    kn_residual,
    moment_map,
    norm_sq,
    relation_residual,
    residual_report,
    sample_hom,
    trace_coordinates,
)
from .retract import (
    HomotopyReport,
    SdrThresholds,
    move_to_hom0,
    star_homotopy,
    verify_sdr,
)
from .serialize import (
    dumps_json,
    matrix_from_list,
    matrix_to_list,
    read_json,
    rep_from_dict,
    rep_to_dict,
    write_invariants_csv,
    write_json,
    write_trace_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BadInput",
    "CaseLabel",
    "CaseRow",
    "CharvarError",
    "ComponentReport",
    "ElementClass",
    "Family",
    "FlowOptions",
    "FlowStatus",
    "FlowStep",
    "FlowTrace",
    "GraphSpec",
    "Group",
    "GroupPresentation",
    "HomotopyReport",
    "InvalidParams",
    "KakFactors",
    "NoConvergence",
    "NotElliptic",
    "NotInHom0",
    "NotNormal",
    "ParseError",
    "PolystabilityVerdict",
    "Rep",
    "ResidualReport",
    "RetractReport",
    "RetractRow",
    "SdrThresholds",
    "UnsupportedFamily",
    "Word",
    "abelian_group",
    "build_family",
    "classify_element",
    "classify_fiber",
    "commutant_basis",
    "commutator",
    "conjugate",
    "direct_with_finite",
    "dumps_json",
    "eig_decompose",
    "evaluate_word",
    "finite_subgroup",
    "free_group",
    "free_product",
    "free_reduce",
    "frobenius",
    "generator",
    "is_unitary",
    "kak_decompose",
    "kak_interpolate",
    "kn_flow",
    "kn_residual",
    "matrix_from_list",
    "matrix_to_list",
    "moment_map",
    "move_to_hom0",
    "norm_sq",
    "normal_retract",
    "parse_presentation",
    "polystable_probe",
    "presentation_to_text",
    "raag",
    "read_json",
    "relation_residual",
    "rep_from_dict",
    "rep_to_dict",
    "residual_report",
    "retract_census",
    "run_census",
    "sample_hom",
    "sample_sl",
    "sample_su",
    "spectral_scale",
    "star_homotopy",
    "star_raag",
    "torus_knot_group",
    "trace_coordinates",
    "verify_sdr",
    "word_to_text",
    "write_invariants_csv",
    "write_json",
    "write_trace_csv",
]
