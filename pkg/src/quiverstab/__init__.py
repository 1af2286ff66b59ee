"""Stability data and homotopy groups for moduli of quiver representations."""

from .dmin import (
    INFINITY,
    DminReport,
    HomDims,
    adhm_dmin_closed_form,
    d_min,
    euler_characteristic,
    hom_dims,
    polygon_dmin_table,
    strictly_short_level,
)
from .homotopy import (
    FGAbelianGroup,
    HomotopyReport,
    gauge_group_homotopy,
    homotopy_report,
    moduli_dimension,
    pg_homotopy,
    unitary_homotopy,
)
from .io import parse_quiver_file, parse_representation, serialize_quiver, serialize_representation
from .moment import (
    FlowResult,
    MomentValue,
    endomorphism_dimension,
    energy,
    energy_gradient,
    flow,
    moment_map,
)
from .quiver import (
    DimensionVector,
    EnumerationTooLarge,
    Quiver,
    QuiverError,
    QuiverSetup,
    Representation,
    StabilityParameter,
    gen_adhm,
    gen_polygon,
    group_profile,
    sub_dimension_vectors,
    validate_setup,
)
from .slope import (
    SlopeReport,
    degree_alpha,
    destabilizing_dimension_vectors,
    normalize_alpha,
    rank,
    slope_alpha,
)
from .subrep import (
    ProjectionTuple,
    StabilityVerdict,
    Verdict,
    find_subrepresentation,
    plant_instance,
    stability_verdict,
    subrep_residual,
)

__version__ = "0.1.0"
