"""Sarrus-linkage deployable polyhedral mechanisms: construction, mobility, kinematics."""
from .builder import (
    BuildError,
    Configuration,
    InterferenceError,
    MechanismGraph,
    NotConstructibleError,
    PlatformFrame,
    PolyhedronKind,
    Table1Row,
    build_mechanism,
    gamma_max,
    independent_loops,
    known_discrepancies,
    platform_frames,
    table1_row,
    table1_rows,
)
from .kinematics import (
    ConfigurationMesh,
    circumsphere_radius,
    configuration_geometry,
    insphere_radius,
    volume,
)
from .mobility import (
    AnalysisReport,
    MobilityError,
    assemble_constraint_matrix,
    compute_mobility,
    integrate_motion,
    sweep_rank,
    synchronization_check,
)
from .sarrus import (
    SarrusParams,
    constraint_multiset,
    equivalent_motion_screw,
    limb1_screws,
    limb2_screws,
    limb_constraint_system,
    platform_separation,
)
from .screw import (
    RigidTransform,
    ScrewError,
    adjoint,
    nullspace_basis,
    numerical_rank,
    reciprocal_product,
)

__version__ = "0.1.0"

_MODULES = {"builder", "frame_tables", "kinematics", "mobility", "polyhedra", "sarrus", "screw"}
__all__ = sorted(n for n in dir() if not n.startswith("_") and n not in _MODULES)
