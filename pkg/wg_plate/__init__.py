""" Adaptive weak Galerkin solver for singularly perturbed fourth order problems """
# pylint: disable=wrong-import-position

__version__ = "0.1.0"

from ._adaptivity import AdaptConfig, AdaptHistory, LevelRecord, adapt_loop, dorfler_mark
from ._assembly import (
    AssembledSystem,
    DofMap,
    EnergyProducts,
    assemble,
    energy_products,
    free_dof_count,
)
from ._basis import CellBasis, cell_dim, edge_basis_values, eval_cell_basis
from ._cases import (
    ManufacturedCase,
    case_names,
    example_1,
    example_2,
    example_3,
    example_4,
    get_case,
)
from ._errors import (
    ContractError,
    FactorizationError,
    GeometryError,
    MeshParseError,
    QuadratureError,
    WgPlateError,
)
from ._estimator import (
    CellFields,
    ErrorIndicators,
    TrueErrorReport,
    Weights,
    compute_weights,
    edge_jumps,
    element_residual,
    estimate,
    true_error,
)
from ._linsolve import SolveReport, solve_spd
from ._mesh import Cell, Edge, Mesh, Vertex, refine, refine_uniform, unit_square_mesh
from ._mesh_io import read_mesh, write_mesh
from ._quadrature import QuadRule, cell_quadrature, edge_quadrature
from ._weak_ops import (
    EdgeProjector,
    LocalOperators,
    Projector,
    WeakFunction,
    apply_weak_gradient,
    apply_weak_hessian,
    build_local_operators,
    embed_exact,
)
