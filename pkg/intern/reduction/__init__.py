from .action import (
    ReductionError, NotInZeroSetError, DegenerateOrbitError, NonConstantFactorError,
    S_TOL, DiscreteGenerator, GroupActionSpec, Tangency, HDecomposition, RhoHomomorphism,
    moment_map, in_zero_set, require_in_zero_set, tangent_to_S, h_decomposition, e_projector_jet,
    action_checks, rho, rho_factor, discrete_invariance_residual,
    cone_moment_map, cone_moment_residual, holomorphic_action_residual, lifted_generator_jet,
)
from .slice import (
    SliceError, SliceChart,
    transversality, pushdown, pushdown_matrix_jet, validate_slice,
    reduce, reduced_endo_jet, reeb_projects, reeb_projection_residual, lift_independence_residual,
)
from .holonomy import LoopError, NotClosedError, Loop, Holonomy, exactness_check, closedness_residual
from .commutativity import Commutativity, cone_commutativity
