from .cone import (
    ConeError, DegenerateLeastSquaresError, CONE_INTERVAL,
    ConeSpace,
    cone_complex_structure, cone_two_form, cone_metric, metric_matrix, cone_horizontal_lift,
    nijenhuis, nijenhuis_matrix, nijenhuis_closed_form, nijenhuis_mixed, faraday_anti_invariant,
    j_squared_residual, omega_invariance_residual, jpotential_residual, jpotential_check,
    metric_decomposition_residuals, metric_symmetry_residual, min_metric_eigenvalue,
)
from .lck import (
    LckCertificate, LckForms, lck_check, lee_form, kappa_form, kappa_jet,
    factorization_residual, domega_identity_residual, kappa_t_residual, three_form_residual,
)
