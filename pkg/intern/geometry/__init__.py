from .chart import Chart, GeometryError, DimensionMismatchError, DegreeError, DomainError
from .fields import (
    Map, VectorField, EndomorphismField, KForm,
    bracket_jets, lie_bracket, bracket_field, wedge, interior_product, pullback,
    lie_derivative, exterior_derivative, exterior_form, weighted_d, weighted_ext_derivative,
    exact_form,
)
from .calculus import (
    FD_STEP, max_abs, relative, coordinate_frame, jacobi_residual, cartan_residual,
    d_squared_residual, central_difference, fd_form_residual, fd_hessian_residual,
    random_expressions, random_vector_fields, random_one_form,
)
