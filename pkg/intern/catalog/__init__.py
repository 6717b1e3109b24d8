from .examples import (
    CatalogError, ExampleBundle, ExampleDescriptor, CATALOG, ALL_SUITES, PASS, FAIL,
    DEFAULT_N, DEFAULT_WEIGHTS, DEFAULT_LAMBDA,
    example_names, build_example, make_example1, make_example2, make_example3, make_sphere,
    example2_chart, example2_slice, non_transverse_slice, sphere_chart,
)
