"""Grid laboratory for multilinear fractional maximal and integral operators.

Evaluates the operator family (plain, fractional, Orlicz-average, dyadic,
truncated, measure-weighted maximal operators and the multilinear fractional
integral) on discretized boxes, computes the weight-class constants their
mapping properties hinge on, and mechanically verifies the corresponding
inequalities: exactly where the discrete analogue is provable, and through
refinement-stable empirical constants where only an existential constant is
known.
"""

from .lattice import (
    ALL,
    DYADIC,
    Cube,
    CubeFamily,
    CZDecomposition,
    Grid,
    GridFunction,
    average,
    cubes_containing,
    czd_decompose,
    integrate,
    iter_cubes,
    load_grid_function,
    save_grid_function,
    translate,
    truncated,
)
from .norms import L1, Lr, Orlicz, WeightedMeasure, lp_norm, weak_norm, x_average
from .operators import (
    FunctionVector,
    MaximalSpec,
    fractional_integral,
    fractional_maximal,
    hardy_littlewood,
    m_delta,
    maximal,
    orlicz_maximal,
    spec_for,
    truncated_relation_data,
)
from .orlicz import (
    PhiFunction,
    YoungFunction,
    check_Br,
    check_condi1,
    complementary,
    generalized_holder_check,
    holder_pair_slack,
    luxemburg_average,
    make_psi,
    parse_young_label,
    young_llogl,
    young_power,
)
from .weights import (
    ExponentSystem,
    WeightVector,
    ap_constant,
    apq_constant,
    build_weight,
    exponents,
    multilinear_ap_constant,
    random_field,
    rh_constant,
)

__version__ = "0.1.0"
