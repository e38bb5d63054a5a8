"""Magnetic fractional Gagliardo seminorms, the fractional magnetic
operator, and numerical verification of their nonlocal-to-local limits."""

__version__ = "0.1.0"

from .constants import (
    DimensionalConstants,
    bbm_constant,
    dimensional_constants,
    fractional_constant,
    fractional_constant_limit,
)
from .corpus import resolve_field, resolve_potential
from .errors import ConditionViolation, ConfigurationError, IntegrationError
from .fields import (
    GaugeFunction,
    ScalarField,
    VectorPotential,
    gauge_transform,
    midpoint_phase,
    modulus_field,
    scaled_field,
)
from .functionals import (
    FunctionalValue,
    MollifierFamily,
    RadialMollifier,
    bbm_family,
    check_mollifier,
    fullspace_seminorm_sq,
    gaussian_family,
    l2_norm_sq,
    local_magnetic_energy,
    magnetic_seminorm_sq,
    mollified_functional,
    translation_difference_sq,
    uniform_bound_check,
)
from .geometry import (
    Direction,
    Domain,
    TensorGrid,
    ball,
    boundary_distance,
    box,
    direction,
    interval,
    tensor_grid,
    unit_sphere_nodes,
)
from .harness import (
    SweepConfig,
    SweepReport,
    config_from_dict,
    default_spec,
    emit_report,
    extrapolate_limit,
    load_config,
    run_bbm_sweep,
    run_mollifier_sweep,
    run_sweep,
)
from .operator import (
    OperatorSample,
    fractional_magnetic_apply,
    local_magnetic_apply,
    operator_limit_scan,
    pv_correction_bound,
)
from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    double_integral_singular,
    near_field_correction,
    pairwise_sum,
    tail_integral,
)
