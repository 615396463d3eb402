"""Numerical toolkit for slit Loewner evolution in the upper half plane.

Covers polyline slit geometry, conformal welding (slit to driving
function and back), half-plane capacity by closed form, zipper, and
Monte Carlo, the radial logarithmic mapping radius, and the experiment
drivers behind the quantitative claims the test suite pins down.
"""

__version__ = "0.1.0"

from .geom import (
    DISK,
    HALF_PLANE,
    Hull,
    PolylineSlit,
    exp_transform,
    log_transform,
    read_polyline,
    reflect,
    reflect_slit,
    refine,
    scale,
    translate,
    write_polyline,
)
from .chordal import (
    ComposedMap,
    DrivingPath,
    ElementaryMap,
    map_hull_forward,
    multi_solve_forward,
    path_steps,
    read_driving_csv,
    solve_forward,
    trace,
    truncate_by_capacity,
    truncate_from_weld,
    weld,
    write_driving_csv,
)
from .capacity import (
    CapacityEstimate,
    SegmentSpec,
    hcap_mc,
    hcap_union_two_slits,
    hcap_zipper,
    pushforward_capacity_ratio,
    segment_capacity,
    segment_length,
    tip_modulus,
)
from .radial import (
    LmrValue,
    RadialDrivingPath,
    bridge_check,
    lmr_of_boundary_slit,
    radial_solve_forward,
    write_bridge_csv,
)
from .experiments import (
    CapacityTable,
    SweepResult,
    alpha_mu_lambda_check,
    branch_sweep,
    build_selfsimilar_slit,
    counterexample_capacity_table,
    disjoint_sum_check,
    joint_parametrization,
    kinked_reparam_demo,
)

__all__ = [
    "__version__",
    "DISK",
    "HALF_PLANE",
    "Hull",
    "PolylineSlit",
    "exp_transform",
    "log_transform",
    "read_polyline",
    "reflect",
    "reflect_slit",
    "refine",
    "scale",
    "translate",
    "write_polyline",
    "ComposedMap",
    "DrivingPath",
    "ElementaryMap",
    "map_hull_forward",
    "multi_solve_forward",
    "path_steps",
    "read_driving_csv",
    "solve_forward",
    "trace",
    "truncate_by_capacity",
    "truncate_from_weld",
    "weld",
    "write_driving_csv",
    "CapacityEstimate",
    "SegmentSpec",
    "hcap_mc",
    "hcap_union_two_slits",
    "hcap_zipper",
    "pushforward_capacity_ratio",
    "segment_capacity",
    "segment_length",
    "tip_modulus",
    "LmrValue",
    "RadialDrivingPath",
    "bridge_check",
    "lmr_of_boundary_slit",
    "radial_solve_forward",
    "write_bridge_csv",
    "CapacityTable",
    "SweepResult",
    "alpha_mu_lambda_check",
    "branch_sweep",
    "build_selfsimilar_slit",
    "counterexample_capacity_table",
    "disjoint_sum_check",
    "joint_parametrization",
    "kinked_reparam_demo",
]
