"""Tiled 3D stencil kernels with bitwise-reproducible execution and an
analytic accelerator performance model.

Three kernels from a weather-model dynamical core: horizontal diffusion
(hdiff), vertical advection with a per-column tridiagonal sweep (vadvc),
and a bandwidth-probe copy. Tiled runs are bitwise identical to the
reference kernels for any legal tile shape and worker count. The perfmodel
and autotune modules explore how such kernels behave on a
memory-channel-fed accelerator without needing the hardware.
"""

from .autotune import (
    ParetoPoint,
    SearchResult,
    SearchSpace,
    default_space,
    demo_machine,
    demo_space,
    evaluate_tile,
    pareto_front,
    pick_operating_point,
    search,
    write_tuner_csv,
)
from .errors import (
    CapacityError,
    ConfigError,
    ExecutionError,
    FormatError,
    IndexingError,
    KernelInputError,
    ModelError,
    NoFeasiblePointError,
    PlanError,
    SingularSystemError,
    StencilsmithError,
)
from .grid import (
    CompareResult,
    ConstantInit,
    Dims3,
    Grid3D,
    Halo3,
    ImpulseInit,
    LinearInit,
    RandomInit,
    compare,
    index,
    make_grid,
    random_unit_floats,
    read_grid,
    splitmix64,
    write_grid,
)
from .kernels import (
    KERNEL_HALO,
    KERNELS,
    FieldSet,
    FlopCount,
    HdiffParams,
    assemble_column_system,
    copy_reference,
    count_flops,
    hdiff_reference,
    interior_region,
    laplacian,
    synthetic_fieldset,
    thomas_solve,
    vadvc_reference,
)
from .perfmodel import (
    EnergyReport,
    KernelCalibration,
    MachineModel,
    Preset,
    ScalingPoint,
    SimResult,
    Workload,
    arithmetic_intensity,
    effective_pe_bandwidth,
    energy_report,
    paper_presets,
    power_draw,
    roofline_attainable,
    scaling_curve,
    simulate_run,
    whole_domain_workload,
    workload_from_plan,
    write_energy_csv,
    write_scaling_csv,
)
from .tiling import (
    KERNEL_FIELDS,
    PlanCheck,
    Tile,
    TileSpec,
    WindowPlan,
    execute_tiled,
    plan_windows,
    tile_footprint,
    validate_plan,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CompareResult",
    "ConfigError",
    "ConstantInit",
    "Dims3",
    "EnergyReport",
    "ExecutionError",
    "FieldSet",
    "FlopCount",
    "FormatError",
    "Grid3D",
    "Halo3",
    "HdiffParams",
    "ImpulseInit",
    "IndexingError",
    "KERNELS",
    "KERNEL_FIELDS",
    "KERNEL_HALO",
    "KernelCalibration",
    "KernelInputError",
    "LinearInit",
    "MachineModel",
    "ModelError",
    "NoFeasiblePointError",
    "ParetoPoint",
    "Preset",
    "PlanCheck",
    "PlanError",
    "RandomInit",
    "ScalingPoint",
    "SearchResult",
    "SearchSpace",
    "SimResult",
    "SingularSystemError",
    "StencilsmithError",
    "Tile",
    "TileSpec",
    "WindowPlan",
    "Workload",
    "arithmetic_intensity",
    "assemble_column_system",
    "compare",
    "copy_reference",
    "count_flops",
    "default_space",
    "demo_machine",
    "demo_space",
    "effective_pe_bandwidth",
    "energy_report",
    "evaluate_tile",
    "execute_tiled",
    "hdiff_reference",
    "index",
    "interior_region",
    "laplacian",
    "make_grid",
    "paper_presets",
    "pareto_front",
    "pick_operating_point",
    "plan_windows",
    "power_draw",
    "random_unit_floats",
    "read_grid",
    "roofline_attainable",
    "scaling_curve",
    "search",
    "simulate_run",
    "splitmix64",
    "synthetic_fieldset",
    "thomas_solve",
    "tile_footprint",
    "vadvc_reference",
    "validate_plan",
    "whole_domain_workload",
    "workload_from_plan",
    "write_energy_csv",
    "write_grid",
    "write_scaling_csv",
    "write_tuner_csv",
]
