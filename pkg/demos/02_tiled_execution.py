"""
Window planning and parallel tiled execution
============================================
"""

import numpy as np

from stencilsmith import (
    Dims3,
    Halo3,
    RandomInit,
    TileSpec,
    WindowPlan,
    compare,
    execute_tiled,
    hdiff_reference,
    make_grid,
    plan_windows,
    tile_footprint,
    validate_plan,
)

dims = Dims3(68, 68, 64)            # 64x64x64 interior once the ring is off
grid = make_grid(dims, Halo3(2, 2, 0), RandomInit(7))

# The planner covers the interior with halo-padded read windows.
for tile in (TileSpec(16, 64, 8), TileSpec(64, 2, 64), TileSpec(5, 7, 3)):
    plan = plan_windows(dims, tile, "hdiff")
    fp = tile_footprint(tile, "hdiff", 4)
    print(f"tile {tile}: {len(plan.tiles):5d} windows, "
          f"{fp:7d} B double-buffered footprint")

# However the interior is carved up, and however many threads execute
# the pieces, the result is bitwise identical to the single-shot kernel.
reference = hdiff_reference(grid)
for tile, workers in ((TileSpec(16, 64, 8), 1),
                      (TileSpec(16, 64, 8), 8),
                      (TileSpec(5, 7, 3), 2)):
    plan = plan_windows(dims, tile, "hdiff", workers)
    out = execute_tiled("hdiff", grid, plan, workers)
    r = compare(reference, out)
    print(f"tile {tile} workers {workers}: max_ulp_diff={r.max_ulp_diff}")
    assert r.max_ulp_diff == 0

# Drop a window from a plan and the checker names the first wrong cell.
plan = plan_windows(dims, TileSpec(16, 64, 8), "hdiff")
broken = WindowPlan(kernel=plan.kernel, dims=plan.dims, tile=plan.tile,
                    tiles=plan.tiles[:-1], workers=plan.workers)
check = validate_plan(broken, dims)
print("tampered plan:", check.violation, "at", check.coord)

hole = execute_tiled("hdiff", grid, broken)
r = compare(reference, hole)
print("first mismatch in the output:", r.first_mismatch_coord)
assert not check.ok and r.max_ulp_diff > 0
