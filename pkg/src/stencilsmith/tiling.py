"""Domain decomposition into 3D windows and tiled kernel execution.

A plan partitions the kernel's interior into tiles ordered lexicographically
by (k, j, i) of their origins. Tiles read halo directly from the shared
input grid (inputs are immutable), write disjoint output regions, and are
distributed to workers in static contiguous blocks, so the result is
bitwise identical to the reference kernel for any tile shape and worker
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigError, ExecutionError, PlanError, StencilsmithError
from .grid import Dims3, Grid3D
from .kernels import (
    KERNEL_HALO,
    KERNELS,
    PIVOT_TOL,
    FieldSet,
    HdiffParams,
    _copy_block,
    _hdiff_block,
    _require_finite,
    _vadvc_block,
    interior_region,
)

# Buffered fields per kernel for footprint accounting: hdiff holds in+out,
# vadvc holds 7 streamed fields + output + 2 column scratch, copy in+out.
KERNEL_FIELDS = {"hdiff": 2, "vadvc": 10, "copy": 2}

HdiffInputs = Union[Grid3D, Tuple[Grid3D, HdiffParams]]


@dataclass(frozen=True)
class TileSpec:
    """Tile extents in interior points per axis."""

    tx: int
    ty: int
    tz: int

    def __post_init__(self) -> None:
        if min(self.tx, self.ty, self.tz) < 1:
            raise ConfigError(f"tile extents must be >= 1, got {self}")

    def __str__(self) -> str:
        return f"{self.tx}x{self.ty}x{self.tz}"


@dataclass(frozen=True)
class Tile:
    """One window: interior origin/extent plus the halo actually available
    on each side (smaller than the kernel halo only at domain edges)."""

    origin: Tuple[int, int, int]  # (i, j, k)
    extent: Tuple[int, int, int]
    halo_lo: Tuple[int, int, int]
    halo_hi: Tuple[int, int, int]

    @property
    def interior_volume(self) -> int:
        ei, ej, ek = self.extent
        return ei * ej * ek

    @property
    def read_volume(self) -> int:
        vol = 1
        for ax in range(3):
            vol *= self.extent[ax] + self.halo_lo[ax] + self.halo_hi[ax]
        return vol

    def interior_slices(self) -> Tuple[slice, slice, slice]:
        (i0, j0, k0), (ei, ej, ek) = self.origin, self.extent
        return (slice(k0, k0 + ek), slice(j0, j0 + ej), slice(i0, i0 + ei))


@dataclass(frozen=True)
class WindowPlan:
    kernel: str
    dims: Dims3
    tile: TileSpec
    tiles: Tuple[Tile, ...]
    workers: int = 1


def _axis_segments(start: int, total: int, step: int) -> List[Tuple[int, int]]:
    """(origin, extent) pairs covering [start, start+total); ragged edges
    shrink rather than pad."""
    out = []
    pos = start
    end = start + total
    while pos < end:
        out.append((pos, min(step, end - pos)))
        pos += step
    return out


def plan_windows(
    dims: Dims3, tile: TileSpec, kernel: str, workers: int = 1
) -> WindowPlan:
    """Partition the kernel interior of ``dims`` into tiles.

    Tile extents are bounded by the kernel's interior extents (nx-4 and
    ny-4 for hdiff/vadvc, the full axis for copy); vadvc additionally
    requires tz = nz because its sweep couples the whole column.
    """
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    (i0, i1), (j0, j1), (k0, k1) = interior_region(kernel, dims)
    ext = (i1 - i0, j1 - j0, k1 - k0)
    if min(ext) < 1:
        raise PlanError(f"dims {dims} leave no interior for {kernel}")
    if kernel == "vadvc" and tile.tz != dims.nz:
        raise PlanError(
            f"vadvc tiles span whole columns: tz must equal nz={dims.nz}, got {tile.tz}"
        )
    for name, t, e in (("tx", tile.tx, ext[0]), ("ty", tile.ty, ext[1]), ("tz", tile.tz, ext[2])):
        if t > e:
            raise PlanError(f"{name}={t} exceeds {kernel} interior extent {e}")

    halo = KERNEL_HALO[kernel]
    n = (dims.nx, dims.ny, dims.nz)
    tiles = []
    for kk, ek in _axis_segments(k0, ext[2], tile.tz):
        for jj, ej in _axis_segments(j0, ext[1], tile.ty):
            for ii, ei in _axis_segments(i0, ext[0], tile.tx):
                origin = (ii, jj, kk)
                extent = (ei, ej, ek)
                lo = tuple(min(halo[ax], origin[ax]) for ax in range(3))
                hi = tuple(
                    min(halo[ax], n[ax] - (origin[ax] + extent[ax])) for ax in range(3)
                )
                tiles.append(Tile(origin, extent, lo, hi))
    return WindowPlan(kernel=kernel, dims=dims, tile=tile, tiles=tuple(tiles), workers=workers)


def tile_footprint(tile: TileSpec, kernel: str, bytes_per_elem: int) -> int:
    """On-chip buffer bytes for one tile: per-field window (interior plus
    the kernel halo on both sides) times the kernel's field count."""
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}")
    if bytes_per_elem < 1:
        raise ConfigError(f"bytes_per_elem must be >= 1, got {bytes_per_elem}")
    hi, hj, hk = KERNEL_HALO[kernel]
    window = (tile.tx + 2 * hi) * (tile.ty + 2 * hj) * (tile.tz + 2 * hk)
    return KERNEL_FIELDS[kernel] * window * bytes_per_elem


@dataclass(frozen=True)
class PlanCheck:
    ok: bool
    violation: Optional[str] = None  # containment | overlap | coverage
    tile_index: Optional[int] = None
    coord: Optional[Tuple[int, int, int]] = None

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return f"{self.violation} violation (tile {self.tile_index}, coord {self.coord})"


def validate_plan(plan: WindowPlan, dims: Dims3) -> PlanCheck:
    """Check the partition and containment invariants; reports the first
    violating tile rather than raising."""
    (i0, i1), (j0, j1), (k0, k1) = interior_region(plan.kernel, dims)
    shape = (k1 - k0, j1 - j0, i1 - i0)
    cover = np.zeros(shape, dtype=np.uint16)
    n = (dims.nx, dims.ny, dims.nz)
    for idx, t in enumerate(plan.tiles):
        for ax in range(3):
            read_lo = t.origin[ax] - t.halo_lo[ax]
            read_hi = t.origin[ax] + t.extent[ax] + t.halo_hi[ax]
            if read_lo < 0 or read_hi > n[ax] or t.extent[ax] < 1:
                return PlanCheck(False, "containment", idx, t.origin)
        ii, jj, kk = t.origin
        ei, ej, ek = t.extent
        if not (i0 <= ii and ii + ei <= i1 and j0 <= jj and jj + ej <= j1
                and k0 <= kk and kk + ek <= k1):
            return PlanCheck(False, "containment", idx, t.origin)
        cover[kk - k0:kk - k0 + ek, jj - j0:jj - j0 + ej, ii - i0:ii - i0 + ei] += 1

    flat = cover.reshape(-1)
    over = np.flatnonzero(flat > 1)
    if over.size:
        kk, jj, ii = np.unravel_index(int(over[0]), shape)
        coord = (int(ii) + i0, int(jj) + j0, int(kk) + k0)
        owner = _owning_tiles(plan, coord)
        return PlanCheck(False, "overlap", owner, coord)
    miss = np.flatnonzero(flat == 0)
    if miss.size:
        kk, jj, ii = np.unravel_index(int(miss[0]), shape)
        coord = (int(ii) + i0, int(jj) + j0, int(kk) + k0)
        return PlanCheck(False, "coverage", None, coord)
    return PlanCheck(True)


def _owning_tiles(plan: WindowPlan, coord: Tuple[int, int, int]) -> Optional[int]:
    for idx, t in enumerate(plan.tiles):
        if all(t.origin[ax] <= coord[ax] < t.origin[ax] + t.extent[ax] for ax in range(3)):
            return idx
    return None


def _chunk(seq: Sequence, parts: int) -> List[Sequence]:
    """Split into ``parts`` contiguous blocks with sizes differing by at
    most one (static block assignment, plan order)."""
    n = len(seq)
    parts = max(1, min(parts, n))
    base, extra = divmod(n, parts)
    out = []
    pos = 0
    for p in range(parts):
        size = base + (1 if p < extra else 0)
        out.append(seq[pos:pos + size])
        pos += size
    return out


def execute_tiled(
    kernel: str,
    inputs: Union[HdiffInputs, FieldSet],
    plan: WindowPlan,
    workers: Optional[int] = None,
) -> Grid3D:
    """Run ``kernel`` tile-by-tile per ``plan`` across a thread pool.

    Output is bitwise identical to the reference kernel for every legal
    plan and worker count. ``workers=None`` uses the plan's intended count.
    """
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}")
    if plan.kernel != kernel:
        raise PlanError(f"plan is for {plan.kernel!r}, not {kernel!r}")
    if workers is None:
        workers = plan.workers
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")

    if kernel == "vadvc":
        if not isinstance(inputs, FieldSet):
            raise PlanError("vadvc expects a FieldSet input")
        ref = inputs.wcon
        if ref.dims.nz < 3:
            raise PlanError(f"vadvc needs nz >= 3, got {ref.dims.nz}")
        for g, name in zip(inputs.grids, ("wcon", "ustage", "upos", "utens", "utensstage")):
            _require_finite(g, name)
        base = inputs.utensstage.data.copy()
    else:
        if isinstance(inputs, tuple):
            src, params = inputs
        else:
            src, params = inputs, HdiffParams()
        if not isinstance(src, Grid3D):
            raise PlanError(f"{kernel} expects a Grid3D input")
        ref = src
        if kernel == "hdiff" and not (src.halo.i == src.halo.j and src.halo.i >= 2):
            raise PlanError(f"hdiff needs halo.i = halo.j >= 2, got {src.halo}")
        _require_finite(src, "src")
        # copy starts from zeros: a covering plan overwrites every point,
        # so holes in a corrupted plan stay visible.
        base = src.data.copy() if kernel == "hdiff" else np.zeros_like(src.data)

    if plan.dims != ref.dims:
        raise PlanError(f"plan dims {plan.dims} != grid dims {ref.dims}")

    d = ref.dims
    # Guard against handcrafted plans whose blocks would slice outside the
    # kernel interior (negative numpy slice starts wrap silently).
    (bi0, bi1), (bj0, bj1), (bk0, bk1) = interior_region(kernel, d)
    for t in plan.tiles:
        (ti, tj, tk), (ei, ej, ek) = t.origin, t.extent
        if not (bi0 <= ti and ti + ei <= bi1 and bj0 <= tj and tj + ej <= bj1
                and bk0 <= tk and tk + ek <= bk1):
            raise PlanError(f"tile at {t.origin} extent {t.extent} outside {kernel} interior")

    out3 = base.reshape(d.nz, d.ny, d.nx)

    if kernel == "hdiff":
        v = src.view3d()
        c1 = src.dtype.type(params.c1)

        def run_tile(t: Tile) -> None:
            (i0, j0, k0), (ei, ej, ek) = t.origin, t.extent
            _hdiff_block(v, out3, c1, i0, i0 + ei, j0, j0 + ej, k0, k0 + ek)

    elif kernel == "copy":
        v = src.view3d()

        def run_tile(t: Tile) -> None:
            (i0, j0, k0), (ei, ej, ek) = t.origin, t.extent
            _copy_block(v, out3, i0, i0 + ei, j0, j0 + ej, k0, k0 + ek)

    else:
        w = inputs.wcon.view3d()
        us = inputs.ustage.view3d()
        up = inputs.upos.view3d()
        ut = inputs.utens.view3d()
        uts = inputs.utensstage.view3d()
        tol = PIVOT_TOL[ref.precision]

        def run_tile(t: Tile) -> None:
            (i0, j0, _), (ei, ej, _) = t.origin, t.extent
            _vadvc_block(
                w, us, up, ut, uts, out3,
                i0, i0 + ei, j0, j0 + ej,
                inputs.dtr_stage, inputs.bet_m, inputs.bet_p, tol,
            )

    def run_block(tiles: Sequence[Tile]) -> None:
        for t in tiles:
            run_tile(t)

    blocks = _chunk(plan.tiles, workers)
    if len(blocks) == 1:
        run_block(blocks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            futures = [pool.submit(run_block, b) for b in blocks]
            for f in futures:
                try:
                    f.result()
                except StencilsmithError:
                    raise
                except Exception as exc:  # pool plumbing failure
                    raise ExecutionError(f"tile worker failed: {exc!r}") from exc

    return Grid3D(dims=d, halo=ref.halo, precision=ref.precision, data=base)
