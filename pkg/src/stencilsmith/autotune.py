"""Multi-objective tile-size search over the analytic cost model.

Objectives: maximize modeled GFLOP/s (from the window-plan traffic of each
candidate tile, single PE) and minimize on-chip tile footprint in bytes.
The two pull in opposite directions for halo kernels, small tiles re-read
proportionally more halo, large tiles need more buffer space, so the result
of a search is a Pareto front rather than a single winner.

Search strategies: exhaustive enumeration, uniform random sampling, and a
steepest-ascent hill climb over the candidate index grid. The heuristics
are deterministic given their seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from .errors import ConfigError, NoFeasiblePointError
from .grid import Dims3, random_unit_floats
from .kernels import KERNELS, interior_region
from .perfmodel import MachineModel, simulate_run, workload_from_plan
from .tiling import TileSpec, plan_windows, tile_footprint


@dataclass(frozen=True)
class SearchSpace:
    """Candidate tile extents for one kernel on one domain.

    bytes_per_elem is a cost-model parameter (4 = single precision, 2 =
    half); it scales both traffic and footprint. footprint_budget, when
    set, excludes any tile whose footprint exceeds it from the space.
    """

    kernel: str
    domain: Dims3
    tx_options: Tuple[int, ...]
    ty_options: Tuple[int, ...]
    tz_options: Tuple[int, ...]
    bytes_per_elem: int
    footprint_budget: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kernel not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.bytes_per_elem not in (2, 4):
            raise ConfigError(f"bytes_per_elem must be 2 or 4, got {self.bytes_per_elem}")
        for name, opts in (("tx", self.tx_options), ("ty", self.ty_options),
                           ("tz", self.tz_options)):
            if not opts:
                raise ConfigError(f"{name}_options is empty")
            if sorted(set(opts)) != sorted(opts):
                raise ConfigError(f"{name}_options has duplicates")
        if self.kernel == "vadvc" and tuple(self.tz_options) != (self.domain.nz,):
            # Column sweeps serialize the z axis, so z is never split.
            raise ConfigError("vadvc spaces must fix tz_options to (nz,)")
        # Budget 0 is allowed: it is a valid (merely infeasible) constraint
        # and surfaces as a no-feasible-point failure, not a config error.
        if self.footprint_budget is not None and self.footprint_budget < 0:
            raise ConfigError(f"footprint_budget must be >= 0, got {self.footprint_budget}")
        # Every candidate must be a legal tile for this kernel and domain.
        (i0, i1), (j0, j1), (k0, k1) = interior_region(self.kernel, self.domain)
        limits = (i1 - i0, j1 - j0, k1 - k0)
        for name, opts, lim in (("tx", self.tx_options, limits[0]),
                                ("ty", self.ty_options, limits[1]),
                                ("tz", self.tz_options, limits[2])):
            for v in opts:
                if not 1 <= v <= lim:
                    raise ConfigError(
                        f"{name} candidate {v} outside [1, {lim}] for "
                        f"{self.kernel} on {self.domain}"
                    )

    def tiles(self) -> Iterable[TileSpec]:
        """All candidate tiles in (tx, ty, tz) lexicographic order, budget
        filter applied."""
        for tx in sorted(self.tx_options):
            for ty in sorted(self.ty_options):
                for tz in sorted(self.tz_options):
                    t = TileSpec(tx, ty, tz)
                    if self._within_budget(t):
                        yield t

    def _within_budget(self, tile: TileSpec) -> bool:
        if self.footprint_budget is None:
            return True
        fp = tile_footprint(tile, self.kernel, self.bytes_per_elem)
        return fp <= self.footprint_budget


@dataclass(frozen=True)
class ParetoPoint:
    tile: TileSpec
    gflops_model: float
    footprint_bytes: int


@dataclass(frozen=True)
class SearchResult:
    """front: non-dominated points. points: every tile the search evaluated
    (deduplicated, (tx,ty,tz) order). evaluations: unique cost-model calls."""

    front: Tuple[ParetoPoint, ...]
    points: Tuple[ParetoPoint, ...]
    evaluations: int


def evaluate_tile(tile: TileSpec, space: SearchSpace, model: MachineModel) -> ParetoPoint:
    """Cost-model evaluation of one tile: modeled GFLOP/s of a single-PE
    run over the tile's window plan (halo overcount included in traffic)
    and the tile's buffer footprint."""
    plan = plan_windows(space.domain, tile, space.kernel)
    w = workload_from_plan(plan, space.bytes_per_elem)
    sim = simulate_run(w, 1, model)
    return ParetoPoint(
        tile=tile,
        gflops_model=sim.gflops,
        footprint_bytes=tile_footprint(tile, space.kernel, space.bytes_per_elem),
    )


def _dominates(a: ParetoPoint, b: ParetoPoint) -> bool:
    """a dominates b: throughput >= and footprint <=, at least one strict."""
    if a.gflops_model < b.gflops_model or a.footprint_bytes > b.footprint_bytes:
        return False
    return a.gflops_model > b.gflops_model or a.footprint_bytes < b.footprint_bytes


def _tile_key(p: ParetoPoint) -> Tuple[int, int, int]:
    return (p.tile.tx, p.tile.ty, p.tile.tz)


def pareto_front(points: Sequence[ParetoPoint]) -> List[ParetoPoint]:
    """Non-dominated subset, sorted by footprint ascending, footprint ties
    by (tx,ty,tz). Quadratic scan; spaces here are tens of points."""
    if not points:
        raise ConfigError("pareto_front of an empty point list")
    front = [
        p for p in points
        if not any(_dominates(q, p) for q in points)
    ]
    front.sort(key=lambda p: (p.footprint_bytes, _tile_key(p)))
    return front


def pick_operating_point(
    front: Sequence[ParetoPoint], budget: Optional[int] = None
) -> ParetoPoint:
    """Highest-throughput front point with footprint <= budget; throughput
    ties go to the smaller footprint. budget=None means unconstrained."""
    if not front:
        raise ConfigError("pick_operating_point on an empty front")
    feasible = [
        p for p in front
        if budget is None or p.footprint_bytes <= budget
    ]
    if not feasible:
        raise NoFeasiblePointError(
            f"no front point fits footprint budget {budget} bytes"
        )
    return max(feasible, key=lambda p: (p.gflops_model, -p.footprint_bytes))


def _axis_index(u: float, n: int) -> int:
    # u in [0, 1); clamp guards the (unreachable in practice) u == 1 case.
    return min(int(u * n), n - 1)


def search(
    space: SearchSpace,
    model: MachineModel,
    mode: str = "exhaustive",
    samples: int = 32,
    starts: int = 4,
    seed: int = 0,
) -> SearchResult:
    """Run one search strategy and extract the Pareto front of everything
    it evaluated.

    exhaustive: every in-budget tile; the front is exact for the space.
    random: `samples` uniform draws over the candidate grid (duplicates
    collapse via memoization), skipping out-of-budget draws.
    hillclimb: `starts` seeded starting tiles, steepest ascent on
    (throughput, -footprint) over single-axis neighbor steps in the
    candidate lists.

    Heuristic fronts cover only the evaluated subset but never contain a
    point that an exhaustive front point fails to dominate-or-equal.
    """
    all_tiles = list(space.tiles())
    if not all_tiles:
        raise NoFeasiblePointError(
            f"no candidate tile fits footprint budget {space.footprint_budget} bytes"
        )

    cache: Dict[Tuple[int, int, int], ParetoPoint] = {}

    def evaluate(tile: TileSpec) -> ParetoPoint:
        key = (tile.tx, tile.ty, tile.tz)
        if key not in cache:
            cache[key] = evaluate_tile(tile, space, model)
        return cache[key]

    if mode == "exhaustive":
        for t in all_tiles:
            evaluate(t)
    elif mode == "random":
        if samples < 1:
            raise ConfigError(f"samples must be >= 1, got {samples}")
        ox, oy, oz = (sorted(space.tx_options), sorted(space.ty_options),
                      sorted(space.tz_options))
        u = random_unit_floats(seed, 3 * samples)
        for s in range(samples):
            t = TileSpec(
                ox[_axis_index(u[3 * s], len(ox))],
                oy[_axis_index(u[3 * s + 1], len(oy))],
                oz[_axis_index(u[3 * s + 2], len(oz))],
            )
            if space._within_budget(t):
                evaluate(t)
        if not cache:
            # All draws landed out of budget; fall back to the cheapest
            # feasible tile so the result is never empty.
            evaluate(all_tiles[0])
    elif mode == "hillclimb":
        if starts < 1:
            raise ConfigError(f"starts must be >= 1, got {starts}")
        _hillclimb(space, starts, seed, evaluate, all_tiles)
    else:
        raise ConfigError(f"unknown search mode {mode!r}")

    points = sorted(cache.values(), key=_tile_key)
    return SearchResult(
        front=tuple(pareto_front(points)),
        points=tuple(points),
        evaluations=len(cache),
    )


def _hillclimb(space, starts, seed, evaluate, all_tiles) -> None:
    ox, oy, oz = (sorted(space.tx_options), sorted(space.ty_options),
                  sorted(space.tz_options))
    u = random_unit_floats(seed, 3 * starts)

    def better(a: ParetoPoint, b: ParetoPoint) -> bool:
        return (a.gflops_model, -a.footprint_bytes) > (b.gflops_model, -b.footprint_bytes)

    climbed_any = False
    for s in range(starts):
        idx = [
            _axis_index(u[3 * s], len(ox)),
            _axis_index(u[3 * s + 1], len(oy)),
            _axis_index(u[3 * s + 2], len(oz)),
        ]
        tile = TileSpec(ox[idx[0]], oy[idx[1]], oz[idx[2]])
        if not space._within_budget(tile):
            continue
        climbed_any = True
        cur = evaluate(tile)
        while True:
            best_step = None
            best_point = cur
            for ax, opts in enumerate((ox, oy, oz)):
                for d in (-1, 1):
                    ni = idx[ax] + d
                    if not 0 <= ni < len(opts):
                        continue
                    cand_idx = list(idx)
                    cand_idx[ax] = ni
                    cand = TileSpec(ox[cand_idx[0]], oy[cand_idx[1]], oz[cand_idx[2]])
                    if not space._within_budget(cand):
                        continue
                    p = evaluate(cand)
                    if better(p, best_point):
                        best_point = p
                        best_step = cand_idx
            if best_step is None:
                break
            idx = best_step
            cur = best_point
    if not climbed_any:
        evaluate(all_tiles[0])


def default_space(
    kernel: str,
    dims: Dims3,
    bytes_per_elem: int = 4,
    footprint_budget: Optional[int] = None,
) -> SearchSpace:
    """Power-of-two candidates up to each interior extent, plus the extent
    itself when it is not a power of two (the window planner handles the
    ragged remainder either way). vadvc fixes tz = nz."""
    (i0, i1), (j0, j1), (k0, k1) = interior_region(kernel, dims)

    def axis_options(extent: int) -> Tuple[int, ...]:
        opts = set()
        p = 1
        while p <= extent:
            opts.add(p)
            p *= 2
        opts.add(extent)
        return tuple(sorted(opts))

    tz_options = (dims.nz,) if kernel == "vadvc" else axis_options(k1 - k0)
    return SearchSpace(
        kernel=kernel,
        domain=dims,
        tx_options=axis_options(i1 - i0),
        ty_options=axis_options(j1 - j0),
        tz_options=tz_options,
        bytes_per_elem=bytes_per_elem,
        footprint_budget=footprint_budget,
    )


def demo_space(bytes_per_elem: int = 4) -> SearchSpace:
    """Fixed demonstration space whose budget-constrained best tile moves
    when the element size halves: hdiff on a 68x68x64 grid (64x64 interior),
    tx,ty in {8,16,32,64}, tz in {8,64}, 150 kB footprint budget. Evaluated
    on demo_machine(): at 4 B the pick is (32,32,8); at 2 B the extra
    headroom admits (64,64,8)."""
    return SearchSpace(
        kernel="hdiff",
        domain=Dims3(68, 68, 64),
        tx_options=(8, 16, 32, 64),
        ty_options=(8, 16, 32, 64),
        tz_options=(8, 64),
        bytes_per_elem=bytes_per_elem,
        footprint_budget=150_000,
    )


def demo_machine() -> MachineModel:
    """Channel-dominated single-channel machine for tuning demos: the PE
    rate is set far above what one 12.8 GB/s channel can feed, so modeled
    throughput is a pure function of plan traffic and halo overcount
    separates the tiles. A compute-bound machine would flatten most of the
    space onto one plateau and hide the trade-off."""
    return MachineModel(
        channel_bw=12.8,
        channels_total=1,
        channels_per_pe=1,
        shared_channel=False,
        host_link_bw_read=22.1,
        host_link_bw_write=22.0,
        pe_rate=10_000.0,
        invocation_overhead=0.0,
        power_base=5.0,
        power_per_channel=1.0,
        power_per_pe=0.5,
        cpu_baseline_gflops=58.5,
        cpu_active_power=97.9,
        host_staged=False,
    )


TUNER_CSV_HEADER = "kernel,tx,ty,tz,bytes_per_elem,footprint_bytes,gflops_model,on_front"


def write_tuner_csv(out: TextIO, space: SearchSpace, result: SearchResult) -> None:
    """One row per evaluated point in (tx,ty,tz) order; on_front is 1/0."""
    front_keys = {_tile_key(p) for p in result.front}
    out.write(TUNER_CSV_HEADER + "\n")
    for p in result.points:
        t = p.tile
        flag = 1 if _tile_key(p) in front_keys else 0
        out.write(
            f"{space.kernel},{t.tx},{t.ty},{t.tz},{space.bytes_per_elem},"
            f"{p.footprint_bytes},{p.gflops_model!r},{flag}\n"
        )
