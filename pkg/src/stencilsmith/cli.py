"""Command-line front end.

Subcommands:
  verify  tiled-vs-reference bitwise check (plus the tridiagonal-oracle
          residual for vadvc); exit 1 on any mismatch
  bench   host-side wall-time benchmark, median of >= 5 reps, CSV row
  model   analytic scaling + energy CSVs over a PE range for a preset
  tune    tile-size search, tuner CSV, picked operating point on stderr
  run     one tiled execution, output grid written as a container file

Configuration comes from flags and an optional key=value file (--config);
flags win over file values. Exit codes: 0 success, 1 verification or
feasibility failure, 2 configuration error. The STENCILSMITH_THREADS
environment variable caps --workers for every subcommand.
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .autotune import default_space, pick_operating_point, search, write_tuner_csv
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
from .grid import Dims3, Grid3D, Halo3, RandomInit, compare, make_grid, write_grid
from .kernels import (
    KERNELS,
    FieldSet,
    HdiffParams,
    assemble_column_system,
    copy_reference,
    count_flops,
    hdiff_reference,
    interior_region,
    synthetic_fieldset,
    thomas_solve,
    vadvc_reference,
)
from .perfmodel import (
    energy_report,
    paper_presets,
    scaling_curve,
    whole_domain_workload,
    write_energy_csv,
    write_scaling_csv,
)
from .tiling import TileSpec, WindowPlan, execute_tiled, plan_windows

# Residual thresholds for the vadvc sweep-vs-tridiagonal-solve check.
VADVC_RESIDUAL_TOL = {"f64": 1e-12, "f32": 1e-6}

_INT_KEYS = {
    "workers", "seed", "reps", "max_pes", "budget", "bytes_per_elem",
    "samples", "starts",
}
_STR_KEYS = {"kernel", "dims", "tile", "precision", "preset", "out", "mode"}
_ALL_KEYS = _INT_KEYS | _STR_KEYS

_DEFAULTS = {
    "workers": 1,
    "precision": "f64",
    "seed": 0,
    "reps": 5,
    "bytes_per_elem": 4,
    "mode": "exhaustive",
    "samples": 32,
    "starts": 4,
}


def _parse_triple(text: str, what: str) -> Tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise ConfigError(f"{what} must look like NXxNYxNZ, got {text!r}")
    try:
        a, b, c = (int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{what} must be three integers, got {text!r}") from None
    return a, b, c


def _load_config_file(path: str) -> Dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"config key {key} needs an integer, got {value!r}") from None
    return value


class _Cfg:
    """Merged view of flags, config file, and defaults (flags win)."""

    def __init__(self, args: argparse.Namespace):
        self._flags = vars(args)
        cfg_path = self._flags.get("config")
        self._file = _load_config_file(cfg_path) if cfg_path else {}

    def get(self, key: str, required: bool = False):
        v = self._flags.get(key)
        if v is None and key in self._file:
            v = _coerce(key, self._file[key])
        if v is None:
            v = _DEFAULTS.get(key)
        if v is None and required:
            raise ConfigError(f"missing required option --{key.replace('_', '-')}")
        return v

    def kernel(self) -> str:
        k = self.get("kernel", required=True)
        if k not in KERNELS:
            raise ConfigError(f"unknown kernel {k!r}; choose from {', '.join(KERNELS)}")
        return k

    def precision(self) -> str:
        p = self.get("precision")
        if p not in ("f32", "f64"):
            raise ConfigError(f"precision must be f32 or f64, got {p!r}")
        return p

    def dims(self, default: Optional[str] = None) -> Dims3:
        text = self.get("dims")
        if text is None:
            if default is None:
                raise ConfigError("missing required option --dims")
            text = default
        return Dims3(*_parse_triple(str(text), "--dims"))

    def tile(self) -> TileSpec:
        text = self.get("tile", required=True)
        return TileSpec(*_parse_triple(str(text), "--tile"))

    def workers(self) -> int:
        w = int(self.get("workers"))
        if w < 1:
            raise ConfigError(f"workers must be >= 1, got {w}")
        env = os.environ.get("STENCILSMITH_THREADS")
        if env is not None:
            try:
                cap = int(env)
            except ValueError:
                raise ConfigError(
                    f"STENCILSMITH_THREADS must be an integer, got {env!r}"
                ) from None
            if cap < 1:
                raise ConfigError(f"STENCILSMITH_THREADS must be >= 1, got {cap}")
            w = min(w, cap)
        return w

    def preset(self, default: Optional[str] = None):
        name = self.get("preset") or default
        if name is None:
            raise ConfigError("missing required option --preset")
        presets = paper_presets()
        if name not in presets:
            raise ConfigError(
                f"unknown preset {name!r}; choose from {', '.join(sorted(presets))}"
            )
        return presets[name]


def _build_inputs(kernel: str, dims: Dims3, precision: str, seed: int):
    if kernel == "vadvc":
        return synthetic_fieldset(dims, Halo3(2, 2, 0), precision, seed)
    halo = Halo3(2, 2, 0) if kernel == "hdiff" else Halo3(0, 0, 0)
    grid = make_grid(dims, halo, RandomInit(seed), precision)
    return (grid, HdiffParams()) if kernel == "hdiff" else grid


def _reference(kernel: str, inputs) -> Grid3D:
    if kernel == "vadvc":
        return vadvc_reference(inputs)
    if kernel == "hdiff":
        return hdiff_reference(inputs[0], inputs[1])
    return copy_reference(inputs)


def neumaier_sum(values: np.ndarray) -> float:
    """Compensated f64 sum; used for bench checksums."""
    total = 0.0
    comp = 0.0
    for v in np.asarray(values, dtype=np.float64).ravel():
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _vadvc_oracle_residual(fields: FieldSet, ref: Grid3D, max_cols: int = 128) -> float:
    """Worst residual between the sweep output and an explicit
    assemble-then-thomas_solve reconstruction, over a deterministic column
    sample. Each column is normalized by its own output scale; pointwise
    relative error is meaningless where the solution passes through zero."""
    dims = fields.wcon.dims
    (i0, i1), (j0, j1), _ = interior_region("vadvc", dims)
    cols = [(i, j) for j in range(j0, j1) for i in range(i0, i1)]
    stride = max(1, len(cols) // max_cols)
    ref3 = ref.view3d()
    up3 = fields.upos.view3d()
    dt = fields.wcon.dtype.type
    d_stage = dt(fields.dtr_stage)
    worst = 0.0
    for i, j in cols[::stride]:
        a, b, c, rhs = assemble_column_system(fields, i, j)
        x = thomas_solve(a, b, c, rhs)
        predicted = (d_stage * (x - up3[:, j, i])).astype(np.float64)
        got = ref3[:, j, i].astype(np.float64)
        scale = max(float(np.max(np.abs(predicted))), 1e-30)
        worst = max(worst, float(np.max(np.abs(got - predicted))) / scale)
    return worst


def _open_out(path: Optional[str]):
    """Returns (stream, closer). '\\n' endings regardless of platform."""
    if path is None:
        return sys.stdout, lambda: None
    f = open(path, "w", encoding="utf-8", newline="\n")
    return f, f.close


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _Cfg(args)
    kernel = cfg.kernel()
    dims = cfg.dims()
    tile = cfg.tile()
    workers = cfg.workers()
    precision = cfg.precision()
    seed = int(cfg.get("seed"))

    inputs = _build_inputs(kernel, dims, precision, seed)
    ref = _reference(kernel, inputs)
    plan = plan_windows(dims, tile, kernel, workers)
    if args.corrupt_plan:
        # Test hook: drop the last tile so the tiled run leaves a hole.
        plan = WindowPlan(
            kernel=plan.kernel, dims=plan.dims, tile=plan.tile,
            tiles=plan.tiles[:-1], workers=plan.workers,
        )
    tiled = execute_tiled(kernel, inputs, plan, workers)
    result = compare(ref, tiled, region="all")

    print(
        f"kernel={kernel} dims={dims} tile={tile} workers={workers} "
        f"precision={precision} tiles={len(plan.tiles)} "
        f"max_ulp_diff={result.max_ulp_diff}"
    )
    ok = result.max_ulp_diff == 0
    if not ok:
        print(
            f"FAIL first mismatch at (i,j,k)={result.first_mismatch_coord} "
            f"max_abs_diff={result.max_abs_diff!r}",
            file=sys.stderr,
        )

    if kernel == "vadvc":
        residual = _vadvc_oracle_residual(inputs, ref)
        tol = VADVC_RESIDUAL_TOL[precision]
        print(f"max_rel_residual={residual!r} (tol {tol!r})")
        if not residual <= tol:
            print("FAIL tridiagonal oracle residual above tolerance", file=sys.stderr)
            ok = False

    return 0 if ok else 1


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _Cfg(args)
    kernel = cfg.kernel()
    dims = cfg.dims()
    tile = cfg.tile()
    workers = cfg.workers()
    precision = cfg.precision()
    seed = int(cfg.get("seed"))
    reps = int(cfg.get("reps"))
    if reps < 5:
        raise ConfigError(f"bench needs at least 5 repetitions, got {reps}")

    inputs = _build_inputs(kernel, dims, precision, seed)
    plan = plan_windows(dims, tile, kernel, workers)

    execute_tiled(kernel, inputs, plan, workers)  # warm-up
    times: List[float] = []
    out_grid: Optional[Grid3D] = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out_grid = execute_tiled(kernel, inputs, plan, workers)
        times.append(time.perf_counter() - t0)
    median_s = statistics.median(times)

    flops = count_flops(kernel, dims).total
    gflops = flops / median_s / 1e9 if median_s > 0 else 0.0
    (i0, i1), (j0, j1), (k0, k1) = interior_region(kernel, dims)
    checksum = neumaier_sum(out_grid.view3d()[k0:k1, j0:j1, i0:i1])

    stream, close = _open_out(cfg.get("out"))
    try:
        stream.write("kernel,nx,ny,nz,tile,workers,precision,time_s,gflops,checksum\n")
        stream.write(
            f"{kernel},{dims.nx},{dims.ny},{dims.nz},{tile},{workers},"
            f"{precision},{median_s!r},{gflops!r},{checksum!r}\n"
        )
    finally:
        close()
    return 0


def cmd_model(args: argparse.Namespace) -> int:
    cfg = _Cfg(args)
    kernel = cfg.kernel()
    preset = cfg.preset()
    dims = cfg.dims(default="256x256x64")
    bpe = int(cfg.get("bytes_per_elem"))
    if bpe < 1:
        raise ConfigError(f"bytes_per_elem must be >= 1, got {bpe}")
    max_pes = cfg.get("max_pes")
    max_pes = preset.max_pes(kernel) if max_pes is None else int(max_pes)
    if max_pes < 1:
        raise ConfigError(f"max_pes must be >= 1, got {max_pes}")

    machine = preset.machine_for(kernel)
    workload = whole_domain_workload(kernel, dims, bpe)
    points = scaling_curve(workload, machine, range(1, max_pes + 1))
    energy_rows = [
        (p.n_pe, p.result, energy_report(machine, p.n_pe, p.result))
        for p in points
        if p.result is not None
    ]

    out_path = cfg.get("out")
    if out_path is None:
        write_scaling_csv(sys.stdout, kernel, preset.name, points)
        sys.stdout.write("\n")
        write_energy_csv(sys.stdout, kernel, preset.name, energy_rows)
    else:
        energy_path = (
            out_path[: -len(".csv")] + ".energy.csv"
            if out_path.endswith(".csv")
            else out_path + ".energy.csv"
        )
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            write_scaling_csv(f, kernel, preset.name, points)
        with open(energy_path, "w", encoding="utf-8", newline="\n") as f:
            write_energy_csv(f, kernel, preset.name, energy_rows)
        print(f"wrote {out_path} and {energy_path}", file=sys.stderr)
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    cfg = _Cfg(args)
    kernel = cfg.kernel()
    dims = cfg.dims(default="68x68x64")
    bpe = int(cfg.get("bytes_per_elem"))
    if bpe not in (2, 4):
        raise ConfigError(f"bytes_per_elem must be 2 or 4 for tuning, got {bpe}")
    budget = cfg.get("budget")
    budget = None if budget is None else int(budget)
    mode = str(cfg.get("mode"))
    seed = int(cfg.get("seed"))
    preset = cfg.preset(default="hbm_ocapi")

    space = default_space(kernel, dims, bpe, budget)
    machine = preset.machine_for(kernel)
    result = search(
        space, machine, mode=mode,
        samples=int(cfg.get("samples")), starts=int(cfg.get("starts")), seed=seed,
    )

    stream, close = _open_out(cfg.get("out"))
    try:
        write_tuner_csv(stream, space, result)
    finally:
        close()

    picked = pick_operating_point(result.front, budget)
    print(
        f"picked tile={picked.tile} footprint_bytes={picked.footprint_bytes} "
        f"gflops_model={picked.gflops_model!r} "
        f"(mode={mode} evaluations={result.evaluations} budget={budget})",
        file=sys.stderr,
    )
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _Cfg(args)
    kernel = cfg.kernel()
    dims = cfg.dims()
    tile = cfg.tile()
    workers = cfg.workers()
    precision = cfg.precision()
    seed = int(cfg.get("seed"))
    out_path = cfg.get("out", required=True)

    inputs = _build_inputs(kernel, dims, precision, seed)
    plan = plan_windows(dims, tile, kernel, workers)
    out_grid = execute_tiled(kernel, inputs, plan, workers)
    with open(out_path, "wb") as f:
        n = write_grid(out_grid, f)
    print(f"wrote {out_path} ({n} bytes, {kernel} {dims} {precision})")
    return 0


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, *, tile: bool) -> None:
    p.add_argument("--kernel", choices=KERNELS, default=None)
    p.add_argument("--dims", default=None, metavar="NXxNYxNZ")
    if tile:
        p.add_argument("--tile", default=None, metavar="TXxTYxTZ")
        p.add_argument("--workers", type=int, default=None, metavar="N")
        p.add_argument("--precision", choices=("f32", "f64"), default=None)
    p.add_argument("--seed", type=int, default=None, metavar="S")
    p.add_argument("--config", default=None, metavar="PATH")
    p.add_argument("--out", default=None, metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stencilsmith",
        description="Tiled stencil kernels with an analytic accelerator model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="bitwise tiled-vs-reference check")
    _add_common(p, tile=True)
    p.add_argument("--corrupt-plan", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="host benchmark, median of >= 5 reps")
    _add_common(p, tile=True)
    p.add_argument("--reps", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("model", help="scaling and energy CSVs for a preset")
    _add_common(p, tile=False)
    p.add_argument("--preset", default=None, metavar="NAME")
    p.add_argument("--max-pes", dest="max_pes", type=int, default=None, metavar="N")
    p.add_argument("--bytes-per-elem", dest="bytes_per_elem", type=int, default=None)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("tune", help="tile-size search over the cost model")
    _add_common(p, tile=False)
    p.add_argument("--preset", default=None, metavar="NAME")
    p.add_argument("--bytes-per-elem", dest="bytes_per_elem", type=int, default=None)
    p.add_argument("--budget", type=int, default=None, metavar="BYTES")
    p.add_argument("--mode", choices=("exhaustive", "random", "hillclimb"), default=None)
    p.add_argument("--samples", type=int, default=None, metavar="N")
    p.add_argument("--starts", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("run", help="single tiled execution, grid file output")
    _add_common(p, tile=True)
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help; normalize
        # anything else to the config-error code.
        return exc.code if exc.code in (0, 1, 2) else 2
    try:
        return args.func(args)
    except (NoFeasiblePointError, SingularSystemError, ExecutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        ConfigError, FormatError, IndexingError, KernelInputError,
        ModelError, CapacityError, PlanError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StencilsmithError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # malformed input must never escape as a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
