"""Analytic performance, scaling, roofline, and energy model.

Models an accelerator whose processing elements (PEs) are fed either by
dedicated memory channels (HBM-style pseudo-channels) or one shared channel
(a single DDR4 bank), behind an optional host link. Timing follows the
pipeline-max rule: transfer and compute stages overlap, so a run takes the
slowest stage plus a fixed invocation overhead. All bandwidths are decimal
GB/s (1e9 bytes per second).

The bundled presets describe a concrete measured system: an HBM2 FPGA card
attached to a POWER9 host over OpenCAPI or CAPI2, the same card's DDR4
sibling, and the host CPU itself. Every preset number carries its origin in
the description string.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from .errors import CapacityError, ConfigError, ModelError
from .grid import Dims3
from .kernels import count_flops, interior_region
from .tiling import TileSpec, WindowPlan, plan_windows

# Streamed input fields per kernel; vadvc PEs consume the full seven-array
# argument list, hdiff and copy read one field. One output field each.
READ_FIELDS = {"hdiff": 1, "vadvc": 7, "copy": 1}


@dataclass(frozen=True)
class MachineModel:
    """Rates, capacities, and power coefficients of one machine config.

    host_staged=True includes the host-link transfer as a pipeline stage;
    presets calibrated to sustained accelerator rates set it False (grids
    resident in accelerator memory).
    """

    channel_bw: float              # GB/s per memory channel
    channels_total: int
    channels_per_pe: int
    shared_channel: bool
    host_link_bw_read: float       # GB/s
    host_link_bw_write: float      # GB/s
    pe_rate: float                 # GFLOP/s per PE, compute-bound ceiling
    invocation_overhead: float     # seconds per kernel launch
    power_base: float              # W
    power_per_channel: float       # W per active channel
    power_per_pe: float            # W per PE
    cpu_baseline_gflops: float
    cpu_active_power: float        # W
    host_staged: bool = True

    def __post_init__(self) -> None:
        positive = (
            ("channel_bw", self.channel_bw),
            ("host_link_bw_read", self.host_link_bw_read),
            ("host_link_bw_write", self.host_link_bw_write),
            ("pe_rate", self.pe_rate),
            ("power_base", self.power_base),
            ("cpu_baseline_gflops", self.cpu_baseline_gflops),
            ("cpu_active_power", self.cpu_active_power),
        )
        for name, v in positive:
            if not v > 0:
                raise ConfigError(f"{name} must be > 0, got {v}")
        for name, v in (
            ("invocation_overhead", self.invocation_overhead),
            ("power_per_channel", self.power_per_channel),
            ("power_per_pe", self.power_per_pe),
        ):
            if v < 0:
                raise ConfigError(f"{name} must be >= 0, got {v}")
        if self.channels_per_pe < 1:
            raise ConfigError(f"channels_per_pe must be >= 1, got {self.channels_per_pe}")
        if self.channels_per_pe > self.channels_total:
            raise ConfigError(
                f"channels_per_pe {self.channels_per_pe} exceeds "
                f"channels_total {self.channels_total}"
            )


@dataclass(frozen=True)
class Workload:
    """Traffic and arithmetic of one kernel invocation. bytes_read includes
    the halo overcount of the window plan it came from."""

    bytes_read: int
    bytes_written: int
    flops: int
    name: str

    def __post_init__(self) -> None:
        if min(self.bytes_read, self.bytes_written, self.flops) < 0:
            raise ConfigError("workload fields must be >= 0")


@dataclass(frozen=True)
class SimResult:
    time_s: float
    gflops: float
    power_w: float
    gflops_per_watt: float
    speedup_vs_cpu: float
    bottleneck: str  # host-link | channel | compute


@dataclass(frozen=True)
class ScalingPoint:
    n_pe: int
    result: Optional[SimResult]  # None when the channel budget is exceeded

    @property
    def feasible(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class EnergyReport:
    power_w: float
    energy_j: float
    gflops_per_watt: float
    cpu_efficiency: float
    efficiency_ratio: float


def arithmetic_intensity(w: Workload) -> float:
    """flops per byte of total traffic."""
    traffic = w.bytes_read + w.bytes_written
    if traffic <= 0:
        raise ModelError(f"workload {w.name!r} has zero traffic")
    return w.flops / traffic


def roofline_attainable(ai: float, peak: float, bw: float) -> float:
    """min(peak compute, ai * bandwidth), both in GFLOP/s."""
    if ai < 0 or peak <= 0 or bw <= 0:
        raise ConfigError(f"bad roofline inputs ai={ai} peak={peak} bw={bw}")
    return min(peak, ai * bw)


def effective_pe_bandwidth(model: MachineModel, n_pe: int) -> float:
    """GB/s seen by each PE: its dedicated channels, or an equal share of
    the single shared channel."""
    if n_pe < 1:
        raise ConfigError(f"n_pe must be >= 1, got {n_pe}")
    if model.shared_channel:
        return model.channel_bw / n_pe
    if n_pe * model.channels_per_pe > model.channels_total:
        raise CapacityError(
            f"{n_pe} PEs x {model.channels_per_pe} channels exceed "
            f"{model.channels_total} available"
        )
    return model.channels_per_pe * model.channel_bw


def power_draw(model: MachineModel, n_pe: int) -> float:
    channels = model.channels_total if model.shared_channel else n_pe * model.channels_per_pe
    return model.power_base + channels * model.power_per_channel + n_pe * model.power_per_pe


def simulate_run(w: Workload, n_pe: int, model: MachineModel) -> SimResult:
    """Pipeline-max timing: the run takes the slowest of the host-link,
    channel, and compute stages, plus the invocation overhead. Stage ties
    report the first stage in that order."""
    eff_bw = effective_pe_bandwidth(model, n_pe)
    if model.host_staged:
        t_host = (
            w.bytes_read / (model.host_link_bw_read * 1e9)
            + w.bytes_written / (model.host_link_bw_write * 1e9)
        )
    else:
        t_host = 0.0
    per_pe_bytes = (w.bytes_read + w.bytes_written) / n_pe
    t_channel = per_pe_bytes / (eff_bw * 1e9)
    t_compute = (w.flops / n_pe) / (model.pe_rate * 1e9)
    stages = (("host-link", t_host), ("channel", t_channel), ("compute", t_compute))
    t_max = max(t for _, t in stages)
    bottleneck = next(name for name, t in stages if t == t_max)
    time_s = t_max + model.invocation_overhead
    if time_s <= 0:
        raise ModelError(f"workload {w.name!r} is empty: zero time")
    gflops = w.flops / time_s / 1e9
    power = power_draw(model, n_pe)
    return SimResult(
        time_s=time_s,
        gflops=gflops,
        power_w=power,
        gflops_per_watt=gflops / power,
        speedup_vs_cpu=gflops / model.cpu_baseline_gflops,
        bottleneck=bottleneck,
    )


def scaling_curve(
    w: Workload, model: MachineModel, pe_range: Sequence[int]
) -> List[ScalingPoint]:
    """simulate_run per PE count; channel-budget violations become
    infeasible points instead of aborting the curve."""
    if not pe_range:
        raise ConfigError("pe_range is empty")
    points = []
    for n in pe_range:
        try:
            points.append(ScalingPoint(n, simulate_run(w, n, model)))
        except CapacityError:
            points.append(ScalingPoint(n, None))
    return points


def energy_report(model: MachineModel, n_pe: int, sim: SimResult) -> EnergyReport:
    expect = power_draw(model, n_pe)
    if abs(expect - sim.power_w) > 1e-9 * max(1.0, abs(expect)):
        raise ModelError(
            f"sim power {sim.power_w} W does not match model at {n_pe} PEs ({expect} W)"
        )
    cpu_eff = model.cpu_baseline_gflops / model.cpu_active_power
    return EnergyReport(
        power_w=sim.power_w,
        energy_j=sim.power_w * sim.time_s,
        gflops_per_watt=sim.gflops_per_watt,
        cpu_efficiency=cpu_eff,
        efficiency_ratio=sim.gflops_per_watt / cpu_eff,
    )


# ---------------------------------------------------------------------------
# Workload construction
# ---------------------------------------------------------------------------


def workload_from_plan(plan: WindowPlan, bytes_per_elem: int) -> Workload:
    """Traffic from the plan's read regions (halo overcount included) and
    interior writes; flops from the exact counter."""
    if bytes_per_elem < 1:
        raise ConfigError(f"bytes_per_elem must be >= 1, got {bytes_per_elem}")
    read_pts = sum(t.read_volume for t in plan.tiles)
    write_pts = sum(t.interior_volume for t in plan.tiles)
    return Workload(
        bytes_read=READ_FIELDS[plan.kernel] * read_pts * bytes_per_elem,
        bytes_written=write_pts * bytes_per_elem,
        flops=count_flops(plan.kernel, plan.dims).total,
        name=plan.kernel,
    )


def whole_domain_workload(kernel: str, dims: Dims3, bytes_per_elem: int) -> Workload:
    """Workload of a single whole-interior tile (no halo overcount beyond
    the grid's own boundary ring). This is the calibration shape."""
    (i0, i1), (j0, j1), (k0, k1) = interior_region(kernel, dims)
    tile = TileSpec(i1 - i0, j1 - j0, k1 - k0)
    return workload_from_plan(plan_windows(dims, tile, kernel), bytes_per_elem)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelCalibration:
    """Per-kernel rates and power for one preset; optional overrides for
    board-level fields that differ per kernel study."""

    pe_rate: float
    max_pes: int
    power_per_pe: float
    cpu_gflops: float
    cpu_power_w: float
    channels_total: Optional[int] = None
    invocation_overhead: Optional[float] = None
    power_base: Optional[float] = None
    note: str = ""


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    channel_bw: float
    channels_total: int
    channels_per_pe: int
    shared_channel: bool
    host_link_bw_read: float
    host_link_bw_write: float
    host_staged: bool
    invocation_overhead: float
    power_base: float
    power_per_channel: float
    kernels: Dict[str, KernelCalibration]

    def machine_for(self, kernel: str) -> MachineModel:
        if kernel not in self.kernels:
            raise ConfigError(f"preset {self.name!r} has no calibration for {kernel!r}")
        cal = self.kernels[kernel]
        return MachineModel(
            channel_bw=self.channel_bw,
            channels_total=cal.channels_total or self.channels_total,
            channels_per_pe=self.channels_per_pe,
            shared_channel=self.shared_channel,
            host_link_bw_read=self.host_link_bw_read,
            host_link_bw_write=self.host_link_bw_write,
            pe_rate=cal.pe_rate,
            invocation_overhead=(
                self.invocation_overhead
                if cal.invocation_overhead is None
                else cal.invocation_overhead
            ),
            power_base=self.power_base if cal.power_base is None else cal.power_base,
            power_per_channel=self.power_per_channel,
            power_per_pe=cal.power_per_pe,
            cpu_baseline_gflops=cal.cpu_gflops,
            cpu_active_power=cal.cpu_power_w,
            host_staged=self.host_staged,
        )

    def max_pes(self, kernel: str) -> int:
        if kernel not in self.kernels:
            raise ConfigError(f"preset {self.name!r} has no calibration for {kernel!r}")
        return self.kernels[kernel].max_pes


# Measured figures for the modeled system. Sustained totals: vadvc 157.1
# GFLOP/s on 14 PEs, hdiff 608.4 GFLOP/s on 16 PEs (HBM + OpenCAPI, f32,
# 256x256x64 domain). CPU baseline: 64-thread POWER9 at 29.1 / 58.5 GFLOP/s
# drawing 99.2 / 97.9 W. Efficiency totals 1.61 / 21.01 GFLOPS/W imply
# accelerator powers of 97.58 / 28.96 W.
_HBM_BW = 12.8          # GB/s, one 256-bit HBM2 pseudo-channel
_DDR4_BW = 25.6         # GB/s, one 512-bit DDR4 channel
_OCAPI_R, _OCAPI_W = 22.1, 22.0   # GB/s measured host-link read/write
_CAPI2_R, _CAPI2_W = 13.9, 14.0
_VADVC_TOTAL, _VADVC_PES = 157.1, 14
_HDIFF_TOTAL, _HDIFF_PES = 608.4, 16
_VADVC_EFF, _HDIFF_EFF = 1.61, 21.01       # GFLOPS/W
_CPU_VADVC, _CPU_HDIFF = 29.1, 58.5        # GFLOP/s
_CPU_VADVC_W, _CPU_HDIFF_W = 99.2, 97.9    # W
_CAPI2_PENALTY_VADVC = 1.37   # OpenCAPI gave +37% vadvc over CAPI2
_CAPI2_PENALTY_HDIFF = 1.44   # and +44% hdiff
_MULTI_GAIN_VADVC = 1.2       # 4-channel PEs: 1.2x per-PE vadvc gain
_MULTI_GAIN_HDIFF = 1.8
_BASE_W = 5.0                 # modeled static board power (split not published)
_VADVC_RATE = _VADVC_TOTAL / _VADVC_PES
_HDIFF_RATE = _HDIFF_TOTAL / _HDIFF_PES
_VADVC_PPE = (_VADVC_TOTAL / _VADVC_EFF - _BASE_W - _VADVC_PES) / _VADVC_PES
_HDIFF_PPE = (_HDIFF_TOTAL / _HDIFF_EFF - _BASE_W - _HDIFF_PES) / _HDIFF_PES
_COPY_CHANNELS = 24           # copy study enabled 24 pseudo-channels
_COPY_OVERHEAD = 1.2e-3       # s, fitted so throughput saturates past 16 PEs


def paper_presets() -> Dict[str, Preset]:
    """Named machine presets calibrated to the measured system above.

    Each description records where every number comes from. The presets set
    host_staged=False: the published kernel rates are steady-state with
    grids resident in accelerator memory, so the host link is not a stage
    (its measured bandwidth is still recorded for staged runs).
    """
    hbm_kernels = {
        "vadvc": KernelCalibration(
            pe_rate=_VADVC_RATE,
            max_pes=_VADVC_PES,
            power_per_pe=_VADVC_PPE,
            cpu_gflops=_CPU_VADVC,
            cpu_power_w=_CPU_VADVC_W,
            note=(
                f"pe_rate {_VADVC_RATE:.4f} = {_VADVC_TOTAL} GFLOP/s over "
                f"{_VADVC_PES} PEs; per-PE power from the 1.61 GFLOPS/W total "
                f"(implied {_VADVC_TOTAL / _VADVC_EFF:.2f} W). GFLOP/s ratio vs "
                f"the 29.1 GFLOP/s CPU run: 5.4."
            ),
        ),
        "hdiff": KernelCalibration(
            pe_rate=_HDIFF_RATE,
            max_pes=_HDIFF_PES,
            power_per_pe=_HDIFF_PPE,
            cpu_gflops=_CPU_HDIFF,
            cpu_power_w=_CPU_HDIFF_W,
            note=(
                f"pe_rate {_HDIFF_RATE} = {_HDIFF_TOTAL} GFLOP/s over "
                f"{_HDIFF_PES} PEs; per-PE power from the 21.01 GFLOPS/W total "
                f"(implied {_HDIFF_TOTAL / _HDIFF_EFF:.2f} W). GFLOP/s ratio vs "
                f"the 58.5 GFLOP/s CPU run is 608.4/58.5 = 10.4; the system's "
                f"reported 12.7x headline speedup is not derivable from these "
                f"throughputs (measurement basis unstated) and is left "
                f"unreproduced."
            ),
        ),
        "copy": KernelCalibration(
            pe_rate=_HDIFF_RATE,  # inert: copy performs no flops
            max_pes=_COPY_CHANNELS,
            power_per_pe=0.5,
            cpu_gflops=1.0,   # placeholder, no FLOP-based CPU baseline exists
            cpu_power_w=1.0,
            channels_total=_COPY_CHANNELS,
            invocation_overhead=_COPY_OVERHEAD,
            note=(
                "copy study: 24 pseudo-channels enabled; 1.2 ms launch "
                "overhead fitted so effective throughput saturates after 16 "
                "PEs (16->24 marginal gain 4.2%)."
            ),
        ),
    }
    presets = {
        "hbm_ocapi": Preset(
            name="hbm_ocapi",
            description=(
                "HBM2 FPGA card on a POWER9 host over OpenCAPI at 250 MHz. "
                f"channel_bw {_HBM_BW} GB/s per 256-bit pseudo-channel (32 "
                "channels / 410 GB/s aggregate on the card; one 16-channel "
                "stack used here). host link 22.1/22.0 GB/s measured R/W "
                "(32 GB/s theoretical peak). power: ~1 W per active channel, "
                f"{_BASE_W} W modeled static base; per-PE power implied by "
                "the measured 1.61 / 21.01 GFLOPS/W totals."
            ),
            channel_bw=_HBM_BW,
            channels_total=16,
            channels_per_pe=1,
            shared_channel=False,
            host_link_bw_read=_OCAPI_R,
            host_link_bw_write=_OCAPI_W,
            host_staged=False,
            invocation_overhead=0.0,
            power_base=_BASE_W,
            power_per_channel=1.0,
            kernels=hbm_kernels,
        ),
        "hbm_capi2": Preset(
            name="hbm_capi2",
            description=(
                "Same HBM2 card behind CAPI2 at 200 MHz. host link 13.9/14.0 "
                "GB/s measured R/W. pe_rate = OpenCAPI rate / 1.37 (vadvc) "
                "and / 1.44 (hdiff), the measured link-generation gap. No "
                "separate power figures were published; HBM/OpenCAPI power "
                "coefficients reused."
            ),
            channel_bw=_HBM_BW,
            channels_total=16,
            channels_per_pe=1,
            shared_channel=False,
            host_link_bw_read=_CAPI2_R,
            host_link_bw_write=_CAPI2_W,
            host_staged=False,
            invocation_overhead=0.0,
            power_base=_BASE_W,
            power_per_channel=1.0,
            kernels={
                "vadvc": KernelCalibration(
                    pe_rate=_VADVC_RATE / _CAPI2_PENALTY_VADVC,
                    max_pes=_VADVC_PES,
                    power_per_pe=_VADVC_PPE,
                    cpu_gflops=_CPU_VADVC,
                    cpu_power_w=_CPU_VADVC_W,
                ),
                "hdiff": KernelCalibration(
                    pe_rate=_HDIFF_RATE / _CAPI2_PENALTY_HDIFF,
                    max_pes=_HDIFF_PES,
                    power_per_pe=_HDIFF_PPE,
                    cpu_gflops=_CPU_HDIFF,
                    cpu_power_w=_CPU_HDIFF_W,
                ),
            },
        ),
        "ddr4_capi2": Preset(
            name="ddr4_capi2",
            description=(
                "DDR4 FPGA sibling card behind CAPI2: every PE shares one "
                f"{_DDR4_BW} GB/s 512-bit channel, which is why scaling "
                "saturates at total_bytes/channel_bw. Placement limits: 4 "
                "vadvc / 8 hdiff PEs. CAPI2 pe_rates; HBM power coefficients "
                "reused (no published DDR4-board power)."
            ),
            channel_bw=_DDR4_BW,
            channels_total=1,
            channels_per_pe=1,
            shared_channel=True,
            host_link_bw_read=_CAPI2_R,
            host_link_bw_write=_CAPI2_W,
            host_staged=False,
            invocation_overhead=0.0,
            power_base=_BASE_W,
            power_per_channel=1.0,
            kernels={
                "vadvc": KernelCalibration(
                    pe_rate=_VADVC_RATE / _CAPI2_PENALTY_VADVC,
                    max_pes=4,
                    power_per_pe=_VADVC_PPE,
                    cpu_gflops=_CPU_VADVC,
                    cpu_power_w=_CPU_VADVC_W,
                ),
                "hdiff": KernelCalibration(
                    pe_rate=_HDIFF_RATE / _CAPI2_PENALTY_HDIFF,
                    max_pes=8,
                    power_per_pe=_HDIFF_PPE,
                    cpu_gflops=_CPU_HDIFF,
                    cpu_power_w=_CPU_HDIFF_W,
                ),
            },
        ),
        "hbm_multi_ocapi": Preset(
            name="hbm_multi_ocapi",
            description=(
                "OpenCAPI HBM2 card with 4 pseudo-channels routed to each PE "
                "(51.2 GB/s per PE); routing congestion caps the design at 3 "
                "PEs / 12 channels. pe_rate = single-channel rate x 1.2 "
                "(vadvc) / x 1.8 (hdiff), the measured per-PE multi-channel "
                "gains. The separately reported 4.7x best-single-vs-multi "
                "vadvc gap is not jointly consistent with those per-PE gains "
                "(14/(3*1.2) = 3.9x) and is left unreproduced."
            ),
            channel_bw=_HBM_BW,
            channels_total=16,
            channels_per_pe=4,
            shared_channel=False,
            host_link_bw_read=_OCAPI_R,
            host_link_bw_write=_OCAPI_W,
            host_staged=False,
            invocation_overhead=0.0,
            power_base=_BASE_W,
            power_per_channel=1.0,
            kernels={
                "vadvc": KernelCalibration(
                    pe_rate=_VADVC_RATE * _MULTI_GAIN_VADVC,
                    max_pes=3,
                    power_per_pe=_VADVC_PPE,
                    cpu_gflops=_CPU_VADVC,
                    cpu_power_w=_CPU_VADVC_W,
                ),
                "hdiff": KernelCalibration(
                    pe_rate=_HDIFF_RATE * _MULTI_GAIN_HDIFF,
                    max_pes=3,
                    power_per_pe=_HDIFF_PPE,
                    cpu_gflops=_CPU_HDIFF,
                    cpu_power_w=_CPU_HDIFF_W,
                ),
            },
        ),
        "cpu_power9": Preset(
            name="cpu_power9",
            description=(
                "The 64-thread POWER9 host itself, modeled as one PE running "
                "at the measured kernel rates (29.1 GFLOP/s vadvc, 58.5 "
                "hdiff) with its DDR4 memory as four 18 GB/s interfaces used "
                "together. power_base is the measured active power (99.2 W "
                "vadvc, 97.9 W hdiff); speedup_vs_cpu is 1 by construction."
            ),
            channel_bw=18.0,
            channels_total=4,
            channels_per_pe=4,
            shared_channel=False,
            host_link_bw_read=_OCAPI_R,
            host_link_bw_write=_OCAPI_W,
            host_staged=False,
            invocation_overhead=0.0,
            power_base=_CPU_VADVC_W,  # overridden per kernel below
            power_per_channel=0.0,
            kernels={
                "vadvc": KernelCalibration(
                    pe_rate=_CPU_VADVC,
                    max_pes=1,
                    power_per_pe=0.0,
                    cpu_gflops=_CPU_VADVC,
                    cpu_power_w=_CPU_VADVC_W,
                    power_base=_CPU_VADVC_W,
                ),
                "hdiff": KernelCalibration(
                    pe_rate=_CPU_HDIFF,
                    max_pes=1,
                    power_per_pe=0.0,
                    cpu_gflops=_CPU_HDIFF,
                    cpu_power_w=_CPU_HDIFF_W,
                    power_base=_CPU_HDIFF_W,
                ),
            },
        ),
    }
    return presets


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

SCALING_CSV_HEADER = "kernel,preset,n_pe,time_s,gflops,power_w,gflops_per_watt,bottleneck"
ENERGY_CSV_HEADER = (
    "kernel,preset,n_pe,time_s,power_w,energy_j,gflops_per_watt,"
    "cpu_efficiency,efficiency_ratio"
)


def write_scaling_csv(
    out: TextIO, kernel: str, preset: str, points: Iterable[ScalingPoint]
) -> None:
    """One row per PE count; infeasible points keep the row with empty
    numeric cells and 'infeasible' in the bottleneck column. '.' decimals,
    '\\n' line endings, no locale formatting."""
    out.write(SCALING_CSV_HEADER + "\n")
    for p in points:
        if p.result is None:
            out.write(f"{kernel},{preset},{p.n_pe},,,,,infeasible\n")
        else:
            r = p.result
            out.write(
                f"{kernel},{preset},{p.n_pe},{r.time_s!r},{r.gflops!r},"
                f"{r.power_w!r},{r.gflops_per_watt!r},{r.bottleneck}\n"
            )


def write_energy_csv(
    out: TextIO,
    kernel: str,
    preset: str,
    rows: Iterable[Tuple[int, SimResult, EnergyReport]],
) -> None:
    out.write(ENERGY_CSV_HEADER + "\n")
    for n_pe, sim, rep in rows:
        out.write(
            f"{kernel},{preset},{n_pe},{sim.time_s!r},{rep.power_w!r},"
            f"{rep.energy_j!r},{rep.gflops_per_watt!r},{rep.cpu_efficiency!r},"
            f"{rep.efficiency_ratio!r}\n"
        )
