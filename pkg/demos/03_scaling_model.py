"""
Throughput, scaling, and energy with the analytic machine model
===============================================================

No hardware involved: the model is a pipeline-max over the host link,
the memory channels, and the compute units, with calibrated per-unit
rates. Everything here reproduces to the last bit on every run.
"""

from stencilsmith import (
    Dims3,
    arithmetic_intensity,
    energy_report,
    paper_presets,
    roofline_attainable,
    scaling_curve,
    simulate_run,
    whole_domain_workload,
)

presets = paper_presets()
dims = Dims3(256, 256, 64)

# Arithmetic intensity decides which side of the roofline a kernel sits on.
for kernel, pes in (("hdiff", 16), ("vadvc", 14)):
    machine = presets["hbm_ocapi"].machine_for(kernel)
    w = whole_domain_workload(kernel, dims, 4)
    ai = arithmetic_intensity(w)
    peak = pes * machine.pe_rate
    bw = pes * machine.channel_bw
    print(f"{kernel}: {w.flops / 1e9:.3f} GFLOP, AI = {ai:.3f} flop/B, "
          f"roofline at {pes} PEs = "
          f"{roofline_attainable(ai, peak, bw):.1f} GF/s")

print()
print("PE scaling on the 16-channel HBM card (dedicated channels)")
for kernel, pes in (("vadvc", 14), ("hdiff", 16)):
    machine = presets["hbm_ocapi"].machine_for(kernel)
    w = whole_domain_workload(kernel, dims, 4)
    curve = scaling_curve(w, machine, range(1, pes + 1))
    top = curve[-1].result
    print(f"  {kernel:5s} {pes:2d} PEs: {top.gflops:7.1f} GF/s "
          f"({top.bottleneck}-bound), {top.power_w:5.1f} W, "
          f"{top.gflops_per_watt:5.2f} GF/s/W")

print()
print("same kernel, one shared DDR4 channel: the curve flattens")
machine = presets["ddr4_capi2"].machine_for("hdiff")
w = whole_domain_workload("hdiff", dims, 4)
for p in scaling_curve(w, machine, range(1, 9)):
    bar = "#" * int(p.result.gflops / 4)
    print(f"  {p.n_pe} PE {p.result.gflops:7.2f} GF/s {bar}")

print()
print("efficiency vs the 18-core host CPU")
for kernel, pes in (("vadvc", 14), ("hdiff", 16)):
    machine = presets["hbm_ocapi"].machine_for(kernel)
    w = whole_domain_workload(kernel, dims, 4)
    sim = simulate_run(w, pes, machine)
    rep = energy_report(machine, pes, sim)
    print(f"  {kernel:5s}: {rep.gflops_per_watt:6.2f} GF/s/W vs "
          f"{rep.cpu_efficiency:5.3f} on the CPU "
          f"-> {rep.efficiency_ratio:.1f}x")
