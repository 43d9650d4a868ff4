"""
Tile-size search: throughput against on-chip footprint
======================================================

The two objectives pull in opposite directions. Wide tiles waste less
bandwidth on halo re-reads but need bigger line buffers; the search
keeps every candidate that wins on at least one axis.
"""

from stencilsmith import (
    demo_machine,
    demo_space,
    pick_operating_point,
    search,
)

machine = demo_machine()

for bpe in (4, 2):
    space = demo_space(bpe)
    result = search(space, machine, mode="exhaustive")
    print(f"bytes_per_elem={bpe}: {result.evaluations} tiles inside the "
          f"{space.footprint_budget} B budget, front of {len(result.front)}")
    for p in result.front:
        print(f"   {str(p.tile):>9s}  {p.gflops_model:7.3f} GF/s  "
              f"{p.footprint_bytes:6d} B")
    pick = pick_operating_point(result.front, space.footprint_budget)
    print(f"   picked {pick.tile} at {pick.gflops_model:.3f} GF/s")
    print()

# Halving the element size frees enough footprint that the constrained
# optimum jumps to the full-width tile. Same search, different answer.

# The heuristics only ever see a subset, so their fronts can only be
# worse or equal, never better.
space = demo_space(4)
exact = search(space, machine, mode="exhaustive")
for mode in ("hillclimb", "random"):
    res = search(space, machine, mode=mode, samples=10, starts=2, seed=3)
    best = max(p.gflops_model for p in res.front)
    ceiling = max(p.gflops_model for p in exact.front)
    print(f"{mode:9s}: {res.evaluations:2d} evaluations, "
          f"best {best:.3f} GF/s (exhaustive ceiling {ceiling:.3f})")
