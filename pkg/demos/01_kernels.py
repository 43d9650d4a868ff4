"""
Running the three stencils on small grids
=========================================

Builds a few grids by hand, applies each kernel once, and checks the
numbers against things you can compute on paper.
"""

import numpy as np

from stencilsmith import (
    ConstantInit,
    Dims3,
    Halo3,
    ImpulseInit,
    LinearInit,
    copy_reference,
    hdiff_reference,
    make_grid,
    synthetic_fieldset,
    vadvc_reference,
)

halo = Halo3(2, 2, 0)

# A unit impulse in the middle of an 11x11 plane. One diffusion step
# smears it into a fixed ring pattern: 1.5 at the center, -0.2 on the
# axis neighbors, 0.05 on the diagonals, 0.025 two cells out.
g = make_grid(Dims3(11, 11, 1), halo, ImpulseInit(5, 5, 0, 1.0))
out = hdiff_reference(g)
plane = out.view3d()[0]
print("impulse response through the diffusion stage")
print("  center     ", plane[5, 5])
print("  axis d=1   ", plane[5, 6], plane[6, 5])
print("  diagonal   ", plane[6, 6])
print("  axis d=2   ", plane[5, 7])

# Constant and linear fields have zero Laplacian everywhere, so the
# stage must return them untouched, bit for bit.
for name, init in (("constant", ConstantInit(3.0)),
                   ("linear", LinearInit(1.0, 2.0, 0.0))):
    f = make_grid(Dims3(16, 16, 4), halo, init)
    assert np.array_equal(hdiff_reference(f).data, f.data)
    print(f"{name} field passes through unchanged: ok")

# The column sweep on a synthetic atmosphere. The output must satisfy
# the tridiagonal system the sweep factorizes, so reconstructing the
# right-hand side from the output is a cheap self-check.
dims = Dims3(12, 12, 16)
fields = synthetic_fieldset(dims, halo, "f64", seed=42)
adv = vadvc_reference(fields)
col = adv.view3d()[:, 5, 5]
print("one advected column, first levels:", col[:4])

# copy moves bytes and computes nothing.
src = make_grid(Dims3(8, 8, 4), Halo3(0, 0, 0), LinearInit(1.0, 1.0, 1.0))
dst = copy_reference(src)
assert np.array_equal(dst.data, src.data)
print("copy is the identity: ok")
