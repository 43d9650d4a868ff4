"""Reference implementations of the three stencil kernels, a standalone
tridiagonal solver, and an exact FLOP counter.

Kernels: hdiff (horizontal diffusion, Laplacian -> flux -> output), vadvc
(vertical advection, a per-column tridiagonal forward/backward sweep), and
copy. All operate on the fixed interior i in [2, nx-3], j in [2, ny-3]
(hdiff/vadvc; copy covers the full grid) and never write halo points.

The compute bodies are written as numpy slice expressions whose per-element
operation order does not depend on the region bounds, so tiled execution
(see tiling.py) reproduces the reference output bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError, KernelInputError, SingularSystemError
from .grid import Dims3, Grid3D, Halo3, RandomInit, make_grid

KERNELS = ("hdiff", "vadvc", "copy")

# Stencil reach in (i, j, k); also the halo a tile must be able to read.
KERNEL_HALO = {"hdiff": (2, 2, 0), "vadvc": (2, 2, 0), "copy": (0, 0, 0)}

# Forward-sweep pivots below this magnitude abort with a singular-system
# error instead of amplifying into garbage.
PIVOT_TOL = {"f64": 1e-30, "f32": 1e-20}


@dataclass(frozen=True)
class HdiffParams:
    """Diffusion coefficient applied symmetrically to both flux differences."""

    c1: float = 0.025

    def __post_init__(self) -> None:
        if not np.isfinite(self.c1):
            raise ConfigError(f"c1 must be finite, got {self.c1!r}")


@dataclass(frozen=True)
class FieldSet:
    """The vadvc inputs plus sweep constants.

    All five grids share dims, halo, and precision. ccol/dcol scratch is
    column-local inside the sweep, not part of the field set. bet_m and
    bet_p are the off-centering weights, bet_m = 0.5*(1-beta_v) and
    bet_p = 0.5*(1+beta_v), so they must sum to 1.
    """

    wcon: Grid3D
    ustage: Grid3D
    upos: Grid3D
    utens: Grid3D
    utensstage: Grid3D
    dtr_stage: float = 3.0 / 20.0  # inverse stage timestep
    bet_m: float = 0.5
    bet_p: float = 0.5

    def __post_init__(self) -> None:
        ref = self.wcon
        for name in ("ustage", "upos", "utens", "utensstage"):
            g = getattr(self, name)
            if g.dims != ref.dims or g.precision != ref.precision or g.halo != ref.halo:
                raise KernelInputError(
                    f"{name} does not match wcon: {g.dims}/{g.halo}/{g.precision} "
                    f"vs {ref.dims}/{ref.halo}/{ref.precision}"
                )
        if abs(self.bet_m + self.bet_p - 1.0) > 1e-12:
            raise ConfigError(
                f"bet_m + bet_p must be 1, got {self.bet_m} + {self.bet_p}"
            )
        if not np.isfinite(self.dtr_stage) or self.dtr_stage == 0.0:
            raise ConfigError(f"dtr_stage must be finite and nonzero, got {self.dtr_stage}")

    @property
    def grids(self) -> Tuple[Grid3D, ...]:
        return (self.wcon, self.ustage, self.upos, self.utens, self.utensstage)


@dataclass(frozen=True)
class FlopCount:
    adds: int
    muls: int
    divs: int

    @property
    def total(self) -> int:
        return self.adds + self.muls + self.divs


def interior_region(kernel: str, dims: Dims3) -> Tuple[Tuple[int, int], ...]:
    """Half-open (start, stop) bounds per axis (i, j, k) of the compute
    interior. hdiff/vadvc write [2, nx-2) x [2, ny-2) x [0, nz); copy
    writes the full grid."""
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}")
    if kernel == "copy":
        return ((0, dims.nx), (0, dims.ny), (0, dims.nz))
    return ((2, dims.nx - 2), (2, dims.ny - 2), (0, dims.nz))


def _require_finite(grid: Grid3D, name: str) -> None:
    if not np.isfinite(grid.data).all():
        raise KernelInputError(f"{name} contains NaN or Inf")


def laplacian(src: Grid3D, i: int, j: int, k: int) -> float:
    """4*src(i,j,k) minus the four horizontal neighbors."""
    d = src.dims
    if not (1 <= i <= d.nx - 2 and 1 <= j <= d.ny - 2 and 0 <= k < d.nz):
        raise KernelInputError(f"({i},{j},{k}) lacks a 5-point neighborhood in {d}")
    v = src.view3d()
    four = src.dtype.type(4.0)
    return (
        four * v[k, j, i] - v[k, j, i - 1] - v[k, j, i + 1]
        - v[k, j - 1, i] - v[k, j + 1, i]
    )


def _hdiff_block(
    v: np.ndarray,
    out: np.ndarray,
    c1,
    i0: int,
    i1: int,
    j0: int,
    j1: int,
    k0: int,
    k1: int,
) -> None:
    """Write hdiff output for the half-open box; reads reach 2 points out."""
    four = v.dtype.type(4.0)
    # Laplacian on the 1-point-widened box; lap[:, a, b] sits at
    # (i0-1+b, j0-1+a) in grid coordinates.
    lap = (
        four * v[k0:k1, j0 - 1:j1 + 1, i0 - 1:i1 + 1]
        - v[k0:k1, j0 - 1:j1 + 1, i0 - 2:i1]
        - v[k0:k1, j0 - 1:j1 + 1, i0:i1 + 2]
        - v[k0:k1, j0 - 2:j1, i0 - 1:i1 + 1]
        - v[k0:k1, j0:j1 + 2, i0 - 1:i1 + 1]
    )
    fx = lap[:, 1:-1, 2:] - lap[:, 1:-1, 1:-1]
    fxm = lap[:, 1:-1, 1:-1] - lap[:, 1:-1, :-2]
    fy = lap[:, 2:, 1:-1] - lap[:, 1:-1, 1:-1]
    fym = lap[:, 1:-1, 1:-1] - lap[:, :-2, 1:-1]
    out[k0:k1, j0:j1, i0:i1] = v[k0:k1, j0:j1, i0:i1] - c1 * ((fx - fxm) + (fy - fym))


def hdiff_reference(src: Grid3D, params: HdiffParams = HdiffParams()) -> Grid3D:
    """Horizontal diffusion over the interior; halo copied verbatim."""
    if not (src.halo.i == src.halo.j and src.halo.i >= 2):
        raise KernelInputError(f"hdiff needs halo.i = halo.j >= 2, got {src.halo}")
    _require_finite(src, "src")
    d = src.dims
    out = src.data.copy()
    (i0, i1), (j0, j1), (k0, k1) = interior_region("hdiff", d)
    _hdiff_block(
        src.view3d(),
        out.reshape(d.nz, d.ny, d.nx),
        src.dtype.type(params.c1),
        i0, i1, j0, j1, k0, k1,
    )
    return Grid3D(dims=d, halo=src.halo, precision=src.precision, data=out)


def _vadvc_block(
    w: np.ndarray,
    us: np.ndarray,
    up: np.ndarray,
    ut: np.ndarray,
    uts: np.ndarray,
    out: np.ndarray,
    i0: int,
    i1: int,
    j0: int,
    j1: int,
    dtr_stage: float,
    bet_m: float,
    bet_p: float,
    pivot_tol: float,
) -> None:
    """Forward/backward sweep for every column in the half-open (i, j) box."""
    dtype = w.dtype.type
    nz = w.shape[0]
    one = dtype(1.0)
    quarter = dtype(0.25)
    nquarter = dtype(-0.25)
    D = dtype(dtr_stage)
    bm = dtype(bet_m)
    bp = dtype(bet_p)

    jb = slice(j0, j1)
    ib = slice(i0, i1)
    ibp = slice(i0 + 1, i1 + 1)  # wcon is read one point to the right

    ccol = np.empty((nz, j1 - j0, i1 - i0), dtype=w.dtype)
    dcol = np.empty_like(ccol)

    def _check_pivot(piv: np.ndarray, k: int) -> None:
        small = np.abs(piv) < pivot_tol
        if small.any():
            jj, ii = np.argwhere(small)[0]
            raise SingularSystemError(
                f"forward-sweep pivot below {pivot_tol:g} at "
                f"(i={i0 + ii}, j={j0 + jj}, k={k})"
            )

    # k = 0: no subdiagonal term.
    gcv = quarter * (w[1, jb, ibp] + w[1, jb, ib])
    cs = gcv * bm
    ccol0 = gcv * bp
    bcol = D - ccol0
    _check_pivot(bcol, 0)
    corr = -cs * (us[1, jb, ib] - us[0, jb, ib])
    dcol[0] = (D * up[0, jb, ib] + ut[0, jb, ib] + uts[0, jb, ib] + corr) / bcol
    ccol[0] = ccol0 / bcol

    for k in range(1, nz - 1):
        gav = nquarter * (w[k, jb, ibp] + w[k, jb, ib])
        gcv = quarter * (w[k + 1, jb, ibp] + w[k + 1, jb, ib])
        as_ = gav * bm
        cs = gcv * bm
        acol = gav * bp
        ccol_k = gcv * bp
        bcol = D - acol - ccol_k
        corr = (
            -as_ * (us[k - 1, jb, ib] - us[k, jb, ib])
            - cs * (us[k + 1, jb, ib] - us[k, jb, ib])
        )
        d = D * up[k, jb, ib] + ut[k, jb, ib] + uts[k, jb, ib] + corr
        piv = bcol - ccol[k - 1] * acol
        _check_pivot(piv, k)
        div = one / piv
        ccol[k] = ccol_k * div
        dcol[k] = (d - dcol[k - 1] * acol) * div

    # k = nz-1: no superdiagonal term.
    k = nz - 1
    gav = nquarter * (w[k, jb, ibp] + w[k, jb, ib])
    as_ = gav * bm
    acol = gav * bp
    bcol = D - acol
    corr = -as_ * (us[k - 1, jb, ib] - us[k, jb, ib])
    d = D * up[k, jb, ib] + ut[k, jb, ib] + uts[k, jb, ib] + corr
    piv = bcol - ccol[k - 1] * acol
    _check_pivot(piv, k)
    div = one / piv
    dcol[k] = (d - dcol[k - 1] * acol) * div

    # Backward substitution, then convert back to a tendency.
    data_next = dcol[nz - 1]
    out[nz - 1, jb, ib] = D * (data_next - up[nz - 1, jb, ib])
    for k in range(nz - 2, -1, -1):
        data_k = dcol[k] - ccol[k] * data_next
        out[k, jb, ib] = D * (data_k - up[k, jb, ib])
        data_next = data_k


def vadvc_reference(fields: FieldSet) -> Grid3D:
    """Vertical advection sweep; returns utensstage_out.

    Halo columns are copied from the input utensstage.
    """
    ref = fields.wcon
    d = ref.dims
    if d.nz < 3:
        raise KernelInputError(f"vadvc needs nz >= 3, got {d.nz}")
    if ref.halo.i < 1:
        raise KernelInputError(f"vadvc needs halo.i >= 1, got {ref.halo}")
    for g, name in zip(fields.grids, ("wcon", "ustage", "upos", "utens", "utensstage")):
        _require_finite(g, name)

    out = fields.utensstage.data.copy()
    (i0, i1), (j0, j1), _ = interior_region("vadvc", d)
    _vadvc_block(
        fields.wcon.view3d(),
        fields.ustage.view3d(),
        fields.upos.view3d(),
        fields.utens.view3d(),
        fields.utensstage.view3d(),
        out.reshape(d.nz, d.ny, d.nx),
        i0, i1, j0, j1,
        fields.dtr_stage,
        fields.bet_m,
        fields.bet_p,
        PIVOT_TOL[ref.precision],
    )
    return Grid3D(dims=d, halo=ref.halo, precision=ref.precision, data=out)


def assemble_column_system(
    fields: FieldSet, i: int, j: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Explicit tridiagonal system (a, b, c, d) for one column, before the
    sweep's normalization. Solving it and mapping x -> dtr_stage*(x - upos)
    must reproduce vadvc_reference for that column (the verification path
    used by the CLI)."""
    w = fields.wcon.view3d()
    us = fields.ustage.view3d()
    up = fields.upos.view3d()
    ut = fields.utens.view3d()
    uts = fields.utensstage.view3d()
    dtype = fields.wcon.dtype.type
    nz = fields.wcon.dims.nz
    quarter = dtype(0.25)
    nquarter = dtype(-0.25)
    D = dtype(fields.dtr_stage)
    bm = dtype(fields.bet_m)
    bp = dtype(fields.bet_p)

    a = np.zeros(nz, dtype=fields.wcon.dtype)
    b = np.zeros_like(a)
    c = np.zeros_like(a)
    rhs = np.zeros_like(a)

    gcv = quarter * (w[1, j, i + 1] + w[1, j, i])
    cs = gcv * bm
    c[0] = gcv * bp
    b[0] = D - c[0]
    corr = -cs * (us[1, j, i] - us[0, j, i])
    rhs[0] = D * up[0, j, i] + ut[0, j, i] + uts[0, j, i] + corr

    for k in range(1, nz - 1):
        gav = nquarter * (w[k, j, i + 1] + w[k, j, i])
        gcv = quarter * (w[k + 1, j, i + 1] + w[k + 1, j, i])
        as_ = gav * bm
        cs = gcv * bm
        a[k] = gav * bp
        c[k] = gcv * bp
        b[k] = D - a[k] - c[k]
        corr = (
            -as_ * (us[k - 1, j, i] - us[k, j, i])
            - cs * (us[k + 1, j, i] - us[k, j, i])
        )
        rhs[k] = D * up[k, j, i] + ut[k, j, i] + uts[k, j, i] + corr

    k = nz - 1
    gav = nquarter * (w[k, j, i + 1] + w[k, j, i])
    as_ = gav * bm
    a[k] = gav * bp
    b[k] = D - a[k]
    corr = -as_ * (us[k - 1, j, i] - us[k, j, i])
    rhs[k] = D * up[k, j, i] + ut[k, j, i] + uts[k, j, i] + corr
    return a, b, c, rhs


def _copy_block(v, out, i0, i1, j0, j1, k0, k1) -> None:
    out[k0:k1, j0:j1, i0:i1] = v[k0:k1, j0:j1, i0:i1]


def copy_reference(src: Grid3D) -> Grid3D:
    """Element-wise copy of the full domain."""
    _require_finite(src, "src")
    return Grid3D(
        dims=src.dims, halo=src.halo, precision=src.precision, data=src.data.copy()
    )


def thomas_solve(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    d: np.ndarray,
    n: Optional[int] = None,
) -> np.ndarray:
    """Solve the tridiagonal system a(k)x(k-1) + b(k)x(k) + c(k)x(k+1) = d(k).

    a[0] and c[n-1] are ignored. Raises SingularSystemError on a zero or
    tiny elimination pivot.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    c = np.asarray(c)
    d = np.asarray(d)
    if n is None:
        n = len(d)
    if n < 1 or any(len(v) != n for v in (a, b, c, d)):
        raise ConfigError(f"inconsistent system size n={n}")
    dtype = np.result_type(a, b, c, d)
    if dtype not in (np.float32, np.float64):
        dtype = np.dtype(np.float64)
    tol = PIVOT_TOL["f32"] if dtype == np.float32 else PIVOT_TOL["f64"]

    cp = np.zeros(n, dtype=dtype)
    xp = np.zeros(n, dtype=dtype)
    aa = a.astype(dtype, copy=False)
    bb = b.astype(dtype, copy=False)
    cc = c.astype(dtype, copy=False)
    dd = d.astype(dtype, copy=False)
    piv = bb[0]
    if abs(piv) < tol:
        raise SingularSystemError(f"pivot {piv!r} at row 0")
    if n > 1:
        cp[0] = cc[0] / piv
    xp[0] = dd[0] / piv
    for k in range(1, n):
        piv = bb[k] - aa[k] * cp[k - 1]
        if abs(piv) < tol:
            raise SingularSystemError(f"pivot {piv!r} at row {k}")
        if k < n - 1:
            cp[k] = cc[k] / piv
        xp[k] = (dd[k] - aa[k] * xp[k - 1]) / piv
    x = np.empty(n, dtype=dtype)
    x[n - 1] = xp[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = xp[k] - cp[k] * x[k + 1]
    return x


def _interior_counts(dims: Dims3) -> Tuple[int, int]:
    pts = max(0, dims.nx - 4) * max(0, dims.ny - 4)
    return pts, pts * dims.nz


def count_flops(kernel: str, dims: Dims3) -> FlopCount:
    """Exact floating-point operation counts of the reference kernels.

    Per hdiff interior point: 5 laplacians at 1 mul + 4 adds each, 4 flux
    subtractions, and the output line's 1 mul + 4 adds, so 6 muls + 28
    adds = 34. Per vadvc interior column the recurrence tallies to
    adds = 14*nz - 11, muls = 15*nz - 14, divs = nz + 1 (sign flips are
    free). copy performs no arithmetic.
    """
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}")
    if kernel == "copy":
        return FlopCount(0, 0, 0)
    cols, pts = _interior_counts(dims)
    if kernel == "hdiff":
        return FlopCount(adds=28 * pts, muls=6 * pts, divs=0)
    nz = dims.nz
    return FlopCount(
        adds=(14 * nz - 11) * cols,
        muls=(15 * nz - 14) * cols,
        divs=(nz + 1) * cols,
    )


def synthetic_fieldset(
    dims: Dims3,
    halo: Halo3 = Halo3(2, 2, 0),
    precision: str = "f64",
    seed: int = 0,
    wcon_scale: float = 0.1,
    dtr_stage: float = 3.0 / 20.0,
) -> FieldSet:
    """Deterministic pseudo-random inputs for tests, demos, and the CLI.

    wcon is scaled down (default to [0, 0.1)) so the forward-sweep pivots
    stay near dtr_stage and the system remains diagonally dominant;
    unscaled unit-range wcon can drive a pivot arbitrarily close to zero.
    """
    def grid(sub: int, scale: float = 1.0) -> Grid3D:
        g = make_grid(dims, halo, RandomInit(seed * 8 + sub), precision)
        if scale == 1.0:
            return g
        data = g.data * g.dtype.type(scale)
        return Grid3D(dims=dims, halo=halo, precision=precision, data=data)

    return FieldSet(
        wcon=grid(1, wcon_scale),
        ustage=grid(2),
        upos=grid(3),
        utens=grid(4),
        utensstage=grid(5),
        dtr_stage=dtr_stage,
    )
