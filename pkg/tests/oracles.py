"""Independent scalar oracles used by the test suite.

Everything here is deliberately written in a different style from the
library: pure-Python loops over nested lists, big-int modular arithmetic,
dense linear algebra. Agreement between these and the vectorized library
code is the point of the exercise.

The arithmetic helpers are generic over the element type so the same
kernel text runs on plain floats (value oracles) and on CountingFloat
(operation-count oracles).
"""

import numpy as np

MASK64 = (1 << 64) - 1


class CountingFloat:
    """Float wrapper that counts +, -, *, / on a shared tally.

    Comparisons, abs, and unary minus are free, matching the cost model
    the flop counter uses. Activate with `tally = OpTally()` and
    `CountingFloat.tally = tally`.
    """

    tally = None
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = float(v)

    @staticmethod
    def _val(x):
        return x.v if isinstance(x, CountingFloat) else float(x)

    def _count(self, slot):
        if CountingFloat.tally is not None:
            setattr(CountingFloat.tally, slot, getattr(CountingFloat.tally, slot) + 1)

    def __add__(self, o):
        self._count("adds")
        return CountingFloat(self.v + self._val(o))

    __radd__ = __add__

    def __sub__(self, o):
        self._count("adds")
        return CountingFloat(self.v - self._val(o))

    def __rsub__(self, o):
        self._count("adds")
        return CountingFloat(self._val(o) - self.v)

    def __mul__(self, o):
        self._count("muls")
        return CountingFloat(self.v * self._val(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        self._count("divs")
        return CountingFloat(self.v / self._val(o))

    def __rtruediv__(self, o):
        self._count("divs")
        return CountingFloat(self._val(o) / self.v)

    def __neg__(self):
        return CountingFloat(-self.v)

    def __abs__(self):
        return CountingFloat(abs(self.v))

    def __float__(self):
        return self.v

    def __lt__(self, o):
        return self.v < self._val(o)

    def __le__(self, o):
        return self.v <= self._val(o)

    def __eq__(self, o):
        return self.v == self._val(o)

    def __repr__(self):
        return f"CountingFloat({self.v!r})"


class OpTally:
    def __init__(self):
        self.adds = 0
        self.muls = 0
        self.divs = 0

    @property
    def total(self):
        return self.adds + self.muls + self.divs


def counted(fn, *args):
    """Run fn with CountingFloat tallying enabled; returns (result, tally)."""
    tally = OpTally()
    CountingFloat.tally = tally
    try:
        result = fn(*args)
    finally:
        CountingFloat.tally = None
    return result, tally


def splitmix64_bigint(seed, n):
    """Reference splitmix64 stream via big-int modular arithmetic."""
    out = []
    state = seed & MASK64
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z = z ^ (z >> 31)
        out.append(z)
    return out


def unit_floats_bigint(seed, n):
    """Top 53 bits of each splitmix64 value, scaled to [0, 1)."""
    return [u >> 11 for u in splitmix64_bigint(seed, n)], 1 << 53


# ---------------------------------------------------------------------------
# Scalar kernels over nested [k][j][i] lists
# ---------------------------------------------------------------------------


def scalar_laplacian(v, i, j, k):
    return (
        4.0 * v[k][j][i] - v[k][j][i - 1] - v[k][j][i + 1]
        - v[k][j - 1][i] - v[k][j + 1][i]
    )


def scalar_hdiff(v, nx, ny, nz, c1):
    """Point-at-a-time horizontal diffusion; recomputes each Laplacian it
    needs (five per output point, the canonical per-point tally). Returns
    a dict {(i,j,k): value} for the interior."""
    out = {}
    for k in range(nz):
        for j in range(2, ny - 2):
            for i in range(2, nx - 2):
                lap_c = scalar_laplacian(v, i, j, k)
                fx = scalar_laplacian(v, i + 1, j, k) - lap_c
                fxm = lap_c - scalar_laplacian(v, i - 1, j, k)
                fy = scalar_laplacian(v, i, j + 1, k) - lap_c
                fym = lap_c - scalar_laplacian(v, i, j - 1, k)
                out[(i, j, k)] = v[k][j][i] - c1 * ((fx - fxm) + (fy - fym))
    return out


def scalar_vadvc_column(w_c, w_ip, us, up, ut, uts, dtr_stage, bet_m, bet_p):
    """One column of the vertical-advection sweep. w_c and w_ip are the
    wcon columns at (i, j) and (i+1, j); all other arguments are columns
    at (i, j). Returns the output tendency column."""
    nz = len(us)
    D = dtr_stage
    bm = bet_m
    bp = bet_p
    ccol = [None] * nz
    dcol = [None] * nz

    gcv = 0.25 * (w_ip[1] + w_c[1])
    cs = gcv * bm
    ccol0 = gcv * bp
    bcol = D - ccol0
    corr = -cs * (us[1] - us[0])
    dcol[0] = (D * up[0] + ut[0] + uts[0] + corr) / bcol
    ccol[0] = ccol0 / bcol

    for k in range(1, nz - 1):
        gav = -0.25 * (w_ip[k] + w_c[k])
        gcv = 0.25 * (w_ip[k + 1] + w_c[k + 1])
        as_ = gav * bm
        cs = gcv * bm
        acol = gav * bp
        ccol_k = gcv * bp
        bcol = D - acol - ccol_k
        corr = -as_ * (us[k - 1] - us[k]) - cs * (us[k + 1] - us[k])
        d = D * up[k] + ut[k] + uts[k] + corr
        piv = bcol - ccol[k - 1] * acol
        div = 1.0 / piv
        ccol[k] = ccol_k * div
        dcol[k] = (d - dcol[k - 1] * acol) * div

    k = nz - 1
    gav = -0.25 * (w_ip[k] + w_c[k])
    as_ = gav * bm
    acol = gav * bp
    bcol = D - acol
    corr = -as_ * (us[k - 1] - us[k])
    d = D * up[k] + ut[k] + uts[k] + corr
    piv = bcol - ccol[k - 1] * acol
    div = 1.0 / piv
    dcol[k] = (d - dcol[k - 1] * acol) * div

    out = [None] * nz
    data_next = dcol[nz - 1]
    out[nz - 1] = D * (data_next - up[nz - 1])
    for k in range(nz - 2, -1, -1):
        data_k = dcol[k] - ccol[k] * data_next
        out[k] = D * (data_k - up[k])
        data_next = data_k
    return out


def vadvc_column_system(w_c, w_ip, us, up, ut, uts, dtr_stage, bet_m, bet_p):
    """The tridiagonal system (sub, diag, sup, rhs) that the sweep solves
    for one column, assembled directly from the discretization. Solving it
    for x and mapping dtr_stage*(x - up) must match the sweep output."""
    nz = len(us)
    D = dtr_stage
    sub = [0.0] * nz
    diag = [0.0] * nz
    sup = [0.0] * nz
    rhs = [0.0] * nz
    for k in range(nz):
        if k > 0:
            gav = -0.25 * (w_ip[k] + w_c[k])
            sub[k] = gav * bet_p
        if k < nz - 1:
            gcv = 0.25 * (w_ip[k + 1] + w_c[k + 1])
            sup[k] = gcv * bet_p
        diag[k] = D - sub[k] - sup[k]
        corr = 0.0
        if k > 0:
            gav = -0.25 * (w_ip[k] + w_c[k])
            corr = corr - (gav * bet_m) * (us[k - 1] - us[k])
        if k < nz - 1:
            gcv = 0.25 * (w_ip[k + 1] + w_c[k + 1])
            corr = corr - (gcv * bet_m) * (us[k + 1] - us[k])
        rhs[k] = D * up[k] + ut[k] + uts[k] + corr
    return sub, diag, sup, rhs


def dense_tridiag_solve(sub, diag, sup, rhs):
    """Solve the tridiagonal system with dense LAPACK, in float64."""
    n = len(diag)
    m = np.zeros((n, n), dtype=np.float64)
    for k in range(n):
        m[k, k] = float(diag[k])
        if k > 0:
            m[k, k - 1] = float(sub[k])
        if k < n - 1:
            m[k, k + 1] = float(sup[k])
    return np.linalg.solve(m, np.asarray([float(r) for r in rhs], dtype=np.float64))


def hdiff_flop_tally(nx, ny, nz):
    """Run the scalar hdiff kernel on CountingFloat inputs and return the
    observed operation tally."""
    vals = unit_floats_bigint(12345, nx * ny * nz)[0]
    v = [
        [
            [CountingFloat(vals[(k * ny + j) * nx + i] / 2.0 ** 53)
             for i in range(nx)]
            for j in range(ny)
        ]
        for k in range(nz)
    ]
    _, tally = counted(scalar_hdiff, v, nx, ny, nz, CountingFloat(0.025))
    return tally


def vadvc_column_flop_tally(nz):
    """Observed op tally of one scalar vadvc column sweep on nz levels."""
    vals = unit_floats_bigint(999, 7 * nz)[0]

    def col(base):
        return [CountingFloat(0.05 + vals[base + k] / 2.0 ** 55) for k in range(nz)]

    args = (col(0), col(nz), col(2 * nz), col(3 * nz), col(4 * nz), col(5 * nz))
    _, tally = counted(
        scalar_vadvc_column, *args,
        CountingFloat(0.15), CountingFloat(0.5), CountingFloat(0.5),
    )
    return tally


def grid_to_nested(view3d):
    """numpy (nz, ny, nx) array -> nested [k][j][i] lists of Python floats."""
    return [[[float(x) for x in row] for row in plane] for plane in view3d]
