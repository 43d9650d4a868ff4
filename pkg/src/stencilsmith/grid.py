"""3D grids with halos, deterministic initialization, container I/O, and
bitwise comparison.

Layout: the flat data array stores i fastest, then j, then k, so
``index(i, j, k) = k*nx*ny + j*nx + i`` and the 3-D view has shape
``(nz, ny, nx)``. Dimensions always include the halo. Grids are immutable
after construction; kernels allocate fresh output buffers.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Iterator, Optional, Tuple, Union

import numpy as np

from .errors import ConfigError, FormatError, IndexingError

_DTYPES = {"f32": np.dtype("<f4"), "f64": np.dtype("<f8")}
_PRECISION_CODES = {"f32": 0, "f64": 1}
_CODE_PRECISIONS = {v: k for k, v in _PRECISION_CODES.items()}

# Container header: magic | precision u8 | 3 reserved zero bytes |
# nx, ny, nz u64 | halo.i, halo.j, halo.k u32, all little-endian.
_MAGIC = b"NSG1"
_HEADER = struct.Struct("<4sB3xQQQIII")


@dataclass(frozen=True)
class Dims3:
    """Grid extents per axis, halo included."""

    nx: int
    ny: int
    nz: int

    def __post_init__(self) -> None:
        for name, n in (("nx", self.nx), ("ny", self.ny), ("nz", self.nz)):
            if not isinstance(n, int) or n < 1:
                raise ConfigError(f"{name} must be a positive integer, got {n!r}")

    @property
    def volume(self) -> int:
        return self.nx * self.ny * self.nz

    def __str__(self) -> str:
        return f"{self.nx}x{self.ny}x{self.nz}"


@dataclass(frozen=True)
class Halo3:
    """Halo widths per axis (applied symmetrically on both sides)."""

    i: int = 0
    j: int = 0
    k: int = 0

    def __post_init__(self) -> None:
        if min(self.i, self.j, self.k) < 0:
            raise ConfigError(f"halo widths must be >= 0, got {self}")


def index(i: int, j: int, k: int, dims: Dims3) -> int:
    """Flat offset of point (i, j, k); i is the fastest-varying axis."""
    if not (0 <= i < dims.nx and 0 <= j < dims.ny and 0 <= k < dims.nz):
        raise IndexingError(f"({i},{j},{k}) outside dims {dims}")
    return k * dims.nx * dims.ny + j * dims.nx + i


# ---------------------------------------------------------------------------
# Deterministic pseudo-random generation (splitmix64).
#
# Chosen because it is trivial to re-implement bit-exactly anywhere: the
# state advances by the 64-bit golden-ratio increment and each output is a
# two-stage xor-multiply mix of the state. Values map to [0, 1) as the top
# 53 bits over 2^53, which is exact in f64.
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_SM64_INC = 0x9E3779B97F4A7C15
_SM64_MIX1 = 0xBF58476D1CE4E5B9
_SM64_MIX2 = 0x94D049BB133111EB


def splitmix64(seed: int) -> Iterator[int]:
    """Yields the raw 64-bit splitmix64 output stream for ``seed``."""
    state = seed & _MASK64
    while True:
        state = (state + _SM64_INC) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * _SM64_MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _SM64_MIX2) & _MASK64
        yield z ^ (z >> 31)


def random_unit_floats(seed: int, n: int) -> np.ndarray:
    """First ``n`` splitmix64 outputs mapped to [0, 1), as float64.

    Vectorized: the generator's n-th state is seed + n*increment mod 2^64,
    so the whole stream is computed with wrapping uint64 numpy arithmetic.
    Bit-identical to iterating :func:`splitmix64`.
    """
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    steps = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + steps * np.uint64(_SM64_INC)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM64_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM64_MIX2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


# ---------------------------------------------------------------------------
# Initialization specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantInit:
    value: float = 0.0


@dataclass(frozen=True)
class LinearInit:
    """f(i, j, k) = a*i + b*j + c*k, gradients per axis."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0


@dataclass(frozen=True)
class ImpulseInit:
    """Zero everywhere except ``value`` at (i, j, k)."""

    i: int
    j: int
    k: int
    value: float = 1.0


@dataclass(frozen=True)
class RandomInit:
    """Points filled with splitmix64 unit floats in layout order."""

    seed: int = 0


InitSpec = Union[ConstantInit, LinearInit, ImpulseInit, RandomInit]


@dataclass(frozen=True)
class Grid3D:
    """An immutable 3D scalar field.

    ``data`` is the flat array of length ``dims.volume`` (halo included) in
    layout order. The array is marked read-only on construction; outputs of
    kernels are new grids wrapping freshly written buffers.
    """

    dims: Dims3
    halo: Halo3
    precision: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.precision not in _DTYPES:
            raise ConfigError(f"precision must be f32 or f64, got {self.precision!r}")
        want = _DTYPES[self.precision]
        arr = np.ascontiguousarray(self.data, dtype=want).reshape(-1)
        if arr.size != self.dims.volume:
            raise ConfigError(
                f"data length {arr.size} != dims volume {self.dims.volume}"
            )
        if 2 * self.halo.i >= self.dims.nx or 2 * self.halo.j >= self.dims.ny:
            raise ConfigError(f"halo {self.halo} leaves no interior in dims {self.dims}")
        if 2 * self.halo.k >= self.dims.nz:
            raise ConfigError(f"halo {self.halo} leaves no interior in dims {self.dims}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def dtype(self) -> np.dtype:
        return _DTYPES[self.precision]

    def view3d(self) -> np.ndarray:
        """Read-only view shaped (nz, ny, nx); axis order (k, j, i)."""
        return self.data.reshape(self.dims.nz, self.dims.ny, self.dims.nx)

    def at(self, i: int, j: int, k: int) -> float:
        return self.data[index(i, j, k, self.dims)]

    def interior_slices(self) -> Tuple[slice, slice, slice]:
        """(k, j, i) slices of the grid's own interior per its halo widths."""
        d, h = self.dims, self.halo
        return (
            slice(h.k, d.nz - h.k),
            slice(h.j, d.ny - h.j),
            slice(h.i, d.nx - h.i),
        )


def make_grid(
    dims: Dims3,
    halo: Halo3 = Halo3(),
    init: InitSpec = ConstantInit(0.0),
    precision: str = "f64",
) -> Grid3D:
    """Allocate and fill a grid; every point (halo included) follows ``init``."""
    if precision not in _DTYPES:
        raise ConfigError(f"precision must be f32 or f64, got {precision!r}")
    dtype = _DTYPES[precision]
    if isinstance(init, ConstantInit):
        data = np.full(dims.volume, init.value, dtype=dtype)
    elif isinstance(init, LinearInit):
        kk, jj, ii = np.meshgrid(
            np.arange(dims.nz), np.arange(dims.ny), np.arange(dims.nx), indexing="ij"
        )
        vals = (
            dtype.type(init.a) * ii.astype(dtype)
            + dtype.type(init.b) * jj.astype(dtype)
            + dtype.type(init.c) * kk.astype(dtype)
        )
        data = vals.reshape(-1)
    elif isinstance(init, ImpulseInit):
        data = np.zeros(dims.volume, dtype=dtype)
        data[index(init.i, init.j, init.k, dims)] = dtype.type(init.value)
    elif isinstance(init, RandomInit):
        # Generate in f64, then cast; the f32 value is the rounded f64 value.
        data = random_unit_floats(init.seed, dims.volume).astype(dtype)
    else:
        raise ConfigError(f"unknown init spec {init!r}")
    return Grid3D(dims=dims, halo=halo, precision=precision, data=data)


# ---------------------------------------------------------------------------
# Container I/O
# ---------------------------------------------------------------------------


def write_grid(grid: Grid3D, sink: BinaryIO) -> int:
    """Serialize ``grid`` to ``sink``; returns the number of bytes written."""
    header = _HEADER.pack(
        _MAGIC,
        _PRECISION_CODES[grid.precision],
        grid.dims.nx,
        grid.dims.ny,
        grid.dims.nz,
        grid.halo.i,
        grid.halo.j,
        grid.halo.k,
    )
    payload = np.ascontiguousarray(grid.data, dtype=grid.dtype).tobytes()
    sink.write(header)
    sink.write(payload)
    return len(header) + len(payload)


def read_grid(source: BinaryIO) -> Grid3D:
    """Parse a grid container; bitwise inverse of :func:`write_grid`."""
    raw = source.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise FormatError(f"truncated header: {len(raw)} bytes")
    magic, code, nx, ny, nz, hi, hj, hk = _HEADER.unpack(raw)
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if code not in _CODE_PRECISIONS:
        raise FormatError(f"unknown precision code {code}")
    precision = _CODE_PRECISIONS[code]
    dims = Dims3(int(nx), int(ny), int(nz))
    dtype = _DTYPES[precision]
    expect = dims.volume * dtype.itemsize
    payload = source.read(expect)
    if len(payload) != expect:
        raise FormatError(
            f"payload is {len(payload)} bytes, dims {dims} require {expect}"
        )
    data = np.frombuffer(payload, dtype=dtype)
    return Grid3D(
        dims=dims, halo=Halo3(int(hi), int(hj), int(hk)), precision=precision, data=data
    )


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompareResult:
    max_abs_diff: float
    max_ulp_diff: int
    first_mismatch_coord: Optional[Tuple[int, int, int]]


def _ordered_keys(arr: np.ndarray) -> np.ndarray:
    """Map IEEE bit patterns to uint keys that sort like the floats.

    Adjacent representable values differ by exactly 1; +0.0 and -0.0 are
    distinct keys (1 apart), which keeps max_ulp_diff = 0 equivalent to
    bitwise equality.
    """
    if arr.dtype == np.float32:
        u = arr.view(np.uint32)
        sign = np.uint32(0x80000000)
        full = np.uint32(0xFFFFFFFF)
    else:
        u = arr.view(np.uint64)
        sign = np.uint64(0x8000000000000000)
        full = np.uint64(0xFFFFFFFFFFFFFFFF)
    negative = (u & sign) != 0
    return np.where(negative, full - u, u | sign).astype(np.uint64)


def compare(a: Grid3D, b: Grid3D, region: str = "all") -> CompareResult:
    """Compare two grids over ``region`` ("all" or "interior").

    NaNs are not expected here (kernels reject them on input); comparison
    assumes finite values.
    """
    if a.dims != b.dims or a.precision != b.precision:
        raise ConfigError(
            f"grids differ in shape or precision: {a.dims}/{a.precision} "
            f"vs {b.dims}/{b.precision}"
        )
    if region == "all":
        sl = (slice(None), slice(None), slice(None))
    elif region == "interior":
        if a.halo != b.halo:
            raise ConfigError(f"interior compare needs equal halos, {a.halo} vs {b.halo}")
        sl = a.interior_slices()
    else:
        raise ConfigError(f"region must be 'all' or 'interior', got {region!r}")

    va = a.view3d()[sl]
    vb = b.view3d()[sl]
    ka = _ordered_keys(np.ascontiguousarray(va))
    kb = _ordered_keys(np.ascontiguousarray(vb))
    ulp = np.where(ka >= kb, ka - kb, kb - ka)
    max_ulp = int(ulp.max()) if ulp.size else 0
    if max_ulp == 0:
        return CompareResult(0.0, 0, None)

    diff = np.abs(va.astype(np.float64) - vb.astype(np.float64))
    flat = int(np.argmax(ulp.reshape(-1) > 0))
    kk, jj, ii = np.unravel_index(flat, va.shape)
    # Back to absolute grid coordinates.
    k0 = sl[0].start or 0
    j0 = sl[1].start or 0
    i0 = sl[2].start or 0
    coord = (int(ii) + i0, int(jj) + j0, int(kk) + k0)
    return CompareResult(float(diff.max()), max_ulp, coord)
