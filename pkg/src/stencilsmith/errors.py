"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
verification and feasibility failures exit 1.
"""


class StencilsmithError(Exception):
    """Base class for all package errors."""


class ConfigError(StencilsmithError):
    """Invalid dimensions, parameters, flags, or config-file contents."""


class IndexingError(StencilsmithError):
    """Coordinate outside the grid."""


class FormatError(StencilsmithError):
    """Malformed grid container (bad magic, precision code, or payload)."""


class KernelInputError(StencilsmithError):
    """Kernel preconditions violated: halo too small, non-finite values,
    mismatched field shapes."""


class SingularSystemError(StencilsmithError):
    """Tridiagonal elimination hit a zero or tiny pivot."""


class PlanError(StencilsmithError):
    """Tile plan invalid or inconsistent with the grid it is applied to."""


class ExecutionError(StencilsmithError):
    """A tile worker failed; wraps the underlying exception."""


class ModelError(StencilsmithError):
    """Performance-model misuse (zero traffic, bad rates)."""


class CapacityError(ModelError):
    """Dedicated-channel budget exceeded: n_pe * channels_per_pe > channels_total."""


class NoFeasiblePointError(StencilsmithError):
    """No tile satisfies the footprint budget."""
