"""Cut finite element Stokes solver with ghost-penalty stabilization."""

from ._core import (
    ContractViolation,
    StructuralError,
    __version__,
    condition,
    convergence,
    geometry_summary,
    patch_tests,
)

__all__ = [
    "ContractViolation",
    "StructuralError",
    "__version__",
    "condition",
    "convergence",
    "geometry_summary",
    "patch_tests",
]
