"""Universality analysis and encoded gate synthesis for anisotropic exchange qubits."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AnisoError,
    CapabilityError,
    ContractError,
    DimensionError,
    LeakageError,
    ResourceError,
    SpecParseError,
)
from .pauli import OperatorSum, PauliString, bracket, hs_inner, product  # noqa: E402

__all__ = [
    "__version__",
    "AnisoError", "CapabilityError", "ContractError", "DimensionError", "LeakageError",
    "ResourceError", "SpecParseError",
    "OperatorSum", "PauliString", "bracket", "hs_inner", "product",
]
