"""m-ovoids of symplectic polar spaces from cyclotomic partial difference sets."""

from .construct import ConstructionParams, OvoidCandidate, build_candidate, compute_d0
from .cyclotomy import CyclotomicSystem, ExponentSet, predicted_spectrum
from .errors import MovoidError
from .gf import Field, FieldElement, build_field
from .kernels import backend
from .symplectic import SymplecticSpace, make_space
from .verify import Certificate, certify, check_movoid

__version__ = "0.1.0"

__all__ = [
    "ConstructionParams", "OvoidCandidate", "build_candidate", "compute_d0",
    "CyclotomicSystem", "ExponentSet", "predicted_spectrum", "MovoidError",
    "Field", "FieldElement", "build_field", "backend", "SymplecticSpace", "make_space",
    "Certificate", "certify", "check_movoid",
]
