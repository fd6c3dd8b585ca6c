"""Vector-valued Siegel modular forms for the Weil representation of an even lattice."""

from .lattice import EvenLattice, build_lattice, discriminant_group
from .metaplectic import MpElement
from .weilrep import WeilRep

__version__ = "0.1.0"

__all__ = ["EvenLattice", "MpElement", "WeilRep", "build_lattice", "discriminant_group", "__version__"]
