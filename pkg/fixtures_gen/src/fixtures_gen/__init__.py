"""One-shot generation of STO-3G integral fixtures (FCIDUMP/JSON + metadata)."""

from .generate import generate
from .molecules import MOLECULES, MoleculeSpec

__all__ = ["MOLECULES", "MoleculeSpec", "generate"]
