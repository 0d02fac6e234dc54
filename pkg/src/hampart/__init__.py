"""Hamiltonian partitioning into fast-forwardable fragments.

Library + CLI for decomposing second-quantized electronic Hamiltonians
into exactly solvable fermionic or commuting-Pauli fragments, computing
first-order Trotter error bounds (plain and symmetry projected), spectral
range descriptors, rotation counts and fault-tolerant T-gate estimates.
"""

from .fermionic import (
    FermionFragment,
    FermionPartition,
    fermionic_rotation_count,
    fold_one_body,
    fro_decompose,
    gfro_decompose,
    lcu_postprocess,
    lr_decompose,
    reconstruct,
    sd_gfro_decompose,
)
from .grouping import (
    PauliGroup,
    QubitPartition,
    build_commutation_graph,
    group_lf,
    group_si,
    qubit_rotation_count,
)
from .metrics import (
    TrotterReport,
    alpha,
    alpha_ordered,
    alpha_projected,
    build_report,
    l1_bound,
    second_order_estimate,
    spectral_descriptors,
    tgate_count,
)
from .pauli import (
    PauliSum,
    PauliTerm,
    bravyi_kitaev,
    jordan_wigner,
    pauli_commutes,
    pauli_multiply,
)
from .rotations import apply_orbital_rotation, rotation_matrix, rotation_to_angles
from .spectra import (
    SparseOp,
    SymmetrySector,
    build_spin_operators,
    extreme_eigenvalues,
    find_pauli_symmetries,
    project,
    sector_basis,
    spectral_norm,
    to_sparse,
)
from .tensors import (
    FermionOperator,
    MolecularTensors,
    expand_to_spin_orbitals,
    load_fcidump,
    load_json,
    save_json,
    validate,
)

__all__ = [
    "FermionFragment",
    "FermionOperator",
    "FermionPartition",
    "MolecularTensors",
    "PauliGroup",
    "PauliSum",
    "PauliTerm",
    "QubitPartition",
    "SparseOp",
    "SymmetrySector",
    "TrotterReport",
    "alpha",
    "alpha_ordered",
    "alpha_projected",
    "apply_orbital_rotation",
    "bravyi_kitaev",
    "build_commutation_graph",
    "build_report",
    "build_spin_operators",
    "expand_to_spin_orbitals",
    "extreme_eigenvalues",
    "fermionic_rotation_count",
    "find_pauli_symmetries",
    "fold_one_body",
    "fro_decompose",
    "gfro_decompose",
    "group_lf",
    "group_si",
    "jordan_wigner",
    "l1_bound",
    "lcu_postprocess",
    "load_fcidump",
    "load_json",
    "lr_decompose",
    "pauli_commutes",
    "pauli_multiply",
    "project",
    "qubit_rotation_count",
    "reconstruct",
    "rotation_matrix",
    "rotation_to_angles",
    "save_json",
    "sd_gfro_decompose",
    "second_order_estimate",
    "sector_basis",
    "spectral_descriptors",
    "spectral_norm",
    "tgate_count",
    "to_sparse",
    "validate",
]

__version__ = "0.1.0"
