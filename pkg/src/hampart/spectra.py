"""Sparse operator realizations, eigensolvers, symmetries and sectors."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import (
    ConvergenceError,
    EmptySectorError,
    ResourceLimitError,
    ValidationError,
)
from .pauli import PauliSum, PauliTerm, jordan_wigner, multiply_sums
from .tensors import FermionOperator

QUBIT_CAP = 16
DENSE_DIM = 1024
_EIG_SEED = 20240817


@dataclass
class SparseOp:
    """Sparse complex matrix on the 2**n_qubits computational space."""

    matrix: sp.csr_matrix
    n_qubits: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return float(np.abs(d.data).max()) if d.nnz else 0.0

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def to_sparse(h: PauliSum, cap: int = QUBIT_CAP) -> SparseOp:
    """Exact sparse matrix of a Pauli sum (identity coefficient included)."""
    if h.n_qubits > cap:
        raise ResourceLimitError(
            f"{h.n_qubits} qubits exceeds the {cap}-qubit cap for explicit "
            "matrices; project onto a symmetry sector instead"
        )
    dim = 1 << h.n_qubits
    if h.n_terms == 0:
        return SparseOp(sp.csr_matrix((dim, dim), dtype=np.complex128), h.n_qubits)
    rows, cols, vals = kernels.pauli_coo_entries(h.xs, h.zs, h.coeffs, h.n_qubits)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    return SparseOp(mat, h.n_qubits)


def _as_matrix(a):
    if isinstance(a, SparseOp):
        return a.matrix
    return a


def _deterministic_v0(dim: int) -> np.ndarray:
    rng = np.random.default_rng(_EIG_SEED)
    v0 = rng.standard_normal(dim)
    return v0 / np.linalg.norm(v0)


def _eigsh_extreme(mat, which: str) -> float:
    """One extreme eigenvalue via implicitly restarted Lanczos.

    Restart policy: ncv = min(dim - 1, 64) Lanczos vectors, up to 20000
    restarted iterations at tolerance 1e-10, with a fixed seeded start
    vector for run-to-run determinism.  Non-convergence raises
    ConvergenceError carrying the residual estimate.
    """
    dim = mat.shape[0]
    try:
        vals = spla.eigsh(
            mat,
            k=1,
            which=which,
            return_eigenvectors=False,
            v0=_deterministic_v0(dim),
            ncv=min(dim - 1, 64),
            maxiter=20000,
            tol=1e-10,
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"Lanczos failed to converge for which={which!r}",
            residual=getattr(exc, "eigenvalues", None),
        ) from exc
    return float(vals[0].real)


def extreme_eigenvalues(a, tol_dense_dim: int = DENSE_DIM) -> tuple[float, float]:
    """(E_min, E_max) of a Hermitian operator.

    Dense solve at dimension <= ``tol_dense_dim``; Lanczos above (see
    :func:`_eigsh_extreme` for the restart policy).
    """
    mat = _as_matrix(a)
    dim = mat.shape[0]
    if dim <= tol_dense_dim:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
        w = np.linalg.eigvalsh(dense)
        return float(w[0]), float(w[-1])
    return _eigsh_extreme(mat, "SA"), _eigsh_extreme(mat, "LA")


def spectral_norm(a, hermitian: bool | None = None) -> float:
    """Operator 2-norm; Hermitian operators reuse extreme eigenvalues."""
    mat = _as_matrix(a)
    if hermitian is None:
        if sp.issparse(mat):
            d = mat - mat.getH()
            defect = float(np.abs(d.data).max()) if d.nnz else 0.0
            scale = float(np.abs(mat.data).max()) if mat.nnz else 0.0
        else:
            arr = np.asarray(mat)
            defect = float(np.abs(arr - arr.conj().T).max())
            scale = float(np.abs(arr).max(initial=0.0))
        hermitian = defect <= 1e-12 * max(1.0, scale)
    if hermitian:
        lo, hi = extreme_eigenvalues(mat)
        return max(abs(lo), abs(hi))
    dim = mat.shape[0]
    if dim <= DENSE_DIM:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
        return float(np.linalg.svd(dense, compute_uv=False)[0])
    s = spla.svds(mat, k=1, v0=_deterministic_v0(dim), return_singular_vectors=False)
    return float(s[0])


def ground_state(a) -> tuple[float, np.ndarray]:
    """(E_0, normalized eigenvector); deterministic start vector."""
    mat = _as_matrix(a)
    dim = mat.shape[0]
    if dim <= DENSE_DIM:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
        w, v = np.linalg.eigh(dense)
        return float(w[0]), v[:, 0]
    try:
        w, v = spla.eigsh(
            mat,
            k=1,
            which="SA",
            v0=_deterministic_v0(dim),
            ncv=min(dim - 1, 64),
            maxiter=20000,
            tol=1e-10,
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(
            "Lanczos failed to find the ground state",
            residual=getattr(exc, "eigenvalues", None),
        ) from exc
    return float(w[0]), v[:, 0]


def commutator_norm(a, b) -> float:
    """|| [A, B] ||_2 for Hermitian A, B via the Hermitization i[A, B]."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValidationError("dimension mismatch in commutator")
    dim = ma.shape[0]
    if dim <= DENSE_DIM:
        da = ma.toarray() if sp.issparse(ma) else np.asarray(ma)
        db = mb.toarray() if sp.issparse(mb) else np.asarray(mb)
        comm = 1j * (da @ db - db @ da)
        w = np.linalg.eigvalsh(comm)
        return float(max(abs(w[0]), abs(w[-1])))

    def matvec(v):
        return 1j * (ma @ (mb @ v) - mb @ (ma @ v))

    op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=np.complex128)
    try:
        vals = spla.eigsh(
            op,
            k=1,
            which="LM",
            return_eigenvectors=False,
            v0=_deterministic_v0(dim),
            ncv=min(dim - 1, 24),
            maxiter=20000,
            tol=1e-9,
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(
            "Lanczos failed on the Hermitized commutator",
            residual=getattr(exc, "eigenvalues", None),
        ) from exc
    return float(abs(vals[0]))


# ---------------------------------------------------------------------------
# spin symmetry operators


def _number_pauli_sum(n_spin: int) -> PauliSum:
    terms = [PauliTerm(0, 0, 0.5 * n_spin, n_spin)]
    terms += [PauliTerm(0, 1 << p, -0.5, n_spin) for p in range(n_spin)]
    return PauliSum.from_terms(terms)


def _sz_pauli_sum(n_spin: int) -> PauliSum:
    terms = []
    for p in range(0, n_spin, 2):
        terms.append(PauliTerm(0, 1 << p, -0.25, n_spin))
        terms.append(PauliTerm(0, 1 << (p + 1), +0.25, n_spin))
    return PauliSum.from_terms(terms, n_qubits=n_spin)


def spin_squared_pauli_sum(n_spin: int) -> PauliSum:
    """S^2 = S- S+ + S_z (S_z + 1) over interleaved spin orbitals."""
    raising = FermionOperator(
        [(((2 * p, 1), (2 * p + 1, 0)), 1.0) for p in range(n_spin // 2)]
    )
    lowering = FermionOperator(
        [(((2 * p + 1, 1), (2 * p, 0)), 1.0) for p in range(n_spin // 2)]
    )
    s_plus = jordan_wigner(raising, n_qubits=n_spin)
    s_minus = jordan_wigner(lowering, n_qubits=n_spin)
    sz = _sz_pauli_sum(n_spin)
    return multiply_sums(s_minus, s_plus) + multiply_sums(sz, sz) + sz


def build_spin_operators(n_spin: int, cap: int = QUBIT_CAP):
    """(N, S_z, S^2) as sparse operators in the occupation basis."""
    n_op = to_sparse(_number_pauli_sum(n_spin), cap=cap)
    sz_op = to_sparse(_sz_pauli_sum(n_spin), cap=cap)
    s2_op = to_sparse(spin_squared_pauli_sum(n_spin), cap=cap)
    return n_op, sz_op, s2_op


# ---------------------------------------------------------------------------
# single-Pauli symmetry discovery


def _gf2_kernel_basis(rows: list[int], n_vars: int) -> list[int]:
    pivots: dict[int, int] = {}
    for row in rows:
        cur = row
        for col, prow in pivots.items():
            if (cur >> col) & 1:
                cur ^= prow
        if cur:
            low = (cur & -cur).bit_length() - 1
            pivots[low] = cur
    cols = sorted(pivots)
    for i, c in enumerate(cols):
        for c2 in cols[i + 1 :]:
            if (pivots[c] >> c2) & 1:
                pivots[c] ^= pivots[c2]
    basis = []
    for free in range(n_vars):
        if free in pivots:
            continue
        vec = 1 << free
        for c in cols:
            if (pivots[c] >> free) & 1:
                vec |= 1 << c
        basis.append(vec)
    return basis


def find_pauli_symmetries(fragments, closure_cap: int = 12) -> list[PauliTerm]:
    """Single Pauli products commuting with every term of every fragment.

    Solves the stacked mod-2 symplectic constraint system; the kernel basis
    is closed into the full group (identity excluded) when its dimension is
    at most ``closure_cap``, so physically named strings (global parity,
    per-spin parity) appear explicitly.  Every returned operator is
    re-verified against all fragment terms exactly.
    """
    sums = _fragment_sums(fragments)
    if not sums:
        raise ValidationError("no fragments supplied")
    n = sums[0].n_qubits
    for s in sums:
        if s.n_qubits != n:
            raise ValidationError("fragments disagree on qubit count")
    rows = set()
    for s in sums:
        for x, z in zip(s.xs, s.zs):
            if x == 0 and z == 0:
                continue
            rows.add((int(z) << 0) | (int(x) << n))
    basis = _gf2_kernel_basis(sorted(rows), 2 * n)
    if len(basis) <= closure_cap:
        group = {0}
        for vec in basis:
            group |= {g ^ vec for g in group}
        group.discard(0)
        members = sorted(group)
    else:
        members = sorted(v for v in basis if v)
    mask = (1 << n) - 1
    out = []
    for vec in members:
        x = vec & mask
        z = vec >> n
        term = PauliTerm(x, z, 1.0, n)
        for s in sums:
            table = kernels.commutation_table_cross(
                np.array([x], dtype=np.uint64),
                np.array([z], dtype=np.uint64),
                s.xs,
                s.zs,
            )
            if not bool(table.all()):
                raise ValidationError(
                    f"kernel produced a non-commuting candidate {term.string()}"
                )
        out.append(term)
    return out


def _fragment_sums(fragments) -> list[PauliSum]:
    if isinstance(fragments, PauliSum):
        return [fragments]
    if hasattr(fragments, "groups"):  # QubitPartition
        return [g.to_pauli_sum() for g in fragments.groups]
    return list(fragments)


def independent_symmetries(symmetries: list[PauliTerm]) -> list[int]:
    """Indices of a maximal GF(2)-independent subset (greedy, order kept)."""
    pivots: dict[int, int] = {}
    keep = []
    for idx, term in enumerate(symmetries):
        vec = term.x | (term.z << term.n_qubits)
        cur = vec
        for col, row in pivots.items():
            if (cur >> col) & 1:
                cur ^= row
        if cur:
            pivots[(cur & -cur).bit_length() - 1] = cur
            keep.append(idx)
    return keep


# ---------------------------------------------------------------------------
# symmetry sectors


@dataclass
class SymmetrySector:
    """Orthonormal basis of a joint symmetry eigenspace."""

    n_qubits: int
    labels: dict
    basis: np.ndarray  # (2**n_qubits, dim_sector) dense columns
    kind: str = "qubit"
    extra: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthonormality_defect(self) -> float:
        gram = self.basis.conj().T @ self.basis
        return float(np.abs(gram - np.eye(self.dim)).max())


def _apply_pauli_to_columns(term: PauliTerm, mat: np.ndarray) -> np.ndarray:
    dim = mat.shape[0]
    basis = np.arange(dim, dtype=np.uint64)
    x = np.uint64(term.x)
    z = np.uint64(term.z)
    phase = complex(kernels.term_matrix_phase(x, z))
    signs = 1.0 - 2.0 * (kernels.popcount(basis & z) & np.uint64(1)).astype(np.float64)
    out = np.zeros_like(mat)
    rows = (basis ^ x).astype(np.int64)
    out[rows, :] = (term.coeff * phase) * (signs[:, None] * mat)
    return out


def _pauli_eigenbasis(term: PauliTerm, zeta: int) -> np.ndarray:
    """Closed-form +-1 eigenbasis columns of a single Pauli operator."""
    n = term.n_qubits
    dim = 1 << n
    basis = np.arange(dim, dtype=np.uint64)
    x = np.uint64(term.x)
    z = np.uint64(term.z)
    phase = complex(kernels.term_matrix_phase(x, z))
    signs = 1.0 - 2.0 * (kernels.popcount(basis & z) & np.uint64(1)).astype(np.float64)
    amp = phase * signs  # P |j> = amp_j |j ^ x>
    if term.x == 0:
        cols = np.flatnonzero(np.isclose(amp.real, zeta))
        out = np.zeros((dim, len(cols)), dtype=np.complex128)
        out[cols, np.arange(len(cols))] = 1.0
        return out
    partner = (basis ^ x).astype(np.int64)
    firsts = np.flatnonzero(partner > basis.astype(np.int64))
    out = np.zeros((dim, len(firsts)), dtype=np.complex128)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for col, j in enumerate(firsts):
        out[j, col] = inv_sqrt2
        out[partner[j], col] = zeta * amp[j] * inv_sqrt2
    return out


def sector_basis(
    symmetries: list[PauliTerm], labels, n_qubits: int
) -> SymmetrySector:
    """Joint eigenspace of commuting Pauli symmetries with labels +-1.

    Built as iterated projector restrictions with rank-revealing
    orthonormal splits (eigendecomposition of the restricted involution).
    """
    labels = list(labels)
    if len(labels) != len(symmetries):
        raise ValidationError("label count must match symmetry count")
    for z in labels:
        if z not in (+1, -1):
            raise ValidationError(f"qubit sector labels must be +-1, got {z}")
    for a in symmetries:
        for b in symmetries:
            if not (
                kernels.commutation_table_cross(
                    np.array([a.x], dtype=np.uint64),
                    np.array([a.z], dtype=np.uint64),
                    np.array([b.x], dtype=np.uint64),
                    np.array([b.z], dtype=np.uint64),
                ).all()
            ):
                raise ValidationError("sector symmetries must mutually commute")
    if not symmetries:
        raise ValidationError("at least one symmetry is required")
    keep_idx = independent_symmetries(symmetries)
    work = [(symmetries[i], labels[i]) for i in keep_idx]

    # Diagonal (pure-Z) symmetries select computational basis states outright.
    diagonal = [(t, z) for t, z in work if t.x == 0]
    general = [(t, z) for t, z in work if t.x != 0]
    basis = None
    support = None
    if diagonal:
        dim = 1 << n_qubits
        states = np.arange(dim, dtype=np.uint64)
        mask = np.ones(dim, dtype=bool)
        for t, zeta in diagonal:
            signs = 1.0 - 2.0 * (
                kernels.popcount(states & np.uint64(t.z)) & np.uint64(1)
            ).astype(np.float64)
            amp = complex(kernels.term_matrix_phase(np.uint64(t.x), np.uint64(t.z)))
            mask &= np.isclose(np.real(amp) * signs, zeta)
        support = np.flatnonzero(mask)
        if support.size == 0:
            raise EmptySectorError(
                f"no states with labels {labels} for the given symmetries"
            )
        if not general:
            basis = None  # pure selection; materialized lazily below
        else:
            basis = np.zeros((dim, support.size), dtype=np.complex128)
            basis[support, np.arange(support.size)] = 1.0
    for term, zeta in general:
        if basis is None:
            basis = _pauli_eigenbasis(term, zeta)
        else:
            qb = _apply_pauli_to_columns(term, basis)
            restricted = basis.conj().T @ qb
            w, v = np.linalg.eigh(0.5 * (restricted + restricted.conj().T))
            sel = np.flatnonzero(np.abs(w - zeta) < 1e-8)
            basis = basis @ v[:, sel]
        support = None
        if basis.shape[1] == 0:
            raise EmptySectorError(
                f"no states with labels {labels} for the given symmetries"
            )
    if basis is None and support is None:
        raise ValidationError("at least one symmetry is required")
    if basis is None:
        dim = 1 << n_qubits
        basis = np.zeros((dim, support.size), dtype=np.complex128)
        basis[support, np.arange(support.size)] = 1.0
    # Symmetries dependent on the processed subset must still agree with the
    # requested labels, else the joint sector is empty.
    kept = set(keep_idx)
    for idx, (term, zeta) in enumerate(zip(symmetries, labels)):
        if idx in kept:
            continue
        qb = _apply_pauli_to_columns(term, basis)
        if np.abs(qb - zeta * basis).max() > 1e-8:
            raise EmptySectorError(
                f"label {zeta} for {term.string()} contradicts the other labels"
            )
    sec = SymmetrySector(
        n_qubits=n_qubits,
        labels={s.string(): z for s, z in zip(symmetries, labels)},
        basis=basis,
        kind="qubit",
    )
    if support is not None:
        sec.extra["support_rows"] = support
    return sec


def project(a, sector: SymmetrySector, verify: bool = True) -> np.ndarray:
    """B^H A B on the sector basis; warns when A leaks out of the sector."""
    mat = _as_matrix(a)
    if mat.shape[0] != sector.basis.shape[0]:
        raise ValidationError(
            f"operator dim {mat.shape[0]} != sector space {sector.basis.shape[0]}"
        )
    rows = sector.extra.get("support_rows")
    if rows is not None and not verify:
        # Pure basis-state selection: projection is a submatrix.
        if sp.issparse(mat):
            return np.asarray(mat[rows, :][:, rows].todense())
        return np.asarray(mat)[np.ix_(rows, rows)]
    ab = mat @ sector.basis
    small = sector.basis.conj().T @ ab
    if verify:
        leak = ab - sector.basis @ small
        leak_norm = float(np.abs(leak).max())
        scale = max(1.0, float(np.abs(small).max()))
        if leak_norm > 1e-8 * scale:
            warnings.warn(
                f"operator does not preserve the sector (leak {leak_norm:.3e}); "
                "projected norms are not exact sector norms",
                stacklevel=2,
            )
    return small
