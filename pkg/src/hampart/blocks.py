"""Occupation-sector realization of fermionic fragments.

Fragments built from same-spin orbital rotations conserve the number of
up and of down electrons separately, so on the Fock space they are block
diagonal over (n_up, n_down) sectors.  Within one sector the rotation acts
as the matrix of Slater-determinant overlaps, i.e. a Kronecker product of
minor-determinant tables of the two spin blocks, which keeps every
operation dense but tiny (the largest LiH sector is 400-dimensional versus
4096 for the full space).

Spectral norms, commutator norms and projections computed here equal the
full-space quantities exactly; they are just evaluated blockwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import EmptySectorError, ValidationError
from .fermionic import FermionFragment, FermionPartition
from .rotations import spin_blocks


@lru_cache(maxsize=16)
def _subsets(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(m), k))


@dataclass(frozen=True)
class SectorTable:
    """Enumeration of (n_up, n_down) determinant sectors."""

    n_spin: int

    @property
    def m(self) -> int:
        return self.n_spin // 2

    @property
    def sectors(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.m + 1) for b in range(self.m + 1)]

    def masks(self, a: int, b: int) -> np.ndarray:
        """Determinant bitmasks of the sector, Kronecker (up-major) order."""
        m = self.m
        ups = [sum(1 << (2 * p) for p in s) for s in _subsets(m, a)]
        downs = [sum(1 << (2 * p + 1) for p in s) for s in _subsets(m, b)]
        return np.array([u | d for u in ups for d in downs], dtype=np.int64)

    def dim(self, a: int, b: int) -> int:
        return len(_subsets(self.m, a)) * len(_subsets(self.m, b))


def _minor_table(o: np.ndarray, k: int) -> np.ndarray:
    """All k x k minor determinants det(o[S, S']) over index subsets."""
    m = o.shape[0]
    subs = np.array(_subsets(m, k), dtype=np.intp)
    if k == 0:
        return np.ones((1, 1))
    sel = o[subs[:, None, :, None], subs[None, :, None, :]]
    return np.linalg.det(sel)


def _reorder_signs(m: int, a: int, b: int) -> np.ndarray:
    """Sign of regrouping an interleaved determinant into (ups)(downs) order.

    Moving every down-spin creation operator past the higher-index up-spin
    ones costs one transposition per (P in ups, Q in downs) pair with
    P > Q; the Kronecker-factorized rotation lives in the regrouped basis.
    """
    ups = _subsets(m, a)
    downs = _subsets(m, b)
    signs = np.empty(len(ups) * len(downs))
    for iu, su in enumerate(ups):
        for idn, sd in enumerate(downs):
            inversions = sum(1 for q in sd for p in su if p > q)
            signs[iu * len(downs) + idn] = -1.0 if inversions % 2 else 1.0
    return signs


def rotation_sector_matrix(o_spin: np.ndarray, a: int, b: int) -> np.ndarray:
    """Fock-space matrix of an orbital rotation on one (a, b) sector."""
    blocks = spin_blocks(o_spin)
    if blocks is None:
        raise ValidationError(
            "orbital rotation mixes spin blocks; no number-sector realization"
        )
    up, down = blocks
    kron = np.kron(_minor_table(up, a), _minor_table(down, b))
    signs = _reorder_signs(up.shape[0], a, b)
    return (signs[:, None] * kron) * signs[None, :]


def fragment_sector_block(
    frag: FermionFragment, table: SectorTable, a: int, b: int
) -> np.ndarray:
    """Dense matrix of one fragment on one (n_up, n_down) sector."""
    masks = table.masks(a, b)
    diag = frag.occupation_energies(masks)
    v = rotation_sector_matrix(frag.rotation(), a, b)
    return (v * diag) @ v.T


def fragment_blocks(frag: FermionFragment, table: SectorTable) -> dict:
    return {
        (a, b): fragment_sector_block(frag, table, a, b) for a, b in table.sectors
    }


def partition_blocks(p: FermionPartition, table: SectorTable) -> list[dict]:
    return [fragment_blocks(f, table) for f in p.fragments]


def add_blocks(blocks_list: list[dict]) -> dict:
    out: dict = {}
    for blocks in blocks_list:
        for key, mat in blocks.items():
            out[key] = out.get(key, 0.0) + mat
    return out


def _dense_commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    comm = 1j * (a @ b - b @ a)
    w = np.linalg.eigvalsh(comm)
    return float(max(abs(w[0]), abs(w[-1]))) if w.size else 0.0


def _spin_exchange_symmetric(frag: FermionFragment, tol: float = 1e-12) -> bool:
    """True when the fragment is invariant under global up/down exchange."""
    o = frag.rotation()
    pair = spin_blocks(o)
    if pair is None or np.abs(pair[0] - pair[1]).max() > tol:
        return False
    for vec in (frag.onebody, frag.epsilon):
        if vec is not None and np.abs(vec[0::2] - vec[1::2]).max() > tol:
            return False
    if frag.lam is not None:
        lam = frag.lam
        rep = lam[0::2, 0::2]
        for s1 in (0, 1):
            for s2 in (0, 1):
                if np.abs(lam[s1::2, s2::2] - rep).max() > tol:
                    return False
    return True


LAZY_ABOVE_N_SPIN = 12


@dataclass
class BlockOperator:
    """Sector blocks plus per-sector spectral enclosures for screening.

    ``lo``/``hi`` enclose each block's spectrum (exact for fragments via
    occupation enumeration, interval sums for accumulated operators); the
    shift-invariant bound ||[A, B]_s|| <= dE_A dE_B / 2 built from them
    screens away most sector evaluations.  ``exchange_symmetric`` records
    invariance under global spin exchange, which makes the (a, b) and
    (b, a) sector norms equal.

    Above LAZY_ABOVE_N_SPIN spin orbitals the blocks are built on demand
    (caching every sector eagerly costs gigabytes at 16 modes) and callers
    drop caches between pair jobs via :meth:`clear_cache`.
    """

    blocks: dict
    lo: dict
    hi: dict
    exchange_symmetric: bool = False
    builder: object = None  # key -> ndarray, set for lazy instances

    @classmethod
    def from_fragment(cls, frag: FermionFragment, table: SectorTable):
        lo, hi = {}, {}
        for key in table.sectors:
            energies = frag.occupation_energies(table.masks(*key))
            lo[key] = float(energies.min())
            hi[key] = float(energies.max())
        lazy = table.n_spin > LAZY_ABOVE_N_SPIN
        out = cls(
            blocks={},
            lo=lo,
            hi=hi,
            exchange_symmetric=_spin_exchange_symmetric(frag),
            builder=lambda key: fragment_sector_block(frag, table, *key),
        )
        if not lazy:
            for key in table.sectors:
                out.block(key)
            out.builder = None
        return out

    def block(self, key) -> np.ndarray:
        if key not in self.blocks:
            if self.builder is None:
                raise KeyError(key)
            self.blocks[key] = self.builder(key)
        return self.blocks[key]

    def clear_cache(self) -> None:
        if self.builder is not None:
            self.blocks.clear()

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        lo = {k: self.lo[k] + other.lo[k] for k in self.lo}
        hi = {k: self.hi[k] + other.hi[k] for k in self.hi}
        symmetric = self.exchange_symmetric and other.exchange_symmetric
        if self.builder is None and other.builder is None:
            blocks = {k: self.blocks[k] + other.blocks[k] for k in self.blocks}
            return BlockOperator(
                blocks=blocks, lo=lo, hi=hi, exchange_symmetric=symmetric
            )
        return BlockOperator(
            blocks={},
            lo=lo,
            hi=hi,
            exchange_symmetric=symmetric,
            builder=lambda key: self.block(key) + other.block(key),
        )


def fragment_block_operator(frag: FermionFragment, table: SectorTable) -> BlockOperator:
    return BlockOperator.from_fragment(frag, table)


def _real_block_commutator_norm(ba: np.ndarray, bb: np.ndarray, skip_below: float) -> float:
    """||[A, B]||_2 for real symmetric blocks via the antisymmetric square.

    K = AB - BA is real antisymmetric, so ||K||_2^2 = lambda_max(K^T K)
    and a real symmetric eigensolve replaces the complex Hermitian one.
    """
    k = ba @ bb
    k -= k.T
    frob = float(np.linalg.norm(k))
    if frob <= skip_below:
        return 0.0
    w = np.linalg.eigvalsh(k.T @ k)
    return float(np.sqrt(max(w[-1], 0.0)))


def commutator_norm_blocks(a, b) -> float:
    """max over sectors of || [A_s, B_s] ||_2 (equals the full-space norm).

    With BlockOperator operands, sectors are screened by the
    shift-invariant bound dE_A dE_B / 2 and, once a commutator is formed,
    by its Frobenius norm, so the cubic-cost eigensolve runs on few blocks;
    mirrored sectors are skipped for exchange-symmetric operands.
    """
    if isinstance(a, BlockOperator) and isinstance(b, BlockOperator):
        mirror = a.exchange_symmetric and b.exchange_symmetric
        bounds = []
        for k in a.lo:
            if mirror and k[0] < k[1]:
                continue
            bounds.append((0.5 * (a.hi[k] - a.lo[k]) * (b.hi[k] - b.lo[k]), k))
        bounds.sort(key=lambda item: -item[0])
        best = 0.0
        for bound, key in bounds:
            if bound <= best:
                break
            ba, bb = a.block(key), b.block(key)
            if np.iscomplexobj(ba) or np.iscomplexobj(bb):
                comm = 1j * (ba @ bb - bb @ ba)
                if float(np.linalg.norm(comm)) <= best:
                    continue
                w = np.linalg.eigvalsh(comm)
                if w.size:
                    best = max(best, abs(float(w[0])), abs(float(w[-1])))
            else:
                best = max(best, _real_block_commutator_norm(ba, bb, best))
        return best
    blocks_a = a.blocks if isinstance(a, BlockOperator) else a
    blocks_b = b.blocks if isinstance(b, BlockOperator) else b
    best = 0.0
    order = sorted(
        blocks_a,
        key=lambda k: -float(np.linalg.norm(blocks_a[k]))
        * float(np.linalg.norm(blocks_b[k])),
    )
    for key in order:
        bound = 2.0 * float(np.linalg.norm(blocks_a[key])) * float(
            np.linalg.norm(blocks_b[key])
        )
        if bound <= best:
            break
        best = max(best, _dense_commutator_norm(blocks_a[key], blocks_b[key]))
    return best


def extreme_eigenvalues_blocks(blocks: dict) -> tuple[float, float]:
    lo, hi = np.inf, -np.inf
    for mat in blocks.values():
        w = np.linalg.eigvalsh(mat)
        lo = min(lo, float(w[0]))
        hi = max(hi, float(w[-1]))
    return lo, hi


# ---------------------------------------------------------------------------
# spin projections within one sector


def sector_for_labels(table: SectorTable, eta: int, m_z: float) -> tuple[int, int]:
    a = eta / 2 + m_z
    b = eta / 2 - m_z
    if abs(a - round(a)) > 1e-9 or abs(b - round(b)) > 1e-9:
        raise ValidationError(f"(eta={eta}, m={m_z}) is not an integer filling")
    a, b = int(round(a)), int(round(b))
    if not (0 <= a <= table.m and 0 <= b <= table.m):
        raise EmptySectorError(f"(eta={eta}, m={m_z}) holds no determinants")
    return a, b


def raising_block(table: SectorTable, a: int, b: int) -> np.ndarray:
    """S+ from sector (a, b) to (a+1, b-1); all amplitudes are +1.

    The interleaved convention pairs modes (2p, 2p+1), so the creation and
    annihilation Jordan-Wigner strings cancel except on the touched pair,
    where the mode 2p is empty by construction.
    """
    src = table.masks(a, b)
    if a + 1 > table.m or b - 1 < 0:
        return np.zeros((0, len(src)))
    dst = table.masks(a + 1, b - 1)
    index = {int(mask): i for i, mask in enumerate(dst)}
    out = np.zeros((len(dst), len(src)))
    for j, mask in enumerate(src):
        for p in range(table.m):
            up_bit = 1 << (2 * p)
            dn_bit = 1 << (2 * p + 1)
            if (mask & dn_bit) and not (mask & up_bit):
                out[index[int(mask ^ up_bit ^ dn_bit)], j] = 1.0
    return out


def spin_squared_block(table: SectorTable, a: int, b: int) -> np.ndarray:
    """S^2 = S- S+ + S_z (S_z + 1) restricted to one (a, b) sector."""
    s_plus = raising_block(table, a, b)
    m_z = 0.5 * (a - b)
    dim = table.dim(a, b)
    return s_plus.T @ s_plus + m_z * (m_z + 1.0) * np.eye(dim)


def spin_sector_vectors(
    table: SectorTable, eta: int, m_z: float, s: float | None, tol: float = 1e-6
) -> tuple[tuple[int, int], np.ndarray]:
    """(sector key, column matrix) of the (eta, m[, s]) subspace.

    Columns live in the (n_up, n_down) determinant basis; s = None selects
    the whole (eta, m) block.
    """
    key = sector_for_labels(table, eta, m_z)
    dim = table.dim(*key)
    if dim == 0:
        raise EmptySectorError(f"(eta={eta}, m={m_z}) holds no determinants")
    if s is None:
        return key, np.eye(dim)
    if abs(m_z) > s + 1e-9:
        raise ValidationError(f"|m| = {abs(m_z)} exceeds s = {s}")
    s2 = spin_squared_block(table, *key)
    w, v = np.linalg.eigh(0.5 * (s2 + s2.T))
    keep = np.flatnonzero(np.abs(w - s * (s + 1.0)) < tol)
    if keep.size == 0:
        raise EmptySectorError(f"no states with (eta={eta}, m={m_z}, s={s})")
    return key, v[:, keep]


def full_space_basis(
    table: SectorTable, key: tuple[int, int], vectors: np.ndarray
) -> np.ndarray:
    """Scatter sector-basis columns into the full 2**n Fock space."""
    masks = table.masks(*key)
    out = np.zeros((1 << table.n_spin, vectors.shape[1]), dtype=np.complex128)
    out[masks, :] = vectors
    return out
