"""Independent reference implementations used only by the test suite.

Everything here works directly on occupation-number bitmasks with explicit
fermionic sign bookkeeping, deliberately avoiding the package's Pauli
algebra and mappings so spectra can be cross-checked between two unrelated
code paths.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def apply_ladder_ops(masks: np.ndarray, ops) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply a ladder-operator product to an array of determinants.

    ``ops`` is a tuple of (mode, action) with action 1 = create, 0 =
    annihilate, applied right to left.  Returns (alive, sign, new_masks).
    """
    m = masks.astype(np.int64).copy()
    alive = np.ones(m.shape, dtype=bool)
    sign = np.ones(m.shape, dtype=np.float64)
    for mode, action in reversed(ops):
        bit = np.int64(1 << mode)
        occupied = (m & bit) != 0
        ok = occupied if action == 0 else ~occupied
        alive &= ok
        parity = (np.bitwise_count((m & (bit - 1)).astype(np.uint64)) & 1).astype(
            np.float64
        )
        sign *= 1.0 - 2.0 * parity
        m = np.where(ok, m ^ bit, m)
    return alive, sign, m


def build_hamiltonian(constant, h, g, masks=None) -> np.ndarray:
    """Dense Hamiltonian of sum h a+a + sum g a+a a+a on given determinants.

    ``masks`` defaults to the full 2**n Fock space in mask order.
    """
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    n = h.shape[0]
    if masks is None:
        masks = np.arange(1 << n, dtype=np.int64)
    masks = np.asarray(masks, dtype=np.int64)
    order = np.argsort(masks)
    sorted_masks = masks[order]
    dim = len(masks)
    mat = np.zeros((dim, dim))
    mat += constant * np.eye(dim)

    def accumulate(ops, coeff):
        alive, sign, new = apply_ladder_ops(masks, ops)
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return
        pos = np.searchsorted(sorted_masks, new[idx])
        ok = (pos < dim) & (sorted_masks[np.minimum(pos, dim - 1)] == new[idx])
        rows = order[pos[ok]]
        np.add.at(mat, (rows, idx[ok]), coeff * sign[idx][ok])

    for p, q in np.argwhere(np.abs(h) > 0.0):
        accumulate(((int(p), 1), (int(q), 0)), h[p, q])
    for p, q, r, s in np.argwhere(np.abs(g) > 0.0):
        accumulate(
            ((int(p), 1), (int(q), 0), (int(r), 1), (int(s), 0)), g[p, q, r, s]
        )
    return mat


def sector_masks(n_modes: int, n_up: int, n_down: int) -> np.ndarray:
    """Determinant masks with fixed up/down counts (interleaved convention)."""
    ups = [sum(1 << (2 * i) for i in c) for c in combinations(range(n_modes // 2), n_up)]
    downs = [
        sum(1 << (2 * i + 1) for i in c)
        for c in combinations(range(n_modes // 2), n_down)
    ]
    return np.array(sorted(u | d for u in ups for d in downs), dtype=np.int64)


def ground_energy(constant, h, g, nelec: int | None = None) -> float:
    """Lowest eigenvalue, restricted to the relevant sectors when nelec given."""
    n = np.asarray(h).shape[0]
    if nelec is None:
        return float(np.linalg.eigvalsh(build_hamiltonian(constant, h, g)).min())
    best = np.inf
    for n_up in range(max(0, nelec - n // 2), min(nelec, n // 2) + 1):
        n_down = nelec - n_up
        masks = sector_masks(n, n_up, n_down)
        w = np.linalg.eigvalsh(build_hamiltonian(constant, h, g, masks))
        best = min(best, float(w.min()))
    return best


def pauli_term_matrix(string: str) -> np.ndarray:
    """Dense matrix of a Pauli string, qubit 0 = first character."""
    single = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    mat = np.eye(1, dtype=complex)
    # Qubit k toggles bit k of the basis index, so it enters the Kronecker
    # product from the left at position k (row index = sum bit_k 2^k).
    for ch in string:
        mat = np.kron(single[ch], mat)
    return mat


def pauli_sum_matrix(pairs, n_qubits: int) -> np.ndarray:
    """Dense matrix of [(coeff, string), ...]."""
    dim = 1 << n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, string in pairs:
        mat += coeff * pauli_term_matrix(string)
    return mat


def min_clique_cover_size(adjacency: np.ndarray) -> int:
    """Exact minimum clique cover via branch-and-bound coloring the complement.

    Only intended for <= ~14 vertices.
    """
    n = adjacency.shape[0]
    if n == 0:
        return 0
    conflict = ~adjacency.copy()
    np.fill_diagonal(conflict, False)

    order = np.argsort(-conflict.sum(axis=1), kind="stable")

    def can_color(k: int) -> bool:
        colors = -np.ones(n, dtype=int)

        def rec(i: int) -> bool:
            if i == n:
                return True
            v = order[i]
            used = {colors[u] for u in range(n) if conflict[v, u] and colors[u] >= 0}
            limit = min(k, int(colors.max()) + 2)
            for c in range(limit):
                if c in used:
                    continue
                colors[v] = c
                if rec(i + 1):
                    return True
                colors[v] = -1
            return False

        return rec(0)

    for k in range(1, n + 1):
        if can_color(k):
            return k
    return n
