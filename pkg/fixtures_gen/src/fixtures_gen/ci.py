"""Determinant full CI over MO chemist integrals.

The Hamiltonian is assembled in the physical normal-ordered form

    H = E_nuc + sum_pq h_pq a+_p a_q
             + 1/2 sum_pqrs (pq|rs) a+_p a+_r a_s a_q

over interleaved spin orbitals (even = up, odd = down), entirely through
explicit ladder-operator bit algebra.  This is deliberately independent of
any downstream representation so recorded energies act as an oracle.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def sector_determinants(n_spatial: int, n_up: int, n_down: int) -> np.ndarray:
    ups = [sum(1 << (2 * p) for p in c) for c in combinations(range(n_spatial), n_up)]
    downs = [
        sum(1 << (2 * p + 1) for p in c)
        for c in combinations(range(n_spatial), n_down)
    ]
    return np.array(sorted(u | d for u in ups for d in downs), dtype=np.int64)


def _apply_ops(masks: np.ndarray, ops) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = masks.copy()
    alive = np.ones(m.shape, dtype=bool)
    sign = np.ones(m.shape)
    for mode, create in reversed(ops):
        bit = np.int64(1 << mode)
        occupied = (m & bit) != 0
        ok = ~occupied if create else occupied
        alive &= ok
        parity = (np.bitwise_count((m & (bit - 1)).astype(np.uint64)) & 1).astype(
            np.float64
        )
        sign *= 1.0 - 2.0 * parity
        m = np.where(ok, m ^ bit, m)
    return alive, sign, m


def hamiltonian_matrix(
    h_mo: np.ndarray, eri_mo: np.ndarray, dets: np.ndarray, e_nuc: float = 0.0
) -> np.ndarray:
    """Dense CI matrix on the given determinant list."""
    dim = len(dets)
    order = np.argsort(dets)
    sorted_dets = dets[order]
    mat = e_nuc * np.eye(dim)
    m = h_mo.shape[0]

    def accumulate(ops, coeff):
        if coeff == 0.0:
            return
        alive, sign, new = _apply_ops(dets, ops)
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return
        pos = np.searchsorted(sorted_dets, new[idx])
        ok = (pos < dim) & (sorted_dets[np.minimum(pos, dim - 1)] == new[idx])
        rows = order[pos[ok]]
        np.add.at(mat, (rows, idx[ok]), coeff * sign[idx][ok])

    # spin-orbital one-body: h over same-spin pairs
    for p_sp in range(m):
        for q_sp in range(m):
            if h_mo[p_sp, q_sp] == 0.0:
                continue
            for spin in (0, 1):
                accumulate(
                    ((2 * p_sp + spin, 1), (2 * q_sp + spin, 0)), h_mo[p_sp, q_sp]
                )

    # spin-orbital two-body: 1/2 (pq|rs) a+_p a+_r a_s a_q, same spin within
    # each chemist pair
    nz = np.argwhere(np.abs(eri_mo) > 1e-14)
    for p_sp, q_sp, r_sp, s_sp in nz:
        val = 0.5 * eri_mo[p_sp, q_sp, r_sp, s_sp]
        for spin1 in (0, 1):
            for spin2 in (0, 1):
                p = 2 * int(p_sp) + spin1
                q = 2 * int(q_sp) + spin1
                r = 2 * int(r_sp) + spin2
                s = 2 * int(s_sp) + spin2
                accumulate(((p, 1), (r, 1), (s, 0), (q, 0)), val)
    return mat


def full_ci_ground_energy(
    h_mo: np.ndarray, eri_mo: np.ndarray, nelec: int, e_nuc: float = 0.0
) -> float:
    """Lowest eigenvalue in the S_z = 0 sector of the neutral molecule."""
    m = h_mo.shape[0]
    dets = sector_determinants(m, nelec // 2, nelec // 2)
    mat = hamiltonian_matrix(h_mo, eri_mo, dets, e_nuc=e_nuc)
    return float(np.linalg.eigvalsh(mat).min())


def hartree_fock_expectation(
    h_mo: np.ndarray, eri_mo: np.ndarray, nelec: int, e_nuc: float = 0.0
) -> float:
    """<HF|H|HF> for the aufbau determinant (cross-check against SCF)."""
    m = h_mo.shape[0]
    occ = list(range(nelec // 2))
    det = sum(1 << (2 * p) for p in occ) + sum(1 << (2 * p + 1) for p in occ)
    dets = np.array([det], dtype=np.int64)
    mat = hamiltonian_matrix(h_mo, eri_mo, dets, e_nuc=e_nuc)
    return float(mat[0, 0])
