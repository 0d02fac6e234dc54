"""Orbital rotations as ordered Givens products.

Conventions (fixed everywhere in the package):

- The plane rotation for the pair (p, q) with p > q is the identity except
  ``R[q,q] = R[p,p] = cos(t)``, ``R[p,q] = sin(t)``, ``R[q,p] = -sin(t)``.
- The angle vector enumerates pairs in descending lexicographic (p, q)
  order, e.g. for n = 4: (3,2), (3,1), (3,0), (2,1), (2,0), (1,0), and the
  rotation matrix is the matrix product of the plane rotations in exactly
  that order (first pair applied leftmost).
- ``apply_orbital_rotation(angles, h)`` returns U^T h U, which maps a
  one-body matrix into the rotated (fragment) frame.

Any special-orthogonal matrix factors through this ordering; the
factorization eliminates below-diagonal entries in ascending lexicographic
order, which is the exact reverse of the product order.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InternalConsistencyError, ValidationError


def pair_order(n: int) -> list[tuple[int, int]]:
    """Descending lexicographic (p, q) pairs with p > q."""
    return [(p, q) for p in range(n - 1, 0, -1) for q in range(p - 1, -1, -1)]


def n_angles(n: int) -> int:
    return n * (n - 1) // 2


def _infer_dimension(n_pairs: int) -> int:
    n = int(round((1 + math.sqrt(1 + 8 * n_pairs)) / 2))
    if n * (n - 1) // 2 != n_pairs:
        raise ValidationError(f"{n_pairs} is not a valid angle-vector length")
    return n


def givens_matrix(n: int, p: int, q: int, theta: float) -> np.ndarray:
    rot = np.eye(n)
    c, s = math.cos(theta), math.sin(theta)
    rot[q, q] = c
    rot[p, p] = c
    rot[q, p] = -s
    rot[p, q] = s
    return rot


def rotation_matrix(angles, n: int | None = None) -> np.ndarray:
    """Ordered product of plane rotations for the packed angle vector."""
    angles = np.asarray(angles, dtype=np.float64)
    if n is None:
        n = _infer_dimension(angles.size)
    elif angles.size != n_angles(n):
        raise ValidationError(
            f"expected {n_angles(n)} angles for dimension {n}, got {angles.size}"
        )
    u = np.eye(n)
    for (p, q), theta in zip(pair_order(n), angles):
        if theta == 0.0:
            continue
        c, s = math.cos(theta), math.sin(theta)
        col_q = u[:, q].copy()
        col_p = u[:, p].copy()
        # Right-multiplication by the (p, q) plane rotation.
        u[:, q] = c * col_q + s * col_p
        u[:, p] = -s * col_q + c * col_p
    return u


def apply_orbital_rotation(angles, h: np.ndarray) -> np.ndarray:
    """Conjugate a one-body matrix into the rotated frame: U^T h U."""
    h = np.asarray(h, dtype=np.float64)
    u = rotation_matrix(angles, n=h.shape[0])
    return u.T @ h @ u


def rotation_to_angles(o: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Packed angles reproducing a special-orthogonal matrix exactly.

    Entries below the diagonal are eliminated in ascending lexicographic
    (p, q) order; the accumulated inverse rotations, read in reverse, are
    the product in the canonical descending order.  det(o) must be +1.
    """
    o = np.asarray(o, dtype=np.float64)
    n = o.shape[0]
    if o.shape != (n, n):
        raise ValidationError("rotation matrix must be square")
    if np.abs(o.T @ o - np.eye(n)).max() > 1e-8:
        raise ValidationError("matrix is not orthogonal")
    if np.linalg.det(o) < 0.0:
        raise ValidationError("matrix has determinant -1; flip one column first")

    # Elimination in ascending (p, q) order factors a matrix as the
    # ascending-order product; running it on o^T and negating the angles
    # yields the canonical descending-order factorization of o.
    work = o.T.copy()
    angles = {}
    for p in range(1, n):
        for q in range(p):
            a = work[q, q]
            b = work[p, q]
            r = math.hypot(a, b)
            theta = 0.0 if r < 1e-300 else math.atan2(b, a)
            angles[(p, q)] = -theta
            if theta != 0.0:
                c, s = math.cos(theta), math.sin(theta)
                row_q = work[q, :].copy()
                row_p = work[p, :].copy()
                work[q, :] = c * row_q + s * row_p
                work[p, :] = -s * row_q + c * row_p
    if np.abs(work - np.eye(n)).max() > tol:
        raise InternalConsistencyError(
            f"Givens factorization residual {np.abs(work - np.eye(n)).max():.3e}"
        )
    return np.array([angles[pq] for pq in pair_order(n)])


def fix_determinant(o: np.ndarray) -> np.ndarray:
    """Flip the last column when det < 0 (harmless for quadratic uses)."""
    if np.linalg.det(o) < 0.0:
        o = o.copy()
        o[:, -1] = -o[:, -1]
    return o


def eigh_deterministic(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """eigh with a fixed sign convention: first significant component > 0."""
    w, v = np.linalg.eigh(mat)
    for i in range(v.shape[1]):
        col = v[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-8 * max(np.abs(col).max(), 1e-300))
        if nz.size and col[nz[0]] < 0.0:
            v[:, i] = -col
    return w, v


def spin_blocks(mat: np.ndarray, tol: float = 1e-12):
    """Split an interleaved spin-orbital matrix into (up, down) blocks.

    Returns (up, down) or None when the spin-mixing blocks are nonzero.
    """
    up = mat[0::2, 0::2]
    down = mat[1::2, 1::2]
    cross = max(np.abs(mat[0::2, 1::2]).max(initial=0.0),
                np.abs(mat[1::2, 0::2]).max(initial=0.0))
    if cross > tol * max(1.0, np.abs(mat).max()):
        return None
    return up, down


def interleave_spin_matrix(up: np.ndarray, down: np.ndarray) -> np.ndarray:
    n = 2 * up.shape[0]
    out = np.zeros((n, n))
    out[0::2, 0::2] = up
    out[1::2, 1::2] = down
    return out


def diagonalize_one_body(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition h = O diag(eps) O^T with det(O) = +1.

    Interleaved spin-block matrices are diagonalized per spin block so the
    resulting rotation never mixes spins (degenerate up/down pairs would
    otherwise be mixed arbitrarily by LAPACK).
    """
    h = np.asarray(h, dtype=np.float64)
    blocks = spin_blocks(h) if h.shape[0] % 2 == 0 else None
    if blocks is not None:
        w_up, v_up = eigh_deterministic(blocks[0])
        w_down, v_down = eigh_deterministic(blocks[1])
        eps = np.zeros(h.shape[0])
        eps[0::2] = w_up
        eps[1::2] = w_down
        o = interleave_spin_matrix(v_up, v_down)
    else:
        eps, o = eigh_deterministic(h)
    return eps, fix_determinant(o)
