"""Hot numeric kernels for the symplectic Pauli algebra.

Every kernel has a pure-numpy implementation and an optional numba
``@njit`` twin.  The numba path is used when numba imports cleanly and the
environment variable ``HAMPART_NUMBA`` is not set to ``0``; ``python -m
hampart.bench`` times both paths side by side.

Pauli terms are encoded symplectically: a term on ``n <= 64`` qubits is a
pair of uint64 bit masks ``(x, z)`` plus a complex coefficient, where bit k
of ``x``/``z`` marks an X/Z factor on qubit k and both bits set denote Y
with no hidden prefactor.  Internally the identity
``P(x, z) = i**popcount(x & z) * X(x) * Z(z)`` fixes all phases.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("HAMPART_NUMBA", "1").strip().lower()

if _FLAG in ("0", "false", "off"):
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA

_U1 = np.uint64(1)
_I_POW = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)


def popcount(a):
    """Population count of a uint64 array (numpy >= 2.0 builtin)."""
    return np.bitwise_count(a)


def product_phase_exponent(x1, z1, x2, z2):
    """i-power exponent (mod 4) of ``P(x1,z1) @ P(x2,z2)``.

    Broadcasts over array arguments; the product term is
    ``i**t * P(x1^x2, z1^z2)`` with ``t`` the returned exponent.
    """
    t = popcount(x1 & z1).astype(np.int64)
    t = t + popcount(x2 & z2)
    t = t + 2 * popcount(z1 & x2)
    t = t - popcount((x1 ^ x2) & (z1 ^ z2))
    return t % 4


def product_phase(x1, z1, x2, z2):
    """Complex phase of ``P(x1,z1) @ P(x2,z2)`` (broadcasting)."""
    return _I_POW[product_phase_exponent(x1, z1, x2, z2)]


def term_matrix_phase(x, z):
    """Phase ``i**popcount(x & z)`` relating P(x,z) to X(x)Z(z)."""
    return _I_POW[popcount(np.asarray(x, dtype=np.uint64) & np.asarray(z, dtype=np.uint64)) % 4]


# ---------------------------------------------------------------------------
# commutation table


def _commutation_table_np(xs, zs):
    ax = popcount(xs[:, None] & zs[None, :])
    az = popcount(zs[:, None] & xs[None, :])
    return ((ax + az) % 2) == 0


if _HAVE_NUMBA:

    @njit(cache=True)
    def _popcount64(v):
        v = v - ((v >> 1) & 0x5555555555555555)
        v = (v & 0x3333333333333333) + ((v >> 2) & 0x3333333333333333)
        v = (v + (v >> 4)) & 0x0F0F0F0F0F0F0F0F
        return (v * 0x0101010101010101) >> 56

    @njit(cache=True)
    def _commutation_table_nb(xs, zs):
        t = xs.shape[0]
        out = np.empty((t, t), dtype=np.bool_)
        for a in range(t):
            xa = xs[a]
            za = zs[a]
            for b in range(a, t):
                s = _popcount64(xa & zs[b]) + _popcount64(za & xs[b])
                c = (s & np.uint64(1)) == np.uint64(0)
                out[a, b] = c
                out[b, a] = c
        return out


def commutation_table(xs, zs):
    """Boolean T x T table; entry (a, b) is True iff terms a and b commute."""
    xs = np.ascontiguousarray(xs, dtype=np.uint64)
    zs = np.ascontiguousarray(zs, dtype=np.uint64)
    if _HAVE_NUMBA:
        return _commutation_table_nb(xs, zs)
    return _commutation_table_np(xs, zs)


def commutation_table_cross(xa, za, xb, zb):
    """Boolean (Ta, Tb) table of pairwise commutation between two term sets."""
    xa = np.asarray(xa, dtype=np.uint64)
    za = np.asarray(za, dtype=np.uint64)
    xb = np.asarray(xb, dtype=np.uint64)
    zb = np.asarray(zb, dtype=np.uint64)
    s = popcount(xa[:, None] & zb[None, :]) + popcount(za[:, None] & xb[None, :])
    return (s % 2) == 0


# ---------------------------------------------------------------------------
# dense application of a Pauli sum


def _apply_terms_np(xs, zs, effs, vec, out):
    dim = vec.shape[0]
    basis = np.arange(dim, dtype=np.uint64)
    for t in range(xs.shape[0]):
        signs = 1.0 - 2.0 * (popcount(basis & zs[t]) & _U1).astype(np.float64)
        # j ^ x is a bijection on the basis, so fancy-indexed += is safe.
        out[(basis ^ xs[t]).astype(np.int64)] += effs[t] * signs * vec
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _apply_terms_nb(xs, zs, effs, vec, out):
        dim = vec.shape[0]
        for t in range(xs.shape[0]):
            x = xs[t]
            z = zs[t]
            c = effs[t]
            for j in range(dim):
                if _popcount64(np.uint64(j) & z) & np.uint64(1):
                    out[int(np.uint64(j) ^ x)] -= c * vec[j]
                else:
                    out[int(np.uint64(j) ^ x)] += c * vec[j]
        return out


def apply_pauli_sum(xs, zs, coeffs, vec, out=None):
    """Accumulate ``sum_t coeffs[t] * P(xs[t], zs[t]) @ vec`` into ``out``.

    ``vec`` must have length 2**n_qubits; the mapping of each term onto the
    computational basis is column j -> row j ^ x with sign (-1)**|j & z|.
    """
    vec = np.asarray(vec, dtype=np.complex128)
    if out is None:
        out = np.zeros_like(vec)
    xs = np.ascontiguousarray(xs, dtype=np.uint64)
    zs = np.ascontiguousarray(zs, dtype=np.uint64)
    effs = np.asarray(coeffs, dtype=np.complex128) * term_matrix_phase(xs, zs)
    if _HAVE_NUMBA:
        return _apply_terms_nb(xs, zs, effs, vec, out)
    return _apply_terms_np(xs, zs, effs, vec, out)


def pauli_coo_entries(xs, zs, coeffs, n_qubits):
    """(rows, cols, vals) triplets of the dense matrix of a Pauli sum."""
    dim = 1 << n_qubits
    basis = np.arange(dim, dtype=np.uint64)
    xs = np.asarray(xs, dtype=np.uint64)
    zs = np.asarray(zs, dtype=np.uint64)
    effs = np.asarray(coeffs, dtype=np.complex128) * term_matrix_phase(xs, zs)
    rows = (basis[None, :] ^ xs[:, None]).astype(np.int64).ravel()
    cols = np.broadcast_to(basis.astype(np.int64), (len(xs), dim)).ravel()
    signs = 1.0 - 2.0 * (popcount(basis[None, :] & zs[:, None]) & _U1).astype(np.float64)
    vals = (effs[:, None] * signs).ravel()
    return rows, cols, vals
