"""Molecular integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: products of Gaussians are expanded in Hermite
Gaussians (E coefficients), Coulomb integrals reduce to Hermite Coulomb
repulsion tensors R built from Boys functions.  Only s and p functions are
needed for STO-3G, but the recursions are general.
"""

from __future__ import annotations

import numpy as np
from scipy.special import hyp1f1

from .basis import ContractedFunction


def boys(n: int, x: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_expansion(i: int, j: int, t: int, qx: float, a: float, b: float) -> float:
    """E_t^{ij}: 1D Hermite expansion coefficient of G_i(a) G_j(b)."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-q * qx * qx)
    if j == 0:
        return (
            hermite_expansion(i - 1, j, t - 1, qx, a, b) / (2.0 * p)
            - (q * qx / a) * hermite_expansion(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_expansion(i - 1, j, t + 1, qx, a, b)
        )
    return (
        hermite_expansion(i, j - 1, t - 1, qx, a, b) / (2.0 * p)
        + (q * qx / b) * hermite_expansion(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_expansion(i, j - 1, t + 1, qx, a, b)
    )


def hermite_coulomb(t: int, u: int, v: int, n: int, p: float, pc: np.ndarray) -> float:
    """R^n_{tuv}: Hermite Coulomb repulsion tensor entries."""
    if t == u == v == 0:
        dist2 = float(pc @ pc)
        return (-2.0 * p) ** n * boys(n, p * dist2)
    if t > 0:
        val = 0.0
        if t > 1:
            val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc)
        val += pc[0] * hermite_coulomb(t - 1, u, v, n + 1, p, pc)
        return val
    if u > 0:
        val = 0.0
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc)
        val += pc[1] * hermite_coulomb(t, u - 1, v, n + 1, p, pc)
        return val
    val = 0.0
    if v > 1:
        val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc)
    val += pc[2] * hermite_coulomb(t, u, v - 1, n + 1, p, pc)
    return val


def _overlap_1d(i: int, j: int, qx: float, a: float, b: float) -> float:
    return hermite_expansion(i, j, 0, qx, a, b) * np.sqrt(np.pi / (a + b))


def primitive_overlap(a, apow, acen, b, bpow, bcen) -> float:
    diff = np.asarray(acen) - np.asarray(bcen)
    out = 1.0
    for d in range(3):
        out *= _overlap_1d(apow[d], bpow[d], diff[d], a, b)
    return out


def primitive_kinetic(a, apow, acen, b, bpow, bcen) -> float:
    """1D kinetic pieces assembled as Tx Sy Sz + Sx Ty Sz + Sx Sy Tz."""
    diff = np.asarray(acen) - np.asarray(bcen)

    def s(d, di, dj):
        return _overlap_1d(apow[d] + di, bpow[d] + dj, diff[d], a, b)

    def t(d):
        j = bpow[d]
        val = -2.0 * b * b * s(d, 0, 2)
        val += b * (2 * j + 1) * s(d, 0, 0)
        if j >= 2:
            val -= 0.5 * j * (j - 1) * s(d, 0, -2)
        return val

    sx, sy, sz = s(0, 0, 0), s(1, 0, 0), s(2, 0, 0)
    return t(0) * sy * sz + sx * t(1) * sz + sx * sy * t(2)


def primitive_nuclear(a, apow, acen, b, bpow, bcen, nucleus) -> float:
    p = a + b
    acen = np.asarray(acen)
    bcen = np.asarray(bcen)
    pcen = (a * acen + b * bcen) / p
    diff = acen - bcen
    pc = pcen - np.asarray(nucleus)
    total = 0.0
    for t in range(apow[0] + bpow[0] + 1):
        ex = hermite_expansion(apow[0], bpow[0], t, diff[0], a, b)
        for u in range(apow[1] + bpow[1] + 1):
            ey = hermite_expansion(apow[1], bpow[1], u, diff[1], a, b)
            for v in range(apow[2] + bpow[2] + 1):
                ez = hermite_expansion(apow[2], bpow[2], v, diff[2], a, b)
                total += ex * ey * ez * hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * np.pi / p * total


def primitive_eri(a, apow, acen, b, bpow, bcen, c, cpow, ccen, d, dpow, dcen) -> float:
    p = a + b
    q = c + d
    rho = p * q / (p + q)
    acen, bcen = np.asarray(acen), np.asarray(bcen)
    ccen, dcen = np.asarray(ccen), np.asarray(dcen)
    pcen = (a * acen + b * bcen) / p
    qcen = (c * ccen + d * dcen) / q
    dab = acen - bcen
    dcd = ccen - dcen
    pq = pcen - qcen

    lab = [apow[d_] + bpow[d_] for d_ in range(3)]
    lcd = [cpow[d_] + dpow[d_] for d_ in range(3)]
    e_ab = [
        [hermite_expansion(apow[d_], bpow[d_], t, dab[d_], a, b) for t in range(lab[d_] + 1)]
        for d_ in range(3)
    ]
    e_cd = [
        [hermite_expansion(cpow[d_], dpow[d_], t, dcd[d_], c, d) for t in range(lcd[d_] + 1)]
        for d_ in range(3)
    ]
    total = 0.0
    for t in range(lab[0] + 1):
        for u in range(lab[1] + 1):
            for v in range(lab[2] + 1):
                e1 = e_ab[0][t] * e_ab[1][u] * e_ab[2][v]
                if e1 == 0.0:
                    continue
                for tau in range(lcd[0] + 1):
                    for nu in range(lcd[1] + 1):
                        for phi in range(lcd[2] + 1):
                            e2 = e_cd[0][tau] * e_cd[1][nu] * e_cd[2][phi]
                            if e2 == 0.0:
                                continue
                            sign = (-1.0) ** (tau + nu + phi)
                            total += (
                                e1
                                * e2
                                * sign
                                * hermite_coulomb(
                                    t + tau, u + nu, v + phi, 0, rho, pq
                                )
                            )
    return total * 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))


def _contracted(func_a: ContractedFunction, func_b: ContractedFunction, kernel):
    out = 0.0
    for pa, ca in zip(func_a.primitives, func_a.coeffs):
        for pb, cb in zip(func_b.primitives, func_b.coeffs):
            out += ca * cb * kernel(pa, pb)
    return out


def normalize_contractions(funcs: list[ContractedFunction]) -> None:
    """Scale contraction coefficients so each self-overlap is exactly 1."""
    for f in funcs:
        self_overlap = _contracted(
            f,
            f,
            lambda pa, pb: primitive_overlap(
                pa.alpha, pa.powers, pa.center, pb.alpha, pb.powers, pb.center
            ),
        )
        f.coeffs = f.coeffs / np.sqrt(self_overlap)


def overlap_matrix(funcs) -> np.ndarray:
    n = len(funcs)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            val = _contracted(
                funcs[i],
                funcs[j],
                lambda pa, pb: primitive_overlap(
                    pa.alpha, pa.powers, pa.center, pb.alpha, pb.powers, pb.center
                ),
            )
            out[i, j] = out[j, i] = val
    return out


def kinetic_matrix(funcs) -> np.ndarray:
    n = len(funcs)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            val = _contracted(
                funcs[i],
                funcs[j],
                lambda pa, pb: primitive_kinetic(
                    pa.alpha, pa.powers, pa.center, pb.alpha, pb.powers, pb.center
                ),
            )
            out[i, j] = out[j, i] = val
    return out


def nuclear_matrix(funcs, atoms) -> np.ndarray:
    n = len(funcs)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            val = 0.0
            for symbol, pos in atoms:
                from .basis import ATOMIC_NUMBER

                charge = ATOMIC_NUMBER[symbol]
                val -= charge * _contracted(
                    funcs[i],
                    funcs[j],
                    lambda pa, pb: primitive_nuclear(
                        pa.alpha,
                        pa.powers,
                        pa.center,
                        pb.alpha,
                        pb.powers,
                        pb.center,
                        pos,
                    ),
                )
            out[i, j] = out[j, i] = val
    return out


def eri_tensor(funcs) -> np.ndarray:
    """Chemist-notation (ij|kl) with full 8-fold permutational symmetry."""
    n = len(funcs)
    out = np.zeros((n, n, n, n))
    pair_list = [(i, j) for i in range(n) for j in range(i + 1)]
    for a, (i, j) in enumerate(pair_list):
        for i2, j2 in pair_list[: a + 1]:
            val = 0.0
            for p1, c1 in zip(funcs[i].primitives, funcs[i].coeffs):
                for p2, c2 in zip(funcs[j].primitives, funcs[j].coeffs):
                    for p3, c3 in zip(funcs[i2].primitives, funcs[i2].coeffs):
                        for p4, c4 in zip(funcs[j2].primitives, funcs[j2].coeffs):
                            val += c1 * c2 * c3 * c4 * primitive_eri(
                                p1.alpha, p1.powers, p1.center,
                                p2.alpha, p2.powers, p2.center,
                                p3.alpha, p3.powers, p3.center,
                                p4.alpha, p4.powers, p4.center,
                            )
            for pq in ((i, j), (j, i)):
                for rs in ((i2, j2), (j2, i2)):
                    out[pq[0], pq[1], rs[0], rs[1]] = val
                    out[rs[0], rs[1], pq[0], pq[1]] = val
    return out


def nuclear_repulsion(atoms) -> float:
    from .basis import ATOMIC_NUMBER

    total = 0.0
    for i, (sym_a, pos_a) in enumerate(atoms):
        for sym_b, pos_b in atoms[i + 1 :]:
            dist = float(np.linalg.norm(np.asarray(pos_a) - np.asarray(pos_b)))
            total += ATOMIC_NUMBER[sym_a] * ATOMIC_NUMBER[sym_b] / dist
    return total
