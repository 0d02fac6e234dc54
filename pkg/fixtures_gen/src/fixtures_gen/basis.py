"""STO-3G basis data.

Tabulated minimal-basis contractions: three primitive Gaussians per
Slater-type function, shared exponents for the 2s/2p shell.  Values are
the standard published STO-3G parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

S_COEFFS_1S = (0.1543289673, 0.5353281423, 0.4446345422)
S_COEFFS_2S = (-0.09996722919, 0.3995128261, 0.7001154689)
P_COEFFS_2P = (0.1559162750, 0.6076837186, 0.3919573931)

# element -> list of shells: (angular momentum, exponents, coefficients)
STO3G = {
    "H": [
        (0, (3.425250914, 0.6239137298, 0.1688554040), S_COEFFS_1S),
    ],
    "He": [
        (0, (6.362421394, 1.158922999, 0.3136497915), S_COEFFS_1S),
    ],
    "Li": [
        (0, (16.11957475, 2.936200663, 0.7946504870), S_COEFFS_1S),
        (0, (0.6362897469, 0.1478600533, 0.04808867840), S_COEFFS_2S),
        (1, (0.6362897469, 0.1478600533, 0.04808867840), P_COEFFS_2P),
    ],
    "Be": [
        (0, (30.16787069, 5.495115306, 1.487192653), S_COEFFS_1S),
        (0, (1.314833110, 0.3055389383, 0.09937074560), S_COEFFS_2S),
        (1, (1.314833110, 0.3055389383, 0.09937074560), P_COEFFS_2P),
    ],
    "N": [
        (0, (99.10616896, 18.05231239, 4.885660238), S_COEFFS_1S),
        (0, (3.780455879, 0.8784966449, 0.2857143744), S_COEFFS_2S),
        (1, (3.780455879, 0.8784966449, 0.2857143744), P_COEFFS_2P),
    ],
    "O": [
        (0, (130.7093214, 23.80886605, 6.443608313), S_COEFFS_1S),
        (0, (5.033151319, 1.169596125, 0.3803889600), S_COEFFS_2S),
        (1, (5.033151319, 1.169596125, 0.3803889600), P_COEFFS_2P),
    ],
}

ATOMIC_NUMBER = {"H": 1, "He": 2, "Li": 3, "Be": 4, "N": 7, "O": 8}


@dataclass(frozen=True)
class Primitive:
    """One Cartesian Gaussian x^i y^j z^k exp(-alpha r^2) at a center."""

    alpha: float
    center: tuple[float, float, float]
    powers: tuple[int, int, int]


@dataclass
class ContractedFunction:
    """Normalized contraction of primitives sharing center and powers."""

    primitives: list[Primitive]
    coeffs: np.ndarray

    @property
    def center(self):
        return self.primitives[0].center

    @property
    def powers(self):
        return self.primitives[0].powers


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, powers) -> float:
    i, j, k = powers
    l_total = i + j + k
    pref = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** (l_total / 2.0)
    denom = np.sqrt(
        _double_factorial(2 * i - 1)
        * _double_factorial(2 * j - 1)
        * _double_factorial(2 * k - 1)
    )
    return pref / denom


def shell_functions(l: int, exps, coeffs, center) -> list[ContractedFunction]:
    """Cartesian basis functions of one shell (s: 1 function, p: x, y, z)."""
    power_sets = [(0, 0, 0)] if l == 0 else [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    out = []
    for powers in power_sets:
        prims = [Primitive(a, tuple(center), powers) for a in exps]
        weighted = np.array(
            [c * primitive_norm(a, powers) for a, c in zip(exps, coeffs)]
        )
        out.append(ContractedFunction(primitives=prims, coeffs=weighted))
    return out


def build_basis(atoms: list[tuple[str, np.ndarray]]) -> list[ContractedFunction]:
    """All contracted functions for (symbol, position-in-bohr) atoms."""
    funcs: list[ContractedFunction] = []
    for symbol, pos in atoms:
        if symbol not in STO3G:
            raise ValueError(f"no STO-3G parameters for element {symbol!r}")
        for l, exps, coeffs in STO3G[symbol]:
            funcs.extend(shell_functions(l, exps, coeffs, pos))
    return funcs
