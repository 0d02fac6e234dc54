"""Molecule definitions at the fixed benchmark geometries (angstrom).

All bond lengths are 1 angstrom: H-H, Li-H, Be-H (collinear BeH2), O-H
with 107.6 degrees HOH, N-H with 107 degrees HNH.  Ammonia's full 3D
placement is fixed as C3v-symmetric: three hydrogens at equal polar angle
beta from the z axis, 120 degrees apart in azimuth, with beta chosen so
that every H-N-H angle equals 107 degrees
(cos HNH = 1.5 cos^2 beta - 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.52917721092


@dataclass(frozen=True)
class MoleculeSpec:
    name: str
    atoms: tuple[tuple[str, tuple[float, float, float]], ...]  # angstrom
    nelec: int
    basis: str = "STO-3G"
    charge: int = 0
    multiplicity: int = 1

    def atoms_bohr(self) -> list[tuple[str, np.ndarray]]:
        return [
            (symbol, np.asarray(pos) * BOHR_PER_ANGSTROM)
            for symbol, pos in self.atoms
        ]


def _water_positions(r: float = 1.0, angle_deg: float = 107.6):
    half = np.radians(angle_deg) / 2.0
    return (
        ("O", (0.0, 0.0, 0.0)),
        ("H", (r * np.sin(half), 0.0, r * np.cos(half))),
        ("H", (-r * np.sin(half), 0.0, r * np.cos(half))),
    )


def _ammonia_positions(r: float = 1.0, angle_deg: float = 107.0):
    cos_hnh = np.cos(np.radians(angle_deg))
    cos_beta = np.sqrt((2.0 * cos_hnh + 1.0) / 3.0)
    sin_beta = np.sqrt(1.0 - cos_beta**2)
    hydrogens = []
    for k in range(3):
        azimuth = 2.0 * np.pi * k / 3.0
        hydrogens.append(
            (
                "H",
                (
                    r * sin_beta * np.cos(azimuth),
                    r * sin_beta * np.sin(azimuth),
                    r * cos_beta,
                ),
            )
        )
    return (("N", (0.0, 0.0, 0.0)), *hydrogens)


MOLECULES = {
    "h2": MoleculeSpec(
        name="h2",
        atoms=(("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.0))),
        nelec=2,
    ),
    "lih": MoleculeSpec(
        name="lih",
        atoms=(("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.0))),
        nelec=4,
    ),
    "beh2": MoleculeSpec(
        name="beh2",
        atoms=(
            ("H", (0.0, 0.0, -1.0)),
            ("Be", (0.0, 0.0, 0.0)),
            ("H", (0.0, 0.0, 1.0)),
        ),
        nelec=6,
    ),
    "h2o": MoleculeSpec(name="h2o", atoms=_water_positions(), nelec=10),
    "nh3": MoleculeSpec(name="nh3", atoms=_ammonia_positions(), nelec=10),
}
