"""Emit FCIDUMP / JSON / metadata fixture files for the benchmark molecules.

The emitted formats follow the consumer's documented conventions:

- FCIDUMP: &FCI namelist with NORB/NELEC/MS2, chemist-notation integral
  lines "value i j k l" (1-based, 8-fold symmetry-reduced), zero indices
  for the core Hamiltonian and the nuclear-repulsion constant.
- JSON: {version: 1, n_spatial, constant, h, g, nelec} with h and g over
  interleaved spin orbitals, g = (pq|rs)/2 restricted to same-spin pairs
  and h carrying the -1/2 sum_k (pk|kq) reordering correction.
- metadata JSON: {name, e_fci, e_scf, e_nuc, n_spatial, nelec, basis,
  geometry}.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from .basis import build_basis
from .ci import full_ci_ground_energy, hartree_fock_expectation
from .integrals import (
    eri_tensor,
    kinetic_matrix,
    normalize_contractions,
    nuclear_matrix,
    nuclear_repulsion,
    overlap_matrix,
)
from .molecules import MOLECULES, MoleculeSpec
from .scf import mo_integrals, restricted_hartree_fock


def compute_mo_problem(spec: MoleculeSpec):
    """(h_mo, eri_mo, e_nuc, scf) for one molecule."""
    if spec.basis != "STO-3G":
        raise ValueError(f"unsupported basis {spec.basis!r}")
    atoms = spec.atoms_bohr()
    funcs = build_basis(atoms)
    normalize_contractions(funcs)
    s = overlap_matrix(funcs)
    hcore = kinetic_matrix(funcs) + nuclear_matrix(funcs, atoms)
    eri = eri_tensor(funcs)
    e_nuc = nuclear_repulsion(atoms)
    scf = restricted_hartree_fock(s, hcore, eri, spec.nelec, e_nuc=e_nuc)
    h_mo, eri_mo = mo_integrals(hcore, eri, scf.mo_coeffs)
    return h_mo, eri_mo, e_nuc, scf


def write_fcidump(path: Path, h_mo, eri_mo, e_nuc, nelec, tol=1e-12) -> None:
    m = h_mo.shape[0]
    lines = [
        f" &FCI NORB={m},NELEC={nelec},MS2=0,",
        "  ORBSYM=" + "1," * m,
        "  ISYM=1,",
        " &END",
    ]
    pair_list = [(i, j) for i in range(m) for j in range(i + 1)]
    for a, (i, j) in enumerate(pair_list):
        for k, l in pair_list[: a + 1]:
            val = eri_mo[i, j, k, l]
            if abs(val) > tol:
                lines.append(
                    f" {val:.16E} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}"
                )
    for i in range(m):
        for j in range(i + 1):
            if abs(h_mo[i, j]) > tol:
                lines.append(f" {h_mo[i, j]:.16E} {i + 1:4d} {j + 1:4d}    0    0")
    lines.append(f" {e_nuc:.16E}    0    0    0    0")
    path.write_text("\n".join(lines) + "\n")


def spin_orbital_tensors(h_mo, eri_mo):
    """Interleaved spin tensors in the consumer's storage convention."""
    m = h_mo.shape[0]
    n = 2 * m
    h = np.zeros((n, n))
    g = np.zeros((n, n, n, n))
    corr = -0.5 * np.einsum("pkkq->pq", eri_mo)
    for s1 in (0, 1):
        h[s1::2, s1::2] = h_mo + corr
        for s2 in (0, 1):
            g[s1::2, s1::2, s2::2, s2::2] = 0.5 * eri_mo
    return h, g


def write_json(path: Path, h_mo, eri_mo, e_nuc, nelec) -> None:
    h, g = spin_orbital_tensors(h_mo, eri_mo)
    obj = {
        "version": 1,
        "n_spatial": h_mo.shape[0],
        "constant": float(e_nuc),
        "h": h.ravel().tolist(),
        "g": g.ravel().tolist(),
        "nelec": int(nelec),
    }
    path.write_text(json.dumps(obj))


def generate(spec: MoleculeSpec, out_dir: Path) -> dict:
    """Write all fixture files for one molecule; returns the metadata."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    h_mo, eri_mo, e_nuc, scf = compute_mo_problem(spec)
    e_hf = hartree_fock_expectation(h_mo, eri_mo, spec.nelec, e_nuc=e_nuc)
    if abs(e_hf - scf.energy) > 1e-8:
        raise RuntimeError(
            f"{spec.name}: SCF energy {scf.energy:.10f} disagrees with the "
            f"determinant expectation {e_hf:.10f}"
        )
    e_fci = full_ci_ground_energy(h_mo, eri_mo, spec.nelec, e_nuc=e_nuc)
    write_fcidump(out_dir / f"{spec.name}.fcidump", h_mo, eri_mo, e_nuc, spec.nelec)
    write_json(out_dir / f"{spec.name}.json", h_mo, eri_mo, e_nuc, spec.nelec)
    meta = {
        "name": spec.name,
        "e_fci": e_fci,
        "e_scf": scf.energy,
        "e_nuc": e_nuc,
        "n_spatial": int(h_mo.shape[0]),
        "nelec": spec.nelec,
        "basis": spec.basis,
        "geometry_angstrom": [[s, list(map(float, p))] for s, p in spec.atoms],
    }
    (out_dir / f"{spec.name}.meta.json").write_text(json.dumps(meta, indent=1))
    return meta


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Generate STO-3G integral fixtures with full-CI metadata."
    )
    parser.add_argument("out_dir", type=Path)
    parser.add_argument(
        "--molecules",
        nargs="+",
        default=sorted(MOLECULES),
        choices=sorted(MOLECULES),
    )
    args = parser.parse_args(argv)
    for name in args.molecules:
        meta = generate(MOLECULES[name], args.out_dir)
        print(
            f"{meta['name']}: n_spatial={meta['n_spatial']} "
            f"E_scf={meta['e_scf']:.10f} E_fci={meta['e_fci']:.10f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
