"""End-to-end fixture emission and internal consistency of the CI oracle."""

from __future__ import annotations

import json
import re

import numpy as np
import pytest

from fixtures_gen.ci import (
    full_ci_ground_energy,
    hartree_fock_expectation,
    sector_determinants,
)
from fixtures_gen.generate import compute_mo_problem, generate
from fixtures_gen.molecules import MOLECULES, MoleculeSpec


@pytest.fixture(scope="module")
def h2_problem():
    return compute_mo_problem(MOLECULES["h2"])


class TestMolecules:
    def test_geometries_match_declared_angles(self):
        h2o = MOLECULES["h2o"].atoms
        o_pos = np.array(h2o[0][1])
        h1 = np.array(h2o[1][1]) - o_pos
        h2 = np.array(h2o[2][1]) - o_pos
        angle = np.degrees(
            np.arccos(h1 @ h2 / (np.linalg.norm(h1) * np.linalg.norm(h2)))
        )
        assert angle == pytest.approx(107.6, abs=1e-9)

        nh3 = MOLECULES["nh3"].atoms
        n_pos = np.array(nh3[0][1])
        hs = [np.array(a[1]) - n_pos for a in nh3[1:]]
        for i in range(3):
            assert np.linalg.norm(hs[i]) == pytest.approx(1.0, abs=1e-12)
            for j in range(i):
                angle = np.degrees(
                    np.arccos(hs[i] @ hs[j])
                )
                assert angle == pytest.approx(107.0, abs=1e-9)

    def test_all_bond_lengths_one_angstrom(self):
        for name in ("h2", "lih", "beh2"):
            atoms = MOLECULES[name].atoms
            heavy = np.array(atoms[1 if name == "beh2" else 0][1])
            for sym, pos in atoms:
                pos = np.array(pos)
                if np.allclose(pos, heavy):
                    continue
                assert np.linalg.norm(pos - heavy) == pytest.approx(1.0)


class TestCi:
    def test_sector_dimension(self):
        assert len(sector_determinants(4, 1, 1)) == 16
        assert len(sector_determinants(6, 2, 2)) == 225

    def test_scf_matches_determinant_expectation(self, h2_problem):
        h_mo, eri_mo, e_nuc, scf = h2_problem
        e_hf = hartree_fock_expectation(h_mo, eri_mo, 2, e_nuc=e_nuc)
        assert e_hf == pytest.approx(scf.energy, abs=1e-10)

    def test_correlation_lowers_energy(self, h2_problem):
        h_mo, eri_mo, e_nuc, scf = h2_problem
        e_fci = full_ci_ground_energy(h_mo, eri_mo, 2, e_nuc=e_nuc)
        assert e_fci < scf.energy


class TestGenerate:
    def test_h2_end_to_end(self, tmp_path):
        meta = generate(MOLECULES["h2"], tmp_path)
        assert meta["n_spatial"] == 2
        assert meta["nelec"] == 2
        assert meta["e_fci"] < meta["e_scf"]
        for suffix in (".fcidump", ".json", ".meta.json"):
            assert (tmp_path / f"h2{suffix}").exists()

        text = (tmp_path / "h2.fcidump").read_text()
        header = text.splitlines()[0]
        assert re.search(r"NORB=\s*2", header)
        assert re.search(r"NELEC=\s*2", header)
        body_lines = [
            line for line in text.splitlines() if not line.strip().startswith(("&", "I", "O"))
        ]
        for line in body_lines:
            parts = line.split()
            assert len(parts) == 5

        obj = json.loads((tmp_path / "h2.json").read_text())
        assert obj["version"] == 1
        assert set(obj) == {"version", "n_spatial", "constant", "h", "g", "nelec"}
        n = 2 * obj["n_spatial"]
        assert len(obj["h"]) == n * n
        assert len(obj["g"]) == n**4
        h = np.asarray(obj["h"]).reshape(n, n)
        assert np.abs(h - h.T).max() < 1e-12

    def test_regeneration_idempotent(self, tmp_path):
        generate(MOLECULES["h2"], tmp_path / "a")
        generate(MOLECULES["h2"], tmp_path / "b")
        for suffix in (".fcidump", ".json"):
            assert (tmp_path / "a" / f"h2{suffix}").read_bytes() == (
                tmp_path / "b" / f"h2{suffix}"
            ).read_bytes()

    def test_unknown_basis_rejected(self, tmp_path):
        spec = MoleculeSpec(
            name="h2", atoms=MOLECULES["h2"].atoms, nelec=2, basis="cc-pVDZ"
        )
        with pytest.raises(ValueError):
            generate(spec, tmp_path)

    def test_committed_fixture_reproducible(self, tmp_path):
        committed = json.loads(
            (
                __import__("pathlib").Path(__file__).parents[2]
                / "fixtures"
                / "h2.meta.json"
            ).read_text()
        )
        fresh = generate(MOLECULES["h2"], tmp_path)
        assert fresh["e_fci"] == pytest.approx(committed["e_fci"], abs=1e-12)
        assert fresh["e_scf"] == pytest.approx(committed["e_scf"], abs=1e-12)
