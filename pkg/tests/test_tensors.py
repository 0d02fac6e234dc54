"""Ingestion, validation and serialization of molecular tensors."""

from __future__ import annotations

import numpy as np
import pytest

from hampart.errors import (
    BoundsError,
    MalformedInputError,
    SchemaError,
    ValidationError,
)
from hampart.tensors import (
    MolecularTensors,
    expand_to_spin_orbitals,
    load_fcidump,
    load_json,
    save_json,
    validate,
)

from oracles import build_hamiltonian, ground_energy


def random_spatial(m, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(m, m), scale=scale)
    h = 0.5 * (h + h.T)
    g = rng.normal(size=(m, m, m, m), scale=scale)
    for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
        g = 0.5 * (g + g.transpose(perm))
    return h, g


def write_fcidump(path, norb, nelec, entries, constant=0.0):
    lines = [
        f" &FCI NORB={norb},NELEC={nelec},MS2=0,",
        "  ORBSYM=" + "1," * norb,
        "  ISYM=1,",
        " &END",
    ]
    for val, i, j, k, l in entries:
        lines.append(f" {val:23.16E} {i:4d} {j:4d} {k:4d} {l:4d}")
    lines.append(f" {constant:23.16E} {0:4d} {0:4d} {0:4d} {0:4d}")
    path.write_text("\n".join(lines) + "\n")


class TestExpand:
    def test_one_orbital_one_body_only(self):
        t = expand_to_spin_orbitals(np.array([[-0.7]]), np.zeros((1, 1, 1, 1)))
        np.testing.assert_allclose(t.h, np.diag([-0.7, -0.7]))
        assert t.n_spin == 2

    def test_zero_two_body_stays_zero(self):
        h, _ = random_spatial(2, seed=1)
        t = expand_to_spin_orbitals(h, np.zeros((2, 2, 2, 2)))
        assert np.all(t.g == 0.0)

    def test_spin_block_structure(self):
        h, g = random_spatial(2, seed=2)
        t = expand_to_spin_orbitals(h, g)
        assert np.all(t.h[0::2, 1::2] == 0.0)
        # g couples equal-spin (p,q) and (r,s) pairs only.
        assert np.all(t.g[0::2, 1::2, :, :] == 0.0)
        assert np.all(t.g[:, :, 0::2, 1::2] == 0.0)

    def test_hubbard_atom_reordering_correction(self):
        # One orbital with on-site repulsion U: the spectrum must be
        # {0, eps, eps, 2 eps + U}; this pins the a+a a+a bookkeeping.
        eps, u = -1.1, 0.8
        t = expand_to_spin_orbitals(
            np.array([[eps]]), np.full((1, 1, 1, 1), u)
        )
        dense = build_hamiltonian(t.constant, t.h, t.g)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(dense), sorted([0.0, eps, eps, 2 * eps + u]), atol=1e-12
        )

    def test_asymmetric_input_rejected(self):
        h = np.array([[0.0, 1.0], [0.5, 0.0]])
        with pytest.raises(ValidationError):
            expand_to_spin_orbitals(h, np.zeros((2, 2, 2, 2)))

    def test_output_passes_validation(self):
        h, g = random_spatial(3, seed=3)
        assert validate(expand_to_spin_orbitals(h, g)) == []


class TestValidate:
    def test_valid_tensors_empty_list(self):
        h, g = random_spatial(2, seed=4)
        assert validate(expand_to_spin_orbitals(h, g)) == []

    def test_h_symmetry_violation_reported(self):
        h = np.zeros((2, 2))
        g = np.zeros((2, 2, 2, 2))
        t = MolecularTensors(0.0, h, g)
        broken = np.array([[0.0, 0.3], [0.0, 0.0]])
        bad = MolecularTensors(0.0, broken, g)
        assert validate(t) == []
        problems = validate(bad)
        assert len(problems) == 1 and "h not symmetric" in problems[0]

    def test_g_supermatrix_violation_reported(self):
        g = np.zeros((2, 2, 2, 2))
        g[0, 1, 0, 1] = 0.5  # lacks g[r,s,p,q] partner? symmetric here; break pair swap
        g[1, 0, 1, 0] = -0.5
        bad = MolecularTensors(0.0, np.zeros((2, 2)), g)
        problems = validate(bad)
        assert any("supermatrix" in p for p in problems)

    def test_nan_rejected(self):
        g = np.zeros((2, 2, 2, 2))
        h = np.zeros((2, 2))
        h[0, 0] = np.nan
        problems = validate(MolecularTensors(0.0, h, g))
        assert any("non-finite" in p for p in problems)


class TestFcidump:
    def test_round_trip_h2_like(self, tmp_path):
        # Two-orbital fake molecule with chemist-style entries.
        entries = [
            (-1.25, 1, 1, 0, 0),
            (-0.47, 2, 2, 0, 0),
            (0.67, 1, 1, 1, 1),
            (0.66, 2, 2, 2, 2),
            (0.66, 1, 1, 2, 2),
            (0.18, 2, 1, 2, 1),
        ]
        path = tmp_path / "fake.fcidump"
        write_fcidump(path, 2, 2, entries, constant=0.71)
        t = load_fcidump(path)
        assert t.n_spin == 4
        assert t.nelec == 2
        assert t.constant == 0.71
        assert validate(t) == []

    def test_bounds_error(self, tmp_path):
        path = tmp_path / "bad.fcidump"
        write_fcidump(path, 2, 2, [(0.5, 1, 1, 3, 3)])
        with pytest.raises(BoundsError):
            load_fcidump(path)

    def test_empty_body_gives_constant_identity(self, tmp_path):
        path = tmp_path / "empty.fcidump"
        path.write_text(" &FCI NORB=2,NELEC=2,MS2=0,\n &END\n")
        t = load_fcidump(path)
        assert np.all(t.h == 0.0) and np.all(t.g == 0.0)
        assert t.constant == 0.0

    def test_missing_header_key(self, tmp_path):
        path = tmp_path / "nohdr.fcidump"
        path.write_text(" &FCI NORB=2,MS2=0,\n &END\n 1.0 0 0 0 0\n")
        with pytest.raises(MalformedInputError):
            load_fcidump(path)

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "garbled.fcidump"
        path.write_text(" &FCI NORB=2,NELEC=2,MS2=0,\n &END\n not numbers here x\n")
        with pytest.raises(MalformedInputError) as exc:
            load_fcidump(path)
        assert "line 3" in str(exc.value)

    def test_fortran_d_exponents(self, tmp_path):
        path = tmp_path / "fortran.fcidump"
        path.write_text(
            " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n -1.0D-01 1 1 0 0\n 5.0D0 0 0 0 0\n"
        )
        t = load_fcidump(path)
        assert t.constant == 5.0
        assert t.h[0, 0] == pytest.approx(-0.1 - 0.0)


class TestJson:
    def test_round_trip_identity(self, tmp_path):
        h, g = random_spatial(2, seed=5)
        t = expand_to_spin_orbitals(h, g, constant=0.123456789012345, nelec=2)
        path = tmp_path / "t.json"
        save_json(t, path)
        again = load_json(path)
        assert again == t

    def test_missing_g_key(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"version": 1, "n_spatial": 1, "constant": 0.0, "h": [0,0,0,0]}')
        with pytest.raises(SchemaError):
            load_json(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "vers.json"
        path.write_text('{"version": 99, "n_spatial": 1, "constant": 0.0, "h": [], "g": []}')
        with pytest.raises(SchemaError):
            load_json(path)

    def test_nan_entry_rejected(self, tmp_path):
        h, g = random_spatial(1, seed=6)
        t = expand_to_spin_orbitals(h, g)
        path = tmp_path / "nan.json"
        save_json(t, path)
        corrupted = path.read_text().replace(
            str(t.h[0, 0]), "NaN", 1
        )
        path.write_text(corrupted)
        with pytest.raises((ValidationError, SchemaError, ValueError)):
            load_json(path)


class TestOracleConsistency:
    def test_dense_hamiltonian_hermitian(self):
        h, g = random_spatial(2, seed=8)
        t = expand_to_spin_orbitals(h, g, constant=0.2)
        dense = build_hamiltonian(t.constant, t.h, t.g)
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-10)

    def test_sector_ground_matches_full(self):
        h, g = random_spatial(2, seed=9, scale=0.5)
        t = expand_to_spin_orbitals(h, g, constant=-0.4)
        full = np.linalg.eigvalsh(build_hamiltonian(t.constant, t.h, t.g))
        sector_best = min(
            ground_energy(t.constant, t.h, t.g, nelec=k) for k in range(5)
        )
        assert sector_best == pytest.approx(float(full.min()), abs=1e-10)
