"""Symplectic algebra and fermion-qubit mapping tests against dense oracles."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hampart.errors import ValidationError
from hampart.pauli import (
    PauliSum,
    PauliTerm,
    bravyi_kitaev,
    commutator,
    fenwick_cnot_network,
    jordan_wigner,
    multiply_sums,
    pauli_commutes,
    pauli_multiply,
)
from hampart.tensors import FermionOperator, MolecularTensors

from oracles import build_hamiltonian, pauli_sum_matrix


def term(s, coeff=1.0):
    return PauliTerm.from_string(s, coeff)


def sum_matrix(ps: PauliSum) -> np.ndarray:
    return pauli_sum_matrix(
        [(t.coeff, t.string()) for t in ps.terms()], ps.n_qubits
    )


class TestCommutes:
    def test_single_anticommuting_site(self):
        assert not pauli_commutes(term("ZI"), term("XX"))

    def test_two_anticommuting_sites(self):
        assert pauli_commutes(term("XX"), term("YY"))

    def test_identity_commutes_with_anything(self):
        for s in ("XY", "ZZ", "II", "YX"):
            assert pauli_commutes(term("II"), term(s))

    def test_size_mismatch(self):
        with pytest.raises(ValidationError):
            pauli_commutes(term("X"), term("XX"))

    def test_against_dense_commutator_exhaustive(self):
        rng = np.random.default_rng(7)
        letters = np.array(list("IXYZ"))
        for _ in range(256):
            n = int(rng.integers(1, 5))
            sa = "".join(rng.choice(letters, size=n))
            sb = "".join(rng.choice(letters, size=n))
            a, b = term(sa), term(sb)
            ma, mb = pauli_sum_matrix([(1.0, sa)], n), pauli_sum_matrix([(1.0, sb)], n)
            dense_zero = np.allclose(ma @ mb - mb @ ma, 0.0, atol=1e-12)
            assert pauli_commutes(a, b) == dense_zero


class TestMultiply:
    def test_x_times_z_is_minus_iy(self):
        prod = pauli_multiply(term("X"), term("Z"))
        assert prod.string() == "Y"
        assert prod.coeff == pytest.approx(-1j)

    def test_involution(self):
        for s in ("X", "Y", "Z", "XYZI"):
            prod = pauli_multiply(term(s), term(s))
            assert prod.is_identity
            assert prod.coeff == pytest.approx(1.0)

    def test_associativity_against_dense(self):
        rng = np.random.default_rng(11)
        letters = np.array(list("IXYZ"))
        for _ in range(50):
            n = int(rng.integers(1, 5))
            strs = ["".join(rng.choice(letters, size=n)) for _ in range(3)]
            a, b, c = (term(s) for s in strs)
            left = pauli_multiply(pauli_multiply(a, b), c)
            right = pauli_multiply(a, pauli_multiply(b, c))
            assert left == right
            dense = (
                pauli_sum_matrix([(1.0, strs[0])], n)
                @ pauli_sum_matrix([(1.0, strs[1])], n)
                @ pauli_sum_matrix([(1.0, strs[2])], n)
            )
            np.testing.assert_allclose(
                pauli_sum_matrix([(left.coeff, left.string())], n), dense, atol=1e-12
            )

    @given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
    @settings(max_examples=60, deadline=None)
    def test_product_matches_dense(self, x1, z1, x2, z2):
        a = PauliTerm(x1, z1, 1.0, 4)
        b = PauliTerm(x2, z2, 1.0, 4)
        prod = pauli_multiply(a, b)
        dense = sum_matrix(PauliSum.from_terms([a])) @ sum_matrix(
            PauliSum.from_terms([b])
        )
        np.testing.assert_allclose(
            sum_matrix(PauliSum.from_terms([prod])), dense, atol=1e-12
        )


class TestPauliSum:
    def test_aggregation_and_pruning(self):
        s = PauliSum.from_terms([term("XI", 0.5), term("XI", -0.5), term("ZZ", 1.0)])
        assert s.n_terms == 1
        assert s.coefficient(term("ZZ").x, term("ZZ").z) == 1.0

    def test_text_round_trip(self):
        s = PauliSum.from_terms([term("XIYZ", 0.5), term("ZZII", -0.25)])
        again = PauliSum.from_text(s.to_text())
        assert again == s

    def test_json_round_trip(self):
        s = PauliSum.from_terms([term("XY", 0.5 + 0.25j), term("IZ", -1.0)])
        assert PauliSum.from_json_obj(s.to_json_obj()) == s

    def test_multiply_sums_against_dense(self):
        rng = np.random.default_rng(3)
        letters = np.array(list("IXYZ"))
        for _ in range(20):
            n = int(rng.integers(1, 4))
            ta = [
                term("".join(rng.choice(letters, size=n)), complex(*rng.normal(size=2)))
                for _ in range(3)
            ]
            tb = [
                term("".join(rng.choice(letters, size=n)), complex(*rng.normal(size=2)))
                for _ in range(3)
            ]
            a, b = PauliSum.from_terms(ta), PauliSum.from_terms(tb)
            np.testing.assert_allclose(
                sum_matrix(multiply_sums(a, b)),
                sum_matrix(a) @ sum_matrix(b),
                atol=1e-12,
            )

    def test_commutator_against_dense(self):
        rng = np.random.default_rng(5)
        letters = np.array(list("IXYZ"))
        for _ in range(20):
            n = int(rng.integers(1, 4))
            ta = [
                term("".join(rng.choice(letters, size=n)), float(rng.normal()))
                for _ in range(4)
            ]
            tb = [
                term("".join(rng.choice(letters, size=n)), float(rng.normal()))
                for _ in range(4)
            ]
            a, b = PauliSum.from_terms(ta), PauliSum.from_terms(tb)
            ma, mb = sum_matrix(a), sum_matrix(b)
            np.testing.assert_allclose(
                sum_matrix(commutator(a, b)), ma @ mb - mb @ ma, atol=1e-12
            )

    def test_without_identity(self):
        s = PauliSum.from_terms([term("II", 2.5), term("XZ", 1.0)])
        rest, const = s.without_identity()
        assert const == 2.5
        assert rest.n_terms == 1


class TestJordanWigner:
    def test_number_operator_image(self):
        op = FermionOperator([(((0, 1), (0, 0)), 1.0)])
        ps = jordan_wigner(op, n_qubits=1)
        expected = PauliSum.from_terms([term("I", 0.5), term("Z", -0.5)])
        assert ps == expected

    def test_hopping_image(self):
        op = FermionOperator([(((0, 1), (1, 0)), 1.0), (((1, 1), (0, 0)), 1.0)])
        ps = jordan_wigner(op, n_qubits=2)
        expected = PauliSum.from_terms([term("XX", 0.5), term("YY", 0.5)])
        assert ps == expected

    def test_tensor_path_matches_operator_path(self):
        rng = np.random.default_rng(13)
        m = 2
        h_sp = rng.normal(size=(m, m))
        h_sp = h_sp + h_sp.T
        g_sp = rng.normal(size=(m, m, m, m))
        g_sp = g_sp + g_sp.transpose(1, 0, 2, 3)
        g_sp = g_sp + g_sp.transpose(0, 1, 3, 2)
        g_sp = g_sp + g_sp.transpose(2, 3, 0, 1)
        from hampart.tensors import expand_to_spin_orbitals, tensors_to_fermion_operator

        t = expand_to_spin_orbitals(h_sp, g_sp, constant=0.25)
        via_tensors = jordan_wigner(t)
        via_operator = jordan_wigner(tensors_to_fermion_operator(t), n_qubits=t.n_spin)
        assert via_tensors.n_qubits == via_operator.n_qubits
        np.testing.assert_allclose(
            sum_matrix(via_tensors), sum_matrix(via_operator), atol=1e-10
        )

    def test_spectrum_matches_determinant_oracle(self):
        rng = np.random.default_rng(17)
        m = 2
        h_sp = rng.normal(size=(m, m))
        h_sp = h_sp + h_sp.T
        g_sp = rng.normal(size=(m, m, m, m))
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            g_sp = 0.5 * (g_sp + g_sp.transpose(perm))
        from hampart.tensors import expand_to_spin_orbitals

        t = expand_to_spin_orbitals(h_sp, g_sp, constant=-0.5)
        dense_jw = sum_matrix(jordan_wigner(t))
        dense_oracle = build_hamiltonian(t.constant, t.h, t.g)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(dense_jw), np.linalg.eigvalsh(dense_oracle), atol=1e-9
        )

    def test_hermitian_input_gives_real_coefficients(self):
        rng = np.random.default_rng(19)
        m = 2
        h_sp = rng.normal(size=(m, m))
        h_sp = h_sp + h_sp.T
        g_sp = np.zeros((m, m, m, m))
        from hampart.tensors import expand_to_spin_orbitals

        ps = jordan_wigner(expand_to_spin_orbitals(h_sp, g_sp))
        assert ps.is_hermitian(tol=1e-12)

    def test_linearity(self):
        a = FermionOperator([(((0, 1), (1, 0)), 0.5)])
        b = FermionOperator([(((1, 1), (0, 0)), 0.5)])
        combined = jordan_wigner(a + b, n_qubits=2)
        separate = jordan_wigner(a, n_qubits=2) + jordan_wigner(b, n_qubits=2)
        assert combined == separate


class TestBravyiKitaev:
    def test_single_mode_number_operator(self):
        op = FermionOperator([(((0, 1), (0, 0)), 1.0)])
        ps = bravyi_kitaev(op, n_qubits=1)
        expected = PauliSum.from_terms([term("I", 0.5), term("Z", -0.5)])
        assert ps == expected

    def test_two_mode_number_operator_uses_parity_qubit(self):
        op = FermionOperator([(((1, 1), (1, 0)), 1.0)])
        ps = bravyi_kitaev(op, n_qubits=2)
        expected = PauliSum.from_terms([term("II", 0.5), term("ZZ", -0.5)])
        assert ps == expected

    def test_network_is_deterministic(self):
        assert fenwick_cnot_network(4) == fenwick_cnot_network(4)
        assert fenwick_cnot_network(2) == ((0, 1),)

    def test_spectra_match_jw(self):
        rng = np.random.default_rng(23)
        m = 2
        h_sp = rng.normal(size=(m, m))
        h_sp = h_sp + h_sp.T
        g_sp = rng.normal(size=(m, m, m, m))
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            g_sp = 0.5 * (g_sp + g_sp.transpose(perm))
        from hampart.tensors import expand_to_spin_orbitals

        t = expand_to_spin_orbitals(h_sp, g_sp, constant=0.3)
        jw = jordan_wigner(t)
        bk = bravyi_kitaev(t)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(sum_matrix(jw)),
            np.linalg.eigvalsh(sum_matrix(bk)),
            atol=1e-10,
        )

    def test_identity_coefficient_is_scaled_trace(self):
        rng = np.random.default_rng(29)
        m = 2
        h_sp = rng.normal(size=(m, m))
        h_sp = h_sp + h_sp.T
        g_sp = rng.normal(size=(m, m, m, m))
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            g_sp = 0.5 * (g_sp + g_sp.transpose(perm))
        from hampart.tensors import expand_to_spin_orbitals

        t = expand_to_spin_orbitals(h_sp, g_sp, constant=0.1)
        bk = bravyi_kitaev(t)
        dense = build_hamiltonian(t.constant, t.h, t.g)
        expected = np.trace(dense) / dense.shape[0]
        assert bk.identity_coefficient == pytest.approx(expected, abs=1e-10)

    def test_hermiticity_preserved(self):
        op = FermionOperator(
            [(((0, 1), (3, 0)), 0.7), (((3, 1), (0, 0)), 0.7)]
        )
        assert bravyi_kitaev(op, n_qubits=4).is_hermitian()
