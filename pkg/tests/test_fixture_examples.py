"""Fixture-anchored examples that complement the synthetic unit tests."""

from __future__ import annotations

import numpy as np
import pytest

from hampart.fermionic import (
    fro_decompose,
    gfro_decompose,
    lcu_postprocess,
    lr_decompose,
)
from hampart.grouping import group_si
from hampart.metrics import Budget, alpha, l1_bound, fermionic_report
from hampart.pauli import PauliSum, bravyi_kitaev, jordan_wigner
from hampart.spectra import find_pauli_symmetries, spectral_norm, to_sparse

from oracles import build_hamiltonian


class TestH2Ingestion:
    def test_dense_hamiltonian_hermitian(self, h2, lih):
        for t in (h2, lih):
            op = to_sparse(jordan_wigner(t))
            assert op.hermiticity_defect() <= 1e-10

    def test_jw_spectrum_matches_determinant_oracle(self, h2):
        dense_jw = to_sparse(jordan_wigner(h2)).to_dense()
        dense_oracle = build_hamiltonian(h2.constant, h2.h, h2.g)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(dense_jw),
            np.linalg.eigvalsh(dense_oracle),
            atol=1e-9,
        )

    def test_bk_spectrum_matches_jw(self, h2):
        w_jw = np.linalg.eigvalsh(to_sparse(jordan_wigner(h2)).to_dense())
        w_bk = np.linalg.eigvalsh(to_sparse(bravyi_kitaev(h2)).to_dense())
        np.testing.assert_allclose(w_bk, w_jw, atol=1e-10)


class TestH2Decompositions:
    def test_lr_gamma_bound_and_residual(self, h2):
        p = lr_decompose(h2, threshold=1e-8)
        two_el = [f for f in p.fragments if f.kind != "one-electron"]
        n = h2.n_spin
        assert len(two_el) <= n * (n + 1) // 2
        assert p.residual_l1 <= 1e-8

    def test_fro_residual_non_increasing_in_gamma(self, h2):
        residuals = [
            fro_decompose(h2, n_fragments=k, seed=0).residual_l1
            for k in range(1, 5)
        ]
        assert all(b <= a + 1e-9 for a, b in zip(residuals, residuals[1:]))

    def test_lcu_reduces_fragment_l1(self, h2):
        p = lr_decompose(h2, threshold=0.0)
        q = lcu_postprocess(p)
        before = [
            l1_bound(jordan_wigner(f, n_qubits=h2.n_spin))
            for f in p.fragments
            if f.kind != "one-electron"
        ]
        after = [
            l1_bound(jordan_wigner(f, n_qubits=h2.n_spin))
            for f in q.fragments
            if f.kind == "lcu-reflection"
        ]
        assert len(before) == len(after)
        for pre, post in zip(before, after):
            assert post <= pre + 1e-12

    def test_si_first_group_has_largest_term(self, h2):
        hq = bravyi_kitaev(h2)
        p = group_si(hq)
        rest, _ = hq.without_identity()
        largest = max(rest.terms(), key=lambda t: abs(t.coeff))
        assert any(
            t.x == largest.x and t.z == largest.z for t in p.groups[0].terms
        )


class TestBudgetAndAnnotations:
    def test_exhausted_budget_marks_incomplete(self, h2):
        p = gfro_decompose(h2, threshold=1e-7, seed=0)
        report = fermionic_report(
            p, mapping="jw", nelec=h2.nelec, molecule="h2", time_budget=0.0
        )
        assert report.complete is False
        assert any("budget" in note for note in report.annotations)

    def test_budget_object(self):
        b = Budget(None)
        assert b.ok() and not b.exhausted
        b0 = Budget(0.0)
        assert not b0.ok() and b0.exhausted


class TestSymmetryInputForms:
    def test_accepts_qubit_partition(self, h2):
        p = group_si(bravyi_kitaev(h2))
        from_partition = find_pauli_symmetries(p)
        from_sums = find_pauli_symmetries([g.to_pauli_sum() for g in p.groups])
        assert {t.string() for t in from_partition} == {
            t.string() for t in from_sums
        }


class TestNonHermitianNorm:
    def test_svd_path(self):
        from hampart.pauli import PauliTerm

        # X + iZ is not Hermitian; largest singular value is sqrt(2).
        ps = PauliSum.from_terms(
            [PauliTerm.from_string("X", 1.0), PauliTerm.from_string("Z", 1j)]
        )
        op = to_sparse(ps)
        ref = np.linalg.svd(op.to_dense(), compute_uv=False)[0]
        assert spectral_norm(op) == pytest.approx(ref, abs=1e-10)
