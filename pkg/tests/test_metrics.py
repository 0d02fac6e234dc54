"""Error measures, descriptors and the T-gate model."""

from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hampart.errors import ValidationError
from hampart.fermionic import gfro_decompose, lr_decompose
from hampart.grouping import PauliGroup, QubitPartition, group_si
from hampart.metrics import (
    FragmentSpectra,
    alpha,
    alpha_ordered,
    alpha_projected,
    build_report,
    l1_bound,
    second_order_estimate,
    spectral_descriptors,
    tgate_count,
)
from hampart.pauli import PauliSum, PauliTerm, bravyi_kitaev, jordan_wigner
from hampart.spectra import sector_basis, to_sparse, project


def term(s, c=1.0):
    return PauliTerm.from_string(s, c)


def single_sums(*strings):
    return [PauliSum.from_terms([term(s)]) for s in strings]


class TestAlpha:
    def test_commuting_fragments_zero(self):
        assert alpha(single_sums("ZI", "IZ", "ZZ")) == pytest.approx(0.0)

    def test_x_z_pair(self):
        assert alpha(single_sums("X", "Z")) == pytest.approx(4.0)

    def test_single_fragment_zero(self):
        assert alpha(single_sums("XYZ")) == pytest.approx(0.0)

    def test_ordered_x_z(self):
        ops = single_sums("X", "Z")
        a_bar = alpha_ordered(ops)
        assert a_bar == pytest.approx(2.0)
        assert 2.0 * a_bar == pytest.approx(alpha(ops))

    def test_ordered_commuting_zero(self):
        assert alpha_ordered(single_sums("ZI", "IZ", "ZZ")) == pytest.approx(0.0)

    def test_ordered_bound_random(self):
        rng = np.random.default_rng(0)
        letters = np.array(list("IXYZ"))
        ops = [
            PauliSum.from_terms(
                [
                    term("".join(rng.choice(letters, size=3)), float(rng.normal()))
                    for _ in range(3)
                ]
            )
            for _ in range(4)
        ]
        assert 2.0 * alpha_ordered(ops) <= alpha(ops) + 1e-8

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        letters = np.array(list("IXYZ"))
        ops = [
            PauliSum.from_terms(
                [
                    term("".join(rng.choice(letters, size=3)), float(rng.normal()))
                    for _ in range(3)
                ]
            )
            for _ in range(3)
        ]
        shifted = [op + PauliSum.identity(3, coeff=float(i) + 0.7) for i, op in enumerate(ops)]
        assert alpha(shifted) == pytest.approx(alpha(ops), abs=1e-9)

    def test_projected_full_space_equals_alpha(self):
        ops = single_sums("XI", "ZI")
        dense = [to_sparse(o).to_dense() for o in ops]
        assert alpha_projected(dense) == pytest.approx(alpha(ops), abs=1e-10)

    def test_projected_one_dim_sector_zero(self):
        mats = [np.array([[2.0]]), np.array([[3.0]])]
        assert alpha_projected(mats) == 0.0

    def test_projection_never_increases(self):
        sec = sector_basis([term("ZZ")], [+1], 2)
        ops = single_sums("ZI", "XX", "YY")
        dense = [project(to_sparse(o), sec, verify=False) for o in ops]
        assert alpha_projected(dense) <= alpha(ops) + 1e-8


class TestDescriptors:
    def test_two_equal_ranges(self):
        bound, total, entropy, omega = spectral_descriptors([2.0, 2.0])
        assert total == 4.0
        assert entropy == pytest.approx(0.5)
        assert bound == pytest.approx(4.0)
        np.testing.assert_allclose(omega, [0.5, 0.5])

    def test_single_fragment(self):
        bound, total, entropy, omega = spectral_descriptors([3.0])
        assert bound == 0.0 and entropy == 0.0 and total == 3.0

    def test_zero_total(self):
        bound, total, entropy, omega = spectral_descriptors([])
        assert (bound, total, entropy) == (0.0, 0.0, 0.0)
        assert omega.size == 0

    def test_identity_exact(self):
        rng = np.random.default_rng(2)
        deltas = rng.uniform(0.1, 3.0, size=7)
        bound, total, entropy, _ = spectral_descriptors(deltas)
        assert bound == pytest.approx(0.5 * total**2 * entropy, abs=1e-12)
        pairwise = sum(
            deltas[i] * deltas[j]
            for i in range(len(deltas))
            for j in range(i)
        )
        assert bound == pytest.approx(pairwise, rel=1e-12)


class TestL1Bound:
    def test_number_operator_tight(self):
        ps = PauliSum.from_terms([term("I", 0.5), term("Z", -0.5)])
        assert l1_bound(ps) == pytest.approx(0.5)
        lo, hi = np.linalg.eigvalsh(to_sparse(ps).to_dense())[[0, -1]]
        assert (hi - lo) / 2 == pytest.approx(0.5)

    def test_pure_identity_zero(self):
        assert l1_bound(PauliSum.identity(2, coeff=4.2)) == 0.0

    def test_spectra_check_flags_violation(self):
        spectra = FragmentSpectra(
            e_min=np.array([0.0]), e_max=np.array([10.0]), l1=np.array([1.0])
        )
        assert spectra.check() != []


class TestSecondOrder:
    def test_example(self):
        assert second_order_estimate(4.0, 0.5) == pytest.approx(16.0)

    def test_zero_entropy(self):
        assert second_order_estimate(7.0, 0.0) == 0.0

    @given(
        st.floats(0.1, 50.0),
        st.floats(0.2, 60.0),
        st.floats(0.01, 0.99),
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_total_range(self, c1, c2, entropy):
        lo, hi = sorted((c1, c2))
        if lo == hi:
            return
        assert second_order_estimate(lo, entropy) <= second_order_estimate(hi, entropy)


class TestTgate:
    def test_monotone_in_alpha(self):
        base, _ = tgate_count(0.2, 14, 1e-3)
        double, _ = tgate_count(0.4, 14, 1e-3)
        assert double > base

    def test_monotone_in_rotations(self):
        base, _ = tgate_count(0.2, 14, 1e-3)
        more, _ = tgate_count(0.2, 28, 1e-3)
        assert more > base

    @given(
        st.floats(-3.0, 3.0),
        st.floats(-3.0, 3.0),
        st.integers(1, 2000),
    )
    @settings(max_examples=40, deadline=None)
    def test_monotone_property(self, log_a, log_scale, n_r):
        a = 10.0**log_a
        scale = 10.0 ** abs(log_scale)
        if scale == 1.0:
            return
        small, _ = tgate_count(a, n_r, 1e-3, grid=48)
        large, _ = tgate_count(a * scale, n_r, 1e-3, grid=48)
        assert large > small

    def test_split_is_feasible(self):
        val, split = tgate_count(0.5, 100, 1e-3)
        assert split["eps_t"] > 0 and split["eps_pe"] > 0 and split["eps_ht"] > 0
        total = split["eps_t"] + split["eps_pe"] + split["eps_ht"]
        assert total == pytest.approx(1e-3)

    def test_invalid_inputs(self):
        with pytest.raises(ValidationError):
            tgate_count(0.0, 10, 1e-3)
        with pytest.raises(ValidationError):
            tgate_count(1.0, 0, 1e-3)
        with pytest.raises(ValidationError):
            tgate_count(1.0, 10, 0.0)


class TestBuildReport:
    def toy_partition(self):
        source = PauliSum.from_terms([term("X", 1.0), term("Z", 1.0)])
        groups = [
            PauliGroup(terms=[term("X", 1.0)], label=0),
            PauliGroup(terms=[term("Z", 1.0)], label=1),
        ]
        return QubitPartition(groups=groups, source=source, method="fc-si")

    def test_toy_two_fragment_report(self):
        report = build_report(self.toy_partition(), sector=None, molecule="toy")
        assert report.commutator_norm_sum == pytest.approx(4.0)
        assert report.spectral_range_bound == pytest.approx(4.0)
        assert report.total_spectral_range == pytest.approx(4.0)
        assert report.linearized_entropy == pytest.approx(0.5)
        assert report.rotation_count == 2
        assert report.check_invariants() == []

    def test_report_json_round_trip(self, tmp_path):
        report = build_report(self.toy_partition(), sector=None, molecule="toy")
        path = tmp_path / "report.json"
        report.save_json(path)
        obj = json.loads(path.read_text())
        assert obj["commutator_norm_sum"] == report.commutator_norm_sum
        assert json.loads(json.dumps(obj)) == obj

    def test_h2_gfro_invariants(self, h2):
        p = gfro_decompose(h2, threshold=1e-6, seed=0)
        report = build_report(
            p, mapping="jw", nelec=h2.nelec, epsilon=1e-3, molecule="h2"
        )
        assert report.check_invariants() == []
        assert report.projected_commutator_norm_sum <= report.commutator_norm_sum + 1e-8
        assert report.commutator_norm_sum <= report.spectral_range_bound + 1e-8

    def test_h2_lr_range_l1_chain(self, h2):
        p = lr_decompose(h2, threshold=0.0)
        report = build_report(p, mapping="jw", nelec=h2.nelec, molecule="h2")
        ranges = np.array(report.fragment_ranges)
        l1 = np.array(report.fragment_l1_bounds)
        assert np.all(0.5 * ranges <= l1 + 1e-8)

    def test_h2_bk_qubit_report(self, h2):
        hq = bravyi_kitaev(h2)
        p = group_si(hq)
        report = build_report(p, molecule="h2", epsilon=1e-3)
        assert report.check_invariants() == []
        assert report.rotation_count >= report.n_fragments

    def test_qubit_report_explicit_labels(self, h2):
        from hampart.spectra import find_pauli_symmetries

        hq = bravyi_kitaev(h2)
        p = group_si(hq)
        n_syms = len(find_pauli_symmetries([g.to_pauli_sum() for g in p.groups]))
        report = build_report(p, molecule="h2", sector=[+1] * n_syms)
        assert report.check_invariants() == []
        assert all(z == 1 for z in report.sector_labels.values())

    def test_fermionic_report_bad_sector_tuple(self, h2):
        p = lr_decompose(h2, threshold=0.0)
        with pytest.raises(ValidationError):
            build_report(p, mapping="jw", nelec=2, sector=(2.0, 0.0))

    def test_fermionic_report_explicit_sector(self, h2):
        p = lr_decompose(h2, threshold=0.0)
        report = build_report(
            p, mapping="jw", nelec=2, sector=(2, 0.0, 0.0), molecule="h2"
        )
        assert report.sector_labels == {"eta": 2, "m": 0.0, "s": 0.0}
        assert report.check_invariants() == []
