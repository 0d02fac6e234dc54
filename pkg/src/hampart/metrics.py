"""Trotter-error measures, spectral-range descriptors and T-gate estimates.

For an ordered fragment list H_1..H_G the first-order product formula has
error governed by commutator norms:

- ordered sum:   sum_n ||[H_n, sum_{n'<n} H_{n'}]||     (order dependent)
- pairwise sum:  sum_{n != n'} ||[H_n, H_{n'}]||        (>= 2x ordered)
- range bound:   sum_{i>j} dE_i dE_j                    (>= pairwise sum)

where dE is a fragment's spectral range.  With C = sum dE and the
linearized entropy S_L = 1 - sum (dE_i / C)^2 the range bound equals
C^2 S_L / 2, which separates the two levers a partition can pull: total
range and range non-uniformity.  All of these can be evaluated after
projecting every fragment on a joint symmetry sector, which tightens them.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import blocks as blk
from . import spectra as spc
from .errors import ValidationError
from .fermionic import FermionPartition, fermionic_rotation_count
from .grouping import QubitPartition, qubit_rotation_count
from .pauli import PauliSum, bravyi_kitaev, commutator, jordan_wigner

REPORT_COLUMNS = [
    "molecule",
    "method",
    "mapping",
    "n_fragments",
    "commutator_norm_sum",
    "ordered_commutator_norm",
    "projected_commutator_norm_sum",
    "spectral_range_bound",
    "projected_spectral_range_bound",
    "total_spectral_range",
    "projected_total_spectral_range",
    "linearized_entropy",
    "projected_linearized_entropy",
    "rotation_count",
    "figure_of_merit",
    "t_gate_count",
    "epsilon",
    "complete",
]


@dataclass
class FragmentSpectra:
    """Per-fragment extreme eigenvalues, ranges and LCU L1 norms."""

    e_min: np.ndarray
    e_max: np.ndarray
    l1: np.ndarray
    labels: dict = field(default_factory=dict)

    @property
    def ranges(self) -> np.ndarray:
        return self.e_max - self.e_min

    def check(self, tol: float = 1e-8) -> list[str]:
        problems = []
        if np.any(self.ranges < -tol):
            problems.append("negative spectral range")
        excess = 0.5 * self.ranges - self.l1
        if np.any(excess > tol):
            i = int(np.argmax(excess))
            problems.append(
                f"fragment {i}: range/2 = {self.ranges[i] / 2:.6e} exceeds "
                f"LCU L1 bound {self.l1[i]:.6e}"
            )
        return problems


def spectral_descriptors(deltas) -> tuple[float, float, float, np.ndarray]:
    """(range bound, total range, linearized entropy, weights).

    The bound is computed as C^2 S_L / 2, making the identity with the
    pairwise-product form exact by construction.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.size and deltas.min() < 0.0:
        raise ValidationError("spectral ranges must be non-negative")
    total = float(deltas.sum())
    if total == 0.0:
        return 0.0, 0.0, 0.0, np.empty(0)
    omega = deltas / total
    entropy = float(1.0 - np.sum(omega * omega))
    bound = 0.5 * total * total * entropy
    return bound, total, entropy, omega


def l1_bound(fragment: PauliSum) -> float:
    """Sum_k |c_k| over non-identity terms; upper-bounds range/2."""
    return fragment.l1_norm(include_identity=False)


def second_order_estimate(total_range: float, entropy: float) -> float:
    """Closed-form second-order product-formula estimator C^3 S_L / 2."""
    if total_range < 0.0:
        raise ValidationError("total range must be non-negative")
    if not (0.0 <= entropy < 1.0 + 1e-12):
        raise ValidationError("linearized entropy must lie in [0, 1)")
    return 0.5 * total_range**3 * entropy


# ---------------------------------------------------------------------------
# commutator-norm sums


class Budget:
    """Wall-clock budget checked between pair jobs, never mid-solve."""

    def __init__(self, seconds: float | None):
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.exhausted = False

    def ok(self) -> bool:
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.exhausted = True
        return not self.exhausted


def _pair_norm_blocks(a, b) -> float:
    return blk.commutator_norm_blocks(a, b)


class MappedFragment:
    """Pauli sum paired with its sparse matrix (built once, reused per pair)."""

    __slots__ = ("psum", "op")

    def __init__(self, psum: PauliSum, cap: int = spc.QUBIT_CAP):
        self.psum = psum
        self.op = spc.to_sparse(psum, cap=cap)

    def __add__(self, other: "MappedFragment") -> "MappedFragment":
        out = MappedFragment.__new__(MappedFragment)
        out.psum = self.psum + other.psum
        out.op = spc.SparseOp(self.op.matrix + other.op.matrix, self.op.n_qubits)
        return out


def _pair_norm_mapped(a: MappedFragment, b: MappedFragment) -> float:
    # Exact symbolic prune: commutators that cancel termwise cost nothing.
    if commutator(a.psum, b.psum).n_terms == 0:
        return 0.0
    return spc.commutator_norm(a.op, b.op)


def _pair_norm_sums(a: PauliSum, b: PauliSum, cap: int) -> float:
    comm = commutator(a, b)
    if comm.n_terms == 0:
        return 0.0
    herm = comm.scaled(1j)
    lo, hi = spc.extreme_eigenvalues(spc.to_sparse(herm, cap=cap))
    return max(abs(lo), abs(hi))


def alpha(ops, budget: Budget | None = None, pair_norm=None) -> float:
    """Sum over ordered pairs n != n' of ||[H_n, H_{n'}]|| (double counted)."""
    if not ops:
        raise ValidationError("alpha requires at least one fragment")
    pair_norm = pair_norm or _dispatch_pair_norm(ops)
    total = 0.0
    lazy = isinstance(ops[0], blk.BlockOperator)
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if budget is not None and not budget.ok():
                return total
            total += 2.0 * pair_norm(ops[i], ops[j])
            if lazy:
                ops[j].clear_cache()
        if lazy:
            ops[i].clear_cache()
    return total


def alpha_ordered(ops, budget: Budget | None = None, pair_norm=None) -> float:
    """Order-dependent sum ||[H_n, sum_{n'<n} H_{n'}]|| over the stored order."""
    if not ops:
        raise ValidationError("ordered alpha requires at least one fragment")
    pair_norm = pair_norm or _dispatch_pair_norm(ops)
    total = 0.0
    lazy = isinstance(ops[0], blk.BlockOperator)
    partial = ops[0]
    for n in range(1, len(ops)):
        if budget is not None and not budget.ok():
            return total
        total += pair_norm(ops[n], partial)
        if lazy:
            partial.clear_cache()
            ops[n].clear_cache()
        partial = _accumulate(partial, ops[n])
    return total


def _dispatch_pair_norm(ops):
    first = ops[0]
    if isinstance(first, (dict, blk.BlockOperator)):
        return _pair_norm_blocks
    if isinstance(first, MappedFragment):
        return _pair_norm_mapped
    if isinstance(first, PauliSum):
        cap = max(op.n_qubits for op in ops)
        return lambda a, b: _pair_norm_sums(a, b, cap)
    if isinstance(first, np.ndarray):
        return lambda a, b: blk._dense_commutator_norm(a, b)
    return spc.commutator_norm


def _accumulate(partial, op):
    if isinstance(partial, dict):
        return blk.add_blocks([partial, op])
    return partial + op  # PauliSum and BlockOperator both define +


def alpha_projected(projected_ops, budget: Budget | None = None) -> float:
    """Pairwise sum on sector-projected fragments (dense matrices)."""
    if not projected_ops:
        raise ValidationError("projected alpha requires at least one fragment")
    if projected_ops[0].shape[0] == 1:
        return 0.0
    return alpha(projected_ops, budget=budget, pair_norm=blk._dense_commutator_norm)


# ---------------------------------------------------------------------------
# T-gate model


def _tgate_value(alpha_val, n_r, epsilon, eps_t, eps_pe):
    eps_ht = epsilon - eps_t - eps_pe
    pref = 0.76 * np.pi * alpha_val * n_r / (eps_t * (epsilon - eps_t))
    bracket = 1.15 * np.log2(alpha_val * n_r / (eps_ht * eps_t)) + 9.2
    return pref * np.maximum(bracket, 1.0)


def tgate_count(
    alpha_val: float, n_r: int, epsilon: float, grid: int = 128
) -> tuple[float, dict]:
    """Minimal T-gate estimate over the split of the total error budget.

    The budget epsilon = eps_T + eps_HT + eps_PE is scanned on a coarse
    log-spaced grid over (eps_T, eps_PE), then refined on a second grid
    around the coarse argmin.  Returns the minimum and the argmin split.
    """
    if alpha_val <= 0.0:
        raise ValidationError("alpha must be positive")
    if n_r < 1:
        raise ValidationError("rotation count must be at least 1")
    if epsilon <= 0.0:
        raise ValidationError("epsilon must be positive")

    def scan(t_lo, t_hi, f_lo, f_hi):
        eps_t = np.geomspace(t_lo, t_hi, grid)
        frac = np.geomspace(f_lo, f_hi, grid)
        tt = eps_t[:, None]
        pe = frac[None, :] * (epsilon - tt)
        vals = _tgate_value(alpha_val, n_r, epsilon, tt, pe)
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        return float(vals[idx]), float(eps_t[idx[0]]), float(frac[idx[1]])

    best, t_star, f_star = scan(
        epsilon * 1e-6, epsilon * (1.0 - 1e-6), 1e-6, 1.0 - 1e-6
    )
    # Local refinement: one decade around the coarse optimum, clipped.
    best2, t_star, f_star = scan(
        max(epsilon * 1e-7, t_star / 3.0),
        min(epsilon * (1.0 - 1e-7), t_star * 3.0),
        max(1e-7, f_star / 3.0),
        min(1.0 - 1e-7, f_star * 3.0),
    )
    best = min(best, best2)
    eps_pe = f_star * (epsilon - t_star)
    split = {
        "eps_t": t_star,
        "eps_pe": eps_pe,
        "eps_ht": epsilon - t_star - eps_pe,
    }
    return best, split


# ---------------------------------------------------------------------------
# report assembly


@dataclass
class TrotterReport:
    molecule: str
    method: str
    mapping: str
    n_fragments: int
    commutator_norm_sum: float
    ordered_commutator_norm: float
    projected_commutator_norm_sum: float
    spectral_range_bound: float
    projected_spectral_range_bound: float
    total_spectral_range: float
    projected_total_spectral_range: float
    linearized_entropy: float
    projected_linearized_entropy: float
    rotation_count: int
    figure_of_merit: float
    t_gate_count: float
    epsilon: float
    complete: bool = True
    sector_labels: dict = field(default_factory=dict)
    annotations: list[str] = field(default_factory=list)
    fragment_ranges: list[float] = field(default_factory=list)
    fragment_l1_bounds: list[float] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        out = {col: getattr(self, col) for col in REPORT_COLUMNS}
        out["sector_labels"] = self.sector_labels
        out["annotations"] = self.annotations
        out["fragment_ranges"] = self.fragment_ranges
        out["fragment_l1_bounds"] = self.fragment_l1_bounds
        return out

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), sort_keys=True))

    def csv_row(self) -> str:
        cells = []
        for col in REPORT_COLUMNS:
            val = getattr(self, col)
            if isinstance(val, float):
                cells.append(f"{val:.12e}")
            else:
                cells.append(str(val))
        return ",".join(cells)

    def check_invariants(self, tol: float = 1e-8) -> list[str]:
        problems = []
        if self.commutator_norm_sum > self.spectral_range_bound + tol:
            problems.append("pairwise sum exceeds its spectral-range bound")
        if 2.0 * self.ordered_commutator_norm > self.commutator_norm_sum + tol:
            problems.append("ordered sum exceeds half the pairwise sum")
        if self.projected_commutator_norm_sum > self.commutator_norm_sum + tol:
            problems.append("projection increased the pairwise sum")
        if (
            self.projected_spectral_range_bound
            > self.spectral_range_bound + tol
        ):
            problems.append("projection increased the range bound")
        beta_identity = (
            0.5
            * self.total_spectral_range**2
            * self.linearized_entropy
        )
        if abs(beta_identity - self.spectral_range_bound) > 1e-10:
            problems.append("range bound violates the C^2 S_L / 2 identity")
        return problems


def csv_header() -> str:
    return ",".join(REPORT_COLUMNS)


def _fragment_pauli_sums(p: FermionPartition, mapping: str) -> list[PauliSum]:
    mapper = jordan_wigner if mapping == "jw" else bravyi_kitaev
    return [mapper(frag, n_qubits=p.n_spin) for frag in p.fragments]


def fermionic_report(
    partition: FermionPartition,
    mapping: str = "jw",
    nelec: int | None = None,
    sector: str | tuple | None = "auto-neutral-ground",
    epsilon: float = 1e-3,
    molecule: str = "",
    time_budget: float | None = None,
) -> TrotterReport:
    """All metrics for a fermionic partition via the number-sector realization."""
    p = partition
    if not p.fragments:
        raise ValidationError("cannot report on an empty partition")
    budget = Budget(time_budget)
    table = blk.SectorTable(p.n_spin)
    frag_blocks = [blk.fragment_block_operator(f, table) for f in p.fragments]

    # Spectral ranges are exact via occupation enumeration.
    e_all = [f.occupation_energies() for f in p.fragments]
    e_min = np.array([e.min() for e in e_all])
    e_max = np.array([e.max() for e in e_all])

    pauli = _fragment_pauli_sums(p, mapping)
    l1 = np.array([l1_bound(ps) for ps in pauli])
    spectra_full = FragmentSpectra(e_min=e_min, e_max=e_max, l1=l1)

    annotations: list[str] = []
    a_val = alpha(frag_blocks, budget=budget)
    a_ord = alpha_ordered(frag_blocks, budget=budget)

    # Symmetry sector: (eta, m, s) with the documented downgrade to (eta, m).
    labels: dict = {}
    if sector == "auto-neutral-ground":
        if nelec is None:
            raise ValidationError(
                "auto-neutral-ground requires the electron count"
            )
        eta, m_z, s = nelec, 0.0, 0.0
    elif sector is None:
        eta = m_z = s = None
    else:
        if len(sector) != 3:
            raise ValidationError(
                "fermionic sector labels are (eta, m, s); "
                f"got {len(sector)} values"
            )
        eta, m_z, s = sector
        eta = int(eta)
    if eta is not None:
        key = blk.sector_for_labels(table, eta, m_z)
        if s is not None:
            s2 = blk.spin_squared_block(table, *key)
            worst = 0.0
            for fb in frag_blocks:
                block = fb.block(key)
                worst = max(
                    worst, float(np.abs(block @ s2 - s2 @ block).max())
                )
            if worst > 1e-6:
                annotations.append(
                    f"fragment violates total-spin symmetry by {worst:.3e}; "
                    "projection downgraded to (eta, m)"
                )
                s = None
        key, vectors = blk.spin_sector_vectors(table, eta, m_z, s)
        labels = {"eta": eta, "m": m_z, "s": s}
        projected = [
            vectors.T @ fb.block(key) @ vectors for fb in frag_blocks
        ]
        a_proj = alpha_projected(projected, budget=budget)
        ranges_proj = []
        for mat in projected:
            if mat.shape[0] == 0:
                ranges_proj.append(0.0)
                continue
            w = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
            ranges_proj.append(float(w[-1] - w[0]))
        beta_q, c_q, s_l_q, _ = spectral_descriptors(ranges_proj)
    else:
        a_proj = a_val
        beta_q, c_q, s_l_q, _ = spectral_descriptors(spectra_full.ranges)

    beta, c_tot, s_l, _ = spectral_descriptors(spectra_full.ranges)
    count = fermionic_rotation_count(p)
    n_r = count.total
    if a_proj > 0.0:
        n_t, _ = tgate_count(a_proj, n_r, epsilon)
    else:
        n_t = 0.0
        annotations.append("projected commutator sum is zero; no T-gate cost")
    if budget.exhausted:
        annotations.append("time budget exhausted; commutator sums are partial")
    for problem in spectra_full.check():
        annotations.append(f"spectra check: {problem}")
    return TrotterReport(
        molecule=molecule,
        method=p.method,
        mapping=mapping,
        n_fragments=p.n_fragments,
        commutator_norm_sum=a_val,
        ordered_commutator_norm=a_ord,
        projected_commutator_norm_sum=a_proj,
        spectral_range_bound=beta,
        projected_spectral_range_bound=beta_q,
        total_spectral_range=c_tot,
        projected_total_spectral_range=c_q,
        linearized_entropy=s_l,
        projected_linearized_entropy=s_l_q,
        rotation_count=n_r,
        figure_of_merit=a_proj * n_r,
        t_gate_count=n_t,
        epsilon=epsilon,
        complete=not budget.exhausted,
        sector_labels=labels,
        annotations=annotations,
        fragment_ranges=[float(x) for x in spectra_full.ranges],
        fragment_l1_bounds=[float(x) for x in l1],
    )


def qubit_report(
    partition: QubitPartition,
    epsilon: float = 1e-3,
    molecule: str = "",
    mapping: str = "bk",
    sector: str | list | None = "auto-neutral-ground",
    cap: int = spc.QUBIT_CAP,
    time_budget: float | None = None,
) -> TrotterReport:
    """All metrics for a commuting-group partition (sparse realizations)."""
    p = partition
    if not p.groups:
        raise ValidationError("cannot report on an empty partition")
    budget = Budget(time_budget)
    sums = [g.to_pauli_sum() for g in p.groups]
    mapped = [MappedFragment(s, cap=cap) for s in sums]
    ops = [m.op for m in mapped]

    e_min = np.empty(len(ops))
    e_max = np.empty(len(ops))
    for i, op in enumerate(ops):
        lo, hi = spc.extreme_eigenvalues(op)
        e_min[i], e_max[i] = lo, hi
    l1 = np.array([l1_bound(s) for s in sums])
    spectra_full = FragmentSpectra(e_min=e_min, e_max=e_max, l1=l1)

    annotations: list[str] = []
    a_val = alpha(mapped, budget=budget)
    a_ord = alpha_ordered(mapped, budget=budget)

    labels: dict = {}
    symmetries = spc.find_pauli_symmetries(sums)
    if sector is not None and symmetries:
        if sector == "auto-neutral-ground":
            full = spc.to_sparse(p.source, cap=cap)
            _, ground = spc.ground_state(full)
            zetas = []
            for q in symmetries:
                col = spc._apply_pauli_to_columns(q, ground[:, None])[:, 0]
                expect = float(np.real(np.vdot(ground, col)))
                if abs(expect) < 0.5:
                    annotations.append(
                        f"symmetry {q.string()} has ambiguous ground-state "
                        f"expectation {expect:.3f}"
                    )
                zetas.append(+1 if expect >= 0.0 else -1)
        else:
            zetas = list(sector)
        sec = spc.sector_basis(symmetries, zetas, p.n_qubits)
        labels = sec.labels
        projected = [spc.project(op, sec, verify=False) for op in ops]
        a_proj = alpha_projected(projected, budget=budget)
        ranges_proj = []
        for mat in projected:
            w = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
            ranges_proj.append(float(w[-1] - w[0]) if w.size else 0.0)
        beta_q, c_q, s_l_q, _ = spectral_descriptors(ranges_proj)
    else:
        if sector is not None and not symmetries:
            annotations.append("no single-Pauli symmetries found; no projection")
        a_proj = a_val
        beta_q, c_q, s_l_q, _ = spectral_descriptors(spectra_full.ranges)

    beta, c_tot, s_l, _ = spectral_descriptors(spectra_full.ranges)
    n_r, _ = qubit_rotation_count(p)
    if a_proj > 0.0 and n_r >= 1:
        n_t, _ = tgate_count(a_proj, n_r, epsilon)
    else:
        n_t = 0.0
        annotations.append("projected commutator sum is zero; no T-gate cost")
    if budget.exhausted:
        annotations.append("time budget exhausted; commutator sums are partial")
    for problem in spectra_full.check():
        annotations.append(f"spectra check: {problem}")
    return TrotterReport(
        molecule=molecule,
        method=p.method,
        mapping=mapping,
        n_fragments=p.n_groups,
        commutator_norm_sum=a_val,
        ordered_commutator_norm=a_ord,
        projected_commutator_norm_sum=a_proj,
        spectral_range_bound=beta,
        projected_spectral_range_bound=beta_q,
        total_spectral_range=c_tot,
        projected_total_spectral_range=c_q,
        linearized_entropy=s_l,
        projected_linearized_entropy=s_l_q,
        rotation_count=n_r,
        figure_of_merit=a_proj * n_r,
        t_gate_count=n_t,
        epsilon=epsilon,
        complete=not budget.exhausted,
        sector_labels=labels,
        annotations=annotations,
        fragment_ranges=[float(x) for x in spectra_full.ranges],
        fragment_l1_bounds=[float(x) for x in l1],
    )


def build_report(partition, **kwargs) -> TrotterReport:
    """Dispatch on the partition family; see the family-specific builders."""
    if isinstance(partition, FermionPartition):
        return fermionic_report(partition, **kwargs)
    if isinstance(partition, QubitPartition):
        return qubit_report(partition, **kwargs)
    raise TypeError(f"unsupported partition type {type(partition).__name__}")
