"""Partitioning Pauli sums into fully commuting groups.

Both heuristics work on the commutation structure of the non-identity
terms; the identity is routed to a scalar constant up front since it
commutes with everything and would only distort spectral ranges.
Term order is fixed (descending |coeff|, then lexicographic string) so
partitions are byte-for-byte reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ValidationError
from .pauli import PauliSum, PauliTerm


@dataclass
class PauliGroup:
    """Mutually commuting Pauli terms (checked on construction)."""

    terms: list[PauliTerm]
    label: int = 0

    def __post_init__(self):
        if self.terms:
            xs = np.array([t.x for t in self.terms], dtype=np.uint64)
            zs = np.array([t.z for t in self.terms], dtype=np.uint64)
            if not kernels.commutation_table(xs, zs).all():
                raise ValidationError(f"group {self.label} is not fully commuting")

    def __len__(self):
        return len(self.terms)

    def to_pauli_sum(self) -> PauliSum:
        return PauliSum.from_terms(self.terms)

    def l1_norm(self) -> float:
        return float(sum(abs(t.coeff) for t in self.terms))


@dataclass
class QubitPartition:
    """Disjoint fully commuting groups whose union is the source sum."""

    groups: list[PauliGroup]
    source: PauliSum
    constant: complex = 0.0
    method: str = ""
    annotations: dict = field(default_factory=dict)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_qubits(self) -> int:
        return self.source.n_qubits

    def to_json_obj(self) -> dict:
        return {
            "method": self.method,
            "n_qubits": self.n_qubits,
            "constant": [complex(self.constant).real, complex(self.constant).imag],
            "groups": [
                [
                    {"coeff": [t.coeff.real, t.coeff.imag], "string": t.string()}
                    for t in g.terms
                ]
                for g in self.groups
            ],
        }

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj()))


def _ordered_terms(h: PauliSum) -> list[PauliTerm]:
    terms = [t for t in h.terms() if not t.is_identity]
    return sorted(terms, key=lambda t: (-abs(t.coeff), t.string()))


@dataclass
class CommutationGraph:
    """Vertices are terms (deterministic order); edges mark commutation."""

    terms: list[PauliTerm]
    adjacency: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.terms)


def build_commutation_graph(h: PauliSum) -> CommutationGraph:
    terms = _ordered_terms(h)
    if not terms:
        raise ValidationError("cannot build a commutation graph without terms")
    xs = np.array([t.x for t in terms], dtype=np.uint64)
    zs = np.array([t.z for t in terms], dtype=np.uint64)
    adjacency = kernels.commutation_table(xs, zs)
    np.fill_diagonal(adjacency, False)
    return CommutationGraph(terms=terms, adjacency=adjacency)


def group_lf(h: PauliSum) -> QubitPartition:
    """Largest-first greedy coloring of the anticommutation graph.

    Vertices are visited in descending anticommutation degree (ties broken
    by the canonical term order) and take the smallest color not used by
    any anticommuting neighbour; color classes are the commuting groups.
    """
    rest, constant = h.without_identity()
    graph = build_commutation_graph(rest) if rest.n_terms else None
    groups: list[PauliGroup] = []
    if graph is not None:
        conflict = ~graph.adjacency
        np.fill_diagonal(conflict, False)
        degrees = conflict.sum(axis=1)
        order = np.lexsort((np.arange(len(degrees)), -degrees))
        colors = -np.ones(len(degrees), dtype=int)
        for v in order:
            used = set(colors[u] for u in np.flatnonzero(conflict[v]) if colors[u] >= 0)
            color = 0
            while color in used:
                color += 1
            colors[v] = color
        for color in range(colors.max() + 1):
            members = [graph.terms[i] for i in np.flatnonzero(colors == color)]
            groups.append(PauliGroup(terms=members, label=color))
    return QubitPartition(groups=groups, source=h, constant=constant, method="fc-lf")


def group_si(h: PauliSum) -> QubitPartition:
    """Sorted insertion: descending |coeff|, first group that fully commutes."""
    rest, constant = h.without_identity()
    terms = _ordered_terms(rest)
    group_terms: list[list[PauliTerm]] = []
    group_xs: list[np.ndarray] = []
    group_zs: list[np.ndarray] = []
    for t in terms:
        x = np.array([t.x], dtype=np.uint64)
        z = np.array([t.z], dtype=np.uint64)
        placed = False
        for gi in range(len(group_terms)):
            if kernels.commutation_table_cross(x, z, group_xs[gi], group_zs[gi]).all():
                group_terms[gi].append(t)
                group_xs[gi] = np.append(group_xs[gi], x)
                group_zs[gi] = np.append(group_zs[gi], z)
                placed = True
                break
        if not placed:
            group_terms.append([t])
            group_xs.append(x)
            group_zs.append(z)
    groups = [PauliGroup(terms=g, label=i) for i, g in enumerate(group_terms)]
    return QubitPartition(groups=groups, source=h, constant=constant, method="fc-si")


def qubit_rotation_count(p: QubitPartition) -> tuple[int, list[int]]:
    """Single-qubit rotations per product step: one per non-identity term."""
    per_group = [len(g) for g in p.groups]
    return sum(per_group), per_group


def check_partition(p: QubitPartition, tol: float = 0.0) -> list[str]:
    """Structural soundness report (empty list iff sound)."""
    problems: list[str] = []
    for g in p.groups:
        xs = np.array([t.x for t in g.terms], dtype=np.uint64)
        zs = np.array([t.z for t in g.terms], dtype=np.uint64)
        if len(g.terms) and not kernels.commutation_table(xs, zs).all():
            problems.append(f"group {g.label} contains anticommuting terms")
    merged: dict[tuple[int, int], complex] = {}
    for g in p.groups:
        for t in g.terms:
            key = (t.x, t.z)
            if key in merged:
                problems.append(f"term {t.string()} appears in several groups")
            merged[key] = t.coeff
    rest, _ = p.source.without_identity()
    source = {(int(x), int(z)): c for x, z, c in zip(rest.xs, rest.zs, rest.coeffs)}
    if set(merged) != set(source):
        problems.append("group union differs from the source term set")
    else:
        for key, coeff in merged.items():
            if abs(coeff - source[key]) > tol:
                problems.append(f"coefficient mismatch on {key}")
    return problems
