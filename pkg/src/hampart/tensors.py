"""Molecular integral tensors and the second-quantized Hamiltonian.

The internal two-electron tensor ``g`` is stored in the *unordered* product
convention

    H = constant + sum_pq h[p,q] a+_p a_q + sum_pqrs g[p,q,r,s] a+_p a_q a+_r a_s

(creation/annihilation pairs, not normal ordered), because the low-rank
supermatrix construction needs g indexed by (pq) and (rs) pairs.  Chemist
integrals (PQ|RS) map onto it as g = (pq|rs)/2 after spin expansion, at the
price of a one-body correction: moving a+ a a+ a to a+ a+ a a produces the
contraction delta_qr a+_p a_s, so the stored one-body matrix is

    h[p,q] = h_core[p,q] - 1/2 sum_k (pk|kq).

Spin orbitals are interleaved: mode 2P is spin-up and 2P+1 spin-down of
spatial orbital P.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BoundsError, MalformedInputError, SchemaError, ValidationError

JSON_SCHEMA_VERSION = 1
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class MolecularTensors:
    """Validated one- and two-electron integrals over spin orbitals."""

    constant: float
    h: np.ndarray
    g: np.ndarray
    nelec: int | None = None

    def __post_init__(self):
        h = np.ascontiguousarray(np.asarray(self.h, dtype=np.float64))
        g = np.ascontiguousarray(np.asarray(self.g, dtype=np.float64))
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValidationError(f"h must be square, got shape {h.shape}")
        n = h.shape[0]
        if n % 2:
            raise ValidationError(f"spin-orbital count must be even, got {n}")
        if g.shape != (n, n, n, n):
            raise ValidationError(f"g must have shape {(n, n, n, n)}, got {g.shape}")
        h.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def n_spin(self) -> int:
        return self.h.shape[0]

    @property
    def n_spatial(self) -> int:
        return self.h.shape[0] // 2

    def __eq__(self, other):
        if not isinstance(other, MolecularTensors):
            return NotImplemented
        return (
            self.constant == other.constant
            and self.nelec == other.nelec
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.g, other.g)
        )


def validate(t: MolecularTensors, tol: float = SYMMETRY_TOL) -> list[str]:
    """Return human-readable invariant violations (empty list iff valid).

    Tolerances are relative to the largest tensor entry.
    """
    violations: list[str] = []
    h, g = t.h, t.g
    if not np.all(np.isfinite(h)):
        violations.append("h contains non-finite entries")
    if not np.all(np.isfinite(g)):
        violations.append("g contains non-finite entries")
    if violations:
        return violations

    scale_h = max(np.abs(h).max(), 1.0)
    dh = np.abs(h - h.T)
    if dh.max() > tol * scale_h:
        p, q = np.unravel_index(int(np.argmax(dh)), dh.shape)
        violations.append(
            f"h not symmetric: |h[{p},{q}] - h[{q},{p}]| = {dh[p, q]:.3e}"
        )

    scale_g = max(np.abs(g).max(), 1.0)
    for name, perm in (("g[q,p,s,r]", (1, 0, 3, 2)), ("g[r,s,p,q]", (2, 3, 0, 1))):
        dg = np.abs(g - g.transpose(perm))
        if dg.max() > tol * scale_g:
            idx = np.unravel_index(int(np.argmax(dg)), dg.shape)
            violations.append(
                f"g supermatrix symmetry violated vs {name} at {idx}: "
                f"deviation {dg[idx]:.3e}"
            )
    return violations


def _check_spatial_symmetry(h_spatial, g_spatial, tol=1e-10):
    h = np.asarray(h_spatial, dtype=np.float64)
    g = np.asarray(g_spatial, dtype=np.float64)
    if np.abs(h - h.T).max() > tol * max(1.0, np.abs(h).max()):
        raise ValidationError("spatial h is not symmetric")
    scale = max(1.0, np.abs(g).max())
    for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
        if np.abs(g - g.transpose(perm)).max() > tol * scale:
            raise ValidationError(
                f"spatial g lacks 8-fold chemist symmetry (transpose {perm})"
            )
    return h, g


def expand_to_spin_orbitals(
    h_spatial, g_spatial, constant: float = 0.0, nelec: int | None = None
) -> MolecularTensors:
    """Expand spatial chemist integrals (PQ|RS) to interleaved spin orbitals.

    Returns tensors in the internal ordering described in the module
    docstring: g = (pq|rs)/2 restricted to same-spin (p,q) and (r,s) pairs,
    with the reordering correction folded into h.
    """
    h_sp, g_sp = _check_spatial_symmetry(h_spatial, g_spatial)
    m = h_sp.shape[0]
    n = 2 * m
    h = np.zeros((n, n))
    g = np.zeros((n, n, n, n))
    for s1 in (0, 1):
        h[s1::2, s1::2] = h_sp
        for s2 in (0, 1):
            g[s1::2, s1::2, s2::2, s2::2] = 0.5 * g_sp
    # a+_p a_q a+_r a_s = a+_p a+_r a_s a_q + delta_qr a+_p a_s, hence the
    # stored one-body matrix absorbs -1/2 sum_K (PK|KQ) per spin.
    corr = -0.5 * np.einsum("pkkq->pq", g_sp)
    h[0::2, 0::2] += corr
    h[1::2, 1::2] += corr
    return MolecularTensors(constant=float(constant), h=h, g=g, nelec=nelec)


_HEADER_INT = {
    key: re.compile(rf"{key}\s*=\s*([+-]?\d+)", re.IGNORECASE)
    for key in ("NORB", "NELEC", "MS2")
}


def load_fcidump(path) -> MolecularTensors:
    """Parse an FCIDUMP file (chemist notation, 1-based spatial indices)."""
    path = Path(path)
    lines = path.read_text().splitlines()

    header_lines = []
    body_start = None
    for i, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper().replace(" ", "")
        if stripped.endswith("&END") or stripped.endswith("/"):
            body_start = i + 1
            break
    if body_start is None:
        raise MalformedInputError("no &END/'/' terminator found in FCIDUMP header")
    header = " ".join(header_lines)
    if "&FCI" not in header.upper():
        raise MalformedInputError("missing &FCI namelist marker", line=1)

    values = {}
    for key, rex in _HEADER_INT.items():
        match = rex.search(header)
        if match is None:
            raise MalformedInputError(f"header does not declare {key}", line=1)
        values[key] = int(match.group(1))
    norb, nelec = values["NORB"], values["NELEC"]

    h = np.zeros((norb, norb))
    g = np.zeros((norb, norb, norb, norb))
    constant = 0.0
    for lineno, raw in enumerate(lines[body_start:], start=body_start + 1):
        text = raw.strip()
        if not text:
            continue
        parts = text.replace("D", "E").replace("d", "e").split()
        if len(parts) != 5:
            raise MalformedInputError(
                f"expected 'value i j k l', got {raw!r}", line=lineno
            )
        try:
            val = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError as exc:
            raise MalformedInputError(str(exc), line=lineno) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise BoundsError(
                    f"line {lineno}: index {idx} outside declared NORB={norb}"
                )
        if i == j == k == l == 0:
            constant = val
        elif k == 0 and l == 0:
            h[i - 1, j - 1] = val
            h[j - 1, i - 1] = val
        else:
            if 0 in (i, j, k, l):
                raise MalformedInputError(
                    f"mixed zero/nonzero indices {i, j, k, l}", line=lineno
                )
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b in ((p, q), (q, p)):
                for c, d in ((r, s), (s, r)):
                    g[a, b, c, d] = val
                    g[c, d, a, b] = val
    return expand_to_spin_orbitals(h, g, constant=constant, nelec=nelec)


def save_json(t: MolecularTensors, path) -> None:
    """Serialize tensors; floats round-trip bit-exactly via repr."""
    obj = {
        "version": JSON_SCHEMA_VERSION,
        "n_spatial": t.n_spatial,
        "constant": t.constant,
        "h": t.h.ravel().tolist(),
        "g": t.g.ravel().tolist(),
    }
    if t.nelec is not None:
        obj["nelec"] = t.nelec
    Path(path).write_text(json.dumps(obj))


def load_json(path) -> MolecularTensors:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}", line=exc.lineno) from None
    if not isinstance(obj, dict) or "version" not in obj:
        raise SchemaError("missing schema version field")
    if obj["version"] != JSON_SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported schema version {obj['version']} "
            f"(expected {JSON_SCHEMA_VERSION})"
        )
    for key in ("n_spatial", "constant", "h", "g"):
        if key not in obj:
            raise SchemaError(f"missing required key {key!r}")
    m = int(obj["n_spatial"])
    n = 2 * m
    h = np.asarray(obj["h"], dtype=np.float64)
    g = np.asarray(obj["g"], dtype=np.float64)
    if h.size != n * n:
        raise SchemaError(f"h has {h.size} entries, expected {n * n}")
    if g.size != n**4:
        raise SchemaError(f"g has {g.size} entries, expected {n**4}")
    t = MolecularTensors(
        constant=float(obj["constant"]),
        h=h.reshape(n, n),
        g=g.reshape(n, n, n, n),
        nelec=int(obj["nelec"]) if "nelec" in obj else None,
    )
    problems = validate(t)
    if problems:
        raise ValidationError("; ".join(problems))
    return t


@dataclass
class FermionOperator:
    """Sparse sum of ladder-operator products.

    Each term is ``(ops, coeff)`` where ``ops`` is a tuple of
    ``(mode, action)`` pairs applied right to left and ``action`` is 1 for
    creation, 0 for annihilation.  ``((0, 1), (1, 0))`` is a+_0 a_1.
    """

    terms: list[tuple[tuple[tuple[int, int], ...], complex]] = field(
        default_factory=list
    )

    def __post_init__(self):
        for ops, coeff in self.terms:
            if not np.isfinite(coeff):
                raise ValidationError(f"non-finite coefficient for {ops}")
            for mode, action in ops:
                if mode < 0:
                    raise ValidationError(f"negative mode index {mode}")
                if action not in (0, 1):
                    raise ValidationError(f"action must be 0 or 1, got {action}")

    @property
    def n_modes(self) -> int:
        return 1 + max(
            (mode for ops, _ in self.terms for mode, _ in ops), default=-1
        )

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        return FermionOperator(self.terms + other.terms)

    def scaled(self, factor) -> "FermionOperator":
        return FermionOperator([(ops, factor * c) for ops, c in self.terms])


def tensors_to_fermion_operator(t: MolecularTensors, tol: float = 0.0) -> FermionOperator:
    """Expand (constant, h, g) into an explicit ladder-operator sum."""
    terms: list[tuple[tuple[tuple[int, int], ...], complex]] = []
    if t.constant != 0.0:
        terms.append(((), t.constant))
    n = t.n_spin
    for p in range(n):
        for q in range(n):
            if abs(t.h[p, q]) > tol:
                terms.append((((p, 1), (q, 0)), t.h[p, q]))
    nz = np.argwhere(np.abs(t.g) > tol)
    for p, q, r, s in nz:
        terms.append(
            (((int(p), 1), (int(q), 0), (int(r), 1), (int(s), 0)), t.g[p, q, r, s])
        )
    return FermionOperator(terms)
