"""Decomposition of two-electron tensors into orbital-rotation-solvable fragments.

Every fragment is of the form U^dag D U with U an orbital rotation (ordered
Givens product, see :mod:`hampart.rotations`) and D diagonal in occupation
numbers:

- kind "one-electron":    D = sum_p onebody[p] n_p
- kind "lr":              D = (sum_p epsilon[p] n_p)^2        (rank-1 lambda)
- kind "fr":              D = sum_ij lam[i,j] n_i n_j
- kind "lcu-reflection":  D = sum_ij lam[i,j] r_i r_j,  r = 1 - 2 n

Supported decompositions: eigendecomposition of the two-electron
supermatrix (low rank), joint full-rank optimization, greedy full-rank
optimization, one-body folding (singles-and-doubles pre-processing), and
the reflection rewrite that shrinks fragment L1 norms.

Optimization eliminates lambda analytically: for any orthogonal O the
Khatri-Rao columns (o_i x o_i) are orthonormal in the supermatrix space,
so the best lambda at fixed angles is the congruence W^T G W and only the
angles need iterating (quasi-Newton with analytic gradients on the smooth
least-squares surrogate; thresholds are evaluated on the true tensor L1).

Molecular tensors carry identical spin blocks; those are optimized in the
spatial-orbital parametrization (rotations equal for both spins, lambda
uniform over spin blocks), which preserves particle number, S_z and S^2
for every fragment.  Generic tensors fall back to spin-orbital angles
restricted to same-spin pairs, preserving particle number and S_z.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .errors import InternalConsistencyError, ValidationError
from .rotations import (
    diagonalize_one_body,
    eigh_deterministic,
    fix_determinant,
    interleave_spin_matrix,
    n_angles,
    pair_order,
    rotation_matrix,
    rotation_to_angles,
    spin_blocks,
)
from .tensors import MolecularTensors

KINDS = ("one-electron", "lr", "fr", "lcu-reflection")


@dataclass
class FermionFragment:
    """One fast-forwardable part: rotation angles plus diagonal-frame data."""

    kind: str
    angles: np.ndarray
    epsilon: np.ndarray | None = None
    lam: np.ndarray | None = None
    onebody: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown fragment kind {self.kind!r}")
        self.angles = np.asarray(self.angles, dtype=np.float64)
        for name in ("epsilon", "lam", "onebody"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, np.asarray(val, dtype=np.float64))
        if self.kind == "lr" and self.epsilon is None:
            raise ValidationError("lr fragments require an epsilon vector")
        if self.kind == "one-electron" and self.onebody is None:
            raise ValidationError("one-electron fragments require onebody")
        if self.kind in ("fr", "lcu-reflection") and self.lam is None:
            raise ValidationError(f"{self.kind} fragments require lam")
        if self.lam is not None and np.abs(self.lam - self.lam.T).max() > 1e-12:
            raise ValidationError("lam must be symmetric")

    @property
    def n_spin(self) -> int:
        n = int(round((1 + np.sqrt(1 + 8 * self.angles.size)) / 2))
        if n_angles(n) != self.angles.size:
            raise ValidationError("angle vector length is not triangular")
        return n

    def rotation(self) -> np.ndarray:
        return rotation_matrix(self.angles, n=self.n_spin)

    def lambda_matrix(self) -> np.ndarray | None:
        """Two-electron coefficient matrix in the fragment frame."""
        if self.kind == "one-electron":
            return None
        if self.epsilon is not None and self.lam is None:
            return np.outer(self.epsilon, self.epsilon)
        return self.lam

    def to_tensors(self) -> tuple[float, np.ndarray, np.ndarray]:
        """Contribution (constant, h, g) in the original orbital frame."""
        n = self.n_spin
        o = self.rotation()
        constant = 0.0
        h = np.zeros((n, n))
        g = np.zeros((n, n, n, n))
        if self.onebody is not None:
            h += o @ np.diag(self.onebody) @ o.T
        lam = self.lambda_matrix()
        if lam is not None:
            if self.kind == "lcu-reflection":
                # sum lam r r = 4 sum lam n n - 4 sum_i (row sums) n + sum lam
                row = lam.sum(axis=1)
                constant += float(lam.sum())
                h += -4.0 * (o * row) @ o.T
                lam = 4.0 * lam
            w = np.einsum("pi,qi->pqi", o, o).reshape(n * n, n)
            g += (w @ lam @ w.T).reshape(n, n, n, n)
        return constant, h, g

    def occupation_energies(self, masks=None) -> np.ndarray:
        """Exact eigenvalues via the diagonal frame (occupation enumeration)."""
        n = self.n_spin
        if masks is None:
            masks = np.arange(1 << n, dtype=np.int64)
        masks = np.asarray(masks, dtype=np.int64)
        occ = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(np.float64)
        energy = np.zeros(len(masks))
        if self.onebody is not None:
            energy += occ @ self.onebody
        if self.kind == "lr":
            energy += (occ @ self.epsilon) ** 2
        elif self.kind == "fr":
            energy += np.einsum("di,ij,dj->d", occ, self.lam, occ)
        elif self.kind == "lcu-reflection":
            sign = 1.0 - 2.0 * occ
            energy += np.einsum("di,ij,dj->d", sign, self.lam, sign)
        return energy

    def spectral_range(self, masks=None) -> float:
        e = self.occupation_energies(masks)
        return float(e.max() - e.min())

    def to_json_obj(self) -> dict:
        obj: dict = {"kind": self.kind, "angles": self.angles.tolist()}
        if self.epsilon is not None:
            obj["epsilon"] = self.epsilon.tolist()
        if self.lam is not None:
            obj["lambda"] = self.lam.tolist()
        if self.onebody is not None:
            obj["onebody"] = self.onebody.tolist()
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FermionFragment":
        return cls(
            kind=obj["kind"],
            angles=np.asarray(obj["angles"]),
            epsilon=np.asarray(obj["epsilon"]) if "epsilon" in obj else None,
            lam=np.asarray(obj["lambda"]) if "lambda" in obj else None,
            onebody=np.asarray(obj["onebody"]) if "onebody" in obj else None,
        )


@dataclass
class FermionPartition:
    """Ordered fragment list plus bookkeeping to reproduce the source."""

    fragments: list[FermionFragment]
    constant: float
    method: str
    source: MolecularTensors | None = None
    seed: int | None = None
    threshold: float | None = None
    residual_l1: float = 0.0
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)
    frame_angles: np.ndarray | None = None

    @property
    def n_fragments(self) -> int:
        return len(self.fragments)

    @property
    def n_spin(self) -> int:
        if self.fragments:
            return self.fragments[0].n_spin
        if self.source is not None:
            return self.source.n_spin
        raise ValidationError("empty partition with no source")

    def to_json_obj(self) -> dict:
        obj = {
            "method": self.method,
            "seed": self.seed,
            "threshold": self.threshold,
            "fragments": [f.to_json_obj() for f in self.fragments],
            "residual_l1": self.residual_l1,
            "constant": self.constant,
            "converged": self.converged,
        }
        if self.frame_angles is not None:
            obj["frame_angles"] = np.asarray(self.frame_angles).tolist()
        return obj

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj()))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FermionPartition":
        return cls(
            fragments=[FermionFragment.from_json_obj(f) for f in obj["fragments"]],
            constant=float(obj["constant"]),
            method=obj["method"],
            seed=obj.get("seed"),
            threshold=obj.get("threshold"),
            residual_l1=float(obj.get("residual_l1", 0.0)),
            converged=bool(obj.get("converged", True)),
            frame_angles=(
                np.asarray(obj["frame_angles"]) if "frame_angles" in obj else None
            ),
        )


def reconstruct(p: FermionPartition) -> MolecularTensors:
    """Sum all fragments back into (constant, h, g) form."""
    if p.fragments:
        n = p.n_spin
    elif p.source is not None:
        n = p.source.n_spin
    else:
        raise ValidationError("cannot infer dimension of an empty partition")
    constant = p.constant
    h = np.zeros((n, n))
    g = np.zeros((n, n, n, n))
    for frag in p.fragments:
        c, hf, gf = frag.to_tensors()
        constant += c
        h += hf
        g += gf
    nelec = p.source.nelec if p.source is not None else None
    return MolecularTensors(constant=constant, h=h, g=g, nelec=nelec)


def tensor_l1(g: np.ndarray) -> float:
    return float(np.abs(g).sum())


# ---------------------------------------------------------------------------
# workspaces: spatial fast path vs generic spin-orbital path


def spatial_two_body(g: np.ndarray, tol: float = 1e-12):
    """Spatial representative of a spin-factorable two-electron tensor.

    Returns the (m, m, m, m) block when all four same-spin blocks agree and
    every spin-mixing entry vanishes, else None.
    """
    n = g.shape[0]
    m = n // 2
    scale = max(1.0, np.abs(g).max())
    rep = g[0::2, 0::2, 0::2, 0::2]
    for s1 in (0, 1):
        for s2 in (0, 1):
            block = g[s1::2, s1::2, s2::2, s2::2]
            if np.abs(block - rep).max() > tol * scale:
                return None
    total_block_mass = 4.0 * np.abs(rep).sum()
    if abs(np.abs(g).sum() - total_block_mass) > tol * scale * g.size:
        return None
    return np.ascontiguousarray(rep)


@dataclass
class _Workspace:
    """Orbital space the optimizer runs in, plus expansion to spin level."""

    kind: str  # "spatial" | "spin"
    n: int
    target: np.ndarray
    l1_factor: float
    free_pairs: np.ndarray  # bool mask over pair_order(n)

    @classmethod
    def for_two_body(cls, g: np.ndarray) -> "_Workspace":
        rep = spatial_two_body(g)
        if rep is not None:
            m = rep.shape[0]
            return cls(
                kind="spatial",
                n=m,
                target=rep,
                l1_factor=4.0,
                free_pairs=np.ones(n_angles(m), dtype=bool),
            )
        n = g.shape[0]
        mask = np.array(
            [(p % 2) == (q % 2) for p, q in pair_order(n)], dtype=bool
        )
        return cls(kind="spin", n=n, target=g.copy(), l1_factor=1.0, free_pairs=mask)

    def full_angles(self, free: np.ndarray) -> np.ndarray:
        out = np.zeros(n_angles(self.n))
        out[self.free_pairs] = free
        return out

    def expand(self, o: np.ndarray, lam: np.ndarray):
        """Spin-level (angles, lam) of a workspace-level fragment."""
        if self.kind == "spin":
            return rotation_to_angles(o), lam
        o_spin = interleave_spin_matrix(o, o)
        lam_spin = np.kron(lam, np.ones((2, 2)))
        return rotation_to_angles(o_spin), lam_spin

    def spin_l1(self, work_tensor: np.ndarray) -> float:
        return self.l1_factor * tensor_l1(work_tensor)


def _khatri(o: np.ndarray) -> np.ndarray:
    n = o.shape[0]
    return np.einsum("pi,qi->pqi", o, o).reshape(n * n, n)


def _fragment_supermatrix(o: np.ndarray, lam: np.ndarray) -> np.ndarray:
    w = _khatri(o)
    return w @ lam @ w.T


def fragment_tensor(o: np.ndarray, lam: np.ndarray) -> np.ndarray:
    n = o.shape[0]
    return _fragment_supermatrix(o, lam).reshape(n, n, n, n)


def _angle_gradient(angles: np.ndarray, n: int, df_do: np.ndarray) -> np.ndarray:
    """Chain dF/dO through the ordered Givens product to dF/d(angles)."""
    pairs = pair_order(n)
    k = len(pairs)
    mats = []
    for (p, q), theta in zip(pairs, angles):
        c, s = np.cos(theta), np.sin(theta)
        rot = np.eye(n)
        rot[q, q] = c
        rot[p, p] = c
        rot[q, p] = -s
        rot[p, q] = s
        mats.append(rot)
    prefixes = [np.eye(n)]
    for rot in mats:
        prefixes.append(prefixes[-1] @ rot)
    suffixes = [np.eye(n)] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffixes[i] = mats[i] @ suffixes[i + 1]
    grad = np.zeros(k)
    for i, ((p, q), theta) in enumerate(zip(pairs, angles)):
        m = prefixes[i].T @ df_do @ suffixes[i + 1].T
        c, s = np.cos(theta), np.sin(theta)
        grad[i] = -s * m[q, q] - c * m[q, p] + c * m[p, q] - s * m[p, p]
    return grad


def _vp_objective(free: np.ndarray, g_sup: np.ndarray, ws: _Workspace):
    """Variable-projection objective -||W^T G W||_F^2 and its gradient."""
    angles = ws.full_angles(free)
    o = rotation_matrix(angles, n=ws.n)
    w = _khatri(o)
    lam = w.T @ g_sup @ w
    f = -float(np.sum(lam * lam))
    a = g_sup @ w @ lam  # n^2 x n
    df_do = np.zeros_like(o)
    n = ws.n
    for i in range(n):
        ai = a[:, i].reshape(n, n)
        df_do[:, i] = -4.0 * (ai + ai.T) @ o[:, i]
    grad = _angle_gradient(angles, n, df_do)
    return f, grad[ws.free_pairs]


def _lr_seed(g_work: np.ndarray, ws: _Workspace):
    """Frame of the dominant supermatrix eigenpair (deterministic)."""
    n = ws.n
    sup = g_work.reshape(n * n, n * n)
    sup = 0.5 * (sup + sup.T)
    vals, vecs = np.linalg.eigh(sup)
    order = np.argsort(-np.abs(vals))
    lead = vecs[:, order[0]].reshape(n, n)
    lead = 0.5 * (lead + lead.T)
    if ws.kind == "spin":
        _, o = diagonalize_one_body(lead)
    else:
        _, o = eigh_deterministic(lead)
        o = fix_determinant(o)
    return rotation_to_angles(o)


def _fit_fragment(
    g_work: np.ndarray,
    ws: _Workspace,
    rng: np.random.Generator,
    restarts: int,
    maxiter: int,
):
    """One greedy fragment: best (O, lambda) for the current work residual."""
    n = ws.n
    sup = g_work.reshape(n * n, n * n)
    sup = 0.5 * (sup + sup.T)
    seeds = [_lr_seed(g_work, ws)[ws.free_pairs]]
    n_free = int(ws.free_pairs.sum())
    for _ in range(max(0, restarts - 1)):
        seeds.append(rng.uniform(-0.01, 0.01, size=n_free))
    best = None
    for idx, seed in enumerate(seeds):
        res = minimize(
            _vp_objective,
            seed,
            args=(sup, ws),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-10},
        )
        # Deterministic argmin: objective first, then restart index.
        if best is None or res.fun < best[0] - 1e-15:
            best = (res.fun, idx, res.x)
    angles = ws.full_angles(best[2])
    o = rotation_matrix(angles, n=n)
    w = _khatri(o)
    lam = w.T @ sup @ w
    lam = 0.5 * (lam + lam.T)
    return o, lam


def _one_electron_fragment(h: np.ndarray) -> FermionFragment:
    eps, o = diagonalize_one_body(h)
    return FermionFragment(
        kind="one-electron", angles=rotation_to_angles(o), onebody=eps
    )


def _leading_fragments(t: MolecularTensors) -> list[FermionFragment]:
    if np.abs(t.h).max(initial=0.0) == 0.0:
        return []
    return [_one_electron_fragment(t.h)]


# ---------------------------------------------------------------------------
# low-rank (supermatrix eigendecomposition)


def lr_decompose(t: MolecularTensors, threshold: float = 0.0) -> FermionPartition:
    """Eigendecomposition of the two-electron supermatrix into rank-1 fragments.

    Eigenpairs are ranked by their tensor-L1 contribution
    |eigenvalue| * ||vec||_1^2; the smallest are dropped while the running
    dropped total stays at or below ``threshold``.
    """
    n = t.n_spin
    sup = t.g.reshape(n * n, n * n)
    asym = np.abs(sup - sup.T).max()
    if asym > 1e-10 * max(1.0, np.abs(sup).max()):
        raise InternalConsistencyError(
            f"two-electron supermatrix not symmetric (deviation {asym:.3e})"
        )
    vals, vecs = np.linalg.eigh(0.5 * (sup + sup.T))
    importance = np.abs(vals) * (np.abs(vecs).sum(axis=0) ** 2)
    # Descending importance, eigenvalue as the documented tie-break.
    order = np.lexsort((-vals, -importance))
    vals, vecs, importance = vals[order], vecs[:, order], importance[order]

    drop = np.zeros(len(vals), dtype=bool)
    budget = threshold
    for i in range(len(vals) - 1, -1, -1):
        contribution = importance[i]
        if contribution <= budget:
            budget -= contribution
            drop[i] = True
        else:
            break
    # Numerically-zero eigenpairs never become fragments.
    drop |= importance <= 1e-12 * max(importance.max(initial=0.0), 1.0) * 1e-3

    fragments = _leading_fragments(t)
    for mu, vec, keep in zip(vals, vecs.T, ~drop):
        if not keep:
            continue
        lead = vec.reshape(n, n)
        anti = np.abs(lead - lead.T).max()
        if anti > 1e-8 * max(1.0, np.abs(lead).max()):
            raise InternalConsistencyError(
                "supermatrix eigenvector has an antisymmetric part "
                f"({anti:.3e}); tensor lacks the pair-exchange symmetry"
            )
        lead = 0.5 * (lead + lead.T)
        if np.flatnonzero(np.abs(lead) > 1e-12).size:
            first = np.flatnonzero(np.abs(lead.ravel()) > 1e-12)[0]
            if lead.ravel()[first] < 0.0:
                lead = -lead
        w, o = (
            diagonalize_one_body(lead)
            if spin_blocks(lead) is not None
            else (lambda res: (res[0], fix_determinant(res[1])))(
                eigh_deterministic(lead)
            )
        )
        angles = rotation_to_angles(o)
        if mu > 0.0:
            fragments.append(
                FermionFragment(kind="lr", angles=angles, epsilon=np.sqrt(mu) * w)
            )
        else:
            # Negative eigenvalue: rank-1 but signed; real epsilon cannot
            # represent it, store the full lambda instead.
            fragments.append(
                FermionFragment(kind="fr", angles=angles, lam=mu * np.outer(w, w))
            )

    partition = FermionPartition(
        fragments=fragments,
        constant=t.constant,
        method="lr",
        source=t,
        threshold=threshold,
    )
    partition.residual_l1 = tensor_l1(t.g - _two_body_sum(partition, n))
    return partition


def _two_body_sum(p: FermionPartition, n: int) -> np.ndarray:
    g = np.zeros((n, n, n, n))
    for frag in p.fragments:
        if frag.kind == "one-electron":
            continue
        g += frag.to_tensors()[2]
    return g


# ---------------------------------------------------------------------------
# greedy full-rank optimization


def gfro_decompose(
    t: MolecularTensors,
    threshold: float = 1e-6,
    max_fragments: int | None = None,
    seed: int = 0,
    restarts: int = 2,
    maxiter: int = 300,
) -> FermionPartition:
    """Greedy full-rank fit: one fragment per iteration against the residual.

    The residual tensor L1 decreases strictly on every accepted iteration;
    iteration stops at ``threshold``, ``max_fragments``, or when a fit
    fails to reduce the L1 by more than 1e-12 (early stop, diagnostic
    recorded, no exception).
    """
    if threshold <= 0.0:
        raise ValidationError("gfro threshold must be positive")
    n = t.n_spin
    if max_fragments is None:
        max_fragments = n * (n + 1)
    rng = np.random.default_rng(seed)
    ws = _Workspace.for_two_body(t.g)
    fragments = _leading_fragments(t)
    residual = ws.target.copy()
    l1 = ws.spin_l1(residual)
    history = [l1]
    diagnostics: dict = {"workspace": ws.kind}
    n_two_electron = 0
    while l1 > threshold and n_two_electron < max_fragments:
        o, lam = _fit_fragment(residual, ws, rng, restarts, maxiter)
        new_residual = residual - fragment_tensor(o, lam)
        new_l1 = ws.spin_l1(new_residual)
        if l1 - new_l1 <= 1e-12:
            diagnostics["stop_reason"] = (
                f"iteration reduced residual L1 by {l1 - new_l1:.3e} <= 1e-12"
            )
            break
        angles, lam_spin = ws.expand(o, lam)
        fragments.append(FermionFragment(kind="fr", angles=angles, lam=lam_spin))
        residual = new_residual
        l1 = new_l1
        history.append(l1)
        n_two_electron += 1
    diagnostics["residual_history"] = history
    return FermionPartition(
        fragments=fragments,
        constant=t.constant,
        method="gfro",
        source=t,
        seed=seed,
        threshold=threshold,
        residual_l1=l1,
        converged=l1 <= threshold,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# joint full-rank optimization


def _fro_pack(thetas, lams, ws: _Workspace):
    tril = np.tril_indices(ws.n)
    parts = []
    for th, lam in zip(thetas, lams):
        parts.append(th)
        parts.append(lam[tril])
    return np.concatenate(parts)


def _fro_unpack(params, n_frag: int, ws: _Workspace):
    n = ws.n
    tril = np.tril_indices(n)
    n_free = int(ws.free_pairs.sum())
    n_lam = len(tril[0])
    thetas, lams = [], []
    pos = 0
    for _ in range(n_frag):
        thetas.append(params[pos : pos + n_free])
        pos += n_free
        lam = np.zeros((n, n))
        lam[tril] = params[pos : pos + n_lam]
        lam = lam + np.tril(lam, -1).T
        pos += n_lam
        lams.append(lam)
    return thetas, lams


def _fro_objective(params, g_sup, n_frag: int, ws: _Workspace):
    n = ws.n
    thetas, lams = _fro_unpack(params, n_frag, ws)
    os_, ws_k = [], []
    residual = g_sup.copy()
    for th, lam in zip(thetas, lams):
        o = rotation_matrix(ws.full_angles(th), n=n)
        w = _khatri(o)
        os_.append(o)
        ws_k.append(w)
        residual -= w @ lam @ w.T
    f = float(np.sum(residual * residual))
    grad_parts = []
    tril = np.tril_indices(n)
    for o, w, th, lam in zip(os_, ws_k, thetas, lams):
        a = residual @ w @ lam
        df_do = np.zeros_like(o)
        for i in range(n):
            ai = a[:, i].reshape(n, n)
            df_do[:, i] = -4.0 * (ai + ai.T) @ o[:, i]
        grad_theta = _angle_gradient(ws.full_angles(th), n, df_do)[ws.free_pairs]
        dlam = -2.0 * (w.T @ residual @ w)
        dlam = dlam + dlam.T - np.diag(np.diag(dlam))  # tril packing weights
        grad_parts.append(grad_theta)
        grad_parts.append(dlam[tril])
    return f, np.concatenate(grad_parts)


def fro_decompose(
    t: MolecularTensors,
    n_fragments: int,
    threshold: float = 0.0,
    seed: int = 0,
    maxiter: int = 500,
) -> FermionPartition:
    """Jointly optimized full-rank fragments (non-greedy).

    Fragments are introduced one at a time (each seeded from the dominant
    supermatrix eigenpair of the current residual) and re-optimized
    jointly, which makes the final residual L1 non-increasing in
    ``n_fragments``.  Non-convergence is reported through the ``converged``
    flag, never an exception.
    """
    if n_fragments < 1:
        raise ValidationError("fro requires n_fragments >= 1")
    n = t.n_spin
    ws = _Workspace.for_two_body(t.g)
    sup = ws.target.reshape(ws.n**2, ws.n**2)
    sup = 0.5 * (sup + sup.T)
    rng = np.random.default_rng(seed)

    thetas: list[np.ndarray] = []
    lams: list[np.ndarray] = []
    success = True
    for k in range(n_fragments):
        residual_sup = sup.copy()
        for th, lam in zip(thetas, lams):
            o = rotation_matrix(ws.full_angles(th), n=ws.n)
            w = _khatri(o)
            residual_sup -= w @ lam @ w.T
        seed_angles = _lr_seed(
            residual_sup.reshape((ws.n,) * 4), ws
        )[ws.free_pairs]
        o0 = rotation_matrix(ws.full_angles(seed_angles), n=ws.n)
        w0 = _khatri(o0)
        lam0 = w0.T @ residual_sup @ w0
        thetas.append(seed_angles + rng.uniform(-0.001, 0.001, size=seed_angles.size))
        lams.append(0.5 * (lam0 + lam0.T))
        params0 = _fro_pack(thetas, lams, ws)
        res = minimize(
            _fro_objective,
            params0,
            args=(sup, k + 1, ws),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-10},
        )
        if res.fun > float(np.sum(residual_sup**2)) + 1e-12:
            # Joint refinement should never be worse than its warm start.
            res_x = params0
        else:
            res_x = res.x
        thetas, lams = _fro_unpack(res_x, k + 1, ws)
        success = success and bool(res.success)

    residual = ws.target.copy()
    fragments = _leading_fragments(t)
    for th, lam in zip(thetas, lams):
        o = rotation_matrix(ws.full_angles(th), n=ws.n)
        lam = 0.5 * (lam + lam.T)
        residual -= fragment_tensor(o, lam)
        angles, lam_spin = ws.expand(o, lam)
        fragments.append(FermionFragment(kind="fr", angles=angles, lam=lam_spin))
    residual_l1 = ws.spin_l1(residual)
    return FermionPartition(
        fragments=fragments,
        constant=t.constant,
        method="fro",
        source=t,
        seed=seed,
        threshold=threshold,
        residual_l1=residual_l1,
        converged=bool(success or residual_l1 <= threshold),
        diagnostics={"workspace": ws.kind},
    )


# ---------------------------------------------------------------------------
# singles-and-doubles folding and reflection post-processing


@dataclass
class FoldResult:
    tensors: MolecularTensors
    frame_angles: np.ndarray


def fold_one_body(t: MolecularTensors) -> FoldResult:
    """Rotate into the frame diagonalizing h, fold it into the two-body tensor.

    In the rotated frame the one-body part is diagonal and n_p = n_p n_p
    absorbs it into the two-electron tensor's diagonal.  The returned
    tensors have h identically zero, the same constant and the full
    original spectrum; the recorded frame angles relate the new orbital
    frame to the original one.
    """
    eps, o = diagonalize_one_body(t.h)
    g_rot = np.einsum("PQRS,Pp,Qq,Rr,Ss->pqrs", t.g, o, o, o, o, optimize=True)
    n = t.n_spin
    idx = np.arange(n)
    g_rot[idx, idx, idx, idx] += eps
    folded = MolecularTensors(
        constant=t.constant, h=np.zeros((n, n)), g=g_rot, nelec=t.nelec
    )
    return FoldResult(tensors=folded, frame_angles=rotation_to_angles(o))


def sd_gfro_decompose(
    t: MolecularTensors,
    threshold: float = 1e-6,
    max_fragments: int | None = None,
    seed: int = 0,
    restarts: int = 2,
    maxiter: int = 300,
) -> FermionPartition:
    """Greedy full-rank decomposition of the one-body-folded tensor."""
    fold = fold_one_body(t)
    partition = gfro_decompose(
        fold.tensors,
        threshold=threshold,
        max_fragments=max_fragments,
        seed=seed,
        restarts=restarts,
        maxiter=maxiter,
    )
    partition.method = "sd-gfro"
    partition.frame_angles = fold.frame_angles
    return partition


def lcu_postprocess(p: FermionPartition) -> FermionPartition:
    """Rewrite number operators as reflections r = 1 - 2n (exact identity).

    Each two-electron fragment becomes lambda/4 over reflection products;
    the induced one-body pieces accumulate into a single re-diagonalized
    one-electron fragment and the scalar -1/4 sum lambda joins the
    constant.  The total operator is unchanged.
    """
    n = p.n_spin
    accum_h = np.zeros((n, n))
    extra_constant = 0.0
    two_electron: list[FermionFragment] = []
    had_one_electron = False
    for frag in p.fragments:
        if frag.kind == "one-electron":
            had_one_electron = True
            o = frag.rotation()
            accum_h += (o * frag.onebody) @ o.T
            continue
        if frag.kind == "lcu-reflection":
            two_electron.append(frag)
            continue
        lam = frag.lambda_matrix()
        o = frag.rotation()
        if frag.onebody is not None:
            accum_h += (o * frag.onebody) @ o.T
        row = lam.sum(axis=1)
        accum_h += (o * row) @ o.T
        extra_constant += -0.25 * float(lam.sum())
        two_electron.append(
            FermionFragment(kind="lcu-reflection", angles=frag.angles, lam=lam / 4.0)
        )
    fragments: list[FermionFragment] = []
    if had_one_electron or np.abs(accum_h).max(initial=0.0) > 0.0:
        fragments.append(_one_electron_fragment(accum_h))
    fragments.extend(two_electron)
    method = p.method if p.method.endswith("-lcu") else p.method + "-lcu"
    return FermionPartition(
        fragments=fragments,
        constant=p.constant + extra_constant,
        method=method,
        source=p.source,
        seed=p.seed,
        threshold=p.threshold,
        residual_l1=p.residual_l1,
        converged=p.converged,
        diagnostics=dict(p.diagnostics),
        frame_angles=p.frame_angles,
    )


# ---------------------------------------------------------------------------
# rotation counting


@dataclass
class RotationCount:
    """Single-qubit rotation accounting for one first-order product step."""

    n_spin: int
    n_fragments: int
    total: int
    bound: int
    per_fragment: list[int]
    merged_rotation_layers: int
    degenerate: bool

    def __int__(self):
        return self.total


def rotation_count_bound(n_spin: int, gamma: int) -> tuple[int, bool]:
    """Upper bound 2 N^2 Gamma - N; clamped to zero (flagged) when Gamma=0."""
    raw = 2 * n_spin * n_spin * gamma - n_spin
    if raw < 0:
        return 0, True
    return raw, False


def fermionic_rotation_count(p: FermionPartition) -> RotationCount:
    n = p.n_spin
    gamma = len(p.fragments)
    per_fragment = []
    for frag in p.fragments:
        if frag.kind == "one-electron":
            per_fragment.append(n)
        else:
            per_fragment.append(n * (n + 1))
    layers = gamma + 1
    total = layers * n * (n - 1) + sum(per_fragment) if gamma else 0
    has_one_electron = any(f.kind == "one-electron" for f in p.fragments)
    gamma_acct = gamma if has_one_electron else gamma + 1
    bound, degenerate = rotation_count_bound(n, gamma_acct if gamma else 0)
    return RotationCount(
        n_spin=n,
        n_fragments=gamma,
        total=total,
        bound=bound,
        per_fragment=per_fragment,
        merged_rotation_layers=layers if gamma else 0,
        degenerate=degenerate,
    )
