"""Restricted Hartree-Fock for closed-shell molecules with DIIS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ScfError(RuntimeError):
    pass


@dataclass
class ScfResult:
    energy: float
    mo_coeffs: np.ndarray
    mo_energies: np.ndarray
    density: np.ndarray
    n_iterations: int


def restricted_hartree_fock(
    s: np.ndarray,
    hcore: np.ndarray,
    eri: np.ndarray,
    nelec: int,
    e_nuc: float = 0.0,
    max_iterations: int = 200,
    energy_tol: float = 1e-12,
    gradient_tol: float = 1e-9,
    diis_depth: int = 8,
) -> ScfResult:
    """Closed-shell SCF; raises ScfError on non-convergence."""
    if nelec % 2:
        raise ScfError("restricted SCF needs an even electron count")
    n_occ = nelec // 2

    w, v = np.linalg.eigh(s)
    if w.min() < 1e-10:
        raise ScfError("overlap matrix is numerically singular")
    x = v @ np.diag(w**-0.5) @ v.T

    def fock(density):
        j = np.einsum("mnls,ls->mn", eri, density, optimize=True)
        k = np.einsum("mlns,ls->mn", eri, density, optimize=True)
        return hcore + j - 0.5 * k

    def density_from(f):
        f_ortho = x.T @ f @ x
        eps, c_ortho = np.linalg.eigh(f_ortho)
        c = x @ c_ortho
        occ = c[:, :n_occ]
        return 2.0 * occ @ occ.T, c, eps

    density, coeffs, mo_e = density_from(hcore)
    energy = 0.0
    focks: list[np.ndarray] = []
    errors: list[np.ndarray] = []
    for iteration in range(1, max_iterations + 1):
        f = fock(density)
        grad = f @ density @ s - s @ density @ f
        focks.append(f)
        errors.append(x.T @ grad @ x)
        if len(focks) > diis_depth:
            focks.pop(0)
            errors.pop(0)
        if len(focks) > 1:
            k = len(focks)
            b = -np.ones((k + 1, k + 1))
            b[k, k] = 0.0
            for i in range(k):
                for j in range(k):
                    b[i, j] = float(np.sum(errors[i] * errors[j]))
            rhs = np.zeros(k + 1)
            rhs[k] = -1.0
            try:
                weights = np.linalg.solve(b, rhs)[:k]
                f = sum(w_i * f_i for w_i, f_i in zip(weights, focks))
            except np.linalg.LinAlgError:
                pass
        density, coeffs, mo_e = density_from(f)
        new_energy = 0.5 * float(np.sum(density * (hcore + fock(density)))) + e_nuc
        grad_norm = float(np.abs(grad).max())
        if abs(new_energy - energy) < energy_tol and grad_norm < gradient_tol:
            return ScfResult(
                energy=new_energy,
                mo_coeffs=coeffs,
                mo_energies=mo_e,
                density=density,
                n_iterations=iteration,
            )
        energy = new_energy
    raise ScfError(
        f"SCF did not converge in {max_iterations} iterations "
        f"(last gradient {grad_norm:.3e})"
    )


def mo_integrals(hcore, eri, coeffs):
    """Transform core Hamiltonian and (ij|kl) into the MO basis."""
    h_mo = coeffs.T @ hcore @ coeffs
    tmp = np.einsum("mnls,mi->inls", eri, coeffs, optimize=True)
    tmp = np.einsum("inls,nj->ijls", tmp, coeffs, optimize=True)
    tmp = np.einsum("ijls,lk->ijks", tmp, coeffs, optimize=True)
    eri_mo = np.einsum("ijks,sl->ijkl", tmp, coeffs, optimize=True)
    return h_mo, eri_mo
