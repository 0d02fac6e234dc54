"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run with ``python -m hampart.bench``.  Sizes mimic the hot paths: pairwise
commutation tables during grouping and Pauli-sum application during
iterative eigensolves.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels


def _time(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def _random_terms(n_terms, n_qubits, seed):
    rng = np.random.default_rng(seed)
    limit = np.uint64(1 << n_qubits)
    xs = rng.integers(0, limit, size=n_terms, dtype=np.uint64)
    zs = rng.integers(0, limit, size=n_terms, dtype=np.uint64)
    coeffs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    return xs, zs, coeffs


def main() -> int:
    print(f"numba available and enabled: {kernels.USING_NUMBA}")
    rows = []

    for n_terms in (200, 800, 2000):
        xs, zs, _ = _random_terms(n_terms, 14, seed=1)
        t_np = _time(kernels._commutation_table_np, xs, zs)
        if kernels.USING_NUMBA:
            kernels._commutation_table_nb(xs, zs)  # compile outside timing
            t_nb = _time(kernels._commutation_table_nb, xs, zs)
        else:
            t_nb = float("nan")
        rows.append((f"commutation_table T={n_terms}", t_np, t_nb))

    for n_qubits, n_terms in ((10, 100), (12, 300), (14, 600)):
        xs, zs, coeffs = _random_terms(n_terms, n_qubits, seed=2)
        dim = 1 << n_qubits
        rng = np.random.default_rng(3)
        vec = (rng.normal(size=dim) + 1j * rng.normal(size=dim)).astype(np.complex128)
        effs = coeffs * kernels.term_matrix_phase(xs, zs)

        def run_np():
            kernels._apply_terms_np(xs, zs, effs, vec, np.zeros_like(vec))

        t_np = _time(run_np)
        if kernels.USING_NUMBA:

            def run_nb():
                kernels._apply_terms_nb(xs, zs, effs, vec, np.zeros_like(vec))

            run_nb()  # compile outside timing
            t_nb = _time(run_nb)
        else:
            t_nb = float("nan")
        rows.append((f"apply_pauli_sum n={n_qubits} T={n_terms}", t_np, t_nb))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy [ms]':>11}  {'numba [ms]':>11}  speedup")
    for name, t_np, t_nb in rows:
        speedup = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(
            f"{name:<{width}}  {1e3 * t_np:>11.3f}  {1e3 * t_nb:>11.3f}  "
            f"{speedup:>6.2f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
