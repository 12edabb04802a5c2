"""Independent reference computations used only by the tests.

Everything here is deliberately naive: explicit matrices, direct sums and
exhaustive enumeration, sharing no code with the package except the data
containers.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def direct_dft(x):
    """O(N^2) unitary DFT by explicit summation."""
    x = np.asarray(x, dtype=complex)
    n_len = x.size
    out = np.zeros(n_len, dtype=complex)
    for k in range(n_len):
        for n in range(n_len):
            out[k] += x[n] * np.exp(-2j * np.pi * k * n / n_len)
    return out / np.sqrt(n_len)


def psi_matrix(n_len):
    """Dense inverse unitary DFT matrix."""
    n = np.arange(n_len)
    return np.exp(2j * np.pi * np.outer(n, n) / n_len) / np.sqrt(n_len)


def dense_ls_on_support(y, omega_nc, support, n_len):
    """Pseudoinverse of the explicit restricted, column-selected matrix."""
    a = psi_matrix(n_len)[np.asarray(omega_nc, dtype=int)][:, np.asarray(support, dtype=int)]
    out = np.zeros(n_len, dtype=complex)
    if a.size:
        out[np.asarray(support, dtype=int)] = np.linalg.pinv(a) @ np.asarray(y, dtype=complex)
    return out


def normal_equations_ls(y, omega_nc, support, n_len):
    a = psi_matrix(n_len)[np.asarray(omega_nc, dtype=int)][:, np.asarray(support, dtype=int)]
    z = np.linalg.solve(a.conj().T @ a, a.conj().T @ np.asarray(y, dtype=complex))
    out = np.zeros(n_len, dtype=complex)
    out[np.asarray(support, dtype=int)] = z
    return out


def _real_columns(rows, bins, n_len):
    cols = []
    for k in bins:
        phase = 2 * np.pi * k * rows / n_len
        if k == 0 or 2 * k == n_len:
            cols.append(np.cos(phase) / np.sqrt(n_len))
        else:
            cols.append(2 * np.cos(phase) / np.sqrt(n_len))
            cols.append(-2 * np.sin(phase) / np.sqrt(n_len))
    return np.column_stack(cols) if cols else np.zeros((rows.size, 0))


def _to_spectrum(bins, z, n_len):
    out = np.zeros(n_len, dtype=complex)
    i = 0
    for k in bins:
        if k == 0 or 2 * k == n_len:
            out[k] = z[i]
            i += 1
        else:
            out[k] = z[i] + 1j * z[i + 1]
            out[n_len - k] = z[i] - 1j * z[i + 1]
            i += 2
    return out


def brute_force_sparsest(obs, max_size, feas_tol=1e-8):
    """Exhaustive search over conjugate-closed supports of size <= max_size.

    For each support, tests whether some spectrum on it reproduces the
    reliable samples and satisfies the clipping inequalities.  Returns
    ``(size, feasible)`` where ``feasible`` lists ``(bins, alpha or None)``
    for every feasible support of the smallest feasible size; ``alpha`` is
    None when the coefficients on that support are not unique.
    """
    n_len = obs.n_len
    nc = np.asarray(obs.omega_nc)
    all_rows = np.arange(n_len)
    bins_all = list(range(n_len // 2 + 1))

    def cost(bins):
        return sum(1 if (k == 0 or 2 * k == n_len) else 2 for k in bins)

    candidates = []
    for r in range(len(bins_all) + 1):
        for bins in itertools.combinations(bins_all, r):
            c = cost(bins)
            if c <= max_size:
                candidates.append((c, bins))
    candidates.sort()
    best = None
    feasible = []
    scale = 1.0 + np.abs(obs.y).max(initial=0.0)
    for c, bins in candidates:
        if best is not None and c > best:
            break
        if c == 0:
            ok = np.abs(obs.y).max(initial=0.0) <= feas_tol and _ineq_ok(obs, np.zeros(n_len), feas_tol)
            if ok:
                best = 0
                feasible.append((bins, np.zeros(n_len, dtype=complex)))
            continue
        a = _real_columns(nc, bins, n_len)
        z, *_ = np.linalg.lstsq(a, obs.y, rcond=None)
        if np.abs(a @ z - obs.y).max(initial=0.0) > feas_tol * scale:
            continue
        rank = np.linalg.matrix_rank(a, tol=1e-9)
        full = _real_columns(all_rows, bins, n_len)
        if rank == a.shape[1]:
            if _ineq_ok(obs, full @ z, feas_tol):
                best = c
                feasible.append((bins, _to_spectrum(bins, z, n_len)))
        elif _ineq_feasible_lp(obs, a, full, feas_tol):
            best = c
            feasible.append((bins, None))
    return best, feasible


def _ineq_ok(obs, x, tol):
    u, l = np.asarray(obs.omega_u), np.asarray(obs.omega_l)
    return bool(np.all(x[u] >= obs.c_upper - tol) and np.all(x[l] <= obs.c_lower + tol))


def _ineq_feasible_lp(obs, a_eq, full, tol):
    u, l = np.asarray(obs.omega_u), np.asarray(obs.omega_l)
    a_ub = np.vstack([-full[u], full[l]]) if (u.size + l.size) else None
    b_ub = np.concatenate([-np.full(u.size, obs.c_upper), np.full(l.size, obs.c_lower)]) + tol
    res = linprog(np.zeros(a_eq.shape[1]), A_ub=a_ub, b_ub=b_ub if a_ub is not None else None,
                  A_eq=a_eq, b_eq=obs.y, bounds=[(None, None)] * a_eq.shape[1], method="highs")
    return res.status == 0


def oracle_verdict(obs, x, k, tol=1e-3):
    """``(unique, recoverable)`` for the sparsest-solution oracle."""
    _, feasible = brute_force_sparsest(obs, k)
    unique = len(feasible) == 1 and feasible[0][1] is not None
    if not unique:
        return False, None
    alpha = feasible[0][1]
    x_hat = (psi_matrix(obs.n_len) @ alpha).real
    return True, bool(np.linalg.norm(x_hat - np.asarray(x)) <= tol)
