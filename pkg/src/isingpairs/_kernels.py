"""Compiled inner loops for the coupled Gibbs chains.

Potentials enter as CSR-style adjacency arrays (indptr / indices / values)
over a fixed site order.  Each joint update consumes exactly one site index
and one uniform variate from the supplied generator, and resolves the pair
outcome through the fixed cumulative order (+,+), (-,-), (+,-), (-,+).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _local_field(indptr, indices, values, spins, j):
    f = 0.0
    for k in range(indptr[j], indptr[j + 1]):
        f += values[k] * spins[indices[k]]
    return f


@njit(cache=True)
def _joint_outcome(p_first, p_second, u):
    """Pair of spins drawn from the coupled single-site update law."""
    m_pp = min(p_first, p_second)
    m_mm = min(1.0 - p_first, 1.0 - p_second)
    if u < m_pp:
        return 1, 1
    if u < m_pp + m_mm:
        return -1, -1
    if u < m_pp + m_mm + max(p_first - p_second, 0.0):
        return 1, -1
    return -1, 1


@njit(cache=True)
def run_coalescing_pair(indptr, indices, values, n_sites, step_cap, rng):
    """Two chains from all-plus / all-minus starts under one potential.

    Returns (configuration, steps, coalesced).  The configuration is the
    common state at the first step where the chains agree everywhere.
    """
    y = np.ones(n_sites, np.int8)
    yp = np.full(n_sites, -1, np.int8)
    n_diff = n_sites
    t = 0
    while n_diff > 0 and t < step_cap:
        t += 1
        j = rng.integers(0, n_sites)
        p_y = 1.0 / (1.0 + np.exp(-2.0 * _local_field(indptr, indices, values, y, j)))
        p_yp = 1.0 / (1.0 + np.exp(-2.0 * _local_field(indptr, indices, values, yp, j)))
        s, sp = _joint_outcome(p_y, p_yp, rng.random())
        was_equal = y[j] == yp[j]
        y[j] = s
        yp[j] = sp
        if was_equal and s != sp:
            n_diff += 1
        elif not was_equal and s == sp:
            n_diff -= 1
    return y, t, n_diff == 0


@njit(cache=True)
def run_truncation_pair(
    full_indptr,
    full_indices,
    full_values,
    trunc_indptr,
    trunc_indices,
    trunc_values,
    n_sites,
    burn_in_sweeps,
    recorded_sweeps,
    rng,
):
    """Shared-randomness chains under the full and truncated potentials.

    Both chains start from all-plus and share the site choice and the
    uniform variate of every step.  One sweep is n_sites single-site steps;
    after burn-in the per-site discrepancy indicator is accumulated once per
    sweep.  Returns the per-site discrepancy counts.
    """
    y = np.ones(n_sites, np.int8)
    yp = np.ones(n_sites, np.int8)
    counts = np.zeros(n_sites, np.int64)
    total_sweeps = burn_in_sweeps + recorded_sweeps
    for sweep in range(total_sweeps):
        for _ in range(n_sites):
            j = rng.integers(0, n_sites)
            p_full = 1.0 / (
                1.0 + np.exp(-2.0 * _local_field(full_indptr, full_indices, full_values, y, j))
            )
            p_trunc = 1.0 / (
                1.0 + np.exp(-2.0 * _local_field(trunc_indptr, trunc_indices, trunc_values, yp, j))
            )
            s, sp = _joint_outcome(p_full, p_trunc, rng.random())
            y[j] = s
            yp[j] = sp
        if sweep >= burn_in_sweeps:
            for k in range(n_sites):
                if y[k] != yp[k]:
                    counts[k] += 1
    return counts
