"""Advection sources from the perturbation's own transport term.

The quadratic coupling (d_theta gamma / r) d_r w - (d_r gamma / r) d_theta w
decomposes over angular modes as the convolution

    F_n(r) = (i / r) sum_{k + l = n} ( l gamma_l d_r w_k - k d_r gamma_l w_k ),

with gamma_{-l} = conj(gamma_l) for real fields.  Only rows n = 0..n_max are
formed; F_{-n} = conj(F_n) follows from the same symmetry.  The sum is the
exact mode content of the product of the truncated fields, so a
pseudo-spectral evaluation on a fine angular grid reproduces it to rounding.
"""

from __future__ import annotations

import numpy as np

from .grid import RadialGrid
from .linear import SourceSpectrum, SpectralSolution

__all__ = ["convolution_sources", "compute_sources"]


def convolution_sources(grid: RadialGrid, gamma, dgamma, w, dw) -> SourceSpectrum:
    """Sources from stacked mode arrays (rows n = 0..n_max)."""
    gamma = np.asarray(gamma, dtype=complex)
    n_max = gamma.shape[0] - 1
    if gamma.shape[1] != grid.n_nodes:
        raise ValueError("mode arrays do not match the grid")

    def extend(a):
        """Rows for l = -n_max..n_max via conjugate symmetry."""
        return np.concatenate([np.conj(a[:0:-1]), a], axis=0)

    g_all = extend(gamma)
    dg_all = extend(np.asarray(dgamma, dtype=complex))
    w_all = extend(np.asarray(w, dtype=complex))
    dw_all = extend(np.asarray(dw, dtype=complex))

    F = np.zeros((n_max + 1, grid.n_nodes), dtype=complex)
    for n in range(n_max + 1):
        lo = max(-n_max, n - n_max)
        hi = min(n_max, n + n_max)
        ls = np.arange(lo, hi + 1)
        li = ls + n_max
        ki = (n - ls) + n_max
        terms = (ls[:, None] * g_all[li] * dw_all[ki]
                 - (n - ls)[:, None] * dg_all[li] * w_all[ki])
        F[n] = (1j / grid.r) * terms.sum(axis=0)
    return SourceSpectrum(n_max=n_max, F=F)


def compute_sources(solution: SpectralSolution) -> SourceSpectrum:
    """Advection sources generated by a solved perturbation."""
    return convolution_sources(solution.grid, solution.gamma, solution.dgamma,
                               solution.w, solution.dw)
