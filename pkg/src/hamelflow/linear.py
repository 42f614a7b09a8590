"""Mode-by-mode solution of the linearized exterior problem.

For each angular mode n the perturbation stream function gamma_n and
vorticity w_n solve the chained pair

    d_rr w_n + ((phi0+1)/r) d_r w_n - ((i n mu + n^2)/r^2) w_n = F_n,
    d_rr gamma_n + (1/r) d_r gamma_n - (n^2/r^2) gamma_n = -w_n,

on (1, inf) with decay at infinity and the boundary trace
i n gamma_n(1) = v*_r,n, -d_r gamma_n(1) = v*_theta,n.  The vorticity
operator is equidimensional with exponents zeta_n^{+-}; its decaying
response to a source is the two-sided kernel

    w_n[F](r) = (1/(zeta+ - zeta-)) [ int_r^inf s F (r/s)^{zeta+} ds
                                      + int_1^r s F (r/s)^{zeta-} ds ],

which satisfies L_w w_n[F] = -F and carries no incoming homogeneous part.
The stream response uses the same kernel structure with exponents +-|n|.
A single homogeneous pair (bar gamma_n r^{-|n|}, bar w_n r^{zeta-}) is then
fixed by the two trace conditions; when zeta_n^- + 2 hits -|n| the stream
response to r^{zeta-} degenerates and the log-resonant pair
r^{-|n|} log r is used instead.

The n = 0 mode has no radial trace freedom left after flux matching: its
single constant is pinned by the circulation deficit mu0 - mu when
phi0 > 2 and must be closed by shooting in mu otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flows import RESONANCE_TOL, ReferenceFlow, mode_exponents
from .grid import BoundarySpectrum, RadialGrid, integrate_in_all, integrate_out_all

__all__ = [
    "DegenerateFluxError",
    "SourceSpectrum",
    "ModeSolution",
    "SpectralSolution",
    "solve_w_particular",
    "solve_gamma_particular",
    "solve_w_zero",
    "solve_gamma_zero",
    "boundary_constants",
    "solve_linear",
]


class DegenerateFluxError(ValueError):
    """phi0 is inside the numerically degenerate band around 2."""


_PHI_BAND = 1e-6


@dataclass(frozen=True)
class SourceSpectrum:
    """Right-hand sides F_n, n = 0..n_max, sampled on the grid rows."""

    n_max: int
    F: np.ndarray  # complex, shape (n_max + 1, n_nodes)

    def __post_init__(self):
        if self.F.shape[0] != self.n_max + 1:
            raise ValueError("row count must be n_max + 1")

    @classmethod
    def zeros(cls, n_max: int, grid: RadialGrid) -> "SourceSpectrum":
        return cls(n_max=n_max, F=np.zeros((n_max + 1, grid.n_nodes), dtype=complex))


@dataclass(frozen=True)
class ModeSolution:
    """One angular mode of the solved perturbation."""

    n: int
    gamma: np.ndarray
    dgamma: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    gamma_bar: complex
    w_bar: complex
    resonant: bool


@dataclass(frozen=True)
class SpectralSolution:
    """Stacked mode solutions for n = 0..n_max (negative n by conjugation)."""

    flow: ReferenceFlow
    grid: RadialGrid
    boundary: BoundarySpectrum
    gamma: np.ndarray   # (n_max+1, n_nodes)
    dgamma: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    gamma_bar: np.ndarray
    w_bar: np.ndarray
    resonant: np.ndarray = field(repr=False, default=None)

    @property
    def n_max(self) -> int:
        return self.gamma.shape[0] - 1

    def mode(self, n: int) -> ModeSolution:
        """Mode n for any |n| <= n_max; negative n conjugates."""
        k = abs(n)
        if k > self.n_max:
            raise IndexError(f"mode {n} not stored (n_max={self.n_max})")
        conj = (lambda a: np.conj(a)) if n < 0 else (lambda a: a)
        return ModeSolution(
            n=n, gamma=conj(self.gamma[k]), dgamma=conj(self.dgamma[k]),
            w=conj(self.w[k]), dw=conj(self.dw[k]),
            gamma_bar=complex(conj(self.gamma_bar[k])),
            w_bar=complex(conj(self.w_bar[k])), resonant=bool(self.resonant[k]))


def solve_w_particular(grid: RadialGrid, flow: ReferenceFlow, n: int, f_n):
    """Decaying response (w, d_r w) of the mode-n vorticity operator to f_n.

    Returns the pair with L_w w = -f_n; the assembled mode uses
    bar w r^{zeta-} minus this response.
    """
    if n == 0:
        raise ValueError("mode 0 uses solve_w_zero")
    me = mode_exponents(flow, n)
    out = integrate_out_all(grid, f_n, me.zeta_plus)
    inn = integrate_in_all(grid, f_n, me.zeta_minus)
    sd = me.sqrt_disc
    w = (out + inn) / sd
    dw = (me.zeta_plus * out + me.zeta_minus * inn) / (sd * grid.r)
    return w, dw


def solve_gamma_particular(grid: RadialGrid, n: int, w):
    """Decaying response (gamma, d_r gamma) of the mode-n Laplacian to w.

    Returns the pair with Delta_n gamma = -w (same sign convention as the
    assembled stream mode, which subtracts this response).
    """
    if n == 0:
        raise ValueError("mode 0 uses solve_gamma_zero")
    k = abs(n)
    out = integrate_out_all(grid, w, float(k))
    inn = integrate_in_all(grid, w, -float(k))
    g = (out + inn) / (2.0 * k)
    dg = (out - inn) / (2.0 * grid.r)
    return g, dg


def solve_w_zero(grid: RadialGrid, phi0: float, f_0):
    """Decaying mean-mode vorticity response: L_w w = +f_0 at n = 0.

        w(r) = int_r^inf int_s^inf (t/s)^{phi0+1} f_0(t) dt ds,

    accumulated from the tail inward; d_r w(r) = -inner(r).
    """
    inner = integrate_out_all(grid, np.asarray(f_0, dtype=complex) / grid.r,
                              -(phi0 + 1.0))
    w = integrate_out_all(grid, inner / grid.r, 0.0)
    return w, -inner


def solve_gamma_zero(grid: RadialGrid, w):
    """Nested mean-mode stream quadratures for vorticity profile w.

    Returns (Gamma, dGamma) with Gamma(r) = int_r^inf (1/s) int_s^inf
    sigma w(sigma) dsigma ds and dGamma = -(1/r) int_r^inf sigma w dsigma.
    The assembled zero mode is gamma_0 = -(Gamma + homogeneous part): that
    global sign is applied in solve_linear, where the pair must satisfy
    Delta gamma_0 = -w_0 together with the circulation trace.
    """
    big_h = integrate_out_all(grid, w, 0.0)
    big_gamma = integrate_out_all(grid, big_h / (grid.r * grid.r), 0.0)
    return big_gamma, -big_h / grid.r


def boundary_constants(flow: ReferenceFlow, n: int, vr_n: complex, vt_n: complex,
                       g_part_1: complex, dg_part_1: complex,
                       resonance_tol: float = RESONANCE_TOL):
    """Homogeneous amplitudes (bar gamma_n, bar w_n, resonant) from the trace.

    g_part_1 and dg_part_1 are the values at r = 1 of the particular stream
    response and its derivative (the pair that the assembly subtracts).
    """
    if n == 0:
        raise ValueError("mode 0 has no trace-determined pair")
    k = abs(n)
    me = mode_exponents(flow, n)
    zm = me.zeta_minus
    sgn = 1.0 if n > 0 else -1.0
    a = -1j * sgn * vr_n / k + g_part_1
    b = dg_part_1 - vt_n
    denom = 2.0 + zm + k
    resonant = abs(denom) < resonance_tol
    if resonant:
        gamma_bar = a
        w_bar = 2.0 * k * (k * g_part_1 - 1j * sgn * vr_n + dg_part_1 - vt_n)
    else:
        big_d = (zm + 2.0) ** 2 - n * n
        w_bar = -big_d * (k * a + b) / denom
        gamma_bar = a + w_bar / big_d
    return gamma_bar, w_bar, resonant


def _assemble_nonzero(grid: RadialGrid, flow: ReferenceFlow, n: int,
                      vr_n: complex, vt_n: complex, f_n,
                      resonance_tol: float):
    k = abs(n)
    r = grid.r
    w_part, dw_part = solve_w_particular(grid, flow, n, f_n)
    g_part, dg_part = solve_gamma_particular(grid, n, w_part)
    gamma_bar, w_bar, resonant = boundary_constants(
        flow, n, vr_n, vt_n, complex(g_part[0]), complex(dg_part[0]),
        resonance_tol)

    me = mode_exponents(flow, n)
    zm = me.zeta_minus
    pk = r ** float(-k)
    if resonant:
        # exact integer pair keeps Delta gamma = -w to rounding
        log_r = np.log(r)
        w_hom = w_bar * pk / (r * r)
        dw_hom = -(k + 2.0) * w_bar * pk / (r ** 3)
        gamma = gamma_bar * pk + (w_bar / (2.0 * k)) * log_r * pk - g_part
        dgamma = (-k * gamma_bar * pk / r
                  + (w_bar / (2.0 * k)) * pk / r * (1.0 - k * log_r) - dg_part)
    else:
        big_d = (zm + 2.0) ** 2 - n * n
        rzm = r ** zm
        w_hom = w_bar * rzm
        dw_hom = w_bar * zm * rzm / r
        gamma = gamma_bar * pk - (w_bar / big_d) * rzm * r * r - g_part
        dgamma = (-k * gamma_bar * pk / r
                  - (w_bar / big_d) * (2.0 + zm) * rzm * r - dg_part)
    w = w_hom - w_part
    dw = dw_hom - dw_part
    return gamma, dgamma, w, dw, gamma_bar, w_bar, resonant


def _assemble_zero(grid: RadialGrid, flow: ReferenceFlow, circ_deficit: complex,
                   f_0):
    phi0 = flow.phi0
    if abs(phi0 - 2.0) < _PHI_BAND and phi0 != 2.0:
        raise DegenerateFluxError(
            f"phi0={phi0!r} is inside the degenerate band around 2; the "
            "homogeneous mean mode r^(2-phi0) is numerically indistinct "
            "from the log pair there")
    r = grid.r
    w_part, dw_part = solve_w_zero(grid, phi0, f_0)
    if phi0 <= 2.0:
        big_gamma, d_big_gamma = solve_gamma_zero(grid, w_part)
        gamma = -big_gamma
        dgamma = -d_big_gamma
        return gamma, dgamma, w_part, dw_part, 0.0 + 0.0j

    i1 = integrate_out_all(grid, w_part, 0.0)[0]
    w_bar = -(phi0 - 2.0) * (circ_deficit + i1)
    w = w_bar * r ** (-phi0) + w_part
    dw = -phi0 * w_bar * r ** (-phi0 - 1.0) + dw_part
    big_gamma, d_big_gamma = solve_gamma_zero(grid, w_part)
    gamma = -(w_bar * r ** (2.0 - phi0) / (phi0 - 2.0) ** 2 + big_gamma)
    dgamma = w_bar * r ** (1.0 - phi0) / (phi0 - 2.0) - d_big_gamma
    return gamma, dgamma, w, dw, w_bar


def solve_linear(flow: ReferenceFlow, grid: RadialGrid,
                 boundary: BoundarySpectrum,
                 sources: SourceSpectrum | None = None,
                 resonance_tol: float = RESONANCE_TOL) -> SpectralSolution:
    """Solve every mode 0..n_max against the given sources and trace."""
    if sources is None:
        sources = SourceSpectrum.zeros(boundary.n_max, grid)
    if sources.n_max != boundary.n_max:
        raise ValueError("source and boundary mode counts differ")
    if sources.F.shape[1] != grid.n_nodes:
        raise ValueError("source sampling does not match the grid")
    if abs(boundary.mu - flow.mu) > 1e-12 * max(1.0, abs(flow.mu)):
        raise ValueError("boundary spectrum was budgeted against a different mu")
    if abs(boundary.phi0 - flow.phi0) > 1e-12 * max(1.0, abs(flow.phi0)):
        raise ValueError("boundary spectrum carries a different phi0")

    n_max = boundary.n_max
    shape = (n_max + 1, grid.n_nodes)
    gamma = np.zeros(shape, dtype=complex)
    dgamma = np.zeros(shape, dtype=complex)
    w = np.zeros(shape, dtype=complex)
    dw = np.zeros(shape, dtype=complex)
    gamma_bar = np.zeros(n_max + 1, dtype=complex)
    w_bar = np.zeros(n_max + 1, dtype=complex)
    resonant = np.zeros(n_max + 1, dtype=bool)

    gamma[0], dgamma[0], w[0], dw[0], w_bar[0] = _assemble_zero(
        grid, flow, complex(boundary.vtheta[0]), sources.F[0])

    for n in range(1, n_max + 1):
        (gamma[n], dgamma[n], w[n], dw[n],
         gamma_bar[n], w_bar[n], resonant[n]) = _assemble_nonzero(
            grid, flow, n, complex(boundary.vr[n]), complex(boundary.vtheta[n]),
            sources.F[n], resonance_tol)

    return SpectralSolution(flow=flow, grid=grid, boundary=boundary,
                            gamma=gamma, dgamma=dgamma, w=w, dw=dw,
                            gamma_bar=gamma_bar, w_bar=w_bar, resonant=resonant)
