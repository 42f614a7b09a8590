"""Physical-space reconstruction and a posteriori diagnostics.

Every check here is deliberately independent of the quadrature that built
the solution: radial derivatives are re-formed with 5-point fourth-order
stencils in the log variable (error ~ (z h)^4 / 90 on r^z), the advection
sources are re-evaluated from the stored modes, and the residual of the
vorticity transport equation is normalized by the largest individual term
so that a perfect zero field scores 0 rather than 0/0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .flows import mode_exponents
from .linear import SpectralSolution, SourceSpectrum
from .nonlin import compute_sources

__all__ = [
    "PhysicalField",
    "log_derivatives",
    "interior",
    "derivative_consistency",
    "divergence_residual",
    "mode_ode_residuals",
    "ns_residual",
    "reconstruct",
    "field_at_radius",
    "CirculationFit",
    "asymptotic_circulation",
    "DecayProfile",
    "decay_fit",
]


@dataclass(frozen=True)
class PhysicalField:
    r: np.ndarray
    theta: np.ndarray
    ur: np.ndarray      # (n_r, n_theta)
    utheta: np.ndarray
    w: np.ndarray


def log_derivatives(grid, rows):
    """Fourth-order (d_x, d_xx) of mode rows on the log grid, full width.

    Only the interior slice (see ``interior``) is stencil-accurate; the two
    nodes at each end are filled with one-sided second-order values so the
    arrays keep the grid's shape.
    """
    a = np.atleast_2d(np.asarray(rows))
    h = grid.h
    d1 = np.gradient(a, grid.log_r, axis=-1)
    d2 = np.gradient(d1, grid.log_r, axis=-1)
    c = slice(2, -2)
    d1c = (-a[:, 4:] + 8.0 * a[:, 3:-1] - 8.0 * a[:, 1:-3] + a[:, :-4]) / (12.0 * h)
    d2c = (-a[:, 4:] + 16.0 * a[:, 3:-1] - 30.0 * a[:, 2:-2]
           + 16.0 * a[:, 1:-3] - a[:, :-4]) / (12.0 * h * h)
    d1[:, c] = d1c
    d2[:, c] = d2c
    return d1, d2


def interior(grid) -> slice:
    """Nodes where the fourth-order stencils are centered."""
    return slice(2, grid.n_nodes - 2)


def _fd_radial(grid, rows):
    """(d_r, d_rr) from values alone, fourth order on the interior."""
    d1x, d2x = log_derivatives(grid, rows)
    r = grid.r
    return d1x / r, (d2x - d1x) / (r * r)


def derivative_consistency(solution: SpectralSolution) -> float:
    """Sup relative mismatch between stored d_r arrays and FD of the values."""
    grid = solution.grid
    c = interior(grid)
    worst = 0.0
    for vals, ders in ((solution.gamma, solution.dgamma),
                       (solution.w, solution.dw)):
        fd1, _ = _fd_radial(grid, vals)
        scale = np.abs(ders[:, c]).max()
        if scale == 0.0:
            continue
        worst = max(worst, float(np.abs(fd1[:, c] - ders[:, c]).max() / scale))
    return worst


def divergence_residual(solution: SpectralSolution) -> float:
    """Mode-wise divergence of the reconstructed velocity, FD radial part.

    Analytically zero for any stream function; numerically it reduces to the
    mismatch between d_r gamma_n and the FD derivative of gamma_n.
    """
    grid = solution.grid
    c = interior(grid)
    r = grid.r
    fd1, _ = _fd_radial(grid, solution.gamma)
    worst = 0.0
    scale = 0.0
    for n in range(1, solution.n_max + 1):
        div = (1j * n / r) * (fd1[n] - solution.dgamma[n])
        worst = max(worst, float(np.abs(div[c]).max()))
        scale = max(scale, float(np.abs((1j * n / r) * solution.dgamma[n])[c].max()))
    if scale == 0.0:
        return 0.0
    return worst / scale


def mode_ode_residuals(solution: SpectralSolution,
                       sources: SourceSpectrum | None = None):
    """(stream_residual, vorticity_residual), sup-normalized term-wise.

    The stream equation is checked as Delta_n gamma_n + w_n = 0 and the
    transport equation as L_w w_n - F_n = 0, with F the supplied sources
    (zeros when omitted).  Each residual is divided by the largest single
    term appearing anywhere in its equation family.
    """
    grid = solution.grid
    flow = solution.flow
    c = interior(grid)
    r = grid.r[c]
    if sources is None:
        F = np.zeros_like(solution.w)
    else:
        if sources.n_max != solution.n_max:
            raise ValueError("source rows do not match the solution")
        F = sources.F

    g1, g2 = _fd_radial(grid, solution.gamma)
    w1, w2 = _fd_radial(grid, solution.w)

    res_g = 0.0
    scale_g = 0.0
    res_w = 0.0
    scale_w = 0.0
    for n in range(solution.n_max + 1):
        lam = 1j * n * flow.mu + n * n
        terms_g = (g2[n][c], g1[n][c] / r, -(n * n) * solution.gamma[n][c] / r**2,
                   solution.w[n][c])
        terms_w = (w2[n][c], (flow.phi0 + 1.0) * w1[n][c] / r,
                   -lam * solution.w[n][c] / r**2, -F[n][c])
        res_g = max(res_g, float(np.abs(sum(terms_g)).max()))
        res_w = max(res_w, float(np.abs(sum(terms_w)).max()))
        scale_g = max(scale_g, max(float(np.abs(t).max()) for t in terms_g))
        scale_w = max(scale_w, max(float(np.abs(t).max()) for t in terms_w))
    return (res_g / scale_g if scale_g > 0 else 0.0,
            res_w / scale_w if scale_w > 0 else 0.0)


def ns_residual(solution: SpectralSolution) -> float:
    """Residual of the full vorticity transport with self-generated sources.

    Fourth-order FD derivatives are substituted into
    L_w w = (advection of w by the perturbation) mode by mode; the sources
    are recomputed from the stored solution, so a converged fixed point is
    checked end to end.  Returns the vorticity-equation residual.
    """
    return mode_ode_residuals(solution, compute_sources(solution))[1]


def reconstruct(solution: SpectralSolution, n_theta: int | None = None) -> PhysicalField:
    """Sample (u_r, u_theta, w) on the polar grid nodes x equispaced angles."""
    n_max = solution.n_max
    if n_theta is None:
        n_theta = max(64, 4 * n_max)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    r = solution.grid.r[:, None]
    flow = solution.flow

    ur = np.broadcast_to(-flow.phi0 / r, (r.size, n_theta)).copy()
    ut = np.broadcast_to(flow.mu / r, (r.size, n_theta)).copy()
    wf = np.broadcast_to(np.real(solution.w[0])[:, None], (r.size, n_theta)).copy()
    ut -= np.real(solution.dgamma[0])[:, None]
    for n in range(1, n_max + 1):
        phase = np.exp(1j * n * theta)[None, :]
        ur += 2.0 * np.real((1j * n) * solution.gamma[n][:, None] / r * phase)
        ut -= 2.0 * np.real(solution.dgamma[n][:, None] * phase)
        wf += 2.0 * np.real(solution.w[n][:, None] * phase)
    return PhysicalField(r=solution.grid.r, theta=theta, ur=ur, utheta=ut, w=wf)


def field_at_radius(solution: SpectralSolution, radius: float,
                    n_theta: int = 256):
    """(theta, u_r, u_theta, w) at the grid node nearest the given radius."""
    grid = solution.grid
    j = int(np.argmin(np.abs(np.log(grid.r) - np.log(radius))))
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    flow = solution.flow
    r = grid.r[j]
    ur = np.full(n_theta, -flow.phi0 / r)
    ut = np.full(n_theta, flow.mu / r - float(np.real(solution.dgamma[0, j])))
    wf = np.full(n_theta, float(np.real(solution.w[0, j])))
    for n in range(1, solution.n_max + 1):
        phase = np.exp(1j * n * theta)
        ur += 2.0 * np.real(1j * n * solution.gamma[n, j] / r * phase)
        ut -= 2.0 * np.real(solution.dgamma[n, j] * phase)
        wf += 2.0 * np.real(solution.w[n, j] * phase)
    return theta, ur, ut, wf


@dataclass(frozen=True)
class CirculationFit:
    mu_effective: float  # extrapolated circulation r u_theta mean at infinity
    decay_exponent: float
    amplitude: float
    rms: float


def asymptotic_circulation(solution: SpectralSolution) -> CirculationFit:
    """Fit mu_eff + c r^{-q} to the mean swirl moment y(r) = mu - r d_r gamma_0.

    y is the circulation carried at radius r; for phi0 > 2 it tends to a
    limit generally different from both mu and mu0.  Constant samples are
    returned exactly without invoking the fit.
    """
    grid = solution.grid
    mask = grid.r >= grid.r_max / 100.0
    r = grid.r[mask]
    y = solution.flow.mu - r * np.real(solution.dgamma[0])[mask]
    mean = float(np.mean(y))
    spread = float(np.max(np.abs(y - mean)))
    if spread <= 1e-12 * max(1.0, abs(mean)):
        return CirculationFit(mu_effective=mean, decay_exponent=float("inf"),
                              amplitude=0.0, rms=0.0)

    def residual(q):
        basis = r ** (-q)
        a = np.stack([np.ones_like(r), basis], axis=1)
        coef, *_ = np.linalg.lstsq(a, y, rcond=None)
        return float(np.sum((a @ coef - y) ** 2)), coef

    opt = minimize_scalar(lambda q: residual(q)[0], bounds=(0.05, 8.0),
                          method="bounded")
    rss, coef = residual(float(opt.x))
    return CirculationFit(mu_effective=float(coef[0]),
                          decay_exponent=float(opt.x),
                          amplitude=float(coef[1]),
                          rms=float(np.sqrt(rss / r.size)))


@dataclass(frozen=True)
class DecayProfile:
    modes: np.ndarray
    gamma_slopes: np.ndarray     # nan where the mode is inactive
    w_slopes: np.ndarray
    gamma_ceilings: np.ndarray
    w_ceilings: np.ndarray
    beta0: float                 # slowest stream decay rate over n >= 1
    beta1: float                 # decay rate of the n = 1 stream mode
    beta_sup1: float             # slowest stream decay rate over n >= 2


def _fit_slope(r, vals, lo):
    mask = (r >= lo) & (np.abs(vals) > 0.0)
    if mask.sum() < 5:
        return float("nan")
    return float(np.polyfit(np.log(r[mask]), np.log(np.abs(vals[mask])), 1)[0])


def decay_fit(solution: SpectralSolution) -> DecayProfile:
    """Log-log slope of every active mode over the last two decades.

    The ceiling columns give the slowest decay the construction admits:
    max(-|n|, Re zeta_n^- + 2, -2 alpha) for the stream modes and
    max(Re zeta_n^-, -2 - 2 alpha) for vorticity (mean mode: the phi0-driven
    exponents).  A fitted slope above its ceiling by more than fit noise
    indicates an assembly defect.
    """
    from .flows import alpha_window

    grid = solution.grid
    flow = solution.flow
    alpha, _ = alpha_window(flow.phi0, flow.mu)
    lo = grid.r_max / 100.0
    n_all = np.arange(solution.n_max + 1)
    g_slopes = np.full(n_all.size, np.nan)
    w_slopes = np.full(n_all.size, np.nan)
    g_ceil = np.full(n_all.size, np.nan)
    w_ceil = np.full(n_all.size, np.nan)

    g_scale = np.abs(solution.gamma).max(initial=0.0)
    w_scale = np.abs(solution.w).max(initial=0.0)
    for n in n_all:
        if n == 0:
            if flow.phi0 > 2.0:
                g_ceil[0] = max(2.0 - flow.phi0, -2.0 * alpha)
                w_ceil[0] = max(-flow.phi0, -2.0 - 2.0 * alpha)
            else:
                g_ceil[0] = -2.0 * alpha
                w_ceil[0] = -2.0 - 2.0 * alpha
        else:
            zm = mode_exponents(flow, int(n)).zeta_minus
            g_ceil[n] = max(-float(n), zm.real + 2.0, -2.0 * alpha)
            w_ceil[n] = max(zm.real, -2.0 - 2.0 * alpha)
        if g_scale > 0 and np.abs(solution.gamma[n]).max() > 1e-13 * g_scale:
            g_slopes[n] = _fit_slope(grid.r, solution.gamma[n], lo)
        if w_scale > 0 and np.abs(solution.w[n]).max() > 1e-13 * w_scale:
            w_slopes[n] = _fit_slope(grid.r, solution.w[n], lo)

    active = ~np.isnan(g_slopes[1:])
    betas = -g_slopes[1:][active]
    beta0 = float(betas.min()) if betas.size else float("nan")
    beta1 = float(-g_slopes[1]) if n_all.size > 1 else float("nan")
    sup1 = -g_slopes[2:][~np.isnan(g_slopes[2:])]
    beta_sup1 = float(sup1.min()) if sup1.size else float("nan")
    return DecayProfile(modes=n_all, gamma_slopes=g_slopes, w_slopes=w_slopes,
                        gamma_ceilings=g_ceil, w_ceilings=w_ceil,
                        beta0=beta0, beta1=beta1, beta_sup1=beta_sup1)
