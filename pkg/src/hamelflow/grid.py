"""Radial grid, weighted quadrature, and boundary-trace projection.

All radial profiles live on a geometric grid r_j = exp(j h), j = 0..J, with
r_0 = 1 and r_J = R_max exactly.  The solver needs two families of weighted
cumulative integrals,

    out_j = int_{r_j}^{inf} s f(s) (r_j / s)^zeta ds        (Re zeta >= 0),
    in_j  = int_{1}^{r_j}   s f(s) (s / r_j)^zeta ds        (Re zeta <= 0
                                                             after the sign
                                                             flip below),

evaluated at every node.  Both satisfy one-step recurrences along the grid
whose multipliers have modulus <= 1 for every exponent the solver uses, so
they are accumulated by stable linear scans rather than by repeated
summation.

Per-segment integrals use a local power-law model: on [s_j, s_{j+1}] the
integrand G is replaced by G_j (s/s_j)^q with q = Log(G_{j+1}/G_j)/h, which
integrates in closed form and is exact whenever G is a pure power.  Segments
where the ratio is unusable (zeros, sign flips, wild phase) fall back to
trapezoid in the log variable.

Beyond R_max the integrand is modeled as a power tail r^p with p fitted from
the last five nodes and clamped to at most ``tail_exponent_floor`` (the
shallowest decay the extrapolation will accept); a fitted p >= -1 with a
non-negligible magnitude at R_max raises ``DivergentTailError``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "DivergentTailError",
    "FluxMismatchError",
    "RadialGrid",
    "build_grid",
    "integrate_out",
    "integrate_in",
    "integrate_out_all",
    "integrate_in_all",
    "fit_tail_exponent",
    "BoundarySpectrum",
    "project_boundary",
    "synthesize_boundary",
    "WeightedNorms",
    "seq_norm",
    "field_norm",
]

_PHASE_JUMP_LIMIT = 2.5     # |Im log ratio| beyond this -> fallback rule
_STEEP_SEGMENT_LIMIT = 2.5  # |Re log ratio| beyond this -> fallback rule
_CURVATURE_RAMP = (10.0, 50.0)  # log-curvature band blending the two rules
_DIVERGENCE_TOL = 1e-6      # fitted p >= -1 + this counts as divergent
_NEGLIGIBLE_TAIL = 1e-300


class DivergentTailError(ArithmeticError):
    """Tail extrapolation would diverge: fitted exponent >= -1."""


class FluxMismatchError(ValueError):
    """Boundary samples carry a mean radial velocity inconsistent with phi0."""


@dataclass(frozen=True)
class RadialGrid:
    """Geometric grid on [1, r_max] with nodes r_j = exp(j h)."""

    r_max: float
    nodes_per_decade: int
    tail_exponent_floor: float = -1.1
    h: float = field(init=False)
    r: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.r_max <= 1.0:
            raise ValueError(f"r_max must exceed 1, got {self.r_max}")
        if self.nodes_per_decade < 8:
            raise ValueError("nodes_per_decade must be at least 8")
        if self.tail_exponent_floor >= -1.0:
            raise ValueError("tail_exponent_floor must lie below -1")
        n_seg = int(np.ceil(self.nodes_per_decade * np.log10(self.r_max)))
        h = np.log(self.r_max) / n_seg
        r = np.exp(h * np.arange(n_seg + 1))
        r[0] = 1.0
        r[-1] = self.r_max
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "r", r)

    @property
    def n_nodes(self) -> int:
        return self.r.size

    @property
    def log_r(self) -> np.ndarray:
        return self.h * np.arange(self.r.size)


def build_grid(r_max: float = 1e4, nodes_per_decade: int = 64,
               tail_exponent_floor: float = -1.1) -> RadialGrid:
    return RadialGrid(r_max=float(r_max), nodes_per_decade=int(nodes_per_decade),
                      tail_exponent_floor=float(tail_exponent_floor))


def _segment_power_integrals(s_left, a, b, h, a_prev=None, b_next=None):
    """Integral over [s_j, s_j e^h] of a local model through (a_j, b_j).

    a and b are the integrand values at the segment endpoints, referenced so
    that the integrand in x = log(s) is F(x_j) = s_j a_j and
    F(x_j + h) = s_j e^h b_j.  Two rules are blended:

    * the power model a_j (s/s_j)^q, exact for single powers and right for
      the steep near-power integrands the kernels produce;
    * a trapezoid rule corrected with the neighbouring values a_prev (one
      node to the left, same weight referencing) and b_next (one node to
      the right), whose error coefficients stay smooth through zeros of
      the integrand where the power model breaks down.

    The blend weight follows the local log-curvature |d q_eff / dx|
    estimated from the drift of the fitted exponent between adjacent
    segments.  That estimate is h-independent for a fixed feature, so the
    crossover happens at a fixed physical location and the quadrature
    error stays a smooth function of position; a hard rule switch would
    leave an h-independent kink in the scanned integral that downstream
    finite differences amplify.  Sign flips and extreme ratios force the
    corrected-trapezoid rule outright.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros_like(a)

    finite = np.isfinite(a) & np.isfinite(b)
    usable = finite & (a != 0) & (b != 0)
    with np.errstate(all="ignore"):
        ratio = np.where(usable, b, 1.0) / np.where(usable, a, 1.0)
        logr = np.log(ratio)
    usable &= (np.isfinite(logr)
               & (np.abs(logr.imag) < _PHASE_JUMP_LIMIT)
               & (np.abs(logr.real) < _STEEP_SEGMENT_LIMIT))
    logr = np.where(usable, logr, 0.0)

    # Power model: (e^z - 1)/z with z = (q + 1) h, q = logr / h.
    z = np.where(usable, logr + h, 1.0)
    small = np.abs(z) < 1e-4
    phi1 = np.empty_like(z)
    zs = z[small]
    phi1[small] = 1.0 + zs / 2.0 + zs * zs / 6.0 + zs * zs * zs / 24.0
    phi1[~small] = np.expm1(z[~small]) / z[~small]
    ipow = np.where(usable, a * s_left * h * phi1, 0.0)

    # Corrected trapezoid: plain trapezoid plus the Euler-Maclaurin endpoint
    # term built from central-difference derivatives.
    eh = np.exp(h)
    f0 = a * s_left
    f1 = b * s_left * eh
    trap = 0.5 * h * (f0 + f1)
    ict = trap.copy()
    if a_prev is not None and b_next is not None:
        fm1 = np.asarray(a_prev, dtype=complex) * s_left / eh
        f2 = np.asarray(b_next, dtype=complex) * s_left * (eh * eh)
        with np.errstate(all="ignore"):
            corr = (h / 24.0) * (f2 - f1 - f0 + fm1)
        good = np.isfinite(corr) & (np.abs(corr) <= 0.5 * np.abs(trap))
        ict[good] -= corr[good]

    # Blend weight: fraction of the corrected-trapezoid rule.
    if logr.size > 1:
        step = np.abs(np.diff(logr))
        drift = np.maximum(np.concatenate([step[:1], step]),
                           np.concatenate([step, step[-1:]]))
    else:
        drift = np.zeros(logr.shape)
    lo, hi = _CURVATURE_RAMP
    ramp = np.clip((drift / (h * h) - lo) / (hi - lo), 0.0, 1.0)
    wgt = ramp * ramp * (3.0 - 2.0 * ramp)
    wgt = np.where(usable, wgt, 1.0)

    mixed = (1.0 - wgt) * ipow + wgt * ict
    out[finite] = mixed[finite]
    return out


def _tail_value(grid: RadialGrid, g_last5, r_last5):
    """Extrapolated int_{R_max}^inf of an integrand sampled at the last 5 nodes.

    The local exponent is fitted as a complex number from consecutive log
    ratios so oscillatory power tails (complex weight exponents) extrapolate
    exactly; sign-changing or noisy samples fall back to a fit of the
    magnitudes alone.
    """
    g = np.asarray(g_last5, dtype=complex)
    mags = np.abs(g)
    g_end = complex(g[-1])
    if abs(g_end) <= max(_NEGLIGIBLE_TAIL, 1e-14 * mags.max(initial=0.0)):
        return 0.0 + 0.0j
    if np.any(mags <= 0.0):
        p = complex(grid.tail_exponent_floor)
    else:
        with np.errstate(all="ignore"):
            logs = np.log(g[1:] / g[:-1])
        if np.all(np.isfinite(logs)) \
                and np.abs(logs.imag).max() < _PHASE_JUMP_LIMIT:
            p = complex(np.mean(logs)) / grid.h
        else:
            p = complex(np.polyfit(np.log(r_last5), np.log(mags), 1)[0])
        if p.real >= -1.0 + _DIVERGENCE_TOL:
            raise DivergentTailError(
                f"integrand tail fitted as r^{p.real:.3g} at "
                f"r_max={grid.r_max:g}; the weighted integral does not "
                "converge")
    if p.real > grid.tail_exponent_floor:
        p = complex(grid.tail_exponent_floor)
    return g_end * grid.r_max / (-(p + 1.0))


def fit_tail_exponent(grid: RadialGrid, f) -> float:
    """Least-squares log-log slope of |f| over the last five nodes."""
    f = np.asarray(f)
    mags = np.abs(f[-5:]).astype(float)
    if np.any(mags <= 0.0):
        return -np.inf
    return float(np.polyfit(np.log(grid.r[-5:]), np.log(mags), 1)[0])


def _scan_backward(local, factor):
    """d_j = local_j + factor * d_{j+1}, d_J = seed folded into local[-1]."""
    rev = local[::-1]
    return lfilter([1.0], [1.0, -factor], rev)[::-1]


def _scan_forward(local, factor):
    """e_j = factor * e_{j-1} + local_j."""
    return lfilter([1.0], [1.0, -factor], local)


def integrate_out_all(grid: RadialGrid, f, zeta) -> np.ndarray:
    """out_j = int_{r_j}^inf s f(s) (r_j/s)^zeta ds for every node j.

    Stable for Re zeta >= -? : the scan multiplier is e^{-zeta h}; all solver
    uses have |e^{-zeta h}| <= 1 except the sink-weighted inner integral
    (zeta = -(phi0+1)) whose growth is matched by the decay of the values it
    multiplies, keeping the relative error at O(J eps).
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != grid.r.shape:
        raise ValueError("sample array does not match the grid")
    zeta = complex(zeta)
    r = grid.r
    h = grid.h
    base = r * f
    # Integrand of segment j referenced to its own left endpoint:
    # value a_j at r_j, value b_j = r_{j+1} f_{j+1} e^{-zeta h} at r_{j+1};
    # the node one to the left carries weight e^{+zeta h}, the node two to
    # the right e^{-2 zeta h}.
    step = np.exp(-zeta * h)
    a_prev = np.full(base.size - 1, np.nan, dtype=complex)
    a_prev[1:] = base[:-2] / step
    b_next = np.full(base.size - 1, np.nan, dtype=complex)
    b_next[:-1] = base[2:] * (step * step)
    seg = _segment_power_integrals(r[:-1], base[:-1], base[1:] * step, h,
                                   a_prev, b_next)

    g_last5 = base[-5:] * (grid.r_max / r[-5:]) ** zeta
    tail = _tail_value(grid, g_last5, r[-5:])

    local = np.empty(grid.n_nodes, dtype=complex)
    local[:-1] = seg
    local[-1] = tail
    return _scan_backward(local, np.exp(-zeta * h))


def integrate_in_all(grid: RadialGrid, f, zeta) -> np.ndarray:
    """in_j = int_1^{r_j} s f(s) (r_j/s)^zeta ds for every node j.

    Stable for Re zeta <= 0 (scan multiplier e^{zeta h}).
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != grid.r.shape:
        raise ValueError("sample array does not match the grid")
    zeta = complex(zeta)
    r = grid.r
    h = grid.h
    base = r * f
    # Segment j-1..j referenced to its right endpoint r_j:
    # left value a = r_{j-1} f_{j-1} e^{zeta h}, right value b = r_j f_j;
    # neighbouring nodes carry weights e^{2 zeta h} and e^{-zeta h}.
    step = np.exp(zeta * h)
    a_prev = np.full(base.size - 1, np.nan, dtype=complex)
    a_prev[1:] = base[:-2] * (step * step)
    b_next = np.full(base.size - 1, np.nan, dtype=complex)
    b_next[:-1] = base[2:] / step
    seg = _segment_power_integrals(r[:-1], base[:-1] * step, base[1:], h,
                                   a_prev, b_next)

    local = np.empty(grid.n_nodes, dtype=complex)
    local[0] = 0.0
    local[1:] = seg
    return _scan_forward(local, np.exp(zeta * h))


def integrate_out(grid: RadialGrid, f, r_index: int, zeta) -> complex:
    """Weighted outward integral from node ``r_index`` to infinity."""
    return complex(integrate_out_all(grid, f, zeta)[r_index])


def integrate_in(grid: RadialGrid, f, r_index: int, zeta) -> complex:
    """Weighted inward integral from the boundary to node ``r_index``."""
    return complex(integrate_in_all(grid, f, zeta)[r_index])


# ---------------------------------------------------------------------------
# boundary traces


@dataclass(frozen=True)
class BoundarySpectrum:
    """Fourier data of the boundary trace relative to the reference flow.

    vr[n] and vtheta[n] for n = 0..n_max are coefficients of
    (u_r* + phi0) and (u_theta* - mu); negative modes follow by conjugation.
    vr[0] vanishes by flux matching and vtheta[0] = mu0 - mu.
    """

    n_max: int
    vr: np.ndarray
    vtheta: np.ndarray
    phi0: float
    mu0: float
    mu: float

    def with_mu(self, mu: float) -> "BoundarySpectrum":
        """Same physical trace rebudgeted against circulation mu."""
        vtheta = self.vtheta.copy()
        vtheta[0] = self.mu0 - mu
        return BoundarySpectrum(n_max=self.n_max, vr=self.vr.copy(),
                                vtheta=vtheta, phi0=self.phi0,
                                mu0=self.mu0, mu=float(mu))

    def norm(self, kappa: float = 4.0) -> float:
        stacked = np.concatenate([self.vr, self.vtheta])
        weights = (1.0 + np.abs(np.concatenate(
            [np.arange(self.n_max + 1)] * 2))) ** kappa
        return float(np.max(weights * np.abs(stacked)))


def project_boundary(ur_samples, utheta_samples, n_max: int, mu: float,
                     phi0: float | None = None) -> BoundarySpectrum:
    """Project equispaced boundary samples onto modes 0..n_max.

    Samples are values at theta_m = 2 pi m / M, M >= 2 n_max + 2.  When
    ``phi0`` is given, the sampled mean radial velocity must reproduce it to
    1e-10; otherwise phi0 is inferred from the samples.
    """
    ur = np.asarray(ur_samples, dtype=float)
    ut = np.asarray(utheta_samples, dtype=float)
    if ur.ndim != 1 or ur.shape != ut.shape:
        raise ValueError("need matching 1-d sample arrays")
    m = ur.size
    if m < 2 * n_max + 2:
        raise ValueError(f"need at least {2 * n_max + 2} samples for n_max={n_max}")

    mean_ur = float(np.mean(ur))
    if phi0 is None:
        phi0 = -mean_ur
    elif abs(mean_ur + phi0) > 1e-10 * max(1.0, abs(phi0)):
        raise FluxMismatchError(
            f"mean radial velocity {mean_ur:.3e} inconsistent with flux "
            f"phi0={phi0:g}")
    if phi0 < 0:
        raise ValueError("inferred flux phi0 is negative")
    mu0 = float(np.mean(ut))

    vr = np.fft.fft(ur + phi0)[: n_max + 1] / m
    vtheta = np.fft.fft(ut - mu)[: n_max + 1] / m
    vr[0] = 0.0                # exact by construction of phi0
    vtheta[0] = mu0 - mu       # exact zeroth coefficient
    return BoundarySpectrum(n_max=int(n_max), vr=vr, vtheta=vtheta,
                            phi0=float(phi0), mu0=mu0, mu=float(mu))


def synthesize_boundary(spec: BoundarySpectrum, n_samples: int):
    """Inverse of ``project_boundary``: samples of (u_r*, u_theta*)."""
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    n = np.arange(spec.n_max + 1)[:, None]
    phases = np.exp(1j * n * theta[None, :])
    weights = np.where(n == 0, 1.0, 2.0)
    ur = -spec.phi0 + np.sum(weights * (spec.vr[:, None] * phases).real, axis=0)
    ut = spec.mu + np.sum(weights * (spec.vtheta[:, None] * phases).real, axis=0)
    return ur, ut


# ---------------------------------------------------------------------------
# weighted norms


@dataclass(frozen=True)
class WeightedNorms:
    """Parameters of the polynomially weighted sup norms."""

    alpha: float   # radial weight exponent
    kappa: float   # mode weight exponent
    m: int = 0     # number of radial derivatives included

    def __post_init__(self):
        if self.m < 0 or self.m > 2:
            raise ValueError("derivative order m must be 0, 1, or 2")
        if self.m >= self.kappa:
            raise ValueError("need m < kappa for the mode weights to nest")


def seq_norm(coeffs, kappa: float) -> float:
    """sup_n (1+|n|)^kappa |c_n| over coefficients indexed n = 0..len-1."""
    c = np.asarray(coeffs)
    n = np.arange(c.shape[0])
    return float(np.max((1.0 + n) ** kappa * np.abs(c))) if c.size else 0.0


def field_norm(grid: RadialGrid, mode_numbers, mode_values, norms: WeightedNorms,
               mode_derivs=None) -> float:
    """sup over modes, radii, and derivative order l <= m of

        r^(alpha + l) (1 + |n|)^(kappa - l) |d_r^l phi_n(r)|.

    ``mode_values`` has one row per entry of ``mode_numbers``; radial
    derivatives beyond those supplied are formed by centered differences in
    the log variable.
    """
    vals = np.atleast_2d(np.asarray(mode_values))
    ns = np.asarray(mode_numbers).ravel()
    if vals.shape != (ns.size, grid.n_nodes):
        raise ValueError("mode_values must be (n_modes, n_nodes)")
    r = grid.r

    def d_log(a):
        return np.gradient(a, grid.log_r, axis=-1)

    levels = [vals]
    if norms.m >= 1:
        d1 = (np.atleast_2d(np.asarray(mode_derivs))
              if mode_derivs is not None else d_log(vals) / r)
        levels.append(d1)
    if norms.m >= 2:
        levels.append((d_log(levels[1] * r) - levels[1] * r) / (r * r))

    total = 0.0
    for l, lev in enumerate(levels):
        w = r ** (norms.alpha + l) * ((1.0 + np.abs(ns)) ** (norms.kappa - l))[:, None]
        total = max(total, float(np.max(w * np.abs(lev))))
    return total
