"""Reference flows and mode exponents for the exterior planar problem.

The background velocity outside the unit disk is the pure sink/swirl field

    u_ref = (-phi0 / r) e_r + (mu / r) e_theta,      phi0 >= 0,

the decaying member of the Hamel family.  Perturbing the stream function by
a single angular harmonic e^{i n theta} turns the linearized vorticity
transport into an Euler (equidimensional) ODE whose characteristic exponents
are

    zeta_n^{+-} = -phi0/2 +- (1/2) sqrt(phi0^2 + 4 (i n mu + n^2)),

with the principal branch of the square root.  Everything downstream (decay
rates, contraction windows, resonance bookkeeping) is a function of these
exponents, so they live here together with the solvability threshold for the
boundary-value problem and small helpers for flux/circulation bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ReferenceFlow",
    "ModeExponents",
    "hamel_velocity",
    "ref_velocity",
    "zeta_pair",
    "mode_exponents",
    "re_zeta_minus_closed_form",
    "rho_decay",
    "alpha_window",
    "circulation_threshold",
    "existence_condition",
    "flux_circulation",
    "resonance_offset",
    "is_resonant",
]

RESONANCE_TOL = 1e-8


@dataclass(frozen=True)
class ReferenceFlow:
    """Sink strength and circulation of the background field u_ref."""

    phi0: float  # radial flux through the unit circle, divided by 2*pi
    mu: float    # circulation carried by the reference swirl

    def __post_init__(self):
        if self.phi0 < 0:
            raise ValueError(f"flux phi0 must be nonnegative, got {self.phi0}")
        if not (np.isfinite(self.phi0) and np.isfinite(self.mu)):
            raise ValueError("flow parameters must be finite")


@dataclass(frozen=True)
class ModeExponents:
    """Characteristic exponents of the mode-n vorticity operator."""

    n: int
    zeta_plus: complex
    zeta_minus: complex
    sqrt_disc: complex  # zeta_plus - zeta_minus, never zero for n != 0


def hamel_velocity(phi: float, lam: float, mu: float, r):
    """Velocity of the general Hamel member (v_r, v_theta).

    v_r = -phi / r, v_theta = lam * r^(1-phi) + mu / r.  The swirl decays at
    infinity iff lam == 0 or phi > 1; callers probing that boundary do so
    through this single evaluation point.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be positive")
    vr = -phi / r
    vtheta = lam * r ** (1.0 - phi) + mu / r
    return vr, vtheta


def ref_velocity(flow: ReferenceFlow, r):
    """Velocity (u_r, u_theta) of the decaying reference flow."""
    return hamel_velocity(flow.phi0, 0.0, flow.mu, r)


def zeta_pair(phi0, mu, n):
    """Both exponents for mode(s) n, vectorized over n.

    The square-root argument phi0^2 + 4 n^2 + 4 i n mu has strictly positive
    real part whenever (phi0, n) != (0, 0), so the principal branch is
    continuous in mu and the pair never collides for n != 0.
    """
    n = np.asarray(n)
    disc = phi0 * phi0 + 4.0 * (1j * n * mu + n * n)
    root = np.sqrt(disc.astype(complex))
    zp = -phi0 / 2.0 + root / 2.0
    zm = -phi0 / 2.0 - root / 2.0
    return zp, zm


def mode_exponents(flow: ReferenceFlow, n: int) -> ModeExponents:
    zp, zm = zeta_pair(flow.phi0, flow.mu, int(n))
    return ModeExponents(n=int(n), zeta_plus=complex(zp), zeta_minus=complex(zm),
                         sqrt_disc=complex(zp - zm))


def re_zeta_minus_closed_form(phi0, mu, n):
    """Real part of zeta_n^- without complex arithmetic.

    For a + ib with a > 0, Re sqrt(a+ib) = sqrt((|a+ib| + a)/2); applied to
    the discriminant this gives

        Re zeta_n^- = -phi0/2 - (1/(2 sqrt 2)) [ (phi0^2 + 4 n^2)
                        + sqrt((phi0^2 + 4 n^2)^2 + 16 n^2 mu^2) ]^{1/2}.

    Used as an independent cross-check of the complex evaluation.
    """
    n = np.asarray(n, dtype=float)
    a = phi0 * phi0 + 4.0 * n * n
    inner = a + np.sqrt(a * a + 16.0 * n * n * mu * mu)
    return -phi0 / 2.0 - np.sqrt(inner) / (2.0 * np.sqrt(2.0))


def rho_decay(phi0: float, mu: float) -> float:
    """Decay rate rho = |Re zeta_1^-| of the slowest homogeneous mode."""
    return float(-re_zeta_minus_closed_form(phi0, mu, 1))


def circulation_threshold(phi0: float) -> float:
    """Least circulation |mu| making the problem solvable at flux phi0.

    Zero for phi0 > 3/2 (any circulation works); (4 - phi0) sqrt(3 - 2 phi0)
    on [0, 3/2], where rho = 2 is crossed exactly at |mu| equal to the
    threshold.
    """
    if phi0 > 1.5:
        return 0.0
    return (4.0 - phi0) * np.sqrt(3.0 - 2.0 * phi0)


def existence_condition(phi0: float, mu: float) -> bool:
    """Whether the fixed-point construction applies: rho(phi0, mu) > 2.

    Equivalent to phi0 > 3/2, or phi0 in [0, 3/2] with
    |mu| > (4 - phi0) sqrt(3 - 2 phi0).  The equality case is excluded:
    there the contraction window is empty.
    """
    if phi0 < 0:
        return False
    if phi0 > 1.5:
        return True
    return abs(mu) > circulation_threshold(phi0)


def alpha_window(phi0: float, mu: float):
    """Weight exponent used by the solver's convergence norm.

    Returns (alpha, feasible) with alpha = min(rho - 2, 1) / 2.  When
    rho <= 2 the window is empty and feasible is False; alpha is then
    clipped to a small positive value so diagnostics can still be formed.
    """
    rho = rho_decay(phi0, mu)
    alpha = 0.5 * min(rho - 2.0, 1.0)
    feasible = alpha > 0.0
    if not feasible:
        alpha = 1e-3
    return alpha, feasible


def flux_circulation(ur_samples, utheta_samples):
    """(phi0, mu0) from equispaced boundary samples of (u_r*, u_theta*).

    phi0 = -mean(u_r*) and mu0 = mean(u_theta*); the means are the exact
    zeroth Fourier coefficients for equispaced samples of band-limited data.
    """
    ur = np.asarray(ur_samples, dtype=float)
    ut = np.asarray(utheta_samples, dtype=float)
    if ur.shape != ut.shape or ur.ndim != 1 or ur.size < 4:
        raise ValueError("need matching 1-d sample arrays of length >= 4")
    return -float(np.mean(ur)), float(np.mean(ut))


def resonance_offset(flow: ReferenceFlow, n: int) -> float:
    """Distance |zeta_n^- + 2 + |n|| from the logarithmic degeneracy."""
    if n == 0:
        raise ValueError("resonance bookkeeping applies to n != 0 only")
    me = mode_exponents(flow, n)
    return abs(me.zeta_minus + 2.0 + abs(n))


def is_resonant(flow: ReferenceFlow, n: int, tol: float = RESONANCE_TOL) -> bool:
    """True when mode n sits on the log-resonant branch r^{-|n|} log r.

    At mu = 0 this happens exactly at phi0 = 4 (1 + |n|) / (2 + |n|); for
    mu != 0 the offset has an imaginary part n mu / ... that keeps it away
    from zero, so resonance is a mu = 0 phenomenon in practice.
    """
    return resonance_offset(flow, n) < tol
