"""Wave-curve parameterizations and their derivatives.

The coupling solvers express every junction trace as a point on a wave
curve through the pipe's initial state:

* incoming full-Euler pipes:   U*(sigma)      on the fast acoustic curve,
* outgoing full-Euler pipes:   U*(sigma, tau) fast acoustic curve followed
                               by the contact shift tau,
* isentropic pipes (both):     U*(sigma)      on the outbound curve.

Curve parameters are pressure for the full Euler acoustic families and
density for the isentropic families and the contact shift.  Besides the
curve points themselves this module provides the trace quantities
(q, h, s, p, T) and their exact parameter derivatives on both the shock
and rarefaction branches; at the base parameters these reduce to simple
closed forms in (rho, c, u) which are exposed separately by
:func:`curve_derivatives_at_base` and used as an independent cross-check.
"""

from dataclasses import dataclass
from math import log, sqrt

from ._core import kernels
from .errors import NonPositiveDensity, NotSubsonic
from .thermo import GasConstants, Model, PipeState, pressure, sound_speed

# Roles a pipe can play in the coupling parameterization.
M1_OUT = "M1_out"
M1_IN = "M1_in"
ISO = "iso_in_or_out"


def role_of(model: Model, outgoing: bool):
    if model is Model.M1:
        return M1_OUT if outgoing else M1_IN
    return ISO


def lax_m1(family, param, base: PipeState, g: GasConstants):
    """Point on the family-1/2/3 wave curve through an M1 base state.

    Families 1 and 3 are parameterized by the pressure ``sigma`` of the
    connected state; family 2 by the density shift ``tau`` along the
    contact.
    """
    gamma = g.gamma
    if family == 2:
        tau = param
        rho = base.rho + tau
        if rho <= 0.0:
            raise NonPositiveDensity(f"contact shift tau={tau} from rho={base.rho}")
        u = base.u
        return PipeState(Model.M1, rho, base.q + tau * u, E=base.E + 0.5 * tau * u * u)
    sigma = param
    p_k = pressure(base, g)
    rho = kernels.phi(sigma, p_k, base.rho, gamma)
    dpsi = kernels.psi(sigma, p_k, base.rho, gamma)
    u = base.u - dpsi if family == 1 else base.u + dpsi
    return PipeState(Model.M1, rho, rho * u, E=sigma / (gamma - 1.0) + 0.5 * rho * u * u)


def lax_iso(model: Model, family, sigma, base: PipeState, g: GasConstants):
    """Point on the family-1/2 wave curve through an M2 or M3 base state."""
    gamma = g.gamma
    if model is Model.M2:
        inc = kernels.theta2(sigma, base.rho, base.kappa, gamma)
        q = base.u * sigma - inc if family == 1 else base.u * sigma + inc
    elif model is Model.M3:
        inc = kernels.theta3(sigma, base.rho, base.kappa, gamma)
        q = base.q - inc if family == 1 else base.q + inc
    else:
        raise ValueError("lax_iso handles M2/M3 only")
    return PipeState(model, sigma, q, kappa=base.kappa)


@dataclass(frozen=True)
class TraceEval:
    """Trace quantities and exact parameter derivatives at (sigma, tau)."""

    state: PipeState
    q: float
    h: float
    s: float
    p: float
    T: float
    dq_dsigma: float
    dh_dsigma: float
    ds_dsigma: float
    dp_dsigma: float
    dT_dsigma: float
    dq_dtau: float = 0.0
    dh_dtau: float = 0.0
    ds_dtau: float = 0.0
    dp_dtau: float = 0.0
    dT_dtau: float = 0.0


def trace_eval(role, base: PipeState, g: GasConstants, sigma, tau=0.0) -> TraceEval:
    """Evaluate the junction trace of one pipe and its derivatives.

    Derivatives are exact on both branches (the chain rule applied to
    phi/psi/theta), not just the base-point forms.
    """
    gamma = g.gamma
    cv = g.cv

    if role == ISO:
        kappa = base.kappa
        if sigma <= 0.0:
            raise NonPositiveDensity(f"curve parameter sigma={sigma}")
        p = kappa * sigma**gamma
        dp = kappa * gamma * sigma ** (gamma - 1.0)
        T = p / (g.R * sigma)
        dT = (gamma - 1.0) * kappa * sigma ** (gamma - 2.0) / g.R
        s = g.entropy_from_kappa(kappa)
        if base.model is Model.M2:
            inc = kernels.theta2(sigma, base.rho, kappa, gamma)
            dinc = kernels.dtheta2(sigma, base.rho, kappa, gamma)
            q = base.u * sigma + inc
            dq = base.u + dinc
            u = q / sigma
            du = (dq * sigma - q) / sigma**2
            h = kappa * gamma * sigma ** (gamma - 1.0) / (gamma - 1.0) + 0.5 * u * u
            dh = kappa * gamma * sigma ** (gamma - 2.0) + u * du
        else:
            inc = kernels.theta3(sigma, base.rho, kappa, gamma)
            dinc = kernels.dtheta3(sigma, base.rho, kappa, gamma)
            q = base.q + inc
            dq = dinc
            h = kappa * gamma * sigma ** (gamma - 1.0) / (gamma - 1.0)
            dh = kappa * gamma * sigma ** (gamma - 2.0)
        state = PipeState(base.model, sigma, q, kappa=kappa)
        return TraceEval(state, q, h, s, p, T, dq, dh, 0.0, dp, dT)

    # Full Euler: fast acoustic curve from the data, then (outgoing only)
    # the contact shift.  Pressure after the contact equals sigma.
    if sigma <= 0.0:
        raise NonPositiveDensity(f"curve parameter sigma={sigma}")
    p_k = pressure(base, g)
    rho_v = kernels.phi(sigma, p_k, base.rho, gamma)
    drho_v = kernels.dphi(sigma, p_k, base.rho, gamma)
    psi_v = kernels.psi(sigma, p_k, base.rho, gamma)
    dpsi_v = kernels.dpsi(sigma, p_k, base.rho, gamma)
    u = base.u + psi_v

    if role == M1_IN:
        rho = rho_v
        drho = drho_v
        dq_dtau = dh_dtau = ds_dtau = dT_dtau = 0.0
        tau = 0.0
    elif role == M1_OUT:
        rho = rho_v + tau
        if rho <= 0.0:
            raise NonPositiveDensity(f"contact shift tau={tau} from rho={rho_v}")
        drho = drho_v
        dq_dtau = u
        dh_dtau = -gamma * sigma / ((gamma - 1.0) * rho**2)
        ds_dtau = -gamma * cv / rho
        dT_dtau = -sigma / (g.R * rho**2)
    else:
        raise ValueError(f"unknown pipe role {role!r}")

    q = rho * u
    dq = drho * u + rho * dpsi_v
    h = gamma * sigma / ((gamma - 1.0) * rho) + 0.5 * u * u
    dh = gamma / (gamma - 1.0) * (rho - sigma * drho) / rho**2 + u * dpsi_v
    s = cv * log(sigma / rho**gamma) + g.s0
    ds = cv * (1.0 / sigma - gamma * drho / rho)
    T = sigma / (g.R * rho)
    dT = (rho - sigma * drho) / (g.R * rho**2)
    E = sigma / (gamma - 1.0) + 0.5 * rho * u * u
    state = PipeState(Model.M1, rho, q, E=E)
    if role == M1_IN:
        return TraceEval(state, q, h, s, sigma, T, dq, dh, ds, 1.0, dT)
    return TraceEval(
        state, q, h, s, sigma, T, dq, dh, ds, 1.0, dT,
        dq_dtau, dh_dtau, ds_dtau, 0.0, dT_dtau,
    )


def base_parameter(role, base: PipeState, g: GasConstants):
    """Curve parameter at which the curve returns the base state."""
    if role == ISO:
        return base.rho
    return pressure(base, g)


def curve_derivatives_at_base(role, base: PipeState, g: GasConstants):
    """Base-point derivative formulas of the trace quantities.

    These are the closed forms in (rho, u, c) that the coupling Jacobian
    takes at the base parameters; they are kept independent of
    :func:`trace_eval` so the two can be checked against each other.
    Requires |u| < c (a flow direction is not needed here).
    """
    if not abs(base.u) < sound_speed(base, g):
        raise NotSubsonic(f"base state with u={base.u} is not subsonic")
    gamma = g.gamma
    rho = base.rho
    u = base.u
    c = sound_speed(base, g)
    out = {}
    if role in (M1_OUT, M1_IN):
        lam3 = u + c
        out["dq_dsigma"] = lam3 / c**2
        out["dh_dsigma"] = lam3 / (c * rho)
        out["ds_dsigma"] = 0.0
        out["dp_dsigma"] = 1.0
        out["dT_dsigma"] = (gamma - 1.0) / (gamma * g.R * rho)
        if role == M1_OUT:
            out["dq_dtau"] = u
            out["dh_dtau"] = -(c**2) / ((gamma - 1.0) * rho)
            out["ds_dtau"] = -gamma * g.cv / rho
            out["dp_dtau"] = 0.0
            out["dT_dtau"] = -(c**2) / (gamma * g.R * rho)
    elif role == ISO:
        lam2 = u + c if base.model is Model.M2 else c
        out["dq_dsigma"] = lam2
        out["dh_dsigma"] = lam2 * c / rho
        out["ds_dsigma"] = 0.0
        out["dp_dsigma"] = c**2
        out["dT_dsigma"] = (gamma - 1.0) * base.kappa * rho ** (gamma - 2.0) / g.R
    else:
        raise ValueError(f"unknown pipe role {role!r}")
    return out
