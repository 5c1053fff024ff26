"""Two-pipe compressor coupling for adiabatic-head and power control.

The residual stacks mass conservation, the adiabatic pressure-rise balance
(head control) or its power form, and, when the outlet runs the full Euler
model, equality of specific entropy across the machine.  For isentropic
outlets the entropy condition is absorbed by assigning the inlet entropy
to the outlet region, and the system reduces to two equations.

The determinant-sign diagnostics of :func:`proof_determinant` are computed
with the pressure-rise and entropy rows oriented as (control - balance)
and (s_outlet - s_inlet); the residual itself is reported with the
conventional orientation (balance - control, s_inlet - s_outlet).  Row
signs do not affect the solution, only the determinant's sign.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonPositiveDensity,
    NonPositiveFlux,
    NonPositivePressure,
    NotSubsonic,
    SubsonicViolation,
)
from .junction import Orientation, PipeSpec, StarSolution, _newton
from .laxcurves import M1_OUT, base_parameter, role_of, trace_eval
from .thermo import (
    FlowRegime,
    GasConstants,
    Model,
    PipeState,
    classify_subsonic,
    sound_speed,
    thermo_quantities,
)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50

ADIABATIC_HEAD = "CP1"
POWER = "CP2"


@dataclass(frozen=True)
class CompressorControl:
    """Either a prescribed adiabatic head H* (J/kg) or power P* (W).

    Power control carries the proportionality coefficient relating power
    to mass flux times head (P = cp_coeff * q * H).
    """

    kind: str
    value: float
    cp_coeff: float = None

    def __post_init__(self):
        if self.kind not in (ADIABATIC_HEAD, POWER):
            raise ValueError(f"control kind must be CP1 or CP2, got {self.kind!r}")
        if self.value < 0.0:
            raise ValueError("control value must be non-negative")
        if self.kind == POWER:
            if self.cp_coeff is None or not self.cp_coeff > 0.0:
                raise ValueError("power control needs a positive cp_coeff")


class CompressorProblem:
    """Compressor between an incoming and an outgoing pipe of equal area."""

    def __init__(self, inlet, outlet, control: CompressorControl,
                 constants: GasConstants = None):
        g = constants if constants is not None else GasConstants()
        in_spec, in_state = inlet
        out_spec, out_state = outlet
        if in_spec.area != out_spec.area:
            raise ValueError("compressor pipes must have equal surface sections")
        if classify_subsonic(in_state, g) is not FlowRegime.D_MINUS:
            raise NotSubsonic("inlet state must have strictly negative subsonic velocity")
        if classify_subsonic(out_state, g) is not FlowRegime.D_PLUS:
            raise NotSubsonic("outlet state must have strictly positive subsonic velocity")
        if in_spec.orientation is Orientation.OUTGOING:
            raise ValueError("inlet pipe is oriented incoming")
        if out_spec.orientation is Orientation.INCOMING:
            raise ValueError("outlet pipe is oriented outgoing")
        self.constants = g
        self.inlet = (in_spec, in_state)
        self.outlet = (out_spec, out_state)
        self.control = control
        self.roles = (role_of(in_state.model, False), role_of(out_state.model, True))
        self.m1_outlet = self.roles[1] == M1_OUT
        self.dim = 3 if self.m1_outlet else 2
        self.idle = control.value == 0.0

        a = in_spec.area
        mass = a * (in_state.rho * sound_speed(in_state, g)
                    + out_state.rho * sound_speed(out_state, g))
        gamma = g.gamma
        C = gamma * g.R / (gamma - 1.0)
        T1 = trace_eval(self.roles[0], in_state, g,
                        base_parameter(self.roles[0], in_state, g)).T
        rise = C * T1
        if control.kind == POWER:
            rise *= control.cp_coeff * abs(in_state.q)
        self._row_scales = (mass, max(abs(control.value), rise), gamma * g.cv)

    def base_parameters(self):
        g = self.constants
        return np.array([
            base_parameter(self.roles[0], self.inlet[1], g),
            base_parameter(self.roles[1], self.outlet[1], g),
        ]), (np.zeros(1) if self.m1_outlet else np.zeros(0))


def _traces(problem: CompressorProblem, params):
    g = problem.constants
    tau2 = params[2] if problem.m1_outlet else 0.0
    t1 = trace_eval(problem.roles[0], problem.inlet[1], g, params[0])
    t2 = trace_eval(problem.roles[1], problem.outlet[1], g, params[1], tau2)
    return t1, t2


def _rise_coefficient(problem):
    g = problem.constants
    C = g.gamma * g.R / (g.gamma - 1.0)
    if problem.control.kind == POWER:
        C *= problem.control.cp_coeff
    return C


def phi_compressor(params, problem: CompressorProblem, scaled=False):
    """Coupling residual: mass, pressure-rise balance minus control, and
    (full-Euler outlets only) inlet-minus-outlet entropy."""
    t1, t2 = _traces(problem, params)
    return _phi_from(problem, t1, t2, scaled)


def _phi_from(problem, t1, t2, scaled=False):
    g = problem.constants
    e = (g.gamma - 1.0) / g.gamma
    C = _rise_coefficient(problem)
    ratio = t2.p / t1.p
    rise = C * t1.T * (ratio**e - 1.0)
    if problem.control.kind == POWER:
        if t2.q <= 0.0:
            raise NonPositiveFlux(f"power balance evaluated at outlet flux {t2.q:g}")
        rise *= t2.q
    out = np.empty(problem.dim)
    out[0] = t1.q + t2.q
    out[1] = rise - problem.control.value
    if problem.m1_outlet:
        out[2] = t1.s - t2.s
    if scaled:
        out /= np.array(problem._row_scales[:problem.dim])
    return out


def compressor_jacobian(params, problem: CompressorProblem, mode="analytic", scaled=False):
    """Jacobian of the residual w.r.t. (sigma1, sigma2[, tau2])."""
    if mode == "finite_difference":
        J = _fd_jacobian(params, problem)
    elif mode == "analytic":
        J = _analytic_jacobian(params, problem)
    else:
        raise ValueError(f"unknown Jacobian mode {mode!r}")
    if scaled:
        J = J / np.array(problem._row_scales[:problem.dim])[:, None]
    return J


def _analytic_jacobian(params, problem):
    g = problem.constants
    e = (g.gamma - 1.0) / g.gamma
    C = _rise_coefficient(problem)
    t1, t2 = _traces(problem, params)
    ratio = t2.p / t1.p
    re = ratio**e
    d = problem.dim
    J = np.zeros((d, d))
    J[0, 0] = t1.dq_dsigma
    J[0, 1] = t2.dq_dsigma

    # d/dsigma1 of T1*((p2/p1)^e - 1); the ratio term pulls in -dp1/p1
    base2 = C * (t1.dT_dsigma * (re - 1.0)
                 - t1.T * e * re * t1.dp_dsigma / t1.p)
    dsig2 = C * t1.T * e * re * t2.dp_dsigma / t2.p
    if problem.control.kind == POWER:
        rise = C * t1.T * (re - 1.0)
        J[1, 0] = t2.q * base2
        J[1, 1] = t2.dq_dsigma * rise + t2.q * dsig2
    else:
        J[1, 0] = base2
        J[1, 1] = dsig2
    if problem.m1_outlet:
        J[0, 2] = t2.dq_dtau
        dtau2 = C * t1.T * e * re * t2.dp_dtau / t2.p
        if problem.control.kind == POWER:
            rise = C * t1.T * (re - 1.0)
            J[1, 2] = t2.dq_dtau * rise + t2.q * dtau2
        else:
            J[1, 2] = dtau2
        J[2, 0] = t1.ds_dsigma
        J[2, 1] = -t2.ds_dsigma
        J[2, 2] = -t2.ds_dtau
    return J


def _fd_jacobian(params, problem):
    params = np.asarray(params, dtype=float)
    d = problem.dim
    J = np.empty((d, d))
    for col in range(d):
        if col == 2:
            h = 1e-6 * max(abs(params[2]), problem.outlet[1].rho)
        else:
            h = 1e-6 * max(abs(params[col]), 1e-6)
        xp, xm = params.copy(), params.copy()
        xp[col] += h
        xm[col] -= h
        J[:, col] = (phi_compressor(xp, problem) - phi_compressor(xm, problem)) / (2.0 * h)
    return J


def proof_determinant(problem: CompressorProblem, params=None):
    """Base-point Jacobian determinant in the orientation used by the
    regularity argument: rows (mass, control - balance, s2 - s1)."""
    if params is None:
        sigma0, tau0 = problem.base_parameters()
        params = np.concatenate([sigma0, tau0])
    J = _analytic_jacobian(params, problem).copy()
    J[1] = -J[1]
    if problem.m1_outlet:
        J[2] = -J[2]
    return float(np.linalg.det(J))


def solve_compressor(problem: CompressorProblem, tol=DEFAULT_TOL,
                     max_iter=DEFAULT_MAX_ITER,
                     apply_entropy_assignment=False) -> StarSolution:
    """Solve the compressor coupling for both trace star states.

    For isentropic outlets the realized inlet entropy is recorded (and on
    request applied) as the outlet's entropy assignment.  Idle controls
    (value 0) are accepted and flagged in ``extras['idle_control']``.
    """
    g = problem.constants
    sigma0, tau0 = problem.base_parameters()
    x0 = np.concatenate([sigma0, tau0])

    def phi(x):
        return phi_compressor(x, problem, scaled=True)

    def jac(x):
        return compressor_jacobian(x, problem, scaled=True)

    x, res, it = _newton(problem, phi, jac, x0, tol, max_iter,
                         (NonPositiveDensity, NonPositivePressure, NonPositiveFlux))
    t1, t2 = _traces(problem, x)

    if classify_subsonic(t1.state, g) is not FlowRegime.D_MINUS:
        raise SubsonicViolation("inlet star state left the incoming subsonic set")
    if classify_subsonic(t2.state, g) is not FlowRegime.D_PLUS:
        raise SubsonicViolation("outlet star state left the outgoing subsonic set")

    e = (g.gamma - 1.0) / g.gamma
    head = g.gamma * g.R / (g.gamma - 1.0) * t1.T * ((t2.p / t1.p) ** e - 1.0)
    extras = {
        "pressure_ratio": t2.p / t1.p,
        "head": head,
        "idle_control": problem.idle,
        "assigned_kappa": {},
    }
    if problem.control.kind == POWER:
        extras["power"] = problem.control.cp_coeff * t2.q * head
    s_star = t1.s
    out_state = t2.state
    if not problem.m1_outlet:
        kap = g.kappa_from_entropy(s_star)
        extras["assigned_kappa"][problem.outlet[0].id] = kap
        if apply_entropy_assignment:
            out_state = PipeState(out_state.model, out_state.rho, out_state.q, kappa=kap)

    tau2 = float(x[2]) if problem.m1_outlet else None
    return StarSolution(
        star_states=(t1.state, out_state),
        sigma=(float(x[0]), float(x[1])),
        tau=(None, tau2),
        h_star=None,
        s_star=s_star,
        residual_norm=float(res),
        iterations=it,
        extras=extras,
    )
