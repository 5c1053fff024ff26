"""Entropy-preserving junction coupling for the generalized Riemann problem.

The trace state of every pipe is written as a point on its wave curve
(see :mod:`gasnet.laxcurves`); the coupling residual stacks

* total mass flux through the junction,
* pairwise equality of total enthalpy against a pivot pipe,
* for each outgoing full-Euler pipe, equality of its specific entropy
  with the flux-weighted entropy mix of the incoming pipes,

and is driven to zero by a damped Newton iteration started at the base
parameters, where the residual vanishes for balanced data.  The pivot is
the incoming pipe of maximal initial entropy, which keeps the entropy-mix
derivative of the pivot column non-positive and hence the base Jacobian
regular.

Pipes are renumbered internally into the canonical block order
[outgoing M1 | incoming M1 | incoming M2 | incoming M3 | outgoing M2/M3];
solutions are reported in the caller's original pipe order.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    NoConvergence,
    NotSubsonic,
    SingularEntropyMix,
    SingularJacobian,
    SubsonicViolation,
)
from .laxcurves import (
    ISO,
    M1_IN,
    M1_OUT,
    TraceEval,
    base_parameter,
    role_of,
    trace_eval,
)
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
MAX_BACKTRACKS = 30


class Orientation(Enum):
    INCOMING = "incoming"
    OUTGOING = "outgoing"


@dataclass(frozen=True)
class PipeSpec:
    """Geometry and model of one pipe attached to the junction."""

    id: str
    area: float
    model: Model
    orientation: Orientation = None

    def __post_init__(self):
        if not self.area > 0.0:
            raise ValueError(f"pipe {self.id!r}: area must be positive")


@dataclass(frozen=True)
class _Pipe:
    """Internal per-pipe record in canonical order."""

    spec: PipeSpec
    state: PipeState
    role: str
    outgoing: bool
    input_index: int


def _classify_pipe(spec: PipeSpec, state: PipeState, g: GasConstants, where):
    if spec.model is not state.model:
        raise ValueError(f"{where}: spec model {spec.model} != state model {state.model}")
    regime = classify_subsonic(state, g)
    if regime is FlowRegime.NOT_SUBSONIC:
        raise NotSubsonic(
            f"{where}: initial state must be strictly subsonic with nonzero "
            f"velocity (u={state.u}, c={sound_speed(state, g)})"
        )
    outgoing = regime is FlowRegime.D_PLUS
    if spec.orientation is not None:
        expect = Orientation.OUTGOING if outgoing else Orientation.INCOMING
        if spec.orientation is not expect:
            raise ValueError(
                f"{where}: declared orientation {spec.orientation.value} does not "
                f"match the flow direction of the initial state ({expect.value})"
            )
    return outgoing


def _group(model: Model, outgoing: bool):
    if model is Model.M1:
        return 0 if outgoing else 1
    if not outgoing:
        return 2 if model is Model.M2 else 3
    return 4 if model is Model.M2 else 5


class JunctionProblem:
    """A single junction with N pipes, their initial states, and constants."""

    def __init__(self, pipes, constants: GasConstants = None):
        g = constants if constants is not None else GasConstants()
        entries = []
        for idx, (spec, state) in enumerate(pipes):
            outgoing = _classify_pipe(spec, state, g, f"pipe {spec.id!r}")
            entries.append((spec, state, outgoing, idx))
        if len(entries) < 2:
            raise ValueError("a junction needs at least two pipes")
        n_in = sum(1 for e in entries if not e[2])
        if n_in == 0 or n_in == len(entries):
            raise ValueError(
                "a junction needs at least one incoming and one outgoing pipe"
            )
        entries.sort(key=lambda e: (_group(e[0].model, e[2]), e[3]))

        # Rotate the incoming pipe of maximal entropy to the head of its
        # model block, so it can serve as the enthalpy pivot.
        s_of = {}
        for spec, state, outgoing, idx in entries:
            s_of[idx] = thermo_quantities(state, g).s
        incoming = [e for e in entries if not e[2]]
        pivot_entry = max(incoming, key=lambda e: s_of[e[3]])
        block = _group(pivot_entry[0].model, False)
        first_of_block = next(i for i, e in enumerate(entries)
                              if _group(e[0].model, e[2]) == block)
        entries.remove(pivot_entry)
        entries.insert(first_of_block, pivot_entry)

        self.constants = g
        self.pipes = tuple(
            _Pipe(spec, state, role_of(spec.model, outgoing), outgoing, idx)
            for spec, state, outgoing, idx in entries
        )
        self.n = len(self.pipes)
        self.n0 = sum(1 for p in self.pipes if p.role == M1_OUT)
        self.incoming = tuple(i for i, p in enumerate(self.pipes) if not p.outgoing)
        self.outgoing_m1 = tuple(i for i, p in enumerate(self.pipes) if p.role == M1_OUT)
        self.pivot = next(i for i, p in enumerate(self.pipes)
                          if p.input_index == pivot_entry[3])
        self.dim = self.n + self.n0

        # Row scales for the nondimensionalized residual.
        mass = sum(p.spec.area * p.state.rho * sound_speed(p.state, g) for p in self.pipes)
        h_sc = max(abs(thermo_quantities(p.state, g).h) for p in self.pipes)
        self._row_scales = (mass, max(h_sc, 1e-300), g.gamma * g.cv)

    def base_parameters(self):
        sigma0 = np.array(
            [base_parameter(p.role, p.state, self.constants) for p in self.pipes]
        )
        tau0 = np.zeros(self.n0)
        return sigma0, tau0

    def to_input_order(self, values):
        out = [None] * self.n
        for i, p in enumerate(self.pipes):
            out[p.input_index] = values[i]
        return tuple(out)


def _traces(problem: JunctionProblem, sigma, tau):
    g = problem.constants
    evals = []
    tau_of = dict(zip(problem.outgoing_m1, tau))
    for i, p in enumerate(problem.pipes):
        evals.append(trace_eval(p.role, p.state, g, sigma[i], tau_of.get(i, 0.0)))
    return evals


def entropy_mix(problem: JunctionProblem, sigma):
    """Flux-weighted entropy of the incoming pipes at parameters sigma."""
    traces = _traces(problem, sigma, np.zeros(problem.n0))
    return _entropy_mix_from(problem, traces)


def _entropy_mix_from(problem: JunctionProblem, traces):
    num = 0.0
    den = 0.0
    scale = 0.0
    for i in problem.incoming:
        a = problem.pipes[i].spec.area
        num += a * traces[i].q * traces[i].s
        den += a * traces[i].q
        scale += a * abs(traces[i].q)
    if abs(den) < 1e-12 * max(scale, 1e-300):
        raise SingularEntropyMix(
            f"incoming mass flux sum {den:g} is negligible against scale {scale:g}"
        )
    return num / den


def assemble_phi(problem: JunctionProblem, sigma, tau, scaled=False):
    """Coupling residual of dimension N + (number of outgoing M1 pipes)."""
    traces = _traces(problem, sigma, tau)
    return _phi_from(problem, traces, scaled)


def _phi_from(problem, traces, scaled=False):
    n, n0, piv = problem.n, problem.n0, problem.pivot
    out = np.empty(problem.dim)
    out[0] = sum(problem.pipes[i].spec.area * traces[i].q for i in range(n))
    row = 1
    for j in range(n):
        if j == piv:
            continue
        out[row] = traces[piv].h - traces[j].h
        row += 1
    if n0:
        s_star = _entropy_mix_from(problem, traces)
        for j in problem.outgoing_m1:
            out[row] = traces[j].s - s_star
            row += 1
    if scaled:
        m_sc, h_sc, s_sc = problem._row_scales
        out[0] /= m_sc
        out[1:n] /= h_sc
        out[n:] /= s_sc
    return out


def assemble_jacobian(problem: JunctionProblem, sigma, tau, mode="analytic", scaled=False):
    """Jacobian of the coupling residual w.r.t. (sigma, tau).

    ``analytic`` differentiates the wave-curve compositions in closed form
    (exact on both branches); ``finite_difference`` uses central
    differences and exists as an independent cross-check.
    """
    if mode == "finite_difference":
        J = _fd_jacobian(problem, sigma, tau)
    elif mode == "analytic":
        J = _analytic_jacobian(problem, sigma, tau)
    else:
        raise ValueError(f"unknown Jacobian mode {mode!r}")
    if scaled:
        m_sc, h_sc, s_sc = problem._row_scales
        J = J.copy()
        J[0] /= m_sc
        J[1:problem.n] /= h_sc
        J[problem.n:] /= s_sc
    return J


def _analytic_jacobian(problem, sigma, tau):
    n, n0, piv = problem.n, problem.n0, problem.pivot
    d = problem.dim
    traces = _traces(problem, sigma, tau)
    tau_col = {j: n + k for k, j in enumerate(problem.outgoing_m1)}
    J = np.zeros((d, d))

    for i, p in enumerate(problem.pipes):
        a = p.spec.area
        J[0, i] = a * traces[i].dq_dsigma
        if i in tau_col:
            J[0, tau_col[i]] = a * traces[i].dq_dtau

    row = 1
    for j in range(n):
        if j == piv:
            continue
        J[row, piv] = traces[piv].dh_dsigma
        J[row, j] -= traces[j].dh_dsigma
        if j in tau_col:
            J[row, tau_col[j]] = -traces[j].dh_dtau
        row += 1

    if n0:
        den = sum(problem.pipes[i].spec.area * traces[i].q for i in problem.incoming)
        s_star = _entropy_mix_from(problem, traces)
        # d s*/d sigma_i for incoming pipes (zero columns otherwise)
        ds_star = {}
        for i in problem.incoming:
            a = problem.pipes[i].spec.area
            t = traces[i]
            ds_star[i] = a * (t.dq_dsigma * t.s + t.q * t.ds_dsigma - s_star * t.dq_dsigma) / den
        for j in problem.outgoing_m1:
            J[row, j] = traces[j].ds_dsigma
            J[row, tau_col[j]] = traces[j].ds_dtau
            for i in problem.incoming:
                J[row, i] -= ds_star[i]
            row += 1
    return J


def _fd_jacobian(problem, sigma, tau):
    sigma = np.asarray(sigma, dtype=float)
    tau = np.asarray(tau, dtype=float)
    d = problem.dim
    n = problem.n
    J = np.empty((d, d))
    for col in range(d):
        if col < n:
            h = 1e-6 * max(abs(sigma[col]), 1e-6)
            sp, sm = sigma.copy(), sigma.copy()
            sp[col] += h
            sm[col] -= h
            fp = assemble_phi(problem, sp, tau)
            fm = assemble_phi(problem, sm, tau)
        else:
            k = col - n
            h = 1e-6 * max(abs(tau[k]), problem.pipes[problem.outgoing_m1[k]].state.rho)
            tp, tm = tau.copy(), tau.copy()
            tp[k] += h
            tm[k] -= h
            fp = assemble_phi(problem, sigma, tp)
            fm = assemble_phi(problem, sigma, tm)
        J[:, col] = (fp - fm) / (2.0 * h)
    return J


def pivot_blocks(problem: JunctionProblem, sigma=None, tau=None):
    """The 3x3 blocks that control regularity when outgoing M1 pipes exist.

    Block j couples (sigma_j, sigma_pivot, tau_j) of outgoing M1 pipe j
    through the mass row, its enthalpy row, and its entropy row.
    """
    if sigma is None or tau is None:
        sigma, tau = problem.base_parameters()
    J = _analytic_jacobian(problem, sigma, tau)
    n, piv = problem.n, problem.pivot
    tau_col = {j: n + k for k, j in enumerate(problem.outgoing_m1)}
    enth_row = {}
    row = 1
    for j in range(n):
        if j == piv:
            continue
        enth_row[j] = row
        row += 1
    blocks = []
    for k, j in enumerate(problem.outgoing_m1):
        er = enth_row[j]
        sr = n + k
        cols = (j, piv, tau_col[j])
        block = np.array([
            [J[0, c] for c in cols],
            [J[er, c] for c in cols],
            [J[sr, c] for c in cols],
        ])
        blocks.append(block)
    return blocks


@dataclass(frozen=True)
class StarSolution:
    """Junction trace states and the parameters that generate them.

    All per-pipe tuples are in the caller's original pipe order; ``tau``
    holds None for pipes without a contact parameter.
    """

    star_states: tuple
    sigma: tuple
    tau: tuple
    h_star: float
    s_star: float
    residual_norm: float
    iterations: int
    extras: dict

    @property
    def assigned_kappa(self):
        return self.extras.get("assigned_kappa")


def _newton(problem, phi, jac, x0, tol, max_iter, domain_errors):
    """Damped Newton with Armijo backtracking on the scaled residual."""
    x = np.asarray(x0, dtype=float)
    fx = phi(x)
    for it in range(max_iter + 1):
        if np.linalg.norm(fx, np.inf) <= tol:
            return x, np.linalg.norm(fx, np.inf), it
        if it == max_iter:
            break
        J = jac(x)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"coupling Jacobian is singular: {exc}") from exc
        norm0 = np.linalg.norm(fx)
        alpha = 1.0
        for _ in range(MAX_BACKTRACKS):
            try:
                fn = phi(x + alpha * step)
            except domain_errors:
                alpha *= 0.5
                continue
            if np.linalg.norm(fn) <= (1.0 - 1e-4 * alpha) * norm0:
                break
            alpha *= 0.5
        else:
            raise NoConvergence(
                "line search stalled", residual=np.linalg.norm(fx, np.inf), iterations=it
            )
        x = x + alpha * step
        fx = fn
    raise NoConvergence(
        f"no convergence in {max_iter} iterations",
        residual=float(np.linalg.norm(fx, np.inf)),
        iterations=max_iter,
    )


def solve_junction(problem: JunctionProblem, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                   apply_entropy_assignment=False) -> StarSolution:
    """Solve the junction coupling system for the trace star states.

    The returned entropy mix is assigned to outgoing isentropic pipes as
    solution metadata; with ``apply_entropy_assignment`` their star states
    additionally carry the kappa implied by that entropy.
    """
    from .errors import NonPositiveDensity, NonPositivePressure, SingularEntropyMix as _SEM

    g = problem.constants
    n, n0 = problem.n, problem.n0
    sigma0, tau0 = problem.base_parameters()
    x0 = np.concatenate([sigma0, tau0])

    def phi(x):
        return assemble_phi(problem, x[:n], x[n:], scaled=True)

    def jac(x):
        return assemble_jacobian(problem, x[:n], x[n:], scaled=True)

    x, res, it = _newton(problem, phi, jac, x0, tol, max_iter,
                         (NonPositiveDensity, NonPositivePressure, _SEM))

    sigma, tau = x[:n], x[n:]
    traces = _traces(problem, sigma, tau)
    s_star = _entropy_mix_from(problem, traces) if problem.incoming else None
    h_star = traces[problem.pivot].h

    states = []
    assigned = {}
    for i, p in enumerate(problem.pipes):
        st = traces[i].state
        regime = classify_subsonic(st, g)
        want = FlowRegime.D_PLUS if p.outgoing else FlowRegime.D_MINUS
        if regime is not want:
            raise SubsonicViolation(
                f"pipe {p.spec.id!r}: star state left {want.value} "
                f"(u={st.u:g}, c={sound_speed(st, g):g})"
            )
        if p.outgoing and p.spec.model.is_isentropic:
            kap = g.kappa_from_entropy(s_star)
            assigned[p.spec.id] = kap
            if apply_entropy_assignment:
                st = PipeState(st.model, st.rho, st.q, kappa=kap)
        states.append(st)

    tau_of = dict(zip(problem.outgoing_m1, tau))
    tau_full = [tau_of.get(i) for i in range(n)]
    return StarSolution(
        star_states=problem.to_input_order(states),
        sigma=problem.to_input_order(list(sigma)),
        tau=problem.to_input_order(tau_full),
        h_star=h_star,
        s_star=s_star,
        residual_norm=float(res),
        iterations=it,
        extras={"assigned_kappa": assigned},
    )


@dataclass(frozen=True)
class CouplingDiagnostics:
    mass_residual: float
    max_enthalpy_spread: float
    max_entropy_residual: float


def verify_coupling(sol: StarSolution, problem: JunctionProblem) -> CouplingDiagnostics:
    """Re-check the coupling conditions directly from the star states.

    This path recomputes q, h, s from the states (not from the curve
    parameters), so it exercises a different evaluation route than the
    solver.  Residuals are nondimensionalized against the problem's
    mass/enthalpy/entropy scales.
    """
    g = problem.constants
    m_sc, h_sc, s_sc = problem._row_scales
    states = {i: sol.star_states[problem.pipes[i].input_index] for i in range(problem.n)}
    mass = sum(problem.pipes[i].spec.area * states[i].q for i in range(problem.n))
    hs = [thermo_quantities(states[i], g).h for i in range(problem.n)]
    spread = (max(hs) - min(hs)) / h_sc
    ent = 0.0
    if problem.n0 and sol.s_star is not None:
        for j in problem.outgoing_m1:
            s_j = thermo_quantities(states[j], g).s
            ent = max(ent, abs(s_j - sol.s_star) / s_sc)
    return CouplingDiagnostics(abs(mass) / m_sc, spread, ent)
