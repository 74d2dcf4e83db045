"""Gradient flow of the conjugation-orbit norm functional.

The norm functional p(rho) = sum_i tr(A_i* A_i) decreases steepest along
conjugation by exp(eps * M) with M = sum_i [A_i*, A_i] (the derivative
there is -2 ||M||_F^2), so iterating

    rho <- exp(eps M) rho exp(-eps M)

with a backtracking line search descends while staying on the orbit.
Critical points are exactly the M = 0 tuples; a closed orbit attains its
minimum there, while a non-closed orbit lets the iterates escape toward
a smaller-norm degeneration with an ever-worse conjugator.  The latter
cannot be certified numerically, only suspected, hence the verdict
vocabulary below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadInput, InvalidParams, NotNormal
from .matgroup import frobenius, spectral_scale
from .repvar import Rep, moment_map, relation_residual

_RELATION_GATE = 1e-6


class FlowStatus(str, Enum):
    CONVERGED = "converged"
    NON_CLOSED_ORBIT_SUSPECTED = "non_closed_orbit_suspected"
    MAX_ITERS = "max_iters"


class PolystabilityVerdict(str, Enum):
    LIKELY_POLYSTABLE = "likely_polystable"
    LIKELY_NOT_POLYSTABLE = "likely_not_polystable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class FlowOptions:
    """Step control and stall heuristics.

    The stall detector flags a suspected non-closed orbit when, over a
    trailing window, the residual stays above tolerance and barely
    improves, the norm decrease is a negligible fraction of the norm,
    and the accumulated conjugator's condition number keeps growing.
    Those are the numerical fingerprints of an escaping orbit; a slowly
    converging closed orbit fails the residual-ratio test because its
    residual contracts geometrically.
    """

    max_iters: int = 5000
    step_init: float = 0.1
    residual_tol: float = 1e-8
    stall_window: int = 50
    stall_decrease_tol: float = 5e-6
    stall_residual_ratio: float = 0.9
    stall_residual_floor: float = 1e-5
    probation_windows: int = 8

    def __post_init__(self):
        if self.max_iters < 1 or self.stall_window < 2:
            raise InvalidParams("max_iters and stall_window must be positive")
        if min(self.step_init, self.residual_tol, self.stall_decrease_tol) <= 0:
            raise InvalidParams("step and tolerance parameters must be positive")
        if not 0 < self.stall_residual_ratio < 1:
            raise InvalidParams("stall_residual_ratio must lie in (0, 1)")
        if self.stall_residual_floor < self.residual_tol:
            raise InvalidParams("stall_residual_floor must be >= residual_tol")
        if self.probation_windows < 1:
            raise InvalidParams("probation_windows must be positive")


@dataclass(frozen=True)
class FlowStep:
    iteration: int
    norm_sq: float
    kn_residual: float
    step_size: float


@dataclass
class FlowTrace:
    steps: list[FlowStep] = field(default_factory=list)
    status: FlowStatus = FlowStatus.MAX_ITERS
    conjugator: np.ndarray | None = None
    conjugator_cond: float = 1.0

    @property
    def final(self) -> FlowStep:
        return self.steps[-1]


def _tuple_norm_sq(images) -> float:
    return float(sum(np.einsum("ij,ij->", a.conj(), a).real for a in images))


def kn_flow(rep: Rep, options: FlowOptions | None = None) -> tuple[Rep, FlowTrace]:
    """Run the descent until the moment-map residual drops below
    tolerance, a stall marks the orbit as suspect, or the budget runs
    out.  Returns the final representation and the full trace; the norm
    is strictly decreasing across accepted steps by construction.
    """
    if options is not None and not isinstance(options, FlowOptions):
        raise BadInput("options must be a FlowOptions instance")
    opts = options or FlowOptions()
    if relation_residual(rep) >= _RELATION_GATE:
        raise BadInput(
            f"relation residual must be below {_RELATION_GATE} before flowing"
        )
    n = rep.dim
    images = [np.asarray(a, dtype=complex) for a in rep.images]
    g_total = np.eye(n, dtype=complex)
    trace = FlowTrace()
    history: list[tuple[float, float, float]] = []  # (norm_sq, residual, cond)

    norm = _tuple_norm_sq(images)
    probation_start: int | None = None
    probation_residual = np.inf
    probation_len = opts.probation_windows * opts.stall_window
    for iteration in range(opts.max_iters + 1):
        m = moment_map(images)
        residual = frobenius(m)
        cond = float(np.linalg.cond(g_total))
        history.append((norm, residual, cond))

        if residual < opts.residual_tol:
            trace.steps.append(FlowStep(iteration, norm, residual, 0.0))
            trace.status = FlowStatus.CONVERGED
            break

        if probation_start is not None:
            # a stall candidate is on probation: a closed orbit halves its
            # residual quickly once it gets moving, while the 1/k decay of
            # an escaping orbit needs its whole past to halve again
            if residual < 0.5 * probation_residual:
                probation_start = None
            elif iteration - probation_start >= probation_len:
                trace.steps.append(FlowStep(iteration, norm, residual, 0.0))
                trace.status = FlowStatus.NON_CLOSED_ORBIT_SUSPECTED
                break
        elif len(history) > opts.stall_window:
            past_norm, past_res, past_cond = history[-opts.stall_window - 1]
            window = history[-opts.stall_window - 1:]
            stalled = (
                min(r for _, r, _ in window) > opts.stall_residual_floor
                and (past_norm - norm) < opts.stall_decrease_tol * max(1.0, norm)
                and residual > opts.stall_residual_ratio * past_res
                and cond > past_cond
            )
            if stalled:
                probation_start = iteration
                probation_residual = residual

        if iteration == opts.max_iters:
            trace.steps.append(FlowStep(iteration, norm, residual, 0.0))
            trace.status = FlowStatus.MAX_ITERS
            break

        w, q = np.linalg.eigh(m)
        # work in the eigenbasis of the moment map: conjugation by
        # exp(eps*m) scales entry (j,k) by exp(eps*(w_j - w_k)), so the
        # norm drop has the cancellation-free closed form below and stays
        # measurable far beneath one ulp of the norm itself
        rotated = [q.conj().T @ a @ q for a in images]
        weights = [np.abs(b) ** 2 for b in rotated]
        exponents = 2.0 * (w[:, None] - w[None, :])
        # scaling the tuple by c multiplies the moment map by c^2, so a
        # scale-covariant step keeps the contraction rate size-free
        scale_sq = norm / (len(images) * n)
        eps = opts.step_init / max(1.0, scale_sq)
        accepted = False
        for _ in range(60):
            drop = -sum(
                float(np.sum(np.expm1(eps * exponents) * s)) for s in weights
            )
            # first-order model predicts a drop of 2*eps*residual^2; ask
            # for a quarter of that so curvature cannot fake progress
            if drop >= 0.5 * eps * residual * residual:
                accepted = True
                break
            eps *= 0.5
        if not accepted:
            trace.steps.append(FlowStep(iteration, norm, residual, 0.0))
            trace.status = FlowStatus.MAX_ITERS
            break

        trace.steps.append(FlowStep(iteration, norm, residual, eps))
        grow = np.exp(eps * w)
        images = [
            q @ (b * np.outer(grow, 1.0 / grow)) @ q.conj().T for b in rotated
        ]
        # running subtraction keeps the recorded norm non-increasing by
        # construction; drift against the true norm is bounded by a few
        # thousand ulps over the whole budget
        norm -= drop
        g_total = (q * grow) @ q.conj().T @ g_total

    trace.conjugator = g_total
    trace.conjugator_cond = float(np.linalg.cond(g_total))
    final_rep = rep.replace_images(images)
    return final_rep, trace


def polystable_probe(
    rep: Rep, options: FlowOptions | None = None
) -> tuple[PolystabilityVerdict, FlowTrace]:
    """Heuristic polystability probe: converged flow means the orbit is
    likely closed, a detected stall means likely not, anything else is
    inconclusive.  Not a certificate in either direction."""
    _, trace = kn_flow(rep, options)
    if trace.status == FlowStatus.CONVERGED:
        return PolystabilityVerdict.LIKELY_POLYSTABLE, trace
    if trace.status == FlowStatus.NON_CLOSED_ORBIT_SUSPECTED:
        return PolystabilityVerdict.LIKELY_NOT_POLYSTABLE, trace
    return PolystabilityVerdict.INCONCLUSIVE, trace


def normal_retract(rep: Rep, t: float) -> Rep:
    """Eigenvalue-modulus scaling applied imagewise: at t=0 the input,
    at t=1 an all-unitary tuple.  Every image must be normal; commuting
    relations survive because the scaling is a spectral function.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidParams("t must lie in [0, 1]")
    if t == 0.0:
        return rep
    try:
        images = tuple(spectral_scale(a, t) for a in rep.images)
    except NotNormal as exc:
        raise NotNormal(f"normal_retract needs normal images: {exc}") from exc
    return rep.replace_images(images)
