"""Iteration drivers: the CQ method and the shrinking projection method.

Both methods iterate from a fixed anchor x1 inside the ambient cap.  Each
step evaluates the staged average y_n of the current iterate, forms the
halfspace cut "closer to y_n than to x_n", and projects the anchor onto the
resulting region:

* the CQ method keeps exactly two cuts per step (the fresh cut and a
  localization cut through x_n);
* the shrinking method accumulates every cut, so regions are nested by
  construction.

Every step records diagnostics and enforces the observable invariants the
convergence arguments provide: the anchored distance d(x1, x_n) never
decreases, and any known common fixed point satisfies every generated
constraint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityViolated, MonotonicityViolated, SphereProjError, WitnessInfeasible
from .geometry import SpherePoint, distance, geodesic_combine
from .mappings import MappingFamily, WMapping, common_fixed_basis, nearest_fixed_point, residuals
from .regions import Halfspace, Region, SolveStats, contains, intersect, make_cn, make_qn, project

# Tolerances for the per-step invariant checks.
FEJER_TOL = 1e-10
CONTAINMENT_TOL = 1e-8


class StopReason(enum.Enum):
    CONVERGED = "converged"
    ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class StopRule:
    """Stopping thresholds: both the step length and the worst mapping
    residual must fall below their epsilons, or the iteration cap fires."""

    eps_step: float = 1e-8
    eps_residual: float = 1e-8
    max_iter: int = 10_000

    def __post_init__(self):
        if self.eps_step <= 0 or self.eps_residual <= 0 or self.max_iter <= 0:
            raise ValueError("stop rule fields must be positive")


@dataclass(frozen=True)
class TraceRecord:
    """Diagnostics for the step taking x_n to x_{n+1}."""

    n: int
    dist_x1_xn: float
    step_len: float
    residuals: tuple[float, ...]
    constraint_count: int
    solver_sweeps: int


Trace = tuple[TraceRecord, ...]


class Problem:
    """A cap-constrained common-fixed-point problem.

    known_fixed_set is an orthonormal basis (columns) of the common fixed
    subspace, used for oracle checks and as the region witness.  Passing
    "auto" (the default) derives it in closed form when every mapping is
    linear and leaves it absent otherwise.
    """

    __slots__ = ("dim", "cap_pole", "cap_radius", "family", "x1",
                 "known_fixed_set", "fixed_rep", "cap", "_w")

    def __init__(self, dim: int, cap_pole: SpherePoint, cap_radius: float,
                 family: MappingFamily, x1: SpherePoint,
                 known_fixed_set="auto", check_cap_samples: int = 1000):
        if cap_pole.dim != dim or x1.dim != dim:
            raise ValueError("cap pole and start point must match the ambient dimension")
        if not 0.0 < cap_radius < math.pi / 4:
            raise ValueError(f"cap radius must be in (0, pi/4), got {cap_radius}")
        if distance(x1, cap_pole) > cap_radius + 1e-12:
            raise ValueError("x1 must lie in the ambient cap")
        family.check_preserves_cap(cap_pole, cap_radius, samples=check_cap_samples)

        if isinstance(known_fixed_set, str) and known_fixed_set == "auto":
            if all(getattr(T, "is_linear", False) for T in family.maps):
                known_fixed_set = common_fixed_basis(family.maps, dim)
            else:
                known_fixed_set = None
        if known_fixed_set is not None:
            known_fixed_set = np.asarray(known_fixed_set, dtype=float)
            rep = nearest_fixed_point(known_fixed_set, cap_pole)
            if rep is None or distance(rep, cap_pole) > cap_radius + 1e-9:
                raise ValueError(
                    "the common fixed set does not meet the ambient cap"
                )
        else:
            rep = None

        self.dim = dim
        self.cap_pole = cap_pole
        self.cap_radius = float(cap_radius)
        self.family = family
        self.x1 = x1
        self.known_fixed_set = known_fixed_set
        self.fixed_rep = rep
        self.cap = Halfspace.cap(cap_pole, cap_radius)
        self._w = WMapping(family)

    def __repr__(self) -> str:
        return (f"Problem(dim={self.dim}, cap_radius={self.cap_radius:.6g}, "
                f"r={self.family.r})")


class IterationState:
    """Immutable snapshot after n-1 steps: the current iterate, the last
    staged average, the region used for the last projection, and the trace."""

    __slots__ = ("n", "x_n", "y_n", "region", "trace")

    def __init__(self, n: int, x_n: SpherePoint, y_n: SpherePoint | None,
                 region: Region, trace: Trace):
        self.n = n
        self.x_n = x_n
        self.y_n = y_n
        self.region = region
        self.trace = trace

    def __repr__(self) -> str:
        return f"IterationState(n={self.n})"


def initial_state(problem: Problem) -> IterationState:
    """State at n = 1: the iterate is the anchor, the region is the bare cap."""
    witness = problem.fixed_rep if problem.fixed_rep is not None else problem.x1
    region = Region(problem.cap, (), witness)
    return IterationState(1, problem.x1, None, region, ())


def _choose_witness(problem: Problem, state: IterationState, y: SpherePoint,
                    cuts: tuple[Halfspace, ...],
                    inherited: tuple[Halfspace, ...] = ()) -> SpherePoint:
    """Feasibility witness for the next region.

    A known common fixed point always works (the convergence arguments put
    the fixed set inside every cut).  Without one, try points that satisfy
    the fresh cut by construction: the previous witness, the staged average
    y (slack 1 - cos d(x,y) >= 0), and the cut boundary midpoint, each
    checked against the inherited constraints as well.  If none satisfies
    everything the run aborts rather than continue unsoundly.
    """
    if problem.fixed_rep is not None:
        return problem.fixed_rep
    midpoint = geodesic_combine(0.5, state.x_n, y)
    for cand in (state.region.witness, y, midpoint):
        ok = problem.cap.slack(cand) >= -1e-10 and all(
            h.slack(cand) >= -1e-10 for h in (*cuts, *inherited)
        )
        if ok:
            return cand
    raise WitnessInfeasible(
        "no feasibility witness available; provide a known fixed set or use "
        "certified isometries"
    )


def _assert_step_invariants(problem: Problem, state: IterationState,
                            region: Region, x_new: SpherePoint) -> None:
    if problem.fixed_rep is not None and not contains(region, problem.fixed_rep,
                                                      CONTAINMENT_TOL):
        raise FeasibilityViolated(
            f"iteration {state.n}: known fixed point violates a generated cut"
        )
    if distance(problem.x1, x_new) < distance(problem.x1, state.x_n) - FEJER_TOL:
        raise MonotonicityViolated(
            f"iteration {state.n}: d(x1, x_n) decreased"
        )


def _record(problem: Problem, state: IterationState, x_new: SpherePoint,
            region: Region, stats: SolveStats) -> TraceRecord:
    return TraceRecord(
        n=state.n,
        dist_x1_xn=distance(problem.x1, state.x_n),
        step_len=distance(state.x_n, x_new),
        residuals=tuple(residuals(problem.family, state.x_n)),
        constraint_count=len(region.linear),
        solver_sweeps=stats.sweeps,
    )


def cq_step(problem: Problem, state: IterationState) -> IterationState:
    """One CQ step: fresh cut + localization cut, then project the anchor.

    At n = 1 the localization cut is trivial (the first region is the whole
    cap intersected with the fresh cut only).
    """
    y = problem._w.apply(state.x_n, state.n)
    cn = make_cn(state.x_n, y)
    qn = make_qn(problem.x1, state.x_n)
    cuts = tuple(h for h in (cn, qn) if not h.is_trivial)
    witness = _choose_witness(problem, state, y, cuts)
    try:
        region = Region(problem.cap, cuts, witness)
    except WitnessInfeasible as e:
        if witness is problem.fixed_rep:
            raise FeasibilityViolated(
                f"iteration {state.n}: known fixed point violates a generated cut"
            ) from e
        raise
    x_new, stats = project(region, problem.x1)
    _assert_step_invariants(problem, state, region, x_new)
    rec = _record(problem, state, x_new, region, stats)
    return IterationState(state.n + 1, x_new, y, region, state.trace + (rec,))


def shrink_step(problem: Problem, state: IterationState) -> IterationState:
    """One shrinking step: append the fresh cut to the accumulated region.

    Nestedness of the regions holds by construction; constraint counts grow
    by at most one per step (trivial cuts are skipped)."""
    y = problem._w.apply(state.x_n, state.n)
    cn = make_cn(state.x_n, y)
    cuts = () if cn.is_trivial else (cn,)
    witness = _choose_witness(problem, state, y, cuts,
                              inherited=state.region.linear)
    try:
        region = intersect(state.region, cn, witness)
    except WitnessInfeasible as e:
        if witness is problem.fixed_rep:
            raise FeasibilityViolated(
                f"iteration {state.n}: known fixed point violates a generated cut"
            ) from e
        raise
    x_new, stats = project(region, problem.x1)
    _assert_step_invariants(problem, state, region, x_new)
    rec = _record(problem, state, x_new, region, stats)
    return IterationState(state.n + 1, x_new, y, region, state.trace + (rec,))


_STEPS = {"cq": cq_step, "shrinking": shrink_step}


def run(problem: Problem, method: str = "cq",
        stop: StopRule = StopRule()) -> tuple[SpherePoint, Trace, StopReason]:
    """Iterate until both the step length and the worst residual at the new
    iterate fall below the stop rule, or the iteration cap is reached.

    Returns the final iterate, the full trace (one record per step), and
    the stop reason.  Errors raised by a step are re-raised with the
    iteration index prepended.
    """
    if method not in _STEPS:
        raise ValueError(f"method must be one of {sorted(_STEPS)}, got {method!r}")
    step = _STEPS[method]
    state = initial_state(problem)
    while True:
        try:
            state = step(problem, state)
        except SphereProjError as e:
            if str(e).startswith("iteration "):
                raise
            raise type(e)(f"iteration {state.n}: {e}") from e
        rec = state.trace[-1]
        res_new = residuals(problem.family, state.x_n)
        if rec.step_len <= stop.eps_step and float(res_new.max()) <= stop.eps_residual:
            return state.x_n, state.trace, StopReason.CONVERGED
        if len(state.trace) >= stop.max_iter:
            return state.x_n, state.trace, StopReason.ITERATION_CAP


def fejer_audit(trace: Trace, tol: float = FEJER_TOL) -> bool:
    """True iff the anchored distance d(x1, x_n) is nondecreasing along the
    trace (within tol)."""
    return all(b.dist_x1_xn >= a.dist_x1_xn - tol
               for a, b in zip(trace, trace[1:]))
