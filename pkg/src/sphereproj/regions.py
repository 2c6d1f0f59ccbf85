"""Constraint regions on the sphere and the metric projection onto them.

A region is the intersection of one spherical cap (the ambient constraint
set, radius < pi/4 so any two members are less than a quarter turn apart)
with finitely many homogeneous linear halfspaces.  Both cut families used by
the iteration drivers admit exact halfspace forms:

* "closer to y than to x" rewrites, via monotonicity of arccos, to
  <y - x, z> >= 0;
* the localization condition cos d(x1,xn) cos d(xn,z) >= cos d(x1,z)
  rewrites to <cos d(x1,xn) xn - x1, z> >= 0.

Minimizing arccos<x, z> over unit z in such a region equals maximizing
<x, z>, whose solution is the Euclidean projection of x onto the cone hull
of the region (halfspace cones plus the circular cone spanned by the cap),
renormalized.  The cone projection is computed with Dykstra's alternating
projection algorithm, using closed forms for both cone types.  This identity
is validated against an independent brute-force oracle in the test suite
rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyOrDegenerate, NoConvergence, WitnessInfeasible
from .geometry import SpherePoint, inner

# Cap radii are kept strictly below pi/4; equivalently the cap offset
# cos(radius) stays above cos(pi/4).
MAX_CAP_RADIUS = math.pi / 4

# Vector differences below this norm collapse to the trivial halfspace.
DEGENERATE_TOL = 1e-12

# Witnesses must satisfy every constraint with at least this slack.
WITNESS_TOL = 1e-10

# Dykstra solver contract: successive-change tolerance and sweep budget,
# sized so solver error sits two orders below the test tolerances.
SOLVER_TOL = 1e-13
SOLVER_MAX_SWEEPS = 10_000

# The projection result must satisfy the region to this tolerance.
RESULT_TOL = 1e-8


class Halfspace:
    """A linear constraint <normal, z> >= offset on the ambient space.

    The normal is unit length, or the zero vector for the trivial constraint
    (which then requires offset <= 0 so it is always satisfied).  Cut sets
    are homogeneous (offset 0); the ambient cap stores offset cos(radius).
    """

    __slots__ = ("normal", "offset")

    def __init__(self, normal, offset: float = 0.0):
        v = np.array(normal, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("halfspace normal must be a 1-d vector with d >= 2")
        if not np.isfinite(v).all():
            raise ValueError("halfspace normal must be finite")
        offset = float(offset)
        if not -1.0 <= offset < 1.0:
            raise ValueError(f"halfspace offset must be in [-1, 1), got {offset}")
        n = float(np.linalg.norm(v))
        if n <= DEGENERATE_TOL:
            if offset > 0.0:
                raise ValueError("trivial halfspace requires offset <= 0")
            v = np.zeros(v.size)
        else:
            v /= n
        v.setflags(write=False)
        self.normal = v
        self.offset = offset

    @classmethod
    def trivial(cls, dim: int) -> "Halfspace":
        """The always-satisfied constraint (zero normal, offset 0)."""
        return cls(np.zeros(dim), 0.0)

    @classmethod
    def cap(cls, pole: SpherePoint, radius: float) -> "Halfspace":
        """The cap {z : <pole, z> >= cos(radius)} of radius < pi/4."""
        if not 0.0 < radius < MAX_CAP_RADIUS:
            raise ValueError(f"cap radius must be in (0, pi/4), got {radius}")
        return cls(pole.coords, math.cos(radius))

    @property
    def is_trivial(self) -> bool:
        return not self.normal.any()

    def slack(self, z: SpherePoint) -> float:
        """<normal, z> - offset; nonnegative iff z satisfies the constraint."""
        return float(self.normal @ z.coords) - self.offset

    def __repr__(self) -> str:
        return f"Halfspace(normal={np.array2string(self.normal, precision=6)}, offset={self.offset:.6g})"


class Region:
    """A cap intersected with ordered homogeneous halfspaces, plus a witness.

    The witness is a sphere point known to satisfy every constraint; it
    certifies nonemptiness.  Regions are immutable values: `intersect`
    returns a new region.
    """

    __slots__ = ("cap", "linear", "witness")

    def __init__(self, cap: Halfspace, linear=(), witness: SpherePoint = None):
        if cap.is_trivial or cap.offset <= math.cos(MAX_CAP_RADIUS):
            raise ValueError("region cap must have radius in (0, pi/4)")
        linear = tuple(linear)
        for h in linear:
            if h.offset != 0.0:
                raise ValueError("linear region constraints must be homogeneous")
        if witness is None:
            raise ValueError("a region requires a feasibility witness")
        self.cap = cap
        self.linear = linear
        self.witness = witness
        bad = min(h.slack(witness) for h in (cap, *linear))
        if bad < -WITNESS_TOL:
            raise WitnessInfeasible(
                f"witness violates a region constraint by {-bad:.3e}"
            )

    @classmethod
    def from_cap(cls, pole: SpherePoint, radius: float, witness: SpherePoint = None) -> "Region":
        """The bare ambient cap; the pole itself witnesses feasibility."""
        return cls(Halfspace.cap(pole, radius), (), pole if witness is None else witness)

    @property
    def cap_pole(self) -> np.ndarray:
        return self.cap.normal

    @property
    def cap_radius(self) -> float:
        return math.acos(self.cap.offset)

    def __repr__(self) -> str:
        return f"Region(cap_radius={self.cap_radius:.6g}, n_linear={len(self.linear)})"


@dataclass(frozen=True)
class SolveStats:
    """Projection solver effort: Dykstra sweeps used and final iterate change."""

    sweeps: int
    change: float


def contains(region: Region, z: SpherePoint, tol: float) -> bool:
    """True iff z satisfies every constraint of the region with slack >= -tol."""
    if tol < 0.0:
        raise ValueError("tolerance must be nonnegative")
    if region.cap.slack(z) < -tol:
        return False
    return all(h.slack(z) >= -tol for h in region.linear)


def make_cn(x_n: SpherePoint, y_n: SpherePoint) -> Halfspace:
    """Halfspace form of {z : d(y_n, z) <= d(x_n, z)}.

    arccos is decreasing, so the condition is <y_n - x_n, z> >= 0.  When
    y_n = x_n the set is everything and the trivial halfspace is returned.
    """
    v = y_n.coords - x_n.coords
    n = float(np.linalg.norm(v))
    if n <= DEGENERATE_TOL:
        return Halfspace.trivial(x_n.dim)
    return Halfspace(v / n, 0.0)


def make_qn(x_1: SpherePoint, x_n: SpherePoint) -> Halfspace:
    """Halfspace form of {z : cos d(x1,xn) cos d(xn,z) >= cos d(x1,z)}.

    Expanding the cosines gives <cos d(x1,xn) xn - x1, z> >= 0.  At n = 1
    (x_n = x_1) the normal vanishes and the trivial halfspace is returned:
    the first localization cut is all of the ambient set.
    """
    c = inner(x_1, x_n)
    v = c * x_n.coords - x_1.coords
    n = float(np.linalg.norm(v))
    if n <= DEGENERATE_TOL:
        return Halfspace.trivial(x_1.dim)
    return Halfspace(v / n, 0.0)


def intersect(region: Region, h: Halfspace, new_witness: SpherePoint) -> Region:
    """Append a cut to the region, replacing the witness.

    The new witness must satisfy h and all existing constraints with slack
    >= -1e-10 (WitnessInfeasible otherwise).  Trivial halfspaces are not
    appended, so constraint counts only grow for informative cuts.
    """
    if not h.is_trivial and h.slack(new_witness) < -WITNESS_TOL:
        raise WitnessInfeasible(
            f"new witness violates the appended halfspace by {-h.slack(new_witness):.3e}"
        )
    linear = region.linear if h.is_trivial else region.linear + (h,)
    return Region(region.cap, linear, new_witness)


def _project_cap_cone(w: np.ndarray, pole: np.ndarray, cos_r: float, sin_r: float,
                      tan_r: float) -> np.ndarray:
    """Euclidean projection onto the circular cone {z : <pole,z> >= cos_r ||z||}."""
    s = float(pole @ w)
    u = w - s * pole
    t = math.sqrt(float(u @ u))
    if t <= s * tan_r:
        return w
    if t * tan_r <= -s:
        return np.zeros_like(w)
    c = s * cos_r + t * sin_r
    return c * (cos_r * pole + (sin_r / t) * u)


def project(region: Region, x: SpherePoint, *, tol: float = SOLVER_TOL,
            max_sweeps: int = SOLVER_MAX_SWEEPS) -> tuple[SpherePoint, SolveStats]:
    """Metric projection of x onto the region.

    Computes the Euclidean projection of x onto the cone hull of the region
    by Dykstra's algorithm (with correction terms, cycling through the cap
    cone and each halfspace cone in order), then renormalizes.  Points
    already in the region are returned unchanged with zero solver effort.

    Raises NoConvergence if the sweep budget is exhausted before the iterate
    change drops to tolerance, and EmptyOrDegenerate if the cone projection
    collapses to zero (x at least a quarter turn from the region, which the
    cap invariant excludes for all driver-generated queries).
    """
    if contains(region, x, 0.0):
        return x, SolveStats(0, 0.0)

    pole = region.cap.normal
    cos_r = region.cap.offset
    radius = math.acos(cos_r)
    sin_r = math.sin(radius)
    tan_r = math.tan(radius)
    normals = [h.normal for h in region.linear]
    m = len(normals)

    z = x.coords.copy()
    corr_cap = np.zeros_like(z)
    corr = np.zeros((m, z.size))
    has_corr = np.zeros(m, dtype=bool)

    sweeps = 0
    change = math.inf
    for _ in range(max_sweeps):
        z_prev = z.copy()
        w = z + corr_cap
        z = _project_cap_cone(w, pole, cos_r, sin_r, tan_r)
        corr_cap = w - z
        for i in range(m):
            a = normals[i]
            if has_corr[i]:
                w = z + corr[i]
                s = float(a @ w)
                if s >= 0.0:
                    z = w
                    corr[i] = 0.0
                    has_corr[i] = False
                else:
                    z = w - s * a
                    corr[i] = s * a
            else:
                # zero correction and satisfied constraint: projection is a
                # no-op, skip the bookkeeping
                s = float(a @ z)
                if s < 0.0:
                    z = z - s * a
                    corr[i] = s * a
                    has_corr[i] = True
        sweeps += 1
        diff = z - z_prev
        change = math.sqrt(float(diff @ diff))
        if change <= tol:
            break
    else:
        raise NoConvergence(
            f"Dykstra did not reach change <= {tol:g} within {max_sweeps} sweeps "
            f"(last change {change:.3e}, {m} cuts)"
        )

    n = math.sqrt(float(z @ z))
    if n <= 1e-9:
        raise EmptyOrDegenerate("cone projection collapsed to the zero vector")
    result = SpherePoint._wrap(z / n)
    if not contains(region, result, RESULT_TOL):
        raise NoConvergence("projection result violates the region beyond tolerance")
    return result, SolveStats(sweeps, change)
