"""Nonexpansive mappings of the sphere and their staged geodesic averaging.

The certified zoo consists of linear isometries: plane rotations, products
of plane rotations, and the identity.  For these, nonexpansiveness is exact,
fixed-point sets are null spaces computable in closed form, and invariance
of a cap follows whenever the cap pole is fixed.  A geodesic contraction
toward a target point is available as an experimental mapping: it is
quasinonexpansive but not an isometry, so the convergence guarantees of the
iteration drivers are not certified for it.

A family (T_1..T_r, alpha_1..alpha_r) combines into a single self-mapping by
the staged recursion

    u_0 = x,   u_k = alpha_k T_k(u_{k-1}) (+) (1 - alpha_k) x,

where (+) is the geodesic combination and the second argument is always the
original point x.  The final stage u_r is the W-mapping of the family; its
fixed points are exactly the common fixed points of the T_i.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .geometry import SpherePoint, distance, geodesic_combine, sample_cap

# Singular values below this (relative) threshold count as zero when
# extracting fixed subspaces.
NULLSPACE_TOL = 1e-10


class Identity:
    """The identity mapping."""

    is_linear = True

    def apply(self, x: SpherePoint) -> SpherePoint:
        return x

    def matrix(self, dim: int) -> np.ndarray:
        return np.eye(dim)

    def __repr__(self) -> str:
        return "Identity()"


class PlaneRotation:
    """Rotation of the (axis_i, axis_j) coordinate plane by a fixed angle.

    Indices are 0-based with axis_i < axis_j; all other coordinates are
    fixed.  Plane rotations are isometries of the sphere, hence nonexpansive
    with equality.
    """

    is_linear = True

    __slots__ = ("axis_i", "axis_j", "angle", "_cos", "_sin")

    def __init__(self, axis_i: int, axis_j: int, angle: float):
        if not 0 <= axis_i < axis_j:
            raise ValueError("need 0 <= axis_i < axis_j")
        if not -math.pi < angle <= math.pi:
            raise ValueError(f"rotation angle must be in (-pi, pi], got {angle}")
        self.axis_i = axis_i
        self.axis_j = axis_j
        self.angle = float(angle)
        self._cos = math.cos(angle)
        self._sin = math.sin(angle)

    def apply(self, x: SpherePoint) -> SpherePoint:
        if x.dim <= self.axis_j:
            raise ValueError(
                f"rotation plane ({self.axis_i},{self.axis_j}) needs dim > {self.axis_j}"
            )
        v = x.coords.copy()
        vi = v[self.axis_i]
        vj = v[self.axis_j]
        v[self.axis_i] = self._cos * vi - self._sin * vj
        v[self.axis_j] = self._sin * vi + self._cos * vj
        return SpherePoint._wrap(v)

    def matrix(self, dim: int) -> np.ndarray:
        if dim <= self.axis_j:
            raise ValueError("dimension too small for the rotation plane")
        m = np.eye(dim)
        m[self.axis_i, self.axis_i] = self._cos
        m[self.axis_j, self.axis_j] = self._cos
        m[self.axis_i, self.axis_j] = -self._sin
        m[self.axis_j, self.axis_i] = self._sin
        return m

    def __repr__(self) -> str:
        return f"PlaneRotation({self.axis_i}, {self.axis_j}, {self.angle})"


class RotationProduct:
    """Composition of plane rotations, applied first-to-last."""

    is_linear = True

    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[PlaneRotation]):
        factors = tuple(factors)
        if not factors:
            raise ValueError("a rotation product needs at least one factor")
        if not all(isinstance(f, PlaneRotation) for f in factors):
            raise TypeError("rotation product factors must be plane rotations")
        self.factors = factors

    def apply(self, x: SpherePoint) -> SpherePoint:
        for f in self.factors:
            x = f.apply(x)
        return x

    def matrix(self, dim: int) -> np.ndarray:
        m = np.eye(dim)
        for f in self.factors:
            m = f.matrix(dim) @ m
        return m

    def __repr__(self) -> str:
        return f"RotationProduct({list(self.factors)})"


class GeodesicContraction:
    """Experimental: x -> weight * target (+) (1 - weight) * x.

    Quasinonexpansive with fixed point set {target}, but not an isometry;
    families containing it must opt in via allow_experimental.
    """

    is_linear = False

    __slots__ = ("target", "weight")

    def __init__(self, target: SpherePoint, weight: float):
        if not 0.0 < weight < 1.0:
            raise ValueError("contraction weight must be in (0, 1)")
        self.target = target
        self.weight = float(weight)

    def apply(self, x: SpherePoint) -> SpherePoint:
        return geodesic_combine(self.weight, self.target, x)

    def __repr__(self) -> str:
        return f"GeodesicContraction(weight={self.weight})"


def apply_map(T, x: SpherePoint) -> SpherePoint:
    """Evaluate a mapping at a sphere point."""
    return T.apply(x)


def fixed_set_basis(T, dim: int) -> np.ndarray:
    """Orthonormal basis (columns) of the fixed subspace {v : Tv = v}.

    Only defined for linear mappings; the fixed point set on the sphere is
    the unit sphere of the returned subspace.  Plane rotations use the exact
    complement of the rotation plane; general products fall back to the
    numeric null space of (matrix - identity).
    """
    if not getattr(T, "is_linear", False):
        raise TypeError(f"{T!r} is not linear; no fixed-subspace basis")
    if isinstance(T, Identity):
        return np.eye(dim)
    if isinstance(T, PlaneRotation):
        if T.angle == 0.0:
            return np.eye(dim)
        keep = [k for k in range(dim) if k not in (T.axis_i, T.axis_j)]
        basis = np.zeros((dim, len(keep)))
        for col, k in enumerate(keep):
            basis[k, col] = 1.0
        return basis
    return _null_space(T.matrix(dim) - np.eye(dim))


def common_fixed_basis(maps: Sequence, dim: int) -> np.ndarray:
    """Orthonormal basis (columns) of the intersection of fixed subspaces."""
    blocks = []
    for T in maps:
        if not getattr(T, "is_linear", False):
            raise TypeError(f"{T!r} is not linear; cannot derive a fixed basis")
        blocks.append(T.matrix(dim) - np.eye(dim))
    return _null_space(np.vstack(blocks)) if blocks else np.eye(dim)


def nearest_fixed_point(basis: np.ndarray, x: SpherePoint) -> SpherePoint | None:
    """Metric projection of x onto the unit sphere of a fixed subspace.

    Returns None when x is (numerically) orthogonal to the subspace, in
    which case no nearest point is defined.
    """
    if basis.shape[1] == 0:
        return None
    comp = basis @ (basis.T @ x.coords)
    n = float(np.linalg.norm(comp))
    if n <= 1e-9:
        return None
    return SpherePoint._wrap(comp / n)


def _null_space(m: np.ndarray) -> np.ndarray:
    u, s, vt = np.linalg.svd(m)
    if s.size == 0:
        return np.eye(m.shape[1])
    cut = NULLSPACE_TOL * max(1.0, float(s[0]))
    rank = int(np.sum(s > cut))
    return vt[rank:].T


class MappingFamily:
    """An ordered family of self-mappings with stage weights.

    alphas holds the base weight row (each in the open interval (0, 1), so
    some margin [a, 1-a] with 0 < a < 1/2 contains them all); an optional
    schedule callback supplies a per-iteration row and is validated on use.
    Non-isometric members require allow_experimental=True.
    """

    __slots__ = ("maps", "alphas", "schedule", "allow_experimental")

    def __init__(self, maps: Sequence, alphas: Sequence[float] | None = None,
                 schedule: Callable[[int], Sequence[float]] | None = None,
                 allow_experimental: bool = False):
        maps = tuple(maps)
        if not maps:
            raise ValueError("a mapping family needs at least one mapping")
        for T in maps:
            if not getattr(T, "is_linear", False) and not allow_experimental:
                raise ValueError(
                    f"{T!r} is not a certified isometry; pass allow_experimental=True"
                )
        if alphas is None:
            alphas = (0.5,) * len(maps)
        alphas = self._check_row(tuple(float(a) for a in alphas), len(maps))
        self.maps = maps
        self.alphas = alphas
        self.schedule = schedule
        self.allow_experimental = allow_experimental

    @staticmethod
    def _check_row(row: tuple[float, ...], r: int) -> tuple[float, ...]:
        if len(row) != r:
            raise ValueError(f"expected {r} stage weights, got {len(row)}")
        for a in row:
            if not 0.0 < a < 1.0:
                raise ValueError(f"stage weights must lie strictly in (0, 1), got {a}")
        return row

    @property
    def r(self) -> int:
        return len(self.maps)

    def alphas_at(self, n: int) -> tuple[float, ...]:
        """Weight row for iteration n (the base row unless a schedule is set)."""
        if self.schedule is None:
            return self.alphas
        return self._check_row(tuple(float(a) for a in self.schedule(n)), self.r)

    def check_preserves_cap(self, pole: SpherePoint, radius: float,
                            samples: int = 1000, seed: int = 0,
                            tol: float = 1e-9) -> None:
        """Sampled check that every member maps the cap into itself."""
        rng = np.random.default_rng(seed)
        pts = sample_cap(pole.coords, radius, samples, rng)
        for T in self.maps:
            for row in pts:
                img = T.apply(SpherePoint._wrap(row.copy()))
                if distance(img, pole) > radius + tol:
                    raise ValueError(
                        f"{T!r} maps a cap point {distance(img, pole) - radius:.3e} "
                        "outside the cap"
                    )

    def __repr__(self) -> str:
        return f"MappingFamily(r={self.r}, alphas={self.alphas})"


class WMapping:
    """Staged geodesic averaging of a mapping family (the W-mapping)."""

    __slots__ = ("family",)

    def __init__(self, family: MappingFamily):
        self.family = family

    def stages(self, x: SpherePoint, n: int = 1) -> tuple[SpherePoint, ...]:
        """All stage outputs u_1..u_r at iteration n (u_r is the W value)."""
        alphas = self.family.alphas_at(n)
        out = []
        u = x
        for T, a in zip(self.family.maps, alphas):
            u = geodesic_combine(a, T.apply(u), x)
            out.append(u)
        return tuple(out)

    def apply(self, x: SpherePoint, n: int = 1) -> SpherePoint:
        return self.stages(x, n)[-1]

    def __repr__(self) -> str:
        return f"WMapping({self.family!r})"


def apply_w(w: WMapping, x: SpherePoint, n: int = 1) -> SpherePoint:
    """Evaluate the W-mapping at x (iteration n selects the schedule row)."""
    return w.apply(x, n)


def residuals(family: MappingFamily, x: SpherePoint) -> np.ndarray:
    """Displacements d(T_i x, x) for each family member, in order."""
    return np.array([distance(T.apply(x), x) for T in family.maps])
