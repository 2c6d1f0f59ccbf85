"""Exception types shared across the package."""


class SphereProjError(Exception):
    """Base class for all errors raised by sphereproj."""


class AntipodalPoints(SphereProjError):
    """Geodesic combination requested for an antipodal (or nearly antipodal) pair."""


class PerimeterTooLarge(SphereProjError):
    """Triangle perimeter is >= 2*pi, outside the comparison inequality's domain."""


class WitnessInfeasible(SphereProjError):
    """A region was built with a witness that violates one of its constraints."""


class EmptyOrDegenerate(SphereProjError):
    """Cone projection collapsed to the zero vector; the query point is a
    quarter turn or more away from the region, which indicates corrupted state."""


class NoConvergence(SphereProjError):
    """The projection solver exhausted its sweep budget before reaching tolerance."""


class FeasibilityViolated(SphereProjError):
    """A known common fixed point fell outside a generated constraint set.

    The convergence arguments guarantee containment, so this signals an
    implementation bug rather than a data condition."""


class MonotonicityViolated(SphereProjError):
    """The anchored distance d(x1, x_n) decreased between iterations."""


class NoFeasibleGridPoint(SphereProjError):
    """Brute-force projection found no feasible grid point; the region is
    thinner than the grid resolution."""


class DegenerateInput(SphereProjError):
    """Closed-form projection received an input with no usable component."""


class ConfigError(SphereProjError):
    """A run configuration file failed to parse or validate."""
