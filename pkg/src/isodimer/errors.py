"""Exception types shared across the package."""


class SchemaError(ValueError):
    """Graph-spec document is malformed (ids, duplicate edges, bad shapes)."""


class IsoradialityError(ValueError):
    """Embedding is not isoradial: a face is not cyclic of radius 1, or the
    periodic data does not describe a planar torus embedding."""


class DegenerateAngleError(IsoradialityError):
    """A rhombus half-angle falls outside the open interval (0, pi/2)."""


class DomainError(ValueError):
    """Numeric argument outside the supported domain (e.g. elliptic k >= 1)."""


class NotAContourError(ValueError):
    """Edge set has a vertex of odd degree, so it is not a polygonal contour."""


class OrientationError(RuntimeError):
    """Clockwise-odd orientation could not be certified (planarity bug)."""


class OddSizeError(ValueError):
    """Pfaffian requested for an odd-sized matrix."""


class NotDisjointError(ValueError):
    """Edges passed to a probability query share a vertex."""


class InterpolationResidualError(RuntimeError):
    """Round-trip check of polynomial interpolation exceeded tolerance."""


class ZeroPolynomialError(ValueError):
    """Operation undefined for the zero polynomial."""


class NonConvergentError(RuntimeError):
    """Quadrature ladder failed to converge within its resolution budget."""


class BudgetExceededError(ValueError):
    """Brute-force oracle asked to enumerate past its size budget."""


class PoleHitError(ValueError):
    """Discrete-exponential parameter hit a pole of the rational product."""


class IdentityViolationError(RuntimeError):
    """An identity of the certification suite exceeded its residual bound."""

    def __init__(self, which: str, residual: float, bound: float):
        self.which = which
        self.residual = residual
        self.bound = bound
        super().__init__(
            f"identity {which}: residual {residual:.3e} exceeds bound {bound:.1e}"
        )
