"""Exception types shared across the package."""


class BetaforgeError(Exception):
    """Base class for all betaforge errors."""


class DomainError(BetaforgeError):
    """A point lies outside the declared domain of a field or program."""


class OrderError(BetaforgeError):
    """A differentiation order above the supported cap was requested."""


class PositivityError(BetaforgeError):
    """A metric matrix failed its positive-definiteness check."""


class DegeneratePlaneError(BetaforgeError):
    """The two vectors spanning a sectional plane are (nearly) parallel."""


class SignatureError(BetaforgeError):
    """A deformation produced a non-Riemannian signature (Delta <= 0)."""


class NotKillingError(BetaforgeError):
    """An operation requiring a Killing 1-form received a non-Killing one."""


class LimitUnavailableError(BetaforgeError):
    """A quotient hit its degenerate locus and no closed-form limit is registered."""


class LimitError(BetaforgeError):
    """Evaluation too close to a degenerate locus of a coefficient formula."""


class ParamError(BetaforgeError):
    """Constructor parameters violate a documented constraint."""


class RootError(BetaforgeError):
    """A polynomial root pattern required by a solution family is not realized."""


class RadicandError(BetaforgeError):
    """The radicand of a quadrature integrand became non-positive."""

    def __init__(self, message, varrho=None):
        super().__init__(message)
        self.varrho = varrho


class InversionError(BetaforgeError):
    """A quadrature relation could not be inverted (non-monotone map)."""


class DimensionError(BetaforgeError):
    """A construction requiring a specific (usually even) dimension got another."""


class DomainExhaustedError(BetaforgeError):
    """Rejection sampling exceeded its budget without collecting enough points."""
