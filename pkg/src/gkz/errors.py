"""Exception hierarchy.

Validation problems (bad shapes, malformed input, lattice data that does not
fit ``A``) derive from :class:`ValidationError`; numerical domain problems
(integrals outside their convergence chamber, runaway quadrature boxes)
derive from :class:`NumericDomainError`.  The CLI maps the two families to
exit codes 2 and 3.
"""


class GkzError(Exception):
    pass


class ValidationError(GkzError, ValueError):
    pass


class ShapeError(ValidationError):
    pass


class RankMismatchError(ValidationError):
    pass


class LatticeError(ValidationError):
    """A supplied lattice basis is not a primitive basis of the relations."""


class NumericDomainError(GkzError, ArithmeticError):
    pass


class ChamberError(NumericDomainError):
    """Spectral parameters outside the region where the integral converges."""


class DivergenceError(NumericDomainError):
    """The quadrature box had to grow past its configured limit."""
