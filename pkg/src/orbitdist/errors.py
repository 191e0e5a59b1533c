"""Exception hierarchy shared across the package."""


class OrbitDistError(Exception):
    """Base class for all orbitdist errors."""


class NonHermitianInput(OrbitDistError):
    """Input matrix is not Hermitian within tolerance."""


class NegativeInput(OrbitDistError):
    """Input matrix has an eigenvalue below the rejection threshold."""


class NotAContraction(OrbitDistError):
    """Input matrix has an eigenvalue above 1 beyond tolerance."""


class SingularInput(OrbitDistError):
    """Matrix is too close to singular for a polar factor."""


class BranchCut(OrbitDistError):
    """A unitary eigenvalue lies too close to -1 for a principal logarithm."""


class LengthMismatch(OrbitDistError):
    """Spectra lists have different lengths."""


class DimensionMismatch(OrbitDistError):
    """Matrices have different dimensions."""


class MassMismatch(OrbitDistError):
    """Atomic measures carry different total mass; no finite enlargement works."""


class InvalidParams(OrbitDistError):
    """Grid/block parameters violate their invariants."""


class ParamsMismatch(OrbitDistError):
    """Two path elements do not share grid/block parameters."""


class MembershipViolation(OrbitDistError):
    """A unitary path does not have the required boundary fusion form."""


class NotDominating(OrbitDistError):
    """Requested radius does not dominate the spectral distance."""


class RefinementExhausted(OrbitDistError):
    """Grid refinement cap reached without meeting the continuation bounds."""


class ClusterGapFailure(OrbitDistError):
    """No spectral clustering yields well-conditioned diagonal blocks."""
