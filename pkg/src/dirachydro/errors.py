"""Exception types raised across the package."""


class DiracHydroError(Exception):
    """Base class for all package errors."""


class SingularSpinor(DiracHydroError):
    """Spinor has Phi^2 + Theta^2 below the singular threshold; no polar form."""


class ConstraintViolation(DiracHydroError):
    """Velocity/spin constraints (u.u=1, s.s=-1, u.s=0) violated beyond tolerance."""


class NoRealRoot(DiracHydroError):
    """Dispersion relation has no real positive-energy solution."""


class MixedBackgrounds(DiracHydroError):
    """Superposition of fields living on different backgrounds."""


class BranchJump(DiracHydroError):
    """Chiral angle varies by more than pi/2 across a finite-difference stencil."""


class IllConditioned(DiracHydroError):
    """Connection-extraction system is rank deficient beyond its expected kernel."""


class SingularSystem(DiracHydroError):
    """Momentum-equation linear system is singular (constraint preconditions violated)."""


class NotGauged(DiracHydroError):
    """State is not in the canonical frame u=(1,0,0,0), s=(0,0,0,1)."""


class NotACover(DiracHydroError):
    """Equation collection does not cover all eight canonical scalars."""


class UnknownSet(DiracHydroError):
    """Equation or set identifier not present in the catalog."""


class ScenarioError(DiracHydroError):
    """Scenario configuration file is malformed."""


class DegenerateNullspaceWarning(UserWarning):
    """Plane-wave operator nullspace has dimension > 1; an orthonormal choice was made."""
