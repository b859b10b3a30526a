"""Exception types shared across the package.

Every error raised by the library derives from :class:`GarchDiagError`, so
callers (in particular the CLI) can distinguish computation failures from
programming errors.
"""


class GarchDiagError(Exception):
    """Base class for all garchdiag errors."""


# --- parameter validation -------------------------------------------------

class NegativeCoefficient(GarchDiagError):
    """A GARCH coefficient is negative."""


class OutsideBox(GarchDiagError):
    """A coefficient lies outside the open box of the parameter space."""


class BetaSumExceedsRho0(GarchDiagError):
    """The lagged-variance coefficients sum past the space's rho0 cap."""


class BetaSumAtLeastOne(GarchDiagError):
    """sum(beta) >= 1, so the moving-average representation diverges."""


class NonstationaryParams(GarchDiagError):
    """sum(alpha) + sum(beta) >= 1; no finite unconditional variance."""


class DofTooSmall(GarchDiagError):
    """Student-t degrees of freedom <= 2; unit-variance scaling impossible."""


# --- numerical preconditions ----------------------------------------------

class StepTooLarge(GarchDiagError):
    """A finite-difference step leaves the parameter space."""


class SeriesTooShort(GarchDiagError):
    """Input series is too short for the requested computation."""


class DegenerateSample(GarchDiagError):
    """Sample variance is zero; scale-normalized statistics are undefined."""


class DegenerateNu2(GarchDiagError):
    """The squared-residual spread estimate is zero."""


class DegenerateVariance(GarchDiagError):
    """A limiting variance implied by the supplied moments is not positive."""


class CorrectionDomain(GarchDiagError):
    """Finite-sample critical-value polynomial used below its n >= 100 domain."""


class NonpositiveBandwidth(GarchDiagError):
    """Kernel bandwidth must be strictly positive."""


# --- file I/O ---------------------------------------------------------------

class ParseError(GarchDiagError):
    """A data file row could not be parsed; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


class TooShort(GarchDiagError):
    """A series file holds fewer rows than the required minimum."""


class NonFiniteValue(GarchDiagError):
    """A data file contains NaN or infinity; carries the 1-based row number."""

    def __init__(self, row: int, value: str):
        self.row = row
        super().__init__(f"row {row}: non-finite value {value!r}")


class UsageError(GarchDiagError):
    """Command line was malformed (bad flag, missing argument, unknown value)."""
