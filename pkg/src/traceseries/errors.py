"""Exception hierarchy shared by the library and the command line front end.

Each error class carries the CLI exit code used when it escapes a command.
"""


class TraceSeriesError(Exception):
    exit_code = 1


class ConfigError(TraceSeriesError):
    exit_code = 2


class MalformedSeriesError(TraceSeriesError):
    """A denominator factor (1 - m) with m of degree zero."""


class SpecializationPoleError(TraceSeriesError):
    """A substitution turned a denominator factor into (1 - 1)."""


class ConnectivityError(TraceSeriesError):
    """No spanning in-tree reaches the root (tree formula not applicable)."""

    exit_code = 3


class TreeFormulaInapplicable(TraceSeriesError):
    """The spanning-tree sum left negative exponents or non-cycle binomials."""


class ReconstructionResidualError(TraceSeriesError):
    """D*S - N did not vanish within the reconstruction margin."""

    exit_code = 4

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class DecompositionError(TraceSeriesError):
    """Schur decomposition hit an asymmetric input or a bad multiplicity."""


class VerificationFailure(TraceSeriesError):
    exit_code = 5
