"""Exception hierarchy for gridgsp.

All library errors derive from GridGspError so callers can catch broadly;
the CLI maps parse errors to exit code 3 and numerical failures to 4.
"""


class GridGspError(Exception):
    """Base class for all gridgsp errors."""


# --- case parsing -----------------------------------------------------------

class MalformedCase(GridGspError):
    """Case file is syntactically or structurally invalid."""


class NoReferenceBus(MalformedCase):
    """No bus of MATPOWER type 3 (or JSON type 'ref') in the case."""


class ZeroReactanceBranch(MalformedCase):
    """An in-service branch has x == 0; its susceptance is undefined."""


class DisconnectedNetwork(GridGspError):
    """The in-service branch graph has more than one connected component."""


# --- linear algebra / dimensions -------------------------------------------

class DimensionMismatch(GridGspError):
    """Signal or matrix dimensions do not agree."""


class ConvergenceFailure(GridGspError):
    """The eigensolver failed to converge."""


class ZeroLambda2(GridGspError):
    """Second-smallest Laplacian eigenvalue is zero (graph not connected)."""


# --- estimation -------------------------------------------------------------

class Unobservable(GridGspError):
    """Plain WLS normal-equation matrix is numerically singular.

    Signals the caller to switch to a regularized estimator.
    """


class SingularRegularizedSystem(GridGspError):
    """Regularized normal matrix is singular (mu = 0 and unobservable)."""


class SingularSystem(GridGspError):
    """Combined measurement-plus-prior matrix is singular."""


class SingularGain(GridGspError):
    """Gauss-Newton gain matrix is numerically singular at an iterate."""


class SingularRegularizedGain(GridGspError):
    """Regularized gain matrix is singular (pathological sensor set)."""


class NonConvergence(GridGspError):
    """Iteration limit reached with step norm above tolerance.

    Carries the last iterate and trace as `state` and `trace` attributes.
    """

    def __init__(self, message, state=None, trace=None):
        super().__init__(message)
        self.state = state
        self.trace = trace


class TooLarge(GridGspError):
    """Exhaustive enumeration would exceed the guarded combination budget."""
