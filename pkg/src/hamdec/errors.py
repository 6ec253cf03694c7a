"""Exception taxonomy shared by all hamdec modules.

Input-contract violations raise subclasses of :class:`HamdecError` so the CLI
can map them to a uniform exit code.  Exceptions that abort a multi-step
randomized procedure carry enough payload to diagnose the failing step.
"""


class HamdecError(Exception):
    """Base class for all hamdec errors."""


# --- graph construction / io ---

class LoopEdgeError(HamdecError):
    """An edge (v, v) was supplied."""


class AntiparallelPairError(HamdecError):
    """Both (u, v) and (v, u) were supplied; oriented graphs forbid this."""


class DuplicateEdgeError(HamdecError):
    """The same directed edge was supplied twice."""


class VertexOutOfRangeError(HamdecError):
    """An edge endpoint lies outside [0, n)."""


class EvenOrderError(HamdecError):
    """Rotational tournaments require odd order."""


class DegreeTooLargeError(HamdecError):
    """Requested regular degree exceeds (n - 1) / 2."""


class GenerationFailedError(HamdecError):
    """Random generation exhausted its retry budget."""

    def __init__(self, message, seed=None):
        super().__init__(message)
        self.seed = seed


class FormatError(HamdecError):
    """Malformed edge-list or certificate file."""


class OverlappingSidesError(HamdecError):
    """Bipartite side sets intersect."""


class UnequalSidesError(HamdecError):
    """Bipartite side sets have different sizes."""


class UnknownEdgeError(HamdecError):
    """An edge outside the host edge set was referenced."""


# --- factors and matchings ---

class ROutOfRangeError(HamdecError):
    """Requested factor degree outside [0, m]."""


class TooLargeError(HamdecError):
    """Instance exceeds the cap of an exact (exponential) routine."""


class NoFactorError(HamdecError):
    """The requested factor does not exist."""


class NoComplementFactorError(HamdecError):
    """Supergraph construction failed although the hypothesis held (bug-level)."""


class HypothesisViolatedError(HamdecError):
    """A degree-window precondition failed; the message names the inequality."""


class NotRegularError(HamdecError):
    """A regular graph was required."""


class QuotaUnreachableError(HamdecError):
    """Fewer matchings/covers met the size quota than requested.

    ``achieved`` holds the count that was reachable; ``partial`` holds
    whatever valid objects were produced, ``limiting_pair`` the part pair
    (if any) that ran dry first.
    """

    def __init__(self, message, achieved=0, partial=None, limiting_pair=None):
        super().__init__(message)
        self.achieved = achieved
        self.partial = partial
        self.limiting_pair = limiting_pair


# --- path covers ---

class OddOrderError(HamdecError):
    """The complete-digraph path decomposition needs an even order."""


class PartsOverlapError(HamdecError):
    """Vertex parts supplied to a chain of matchings overlap."""


class MatchingOutOfPartsError(HamdecError):
    """A matching edge does not run between its two assigned parts."""


class PartsTooSmallError(HamdecError):
    """Too many parts requested for the vertex count."""


# --- assembly ---

class SameEndpointsError(HamdecError):
    """Hamilton-path search requires distinct endpoints."""


class BudgetExhaustedError(HamdecError):
    """Search hit its node-expansion budget before settling the instance."""

    def __init__(self, message, expansions=0):
        super().__init__(message)
        self.expansions = expansions


class ConnectorDegreeTooLowError(HamdecError):
    """A path endpoint has too few reservoir neighbours.

    ``endpoint`` is the offending vertex, ``direction`` is "in" or "out".
    """

    def __init__(self, message, endpoint=None, direction=None):
        super().__init__(message)
        self.endpoint = endpoint
        self.direction = direction


class SpliceFailedError(HamdecError):
    """All partition resamples failed while splicing a cover into a cycle."""

    def __init__(self, message, block_index=None, attempts=0):
        super().__init__(message)
        self.block_index = block_index
        self.attempts = attempts


class ReservoirMismatchError(HamdecError):
    """Reservoir size cannot host the requested number of blocks."""


class InvariantViolationError(HamdecError):
    """A domain-type invariant failed on re-check of supplied data."""


# --- partition ---

class NotSpanningRegularError(HamdecError):
    """The supplied factor is not a spanning regular sub-digraph."""


class KTooLargeError(HamdecError):
    """K**3 exceeds n / 8; subproblem reservoirs would be trivial."""


class InconsistentSpecsError(HamdecError):
    """Subproblem specs violate edge-disjointness or containment."""
