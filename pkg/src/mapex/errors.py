"""Exception taxonomy shared by all mapex modules."""

from __future__ import annotations


class MapexError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(MapexError):
    """An operation was called with arguments violating its preconditions."""


class DomainFormatError(MapexError):
    """A domain definition (file or in-memory) is malformed."""


class UnknownDomainError(MapexError):
    """The requested domain id is not registered."""


class SchemaMismatchError(MapexError):
    """A concrete state or file does not match the feature schema in use."""


class TraceFormatError(MapexError):
    """A trace file is malformed (bad header, bad record, broken episode)."""


class MultipleInitialStatesError(MapexError):
    """Episodes disagree on the initial abstract state and virtual-init is off."""


class AbstractionFormatError(MapexError):
    """An abstraction file failed version, structure, or checksum validation."""


class UnreachableGoalError(MapexError):
    """No goal state is reachable from the initial state."""

    def __init__(self, frontier_size: int):
        self.frontier_size = frontier_size
        super().__init__(
            f"no goal state reachable from the initial state "
            f"(search settled {frontier_size} states)"
        )


class KnowledgeGapError(MapexError):
    """A queried (agent, action) pair has no relevance-knowledge entry."""


class UnknownStateError(MapexError):
    """A query referenced an abstract state absent from the abstraction."""


class ContradictionNotice(MapexError):
    """A why-not query targeted a state where the agents DO take the action."""


class PhraseMapError(MapexError):
    """A phrase map lacks an entry needed for rendering."""


class MintermConflictError(MapexError):
    """The same minterm was supplied as both a one and a zero."""

    def __init__(self, offenders):
        self.offenders = tuple(sorted(offenders))
        super().__init__(
            f"{len(self.offenders)} minterm(s) appear in both ones and zeros: "
            f"{list(self.offenders)[:8]}"
        )


class TooManyVariablesError(MapexError):
    """The Boolean problem exceeds the minimizer's variable guardrail."""

    def __init__(self, n_vars: int, limit: int):
        self.n_vars = n_vars
        self.limit = limit
        super().__init__(
            f"minimization over {n_vars} variables exceeds the guardrail of "
            f"{limit}; consider the relevancy-filtered (withrf) method, which "
            f"restricts variables to relevant agents and features"
        )


class MinimizationTimeout(MapexError):
    """Cooperative timeout hit inside the minimizer; carries partial progress."""

    def __init__(self, stage: str, primes_found: int):
        self.stage = stage
        self.primes_found = primes_found
        super().__init__(
            f"minimization timed out during {stage}; partial progress: "
            f"{primes_found} prime implicant(s) found"
        )
