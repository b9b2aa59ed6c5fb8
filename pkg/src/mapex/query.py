"""Query answering over a policy abstraction: "when", "why not", and "what"
questions, each in a baseline (norf) and a relevancy-filtered (withrf) variant.

The when/why-not answerers partition states into targets and non-targets by
checking enabled joint actions against the query criterion, project both sets
onto Boolean minterms (all agents x all features for norf; relevant agents x
relevant features for withrf), and hand the resulting on/off-sets to the
minimizer.  States in both partitions count as targets: explanations describe
the target states, and the minimizer needs disjoint sets; the same rule is
applied again after projection, where distinct states may collapse onto one
minterm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import boolmin
from .abstraction import PolicyAbstraction
from .domain import (
    AgentAction,
    AgentId,
    DomainDefinition,
    JointAction,
    JointState,
    RelevanceKnowledge,
    variable_index,
)
from .errors import (
    ContradictionNotice,
    PreconditionError,
    UnknownStateError,
)

KINDS = ("when", "whynot", "what")
METHODS = ("norf", "withrf")

# (agent, predicate id, polarity); polarity False renders the negative phrase
Literal = tuple[AgentId, str, bool]


@dataclass(frozen=True)
class Query:
    """A structured agent-behavior question.

    when/whynot use ``actions`` (the queried agent-action pairs); whynot adds
    the queried joint state; what uses ``predicates``.
    """

    kind: str
    agents: tuple[str, ...]
    method: str = "withrf"
    actions: tuple[AgentAction, ...] = ()
    state: JointState | None = None
    predicates: tuple[str, ...] = ()

    def validate(self, domain: DomainDefinition) -> None:
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown query kind {self.kind!r}")
        if self.method not in METHODS:
            raise PreconditionError(f"unknown query method {self.method!r}")
        if not self.agents:
            raise PreconditionError("query needs at least one agent")
        for name in self.agents:
            domain.agent_spec(name)
        if self.kind in ("when", "whynot"):
            if not self.actions:
                raise PreconditionError(f"{self.kind} query needs agent actions")
            for agent, action in self.actions:
                spec = domain.agent_spec(agent)
                if action not in spec.actions:
                    raise PreconditionError(
                        f"action {action!r} is not in agent {agent!r}'s alphabet"
                    )
                if agent not in self.agents:
                    raise PreconditionError(
                        f"action for {agent!r} but the agent is not in the query"
                    )
        if self.kind == "whynot" and self.state is None:
            raise PreconditionError("whynot query needs a joint state")
        if self.kind == "what":
            if not self.predicates:
                raise PreconditionError("what query needs predicates")
            for p in self.predicates:
                domain.schema.index_of(p)


@dataclass(frozen=True)
class LiteralDNF:
    """Disjunction of conjunctions over (agent, predicate, polarity) literals."""

    clauses: tuple[frozenset[Literal], ...]

    def __post_init__(self):
        for clause in self.clauses:
            seen = {(a, p) for a, p, _ in clause}
            if len(seen) != len(clause):
                raise PreconditionError(
                    "clause contains both polarities of one (agent, predicate)"
                )

    @property
    def is_never(self) -> bool:
        return len(self.clauses) == 0

    @property
    def is_always(self) -> bool:
        return len(self.clauses) == 1 and not self.clauses[0]


@dataclass(frozen=True)
class BooleanSpace:
    """The flat variable ordering a DNF was minimized over."""

    agent_order: tuple[AgentId, ...]
    feature_order: tuple[str, ...]

    @property
    def n_variables(self) -> int:
        return len(self.agent_order) * len(self.feature_order)

    def minterm(self, state: JointState, schema) -> int:
        bits = 0
        for agent in self.agent_order:
            for pred in self.feature_order:
                if state[agent.index] >> schema.index_of(pred) & 1:
                    bits |= 1 << variable_index(
                        agent, pred, self.agent_order, self.feature_order
                    )
        return bits

    def literal(self, var: int, polarity: bool) -> Literal:
        agent = self.agent_order[var // len(self.feature_order)]
        pred = self.feature_order[var % len(self.feature_order)]
        return (agent, pred, polarity)


@dataclass(frozen=True)
class ConditionAnswer:
    """Result of a when/why-not query: the minimized differentiating DNF."""

    query: Query
    dnf: LiteralDNF
    space: BooleanSpace
    target_states: frozenset[JointState]
    nontarget_states: frozenset[JointState]

    @property
    def n_clauses(self) -> int:
        return len(self.dnf.clauses)


@dataclass(frozen=True)
class WhatAnswer:
    """Result of a what query.

    norf: per agent, the deduplicated list of enabled actions (alphabet
    order).  withrf: per agent, the single most frequent relevant action
    weighted by transition counts (None when no relevant action was
    observed).
    """

    query: Query
    actions: Mapping[str, tuple[str, ...]] | Mapping[str, str | None]
    satisfying_states: frozenset[JointState]

    @property
    def no_occurrence(self) -> bool:
        return not self.satisfying_states


def relevancy_filter(
    actions: Iterable[AgentAction], knowledge: RelevanceKnowledge
) -> tuple[frozenset[str], frozenset[str], tuple[frozenset[AgentAction], ...]]:
    """Union the relevance entries of the queried actions into (G, F, A)."""
    agents: set[str] = set()
    features: set[str] = set()
    action_sets: list[frozenset[AgentAction]] = []
    for agent, action in actions:
        entry = knowledge.get(agent, action)
        agents |= entry.agents
        features |= entry.features
        for s in entry.action_sets:
            assert (agent, action) in s, "relevance set lost its generating action"
            if s not in action_sets:
                action_sets.append(s)
    return (
        frozenset(agents),
        frozenset(features),
        tuple(sorted(action_sets, key=sorted)),
    )


def compatible(action: JointAction, criterion, domain: DomainDefinition) -> bool:
    """Does a joint action satisfy the query criterion?

    A set of (agent, action) pairs (norf) is satisfied when every pair is
    contained in the joint action; a list of such sets (withrf) when at least
    one member set is fully contained.
    """
    if isinstance(criterion, (list, tuple)):
        return any(compatible(action, s, domain) for s in criterion)
    return all(
        action[domain.agent_id(agent).index] == act for agent, act in criterion
    )


def _boolean_space(query: Query, domain: DomainDefinition) -> tuple[BooleanSpace, object]:
    """Variable ordering and compatibility criterion for a when/whynot query."""
    a_q = frozenset(query.actions)
    if query.method == "withrf":
        g, f, sets = relevancy_filter(query.actions, domain.relevance)
        agent_order = tuple(a for a in domain.agent_ids if a.display_name in g)
        feature_order = tuple(p for p in domain.schema.predicate_ids if p in f)
        criterion: object = sets
    else:
        agent_order = domain.agent_ids
        feature_order = domain.schema.predicate_ids
        criterion = a_q
    space = BooleanSpace(agent_order, feature_order)
    # the filtered problem can never be wider than the baseline's N * |F|
    assert space.n_variables <= domain.n_agents * domain.schema.n_features
    return space, criterion


def _minimize_to_dnf(
    ones: set[int],
    zeros: set[int],
    space: BooleanSpace,
    *,
    deadline: float | None,
    max_vars: int,
) -> LiteralDNF:
    implicants = boolmin.minimize(
        sorted(ones), sorted(zeros - ones), space.n_variables,
        deadline=deadline, max_vars=max_vars,
    )
    clauses = tuple(
        frozenset(space.literal(v, pol) for v, pol in imp.literals())
        for imp in implicants
    )
    return LiteralDNF(clauses)


def when_partition(
    query: Query, m: PolicyAbstraction, domain: DomainDefinition
) -> tuple[BooleanSpace, frozenset[JointState], frozenset[JointState]]:
    """Target / non-target split of a when query, before any minimization.

    A state is a target when at least one of its enabled joint actions passes
    the compatibility check, and a non-target when at least one fails; states
    qualifying as both count as targets only.
    """
    query.validate(domain)
    if query.kind != "when":
        raise PreconditionError(f"when_partition got a {query.kind!r} query")
    space, criterion = _boolean_space(query, domain)
    targets: set[JointState] = set()
    nontargets: set[JointState] = set()
    for s in m.states:
        for action in m.enabled_actions(s):
            if compatible(action, criterion, domain):
                targets.add(s)
            else:
                nontargets.add(s)
    nontargets -= targets
    return space, frozenset(targets), frozenset(nontargets)


def answer_when(
    query: Query,
    m: PolicyAbstraction,
    domain: DomainDefinition,
    *,
    deadline: float | None = None,
    max_vars: int = boolmin.MAX_VARIABLES,
) -> ConditionAnswer:
    """States where the queried agents take the queried actions, as a DNF.

    An empty target set yields the empty (never) DNF; a criterion satisfied in
    every state yields the tautology (always) DNF.
    """
    space, targets, nontargets = when_partition(query, m, domain)
    ones = {space.minterm(s, m.schema) for s in targets}
    zeros = {space.minterm(s, m.schema) for s in nontargets}
    dnf = _minimize_to_dnf(ones, zeros, space, deadline=deadline, max_vars=max_vars)
    return ConditionAnswer(query, dnf, space, targets, nontargets)


def answer_whynot(
    query: Query,
    m: PolicyAbstraction,
    domain: DomainDefinition,
    *,
    deadline: float | None = None,
    max_vars: int = boolmin.MAX_VARIABLES,
) -> ConditionAnswer:
    """What distinguishes the queried state from states where the action happens.

    The queried state is the single target; every state with an enabled
    action compatible with the criterion is a non-target.  When no state takes
    the action at all, the DNF degenerates to the tautology, rendered as "the
    agents never take this action".
    """
    query.validate(domain)
    if query.kind != "whynot":
        raise PreconditionError(f"answer_whynot got a {query.kind!r} query")
    s_q = query.state
    if s_q not in m.state_index:
        raise UnknownStateError(f"queried state {s_q} is not in the abstraction")
    space, criterion = _boolean_space(query, domain)
    for action in m.enabled_actions(s_q):
        if compatible(action, criterion, domain):
            raise ContradictionNotice(
                "the agents DO take this action here: the queried state has a "
                f"compatible enabled action {action}"
            )
    nontargets = {
        s
        for s in m.states
        if any(compatible(a, criterion, domain) for a in m.enabled_actions(s))
    }
    nontargets.discard(s_q)
    ones = {space.minterm(s_q, m.schema)}
    zeros = {space.minterm(s, m.schema) for s in nontargets}
    dnf = _minimize_to_dnf(ones, zeros, space, deadline=deadline, max_vars=max_vars)
    return ConditionAnswer(query, dnf, space, frozenset({s_q}), frozenset(nontargets))


def answer_what(
    query: Query, m: PolicyAbstraction, domain: DomainDefinition
) -> WhatAnswer:
    """Actions the queried agents take in states satisfying the predicates."""
    query.validate(domain)
    if query.kind != "what":
        raise PreconditionError(f"answer_what got a {query.kind!r} query")
    pred_bits = [m.schema.index_of(p) for p in query.predicates]
    indices = {name: domain.agent_id(name).index for name in query.agents}
    satisfying = [
        s
        for s in m.states
        if all(s[i] >> b & 1 for i in indices.values() for b in pred_bits)
    ]
    if not satisfying:
        return WhatAnswer(query, {}, frozenset())

    if query.method == "norf":
        observed: dict[str, set[str]] = {name: set() for name in query.agents}
        for s in satisfying:
            for action in m.enabled_actions(s):
                for name, i in indices.items():
                    observed[name].add(action[i])
        listed = {
            name: tuple(
                a for a in domain.agent_spec(name).actions if a in observed[name]
            )
            for name in query.agents
        }
        return WhatAnswer(query, listed, frozenset(satisfying))

    # withrf: invert the relevance map (predicates -> actions), then take the
    # transition-count-weighted most frequent relevant action per agent
    wanted = set(query.predicates)
    relevant: dict[str, set[str]] = {}
    for name in query.agents:
        relevant[name] = {
            action
            for action in domain.agent_spec(name).actions
            if domain.relevance.get(name, action).features & wanted
        }
    weights: dict[str, dict[str, int]] = {name: {} for name in query.agents}
    for s in satisfying:
        for e in m.out_edges[s]:
            for name, i in indices.items():
                act = e.action[i]
                if act in relevant[name]:
                    weights[name][act] = weights[name].get(act, 0) + e.count
    best: dict[str, str | None] = {}
    for name in query.agents:
        if weights[name]:
            best[name] = min(weights[name], key=lambda a: (-weights[name][a], a))
        else:
            best[name] = None
    return WhatAnswer(query, best, frozenset(satisfying))
