"""Builds the joint-state abstraction of an observed policy from trajectory
samples: abstract each sample through the feature schema, accumulate
transition counts, and normalize to probabilities.

Normalization: with ``normalization="state"`` (the default) a transition's
probability is its count divided by the total outgoing samples of its source
state, so the product of edge probabilities along a path equals the empirical
probability of that action-labeled trajectory.  ``"state-action"`` divides by
the (state, action) count instead.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .domain import FeatureSchema, JointAction, JointState, encode_joint_state
from .envs.base import TraceSample
from .errors import (
    AbstractionFormatError,
    MultipleInitialStatesError,
    PreconditionError,
    SchemaMismatchError,
)

_PROB_TOLERANCE = 1e-9

NORMALIZATIONS = ("state", "state-action")


@dataclass(frozen=True)
class Transition:
    source: JointState
    action: JointAction
    target: JointState
    count: int
    probability: float


class PolicyAbstraction:
    """Immutable-after-build abstraction: states, actions, counted transitions.

    Every stored transition was witnessed by at least one sample (counts are
    always >= 1) and the probabilities out of each source state sum to one.
    """

    def __init__(
        self,
        schema: FeatureSchema,
        n_agents: int,
        transition_counts: Mapping[tuple[JointState, JointAction, JointState], int],
        initial_state: JointState,
        *,
        normalization: str = "state",
        initial_counts: Mapping[JointState, int] | None = None,
    ):
        if normalization not in NORMALIZATIONS:
            raise PreconditionError(f"unknown normalization {normalization!r}")
        if not transition_counts:
            raise PreconditionError("abstraction needs at least one transition")
        for (s, a, t), c in transition_counts.items():
            if c < 1:
                raise PreconditionError(f"transition count {c} < 1 for {(s, a, t)}")
            if len(s) != n_agents or len(t) != n_agents or len(a) != n_agents:
                raise SchemaMismatchError(
                    f"transition arity mismatch for {(s, a, t)}; expected {n_agents}"
                )
        self.schema = schema
        self.n_agents = n_agents
        self.normalization = normalization
        self.counts = dict(transition_counts)
        self.initial_state = initial_state
        self.initial_counts = dict(initial_counts or {initial_state: 1})

        state_set = {initial_state}
        for s, _, t in self.counts:
            state_set.add(s)
            state_set.add(t)
        state_set.update(self.initial_counts)
        # canonical ordering: sorted by agent-major bit values
        self.states: tuple[JointState, ...] = tuple(sorted(state_set))
        self.state_index: dict[JointState, int] = {
            s: i for i, s in enumerate(self.states)
        }

        self.visit_counts: Counter = Counter()
        action_counts: Counter = Counter()
        for (s, a, _), c in self.counts.items():
            self.visit_counts[s] += c
            action_counts[(s, a)] += c

        edges: dict[JointState, list[Transition]] = {s: [] for s in self.states}
        for (s, a, t), c in sorted(self.counts.items()):
            denom = (
                self.visit_counts[s]
                if normalization == "state"
                else action_counts[(s, a)]
            )
            edges[s].append(Transition(s, a, t, c, c / denom))
        self.out_edges: dict[JointState, tuple[Transition, ...]] = {
            s: tuple(es) for s, es in edges.items()
        }

        max_states = (1 << schema.n_features) ** n_agents
        assert len(self.states) <= max_states, "state count exceeds 2^|F|^N bound"
        if normalization == "state":
            for s, es in self.out_edges.items():
                if es:
                    total = sum(e.probability for e in es)
                    assert math.isclose(total, 1.0, abs_tol=_PROB_TOLERANCE), (
                        f"outgoing probability mass {total} != 1 for state {s}"
                    )
        else:
            per_action: Counter = Counter()
            for s, es in self.out_edges.items():
                for e in es:
                    per_action[(s, e.action)] += e.probability
            for key, total in per_action.items():
                assert math.isclose(total, 1.0, abs_tol=_PROB_TOLERANCE), (
                    f"probability mass {total} != 1 for {key}"
                )

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_transitions(self) -> int:
        return len(self.counts)

    @property
    def has_virtual_init(self) -> bool:
        return len(self.initial_counts) > 1

    def enabled_actions(self, state: JointState) -> tuple[JointAction, ...]:
        seen: list[JointAction] = []
        for e in self.out_edges.get(state, ()):
            if e.action not in seen:
                seen.append(e.action)
        return tuple(seen)

    def is_goal(self, state: JointState) -> bool:
        for pred_id in self.schema.task_completion_ids:
            i = self.schema.index_of(pred_id)
            if not any(bits >> i & 1 for bits in state):
                return False
        return True

    def goal_states(self) -> tuple[JointState, ...]:
        return tuple(s for s in self.states if self.is_goal(s))

    def initial_distribution(self) -> dict[JointState, float]:
        total = sum(self.initial_counts.values())
        return {s: c / total for s, c in sorted(self.initial_counts.items())}

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolicyAbstraction):
            return NotImplemented
        return (
            self.schema.schema_hash() == other.schema.schema_hash()
            and self.n_agents == other.n_agents
            and self.normalization == other.normalization
            and self.counts == other.counts
            and self.initial_state == other.initial_state
            and self.initial_counts == other.initial_counts
        )


def build_abstraction(
    samples: Iterable[TraceSample],
    schema: FeatureSchema,
    *,
    normalization: str = "state",
    virtual_init: bool = False,
) -> PolicyAbstraction:
    """Frequency-count the abstracted samples into a PolicyAbstraction.

    Episodes whose step-0 abstract states differ raise
    MultipleInitialStatesError unless ``virtual_init`` is set, in which case
    the empirical initial distribution is kept and path search starts from it.
    Self-loops (identical abstract source and target) are recorded like any
    other transition.
    """
    counts: Counter = Counter()
    initial_counts: Counter = Counter()
    first_initial: JointState | None = None
    n_agents = None
    for sample in samples:
        source = encode_joint_state(sample.joint_concrete_state, schema)
        target = encode_joint_state(sample.next_joint_concrete_state, schema)
        action = tuple(sample.joint_action)
        if n_agents is None:
            n_agents = len(source)
        counts[(source, action, target)] += 1
        if sample.step == 0:
            initial_counts[source] += 1
            if first_initial is None:
                first_initial = source
            elif source != first_initial and not virtual_init:
                raise MultipleInitialStatesError(
                    f"episode {sample.episode_id} starts at {source}, earlier "
                    f"episodes at {first_initial}; rerun with virtual-init to "
                    f"model an empirical initial distribution"
                )
    if not counts or first_initial is None or n_agents is None:
        raise PreconditionError("cannot build an abstraction from an empty sample stream")
    return PolicyAbstraction(
        schema,
        n_agents,
        counts,
        first_initial,
        normalization=normalization,
        initial_counts=initial_counts,
    )


# ---------------------------------------------------------------------------
# Abstraction files: versioned structured text with a trailing checksum.
# Probabilities are stored for readability but recomputed from counts on load,
# so the round-trip is lossless.
# ---------------------------------------------------------------------------

_MMDP_FORMAT = "mapex-mmdp"
_MMDP_VERSION = 1


def save_abstraction(m: PolicyAbstraction, path) -> None:
    if m.n_transitions == 0:
        raise PreconditionError("refusing to save an empty abstraction")
    lines = [
        f"{_MMDP_FORMAT} {_MMDP_VERSION}",
        f"schema {m.schema.schema_hash()}",
        f"agents {m.n_agents}",
        f"features {m.schema.n_features}",
        f"normalization {m.normalization}",
        f"initial {m.state_index[m.initial_state]}",
        "init-counts "
        + ",".join(
            f"{m.state_index[s]}:{c}" for s, c in sorted(m.initial_counts.items())
        ),
        f"states {m.n_states}",
    ]
    for i, s in enumerate(m.states):
        lines.append(f"{i} {','.join(str(b) for b in s)}")
    lines.append(f"transitions {m.n_transitions}")
    for s in m.states:
        for e in m.out_edges[s]:
            lines.append(
                f"{m.state_index[s]} {','.join(e.action)} "
                f"{m.state_index[e.target]} {e.count} {e.probability!r}"
            )
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(body)
        fh.write(f"checksum {digest}\n")


def load_abstraction(path, schema: FeatureSchema) -> PolicyAbstraction:
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    lines = raw.splitlines()
    if not lines or not lines[-1].startswith("checksum "):
        raise AbstractionFormatError(f"{path}: missing checksum line")
    body = "\n".join(lines[:-1]) + "\n"
    expected = lines[-1].split(" ", 1)[1].strip()
    actual = hashlib.sha256(body.encode()).hexdigest()
    if actual != expected:
        raise AbstractionFormatError(f"{path}: checksum mismatch (file corrupted?)")

    def fail(msg: str):
        raise AbstractionFormatError(f"{path}: {msg}")

    header = lines[0].split()
    if len(header) != 2 or header[0] != _MMDP_FORMAT:
        fail("not a mapex-mmdp file")
    if header[1] != str(_MMDP_VERSION):
        fail(f"unsupported version {header[1]}")

    fields = {}
    idx = 1
    for key in ("schema", "agents", "features", "normalization", "initial",
                "init-counts", "states"):
        parts = lines[idx].split(" ", 1)
        if parts[0] != key:
            fail(f"expected {key!r} on line {idx + 1}")
        fields[key] = parts[1] if len(parts) > 1 else ""
        idx += 1

    if fields["schema"] != schema.schema_hash():
        raise SchemaMismatchError(
            f"{path}: abstraction was built against schema {fields['schema']}, "
            f"not the supplied schema {schema.schema_hash()}"
        )
    n_agents = int(fields["agents"])
    if int(fields["features"]) != schema.n_features:
        fail("feature count disagrees with the supplied schema")

    n_states = int(fields["states"])
    states: list[JointState] = []
    for k in range(n_states):
        num, bits = lines[idx].split(" ", 1)
        if int(num) != k:
            fail(f"state table out of order at line {idx + 1}")
        states.append(tuple(int(b) for b in bits.split(",")))
        idx += 1

    head = lines[idx].split()
    if head[0] != "transitions":
        fail("missing transitions header")
    n_transitions = int(head[1])
    idx += 1
    counts = {}
    for _ in range(n_transitions):
        s_i, action, t_i, count, _prob = lines[idx].split(" ")
        key = (states[int(s_i)], tuple(action.split(",")), states[int(t_i)])
        counts[key] = int(count)
        idx += 1

    initial_counts = {}
    for part in fields["init-counts"].split(","):
        s_i, c = part.split(":")
        initial_counts[states[int(s_i)]] = int(c)

    return PolicyAbstraction(
        schema,
        n_agents,
        counts,
        states[int(fields["initial"])],
        normalization=fields["normalization"],
        initial_counts=initial_counts,
    )
