"""Warehouse-lite domains: robots deliver two requested items; each delivery
needs its designated pair of robots at the shelf acting together.  Variants
with 2, 4, and 19 robots; non-designated robots take a seeded random walk.
"""

from __future__ import annotations

from typing import Iterator

from ..domain import (
    ActionPhrases,
    AgentSpec,
    DomainDefinition,
    RelevanceEntry,
    RelevanceKnowledge,
)
from ..errors import PreconditionError
from .base import MOVE, WAIT, GridConfig, TaskSpec, TraceSample, run_generic_episodes
from .search_rescue import grid_task_schema

DELIVER_A = "deliver_item_a"
DELIVER_B = "deliver_item_b"

_PAIRS = {
    2: {"item_a": ("R_1", "R_2"), "item_b": ("R_1", "R_2")},
    4: {"item_a": ("R_1", "R_2"), "item_b": ("R_3", "R_4")},
    19: {"item_a": ("R_1", "R_2"), "item_b": ("R_3", "R_4")},
}


def _names(n: int) -> list[str]:
    return [f"R_{i}" for i in range(1, n + 1)]


def rware_domain(n_agents: int) -> DomainDefinition:
    if n_agents not in _PAIRS:
        raise PreconditionError(
            f"supported warehouse agent counts are {sorted(_PAIRS)}; got {n_agents}"
        )
    pairs = _PAIRS[n_agents]
    schema = grid_task_schema(
        (
            ("item_a", "shelf A", "delivered item A"),
            ("item_b", "shelf B", "delivered item B"),
        )
    )
    action_of = {"item_a": DELIVER_A, "item_b": DELIVER_B}
    phrases = {
        DELIVER_A: ActionPhrases("deliver item A", "delivers item A"),
        DELIVER_B: ActionPhrases("deliver item B", "delivers item B"),
        MOVE: ActionPhrases("move", "moves"),
        WAIT: ActionPhrases("wait", "waits"),
    }
    agents = []
    for name in _names(n_agents):
        actions = [action_of[t] for t, pair in pairs.items() if name in pair]
        agents.append(AgentSpec(name, tuple(actions) + (MOVE, WAIT)))
    entries = {}
    for task, pair in pairs.items():
        action = action_of[task]
        features = frozenset({f"{task}_detect", f"{task}_complete"})
        combo = frozenset((member, action) for member in pair)
        for member in pair:
            entries[(member, action)] = RelevanceEntry(frozenset(pair), features, (combo,))
    for name in _names(n_agents):
        for plain in (MOVE, WAIT):
            entries[(name, plain)] = RelevanceEntry(
                frozenset({name}), frozenset(), (frozenset({(name, plain)}),)
            )
    return DomainDefinition(
        id=f"rware{n_agents}",
        agents=tuple(agents),
        schema=schema,
        action_phrases=phrases,
        relevance=RelevanceKnowledge(entries),
    )


def rware_grid_config(n_agents: int) -> GridConfig:
    pairs = _PAIRS[n_agents]
    return GridConfig(
        rows=6,
        cols=6,
        walls=frozenset(),
        starts=tuple((5, i % 6) for i in range(n_agents)),
        tasks=(
            TaskSpec("item_a", (1, 1), DELIVER_A, (pairs["item_a"],)),
            TaskSpec("item_b", (3, 4), DELIVER_B, (pairs["item_b"],)),
        ),
    )


def run_rware_episodes(n_agents: int, episodes: int, max_steps: int,
                       seed: int) -> Iterator[TraceSample]:
    config = rware_grid_config(n_agents)
    return run_generic_episodes(config, _names(n_agents), episodes, max_steps, seed)
