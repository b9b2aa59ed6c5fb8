"""Level-based-foraging-lite domains: agents carry levels and a food item is
collected when one declared combination with sufficient combined level acts on
it together.  Variants with 2, 4, and 9 agents; the declared combos are the
minimal qualifying groups and double as the cooperation knowledge.
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

COLLECT_1 = "collect_food_1"
COLLECT_2 = "collect_food_2"

# agent levels and the qualifying combos per food (sum of levels >= food level)
_SETUPS = {
    2: {
        "levels": {"F_1": 1, "F_2": 1},
        "food_1": (("F_1", "F_2"),),            # level-2 food
        "food_2": (("F_1",), ("F_2",)),         # level-1 food
    },
    4: {
        "levels": {"F_1": 2, "F_2": 1, "F_3": 1, "F_4": 2},
        "food_1": (("F_1", "F_2"), ("F_1", "F_3")),   # level-3 food
        "food_2": (("F_4",), ("F_2", "F_3")),         # level-2 food
    },
    9: {
        "levels": {"F_1": 2, "F_2": 2, "F_3": 1, "F_4": 1, "F_5": 1,
                   "F_6": 1, "F_7": 1, "F_8": 1, "F_9": 2},
        "food_1": (("F_1", "F_2"), ("F_1", "F_3", "F_4")),  # level-4 food
        "food_2": (("F_9",), ("F_5", "F_6")),               # level-2 food
    },
}


def _names(n: int) -> list[str]:
    return [f"F_{i}" for i in range(1, n + 1)]


def lbf_domain(n_agents: int) -> DomainDefinition:
    if n_agents not in _SETUPS:
        raise PreconditionError(
            f"supported foraging agent counts are {sorted(_SETUPS)}; got {n_agents}"
        )
    setup = _SETUPS[n_agents]
    schema = grid_task_schema(
        (
            ("food_1", "food 1", "collected food 1"),
            ("food_2", "food 2", "collected food 2"),
        )
    )
    action_of = {"food_1": COLLECT_1, "food_2": COLLECT_2}
    phrases = {
        COLLECT_1: ActionPhrases("collect food 1", "collects food 1"),
        COLLECT_2: ActionPhrases("collect food 2", "collects food 2"),
        MOVE: ActionPhrases("move", "moves"),
        WAIT: ActionPhrases("wait", "waits"),
    }
    members: dict[str, set[str]] = {t: set() for t in action_of}
    for task in action_of:
        for combo in setup[task]:
            members[task].update(combo)
    agents = []
    for name in _names(n_agents):
        actions = [action_of[t] for t in action_of if name in members[t]]
        agents.append(AgentSpec(name, tuple(actions) + (MOVE, WAIT)))
    entries = {}
    for task, action in action_of.items():
        features = frozenset({f"{task}_detect", f"{task}_complete"})
        for name in members[task]:
            sets = tuple(
                frozenset((m, action) for m in combo)
                for combo in setup[task]
                if name in combo
            )
            agents_union = frozenset(a for s in sets for a, _ in s)
            entries[(name, action)] = RelevanceEntry(agents_union, features, sets)
    for name in _names(n_agents):
        for plain in (MOVE, WAIT):
            entries[(name, plain)] = RelevanceEntry(
                frozenset({name}), frozenset(), (frozenset({(name, plain)}),)
            )
    return DomainDefinition(
        id=f"lbf{n_agents}",
        agents=tuple(agents),
        schema=schema,
        action_phrases=phrases,
        relevance=RelevanceKnowledge(entries),
    )


def lbf_grid_config(n_agents: int) -> GridConfig:
    setup = _SETUPS[n_agents]
    return GridConfig(
        rows=6,
        cols=6,
        walls=frozenset(),
        starts=tuple((5, i % 6) for i in range(n_agents)),
        tasks=(
            TaskSpec("food_1", (1, 2), COLLECT_1, setup["food_1"]),
            TaskSpec("food_2", (3, 4), COLLECT_2, setup["food_2"]),
        ),
    )


def run_lbf_episodes(n_agents: int, episodes: int, max_steps: int,
                     seed: int) -> Iterator[TraceSample]:
    config = lbf_grid_config(n_agents)
    return run_generic_episodes(config, _names(n_agents), episodes, max_steps, seed)
