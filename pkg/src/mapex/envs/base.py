"""Grid-world plumbing shared by the built-in domains: trace records, trace
file I/O, and a generic scripted-policy engine for cooperative grid tasks.

Conventions: movement is 4-neighbor, one cell per step; task detection and
task eligibility use Chebyshev adjacency (distance exactly 1); agents may
share cells; a task's cell blocks movement while the task is alive and
becomes passable once completed.  Completion of a task requires every member
of one of its declared combos to be adjacent and to take the task's action at
the same step; completion flags are set only for that combo's members and,
once set, never fall within an episode.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, Sequence

from ..errors import PreconditionError, TraceFormatError

Cell = tuple[int, int]

MOVE = "move"
WAIT = "wait"

_TRACE_FORMAT = "mapex-trace"
_TRACE_VERSION = 1


@dataclass(frozen=True)
class TraceSample:
    """One observed policy decision: (state, joint action, next state)."""

    episode_id: int
    step: int
    joint_concrete_state: tuple[Mapping[str, Any], ...]
    joint_action: tuple[str, ...]
    next_joint_concrete_state: tuple[Mapping[str, Any], ...]


def write_trace(path, domain_id: str, n_agents: int,
                samples: Iterable[TraceSample]) -> int:
    """Write samples as line-delimited JSON under a version header; returns count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": _TRACE_FORMAT, "version": _TRACE_VERSION,
                  "domain": domain_id, "agents": n_agents}
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for s in samples:
            record = {
                "episode": s.episode_id,
                "step": s.step,
                "state": list(s.joint_concrete_state),
                "action": list(s.joint_action),
                "next_state": list(s.next_joint_concrete_state),
            }
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
            n += 1
    return n


def read_trace(path) -> tuple[dict[str, Any], list[TraceSample]]:
    """Read a trace file; validates the header and per-episode step chaining."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceFormatError(f"{path}: empty trace file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}: bad header: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != _TRACE_FORMAT:
        raise TraceFormatError(f"{path}: missing mapex-trace header")
    if header.get("version") != _TRACE_VERSION:
        raise TraceFormatError(f"{path}: unsupported version {header.get('version')!r}")

    samples: list[TraceSample] = []
    expected: dict[int, int] = {}
    last_next: dict[int, Any] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"{path}:{lineno}: bad record: {exc}") from None
        try:
            episode, step = rec["episode"], rec["step"]
            state, action, nxt = rec["state"], rec["action"], rec["next_state"]
        except (KeyError, TypeError):
            raise TraceFormatError(f"{path}:{lineno}: record missing fields") from None
        if step != expected.get(episode, 0):
            raise TraceFormatError(
                f"{path}:{lineno}: episode {episode} step {step}, "
                f"expected {expected.get(episode, 0)}"
            )
        if step > 0 and last_next[episode] != state:
            raise TraceFormatError(
                f"{path}:{lineno}: episode {episode} state at step {step} does "
                f"not chain from the previous next_state"
            )
        expected[episode] = step + 1
        last_next[episode] = nxt
        samples.append(TraceSample(episode, step, tuple(state), tuple(action), tuple(nxt)))
    return header, samples


def chebyshev(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


@dataclass(frozen=True)
class TaskSpec:
    """A cooperative task pinned to one grid cell."""

    id: str
    cell: Cell
    action: str
    combos: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class GridConfig:
    """Static geometry of a grid domain plus its task list (declared order)."""

    rows: int
    cols: int
    walls: frozenset[Cell]
    starts: tuple[Cell, ...]
    tasks: tuple[TaskSpec, ...]


class GridWorld:
    """Mutable episode state: agent positions, task liveness, completion flags."""

    def __init__(self, config: GridConfig, agent_names: Sequence[str]):
        self.config = config
        self.agent_names = tuple(agent_names)
        self.positions: list[Cell] = list(config.starts)
        self.alive: dict[str, bool] = {t.id: True for t in config.tasks}
        self.done: list[dict[str, bool]] = [
            {t.id: False for t in config.tasks} for _ in agent_names
        ]

    def passable(self, cell: Cell) -> bool:
        r, c = cell
        if not (0 <= r < self.config.rows and 0 <= c < self.config.cols):
            return False
        if cell in self.config.walls:
            return False
        for t in self.config.tasks:
            if t.cell == cell and self.alive[t.id]:
                return False
        return True

    def neighbors(self, cell: Cell) -> list[Cell]:
        r, c = cell
        out = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
        return sorted(x for x in out if self.passable(x))

    def bfs_step(self, start: Cell, goal: Cell) -> Cell | None:
        """First move of a shortest path start->goal, or None when unreachable."""
        if start == goal:
            return start
        prev: dict[Cell, Cell] = {start: start}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            if cur == goal:
                while prev[cur] != start:
                    cur = prev[cur]
                return cur
            for nxt in self.neighbors(cur):
                if nxt not in prev:
                    prev[nxt] = cur
                    queue.append(nxt)
        return None

    def concrete_record(self, agent_index: int) -> dict[str, Any]:
        """Self-contained per-agent record: position, task board, own flags."""
        pos = self.positions[agent_index]
        return {
            "pos": [pos[0], pos[1]],
            "tasks": {
                t.id: {"pos": [t.cell[0], t.cell[1]], "present": self.alive[t.id]}
                for t in self.config.tasks
            },
            "done": dict(self.done[agent_index]),
        }

    def joint_record(self) -> tuple[dict[str, Any], ...]:
        return tuple(self.concrete_record(i) for i in range(len(self.agent_names)))

    def all_done(self) -> bool:
        return not any(self.alive.values())

    def resolve(self, actions: Sequence[str]) -> None:
        """Apply task completions for one step's joint action."""
        name_to_index = {n: i for i, n in enumerate(self.agent_names)}
        for task in self.config.tasks:
            if not self.alive[task.id]:
                continue
            takers = {
                self.agent_names[i]
                for i, a in enumerate(actions)
                if a == task.action and chebyshev(self.positions[i], task.cell) == 1
            }
            for combo in task.combos:
                if set(combo) <= takers:
                    self.alive[task.id] = False
                    for name in combo:
                        self.done[name_to_index[name]][task.id] = True
                    break


def episode_rng(seed: int, episode: int) -> random.Random:
    # string seeding is stable across platforms and Python versions
    return random.Random(f"mapex:{seed}:{episode}")


class GenericScriptedPolicy:
    """Reactive stand-in policy: combo members route to staging cells around
    their task, attempt the task action when adjacent (and, with seeded
    probability, already at Chebyshev distance 2), and idle agents take a
    seeded random walk."""

    def __init__(self, config: GridConfig, agent_names: Sequence[str]):
        self.config = config
        self.agent_names = tuple(agent_names)

    def assign(self, rng: random.Random) -> dict[str, tuple[str, ...]]:
        return {t.id: t.combos[rng.randrange(len(t.combos))] for t in self.config.tasks}

    def step(self, world: GridWorld, assigned: dict[str, tuple[str, ...]],
             rng: random.Random) -> tuple[list[str], list[Cell]]:
        actions: list[str] = []
        targets: list[Cell] = []
        for i, name in enumerate(self.agent_names):
            pos = world.positions[i]
            task = next(
                (t for t in self.config.tasks
                 if world.alive[t.id] and name in assigned[t.id]),
                None,
            )
            if task is None:
                options = world.neighbors(pos) + [pos]
                choice = options[rng.randrange(len(options))]
                actions.append(MOVE if choice != pos else WAIT)
                targets.append(choice)
                continue
            dist = chebyshev(pos, task.cell)
            if dist == 1 or (dist == 2 and rng.random() < 0.5):
                actions.append(task.action)
                targets.append(pos)
                continue
            staging = sorted(
                c for c in _around(task.cell)
                if world.passable(c) and world.bfs_step(pos, c) is not None
            )
            if not staging:
                actions.append(WAIT)
                targets.append(pos)
                continue
            rank = sorted(assigned[task.id]).index(name)
            goal = staging[rank % len(staging)]
            step_to = world.bfs_step(pos, goal)
            if step_to is None or step_to == pos:
                actions.append(WAIT)
                targets.append(pos)
            else:
                actions.append(MOVE)
                targets.append(step_to)
        return actions, targets


def _around(cell: Cell) -> list[Cell]:
    r, c = cell
    return [
        (r + dr, c + dc)
        for dr in (-1, 0, 1)
        for dc in (-1, 0, 1)
        if not (dr == 0 and dc == 0)
    ]


def run_generic_episodes(
    config: GridConfig,
    agent_names: Sequence[str],
    episodes: int,
    max_steps: int,
    seed: int,
) -> Iterator[TraceSample]:
    """Run the generic scripted policy; yields samples episode by episode."""
    if episodes < 1:
        raise PreconditionError(f"episodes must be >= 1, got {episodes}")
    if max_steps < 1:
        raise PreconditionError(f"max_steps must be >= 1, got {max_steps}")
    policy = GenericScriptedPolicy(config, agent_names)
    for episode in range(episodes):
        rng = episode_rng(seed, episode)
        world = GridWorld(config, agent_names)
        assigned = policy.assign(rng)
        for step in range(max_steps):
            state = world.joint_record()
            actions, targets = policy.step(world, assigned, rng)
            world.resolve(actions)
            for i, tgt in enumerate(targets):
                world.positions[i] = tgt
            next_state = world.joint_record()
            yield TraceSample(episode, step, state, tuple(actions), next_state)
            if world.all_done():
                break
