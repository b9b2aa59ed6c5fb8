"""Policy summarization: the most probable initial-to-goal path through the
abstraction and the task-sequence chart extracted from it.

The path search converts each transition into an edge weighted by
``-log(probability)`` and runs Dijkstra from the initial state to the nearest
goal state (a state where every task-completion predicate holds for at least
one agent).  Ties are broken deterministically: goal states settle in
canonical state-index order, and between equal-distance routes to a node the
predecessor with the lexicographically smaller (state index, action tuple)
pair is kept.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .abstraction import PolicyAbstraction
from .domain import JointAction, JointState
from .errors import PreconditionError, UnreachableGoalError


@dataclass(frozen=True)
class MostProbablePath:
    """Alternating states and actions s0 -a0-> s1 ... sk, with log probability."""

    states: tuple[JointState, ...]
    actions: tuple[JointAction, ...]
    log_probability: float

    def __len__(self) -> int:
        return len(self.states)

    @property
    def probability(self) -> float:
        return math.exp(self.log_probability)


def most_probable_path(m: PolicyAbstraction) -> MostProbablePath:
    """Highest-probability action-labeled path from the initial state to a goal."""
    if m.initial_state not in m.state_index:
        raise PreconditionError("abstraction has no initial state")
    goals = set(m.goal_states())
    if not goals:
        raise UnreachableGoalError(0)

    dist: dict[JointState, float] = {}
    pred: dict[JointState, tuple[JointState, JointAction]] = {}
    settled: set[JointState] = set()
    heap: list[tuple[float, int, JointState]] = []

    if m.has_virtual_init:
        # virtual source: one zero-cost-from-nowhere edge per observed initial
        # state, weighted by the empirical initial distribution
        for s, p in m.initial_distribution().items():
            dist[s] = -math.log(p)
            heapq.heappush(heap, (dist[s], m.state_index[s], s))
    else:
        dist[m.initial_state] = 0.0
        heapq.heappush(heap, (0.0, m.state_index[m.initial_state], m.initial_state))

    goal: JointState | None = None
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        if u in goals:
            goal = u
            break
        for e in m.out_edges.get(u, ()):
            if e.probability <= 0.0:
                continue
            nd = d - math.log(e.probability)
            v = e.target
            if v in settled:
                continue
            key = (m.state_index[u], e.action)
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                pred[v] = (u, e.action)
                heapq.heappush(heap, (nd, m.state_index[v], v))
            elif nd == dist[v] and v in pred:
                old = (m.state_index[pred[v][0]], pred[v][1])
                if key < old:
                    pred[v] = (u, e.action)
    if goal is None:
        raise UnreachableGoalError(len(settled))

    states = [goal]
    actions: list[JointAction] = []
    cur = goal
    while cur in pred:
        prev, action = pred[cur]
        states.append(prev)
        actions.append(action)
        cur = prev
    states.reverse()
    actions.reverse()
    return MostProbablePath(tuple(states), tuple(actions), -dist[goal])


@dataclass(frozen=True)
class SummaryChart:
    """Task-sequence chart: one column per step where some task completed.

    ``columns[k][i]`` is the set of task predicate ids newly satisfied by
    agent ``i`` at the k-th completion step; labels map predicate ids to the
    short task names shown in cells.
    """

    columns: tuple[tuple[frozenset[str], ...], ...]
    n_agents: int
    labels: dict[str, str]

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(f"T{i + 1}" for i in range(len(self.columns)))


def summarize(m: PolicyAbstraction, task_ids: tuple[str, ...] | None = None,
              path: MostProbablePath | None = None) -> SummaryChart:
    """Extract agent cooperation and task sequence along the most probable path.

    A task enters an agent's cell at the step where its completion predicate
    rises (holds at step t but not at t-1); satisfactions already present in
    the initial state count as completions at t=0.  Only columns where some
    agent completed something are kept; a task appearing in several rows of
    one column is a cooperative completion.
    """
    if task_ids is None:
        task_ids = tuple(m.schema.task_completion_ids)
    else:
        task_ids = tuple(task_ids)
        for t in task_ids:
            m.schema.index_of(t)
    if path is None:
        path = most_probable_path(m)
    bit = {t: m.schema.index_of(t) for t in task_ids}
    columns = []
    for t, state in enumerate(path.states):
        y = []
        for i in range(m.n_agents):
            newly = set()
            for task in task_ids:
                now = bool(state[i] >> bit[task] & 1)
                before = (
                    bool(path.states[t - 1][i] >> bit[task] & 1) if t > 0 else False
                )
                if now and not before:
                    newly.add(task)
            y.append(frozenset(newly))
        if any(y):
            columns.append(tuple(y))
    labels = {t: m.schema.predicate(t).label or t for t in task_ids}
    return SummaryChart(tuple(columns), m.n_agents, labels)


def render_chart(chart: SummaryChart, fmt: str = "chart",
                 agent_names: tuple[str, ...] | None = None) -> str:
    """Deterministic text grid (rows = agents, columns = T1..Tk) or its CSV twin."""
    if fmt not in ("chart", "csv"):
        raise PreconditionError(f"unknown chart format {fmt!r}")
    if agent_names is None:
        agent_names = tuple(f"agent_{i}" for i in range(chart.n_agents))
    if len(agent_names) != chart.n_agents:
        raise PreconditionError(
            f"{len(agent_names)} agent names for a {chart.n_agents}-agent chart"
        )

    def cell(col: int, agent: int) -> str:
        tasks = sorted(chart.labels[t] for t in chart.columns[col][agent])
        return "+".join(tasks)

    header = ["agent"] + list(chart.column_names)
    rows = [
        [name] + [cell(c, i) for c in range(len(chart.columns))]
        for i, name in enumerate(agent_names)
    ]
    if fmt == "csv":
        return "\n".join(",".join(row) for row in [header] + rows) + "\n"
    widths = [
        max(len(r[c]) for r in [header] + rows) for c in range(len(header))
    ]
    out = []
    for row in [header] + rows:
        out.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"
