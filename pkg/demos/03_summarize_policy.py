"""Summarize a policy as its most probable task sequence.

The most probable initial-to-goal path is a shortest path under -log(p) edge
weights; scanning it for rising task-completion flags yields a chart whose
columns are completion steps and whose rows are agents.  A task shared by two
rows of one column is a cooperation.
"""

from mapex import (
    build_abstraction,
    get_domain,
    most_probable_path,
    render_chart,
    simulate,
    summarize,
)

domain = get_domain("sr3")
m = build_abstraction(simulate("sr3", episodes=200, seed=42), domain.schema)

path = most_probable_path(m)
print(f"most probable path: {len(path)} states, probability {path.probability:.4f}")
for state, action in zip(path.states, path.actions):
    print(f"  {state} --{action}-->")
print(f"  {path.states[-1]}  (goal)\n")

chart = summarize(m, path=path)
names = tuple(a.name for a in domain.agents)
print(render_chart(chart, "chart", names))
print("same chart as CSV:\n")
print(render_chart(chart, "csv", names))
