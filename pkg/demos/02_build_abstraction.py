"""Abstract sampled behavior into a joint-state transition model.

Each agent's concrete state collapses to a bit vector over the domain's
feature predicates; transitions are counted and normalized so a path's edge
product equals the empirical probability of that action sequence.  The model
round-trips losslessly through its checksummed file format.
"""

import tempfile
from pathlib import Path

from mapex import build_abstraction, get_domain, load_abstraction, save_abstraction, simulate

domain = get_domain("sr3")
m = build_abstraction(simulate("sr3", episodes=200, seed=42), domain.schema)

print(f"{m.n_states} abstract states, {m.n_transitions} transitions")
print(f"initial state: {m.initial_state} (bits per agent, LSB = first predicate)")
print(f"goal states: {len(m.goal_states())}\n")

print("transitions out of the initial state:")
for e in m.out_edges[m.initial_state]:
    print(f"  {e.source} --{e.action}--> {e.target}  count={e.count}  p={e.probability:.3f}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "sr3.mmdp"
    save_abstraction(m, path)
    reloaded = load_abstraction(path, domain.schema)
    print(f"\nsaved {path.stat().st_size} bytes; reload equal: {reloaded == m}")
