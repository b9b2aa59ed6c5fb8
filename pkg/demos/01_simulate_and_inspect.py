"""Run the scripted search-and-rescue team and peek at the raw trajectory.

Three agents (one UAV, two UGVs) share a 3x6 grid: the victim needs the UAV
plus one UGV, the obstacle needs both UGVs, and the fire sits behind the
obstacle.  Every sample is a (state, joint action, next state) triple.
"""

from mapex import simulate

samples = list(simulate("sr3", episodes=3, seed=42))
print(f"collected {len(samples)} samples over 3 episodes\n")

for s in samples[:6]:
    positions = [tuple(rec["pos"]) for rec in s.joint_concrete_state]
    print(f"episode {s.episode_id} step {s.step}: "
          f"positions={positions} actions={s.joint_action}")

final = samples[-1].next_joint_concrete_state
print("\nfinal completion flags per agent:")
for name, rec in zip(("UAV", "UGV_1", "UGV_2"), final):
    done = [task for task, flag in rec["done"].items() if flag]
    print(f"  {name}: {done or 'nothing'}")
