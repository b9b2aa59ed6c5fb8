"""Ask when / why-not / what questions about agent behavior.

Every query runs in two flavors: the baseline (norf) considers all agents and
features, while the relevancy-filtered variant (withrf) restricts attention to
the agents, features, and cooperation combinations registered for the queried
actions.  The filtered answers surface cooperation requirements the baseline
misses, and stay tractable as teams grow.
"""

from mapex import build_abstraction, get_domain, simulate
from mapex.nlg import PhraseMap, format_dnf, render
from mapex.query import Query, answer_what, answer_when, answer_whynot

domain = get_domain("sr3")
m = build_abstraction(simulate("sr3", episodes=200, seed=42), domain.schema)
phrases = PhraseMap.from_domain(domain)

print("When does the UAV rescue the victim?")
for method in ("norf", "withrf"):
    q = Query(kind="when", agents=("UAV",), method=method,
              actions=(("UAV", "rescue_victim"),))
    answer = answer_when(q, m, domain)
    print(f"  [{method}] {render(answer, phrases)}")
    print(f"           {format_dnf(answer)}")

print("\nWhy don't the UGVs remove the obstacle in the queried state?")
state = (1, 0, 0)  # UAV detects the victim, everyone else sees nothing
for method in ("norf", "withrf"):
    q = Query(kind="whynot", agents=("UGV_1", "UGV_2"), method=method,
              actions=(("UGV_1", "remove_obstacle"), ("UGV_2", "remove_obstacle")),
              state=state)
    print(f"  [{method}] {render(answer_whynot(q, m, domain), phrases)}")

print("\nWhat does the UAV do when it detects the victim?")
for method in ("norf", "withrf"):
    q = Query(kind="what", agents=("UAV",), method=method,
              predicates=("victim_detect",))
    print(f"  [{method}] {render(answer_what(q, m, domain), phrases)}")
