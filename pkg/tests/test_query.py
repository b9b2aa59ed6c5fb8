import random

import pytest

from mapex import PolicyAbstraction, variable_index
from mapex.query import (
    Query,
    answer_what,
    answer_when,
    answer_whynot,
    compatible,
    relevancy_filter,
)
from mapex.errors import (
    ContradictionNotice,
    PreconditionError,
    TooManyVariablesError,
    UnknownStateError,
)
from synth import plain_schema

RESCUE = "rescue_victim"
REMOVE = "remove_obstacle"
FIGHT = "fight_fire"


def when_query(agent, action, method):
    return Query(kind="when", agents=(agent,), method=method,
                 actions=((agent, action),))


class TestRelevancyFilter:
    def test_uav_rescue_worked_example(self, sr3_domain):
        g, f, sets = relevancy_filter(
            [("UAV", RESCUE)], sr3_domain.relevance
        )
        assert g == {"UAV", "UGV_1", "UGV_2"}
        assert f == {"victim_detect", "victim_complete"}
        assert set(sets) == {
            frozenset({("UAV", RESCUE), ("UGV_1", RESCUE)}),
            frozenset({("UAV", RESCUE), ("UGV_2", RESCUE)}),
        }

    def test_solo_task(self, sr3_domain):
        g, f, sets = relevancy_filter([("UAV", FIGHT)], sr3_domain.relevance)
        assert g == {"UAV"}
        assert sets == (frozenset({("UAV", FIGHT)}),)

    def test_empty_query(self, sr3_domain):
        g, f, sets = relevancy_filter([], sr3_domain.relevance)
        assert g == frozenset() and f == frozenset() and sets == ()

    def test_union_over_multiple_actions(self, sr3_domain):
        g, f, sets = relevancy_filter(
            [("UGV_1", REMOVE), ("UGV_2", REMOVE)], sr3_domain.relevance
        )
        assert g == {"UGV_1", "UGV_2"}
        assert f == {"obstacle_detect", "obstacle_complete"}
        assert sets == (
            frozenset({("UGV_1", REMOVE), ("UGV_2", REMOVE)}),
        )


class TestCompatible:
    def test_norf_containment(self, sr3_domain):
        action = (RESCUE, RESCUE, "move")
        assert compatible(action, frozenset({("UAV", RESCUE)}), sr3_domain)

    def test_withrf_requires_a_full_set(self, sr3_domain):
        sets = [
            frozenset({("UAV", RESCUE), ("UGV_1", RESCUE)}),
            frozenset({("UAV", RESCUE), ("UGV_2", RESCUE)}),
        ]
        assert not compatible((RESCUE, "move", "move"), sets, sr3_domain)
        assert compatible((RESCUE, "move", RESCUE), sets, sr3_domain)

    def test_empty_requirement_is_vacuous(self, sr3_domain):
        assert compatible(("move", "move", "move"), frozenset(), sr3_domain)
        assert not compatible(("move", "move", "move"), [], sr3_domain)


class TestAnswerWhen:
    def test_sr3_withrf_dnf(self, sr3_domain, sr3_abstraction):
        answer = answer_when(
            when_query("UAV", RESCUE, "withrf"), sr3_abstraction, sr3_domain
        )
        uav = sr3_domain.agent_id("UAV")
        ugv1 = sr3_domain.agent_id("UGV_1")
        ugv2 = sr3_domain.agent_id("UGV_2")
        assert answer.dnf.clauses == (
            frozenset({(uav, "victim_detect", True), (ugv1, "victim_detect", True)}),
            frozenset({(uav, "victim_detect", True), (ugv2, "victim_detect", True)}),
        )

    def test_withrf_target_subset_of_norf(self, sr3_domain, sr3_abstraction):
        cases = [("UAV", RESCUE), ("UGV_1", REMOVE), ("UAV", FIGHT),
                 ("UGV_2", RESCUE)]
        for agent, action in cases:
            norf = answer_when(when_query(agent, action, "norf"),
                               sr3_abstraction, sr3_domain)
            withrf = answer_when(when_query(agent, action, "withrf"),
                                 sr3_abstraction, sr3_domain)
            assert withrf.target_states <= norf.target_states
            assert withrf.space.n_variables <= norf.space.n_variables

    def test_withrf_literals_scoped_to_relevance(self, sr3_domain, sr3_abstraction):
        answer = answer_when(
            when_query("UAV", RESCUE, "withrf"), sr3_abstraction, sr3_domain
        )
        g, f, _ = relevancy_filter([("UAV", RESCUE)], sr3_domain.relevance)
        for clause in answer.dnf.clauses:
            for agent, pred, _ in clause:
                assert agent.display_name in g
                assert pred in f

    def test_action_enabled_everywhere_renders_always(self):
        # one agent, one action, enabled in every state -> tautology
        schema = plain_schema(1, task_ids=("f0",))
        from mapex import AgentSpec, ActionPhrases, DomainDefinition
        from mapex.domain import RelevanceEntry, RelevanceKnowledge
        domain = DomainDefinition(
            id="solo",
            agents=(AgentSpec("A", ("go",)),),
            schema=schema,
            action_phrases={"go": ActionPhrases("go", "goes")},
            relevance=RelevanceKnowledge({
                ("A", "go"): RelevanceEntry(
                    frozenset({"A"}), frozenset({"f0"}),
                    (frozenset({("A", "go")}),),
                ),
            }),
        )
        m = PolicyAbstraction(schema, 1, {
            ((0,), ("go",), (1,)): 1,
            ((1,), ("go",), (1,)): 1,
        }, (0,))
        answer = answer_when(
            Query(kind="when", agents=("A",), method="norf",
                  actions=(("A", "go"),)),
            m, domain,
        )
        assert answer.dnf.is_always

    def test_no_occurrence_gives_never(self, sr3_domain, sr3_abstraction):
        answer = answer_when(
            when_query("UGV_1", FIGHT, "norf"), sr3_abstraction, sr3_domain
        )
        assert answer.dnf.is_never
        assert not answer.target_states

    def test_dnf_faithful_on_random_two_agent_mmdps(self):
        # brute-force indicator oracle over all 16 assignments of a 2x2 space
        from mapex import AgentSpec, ActionPhrases, DomainDefinition
        from mapex.domain import RelevanceEntry, RelevanceKnowledge
        schema = plain_schema(2, task_ids=("f1",))
        domain = DomainDefinition(
            id="pair",
            agents=(AgentSpec("A", ("x", "y")), AgentSpec("B", ("x", "y"))),
            schema=schema,
            action_phrases={"x": ActionPhrases("x", "xes"),
                            "y": ActionPhrases("y", "ys")},
            relevance=RelevanceKnowledge({
                (a, act): RelevanceEntry(
                    frozenset({a}), frozenset({"f0"}),
                    (frozenset({(a, act)}),),
                )
                for a in ("A", "B") for act in ("x", "y")
            }),
        )
        rng = random.Random(5)
        for trial in range(25):
            states = rng.sample([(i, j) for i in range(4) for j in range(4)],
                                rng.randint(2, 8))
            counts = {}
            for s in states:
                for _ in range(rng.randint(1, 2)):
                    a = (rng.choice("xy"), rng.choice("xy"))
                    t = states[rng.randrange(len(states))]
                    counts[(s, a, t)] = counts.get((s, a, t), 0) + 1
            m = PolicyAbstraction(schema, 2, counts, states[0])
            query = Query(kind="when", agents=("A",), method="norf",
                          actions=(("A", "x"),))
            answer = answer_when(query, m, domain)
            # independent recomputation of V / V-bar and the minterm map
            v, vbar = set(), set()
            for s in m.states:
                for act in m.enabled_actions(s):
                    (v if act[0] == "x" else vbar).add(s)
            vbar -= v

            def minterm(s):
                return s[0] | (s[1] << 2)

            for s in v:
                assert any(
                    (minterm(s) & i.care_mask) == i.values
                    for i in _implicants(answer)
                ), "DNF must accept every target state"
            for s in vbar:
                if minterm(s) in {minterm(x) for x in v}:
                    continue
                assert not any(
                    (minterm(s) & i.care_mask) == i.values
                    for i in _implicants(answer)
                ), "DNF must reject every non-target state"


def _implicants(answer):
    """Rebuild (care, values) pairs from the literal clauses."""
    out = []
    for clause in answer.dnf.clauses:
        care = values = 0
        for agent, pred, polarity in clause:
            v = variable_index(
                agent, pred, answer.space.agent_order, answer.space.feature_order
            )
            care |= 1 << v
            if polarity:
                values |= 1 << v
        out.append(type("I", (), {"care_mask": care, "values": values})())
    if not out and answer.dnf.is_always:
        out.append(type("I", (), {"care_mask": 0, "values": 0})())
    return out


class TestAnswerWhynot:
    def test_sr3_withrf_obstacle(self, sr3_domain, sr3_abstraction):
        query = Query(
            kind="whynot", agents=("UGV_1", "UGV_2"), method="withrf",
            actions=(("UGV_1", REMOVE), ("UGV_2", REMOVE)),
            state=(1, 0, 0),
        )
        answer = answer_whynot(query, sr3_abstraction, sr3_domain)
        ugv1 = sr3_domain.agent_id("UGV_1")
        ugv2 = sr3_domain.agent_id("UGV_2")
        assert answer.dnf.clauses == (
            frozenset({(ugv1, "obstacle_detect", False),
                       (ugv2, "obstacle_detect", False)}),
        )

    def test_dnf_separates_query_state_from_nontargets(self, sr3_domain,
                                                       sr3_abstraction):
        query = Query(
            kind="whynot", agents=("UGV_1", "UGV_2"), method="withrf",
            actions=(("UGV_1", REMOVE), ("UGV_2", REMOVE)),
            state=(1, 0, 0),
        )
        answer = answer_whynot(query, sr3_abstraction, sr3_domain)
        imps = _implicants(answer)
        schema = sr3_abstraction.schema
        sq_minterm = answer.space.minterm((1, 0, 0), schema)
        assert any((sq_minterm & i.care_mask) == i.values for i in imps)
        one_minterms = {sq_minterm}
        for s in answer.nontarget_states:
            mt = answer.space.minterm(s, schema)
            if mt in one_minterms:
                continue
            assert not any((mt & i.care_mask) == i.values for i in imps)

    def test_unknown_state(self, sr3_domain, sr3_abstraction):
        query = Query(
            kind="whynot", agents=("UGV_1", "UGV_2"), method="withrf",
            actions=(("UGV_1", REMOVE), ("UGV_2", REMOVE)),
            state=(63, 63, 63),
        )
        with pytest.raises(UnknownStateError):
            answer_whynot(query, sr3_abstraction, sr3_domain)

    def test_contradiction_when_action_taken_here(self, sr3_domain,
                                                  sr3_abstraction):
        # find the abstract state where both UGVs do remove the obstacle
        removal_state = next(
            s for s in sr3_abstraction.states
            if any(a[1] == REMOVE and a[2] == REMOVE
                   for a in sr3_abstraction.enabled_actions(s))
        )
        query = Query(
            kind="whynot", agents=("UGV_1", "UGV_2"), method="withrf",
            actions=(("UGV_1", REMOVE), ("UGV_2", REMOVE)),
            state=removal_state,
        )
        with pytest.raises(ContradictionNotice):
            answer_whynot(query, sr3_abstraction, sr3_domain)

    def test_never_taken_action_gives_tautology(self, sr3_domain,
                                                sr3_abstraction):
        query = Query(
            kind="whynot", agents=("UGV_1",), method="norf",
            actions=(("UGV_1", FIGHT),), state=(0, 0, 0),
        )
        answer = answer_whynot(query, sr3_abstraction, sr3_domain)
        assert answer.dnf.is_always
        assert not answer.nontarget_states


class TestAnswerWhat:
    def test_sr3_withrf_most_likely(self, sr3_domain, sr3_abstraction):
        query = Query(kind="what", agents=("UAV",), method="withrf",
                      predicates=("victim_detect",))
        answer = answer_what(query, sr3_abstraction, sr3_domain)
        assert answer.actions == {"UAV": RESCUE}

    def test_sr3_norf_action_list(self, sr3_domain, sr3_abstraction):
        query = Query(kind="what", agents=("UAV",), method="norf",
                      predicates=("victim_detect",))
        answer = answer_what(query, sr3_abstraction, sr3_domain)
        assert set(answer.actions["UAV"]) == {RESCUE, "move", "wait"}

    def test_no_occurrence(self, sr3_domain, sr3_abstraction):
        # the UAV never removes the obstacle, so no state satisfies this
        query = Query(kind="what", agents=("UAV",), method="withrf",
                      predicates=("obstacle_complete",))
        answer = answer_what(query, sr3_abstraction, sr3_domain)
        assert answer.no_occurrence

    def test_weighted_frequency_fixture(self):
        # alpha occurs with transition weight 3, beta with weight 1
        from mapex import AgentSpec, ActionPhrases, DomainDefinition
        from mapex.domain import RelevanceEntry, RelevanceKnowledge
        schema = plain_schema(2, task_ids=("f1",))
        domain = DomainDefinition(
            id="weights",
            agents=(AgentSpec("A", ("alpha", "beta")),),
            schema=schema,
            action_phrases={"alpha": ActionPhrases("alpha", "alphas"),
                            "beta": ActionPhrases("beta", "betas")},
            relevance=RelevanceKnowledge({
                ("A", "alpha"): RelevanceEntry(
                    frozenset({"A"}), frozenset({"f0"}),
                    (frozenset({("A", "alpha")}),)),
                ("A", "beta"): RelevanceEntry(
                    frozenset({"A"}), frozenset({"f0"}),
                    (frozenset({("A", "beta")}),)),
            }),
        )
        m = PolicyAbstraction(schema, 1, {
            ((1,), ("alpha",), (1,)): 3,
            ((1,), ("beta",), (3,)): 1,
        }, (1,))
        query = Query(kind="what", agents=("A",), method="withrf",
                      predicates=("f0",))
        assert answer_what(query, m, domain).actions == {"A": "alpha"}
        # tie -> lexicographically smaller action id
        m2 = PolicyAbstraction(schema, 1, {
            ((1,), ("alpha",), (1,)): 2,
            ((1,), ("beta",), (3,)): 2,
        }, (1,))
        assert answer_what(query, m2, domain).actions == {"A": "alpha"}


class TestQueryValidation:
    def test_unknown_kind(self, sr3_domain, sr3_abstraction):
        with pytest.raises(PreconditionError):
            Query(kind="how", agents=("UAV",)).validate(sr3_domain)

    def test_action_not_in_alphabet(self, sr3_domain):
        q = Query(kind="when", agents=("UAV",), actions=(("UAV", REMOVE),))
        with pytest.raises(PreconditionError):
            q.validate(sr3_domain)

    def test_whynot_requires_state(self, sr3_domain):
        q = Query(kind="whynot", agents=("UAV",), actions=(("UAV", RESCUE),))
        with pytest.raises(PreconditionError):
            q.validate(sr3_domain)

    def test_empty_agent_list_rejected(self, sr3_domain):
        with pytest.raises(PreconditionError):
            Query(kind="what", agents=(), predicates=("victim_detect",)).validate(
                sr3_domain
            )

    def test_kind_mismatch_rejected(self, sr3_domain, sr3_abstraction):
        q = Query(kind="what", agents=("UAV",), predicates=("victim_detect",))
        with pytest.raises(PreconditionError):
            answer_when(q, sr3_abstraction, sr3_domain)

    def test_norf_guardrail_propagates(self):
        from mapex import build_abstraction, get_domain, simulate
        domain = get_domain("lbf9")
        m = build_abstraction(simulate("lbf9", episodes=5, seed=1), domain.schema)
        q = Query(kind="when", agents=("F_1",), method="norf",
                  actions=(("F_1", "collect_food_1"),))
        with pytest.raises(TooManyVariablesError):
            answer_when(q, m, domain)


class TestWhatScaling:
    def test_what_query_fast_on_thousand_states(self):
        # runtime is a scan over states and their enabled actions, so even a
        # thousand-state model answers well under a second
        import time
        from mapex import ActionPhrases, AgentSpec, DomainDefinition
        from mapex.domain import RelevanceEntry, RelevanceKnowledge
        from synth import big_layered_abstraction, plain_schema
        schema = plain_schema(10, task_ids=("f9",))
        domain = DomainDefinition(
            id="big",
            agents=(AgentSpec("A", ("a", "b")), AgentSpec("B", ("a", "b"))),
            schema=schema,
            action_phrases={"a": ActionPhrases("a", "as"),
                            "b": ActionPhrases("b", "bs")},
            relevance=RelevanceKnowledge({
                (agent, act): RelevanceEntry(
                    frozenset({agent}), frozenset({"f0"}),
                    (frozenset({(agent, act)}),),
                )
                for agent in ("A", "B") for act in ("a", "b")
            }),
        )
        m = big_layered_abstraction(1000)
        q = Query(kind="what", agents=("A",), method="withrf",
                  predicates=("f0",))
        start = time.perf_counter()
        answer_what(q, m, domain)
        assert time.perf_counter() - start < 1.0
