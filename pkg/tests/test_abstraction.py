import random

import pytest

from mapex import (
    PolicyAbstraction,
    build_abstraction,
    load_abstraction,
    save_abstraction,
)
from mapex.envs.base import TraceSample
from mapex.errors import (
    AbstractionFormatError,
    MultipleInitialStatesError,
    PreconditionError,
    SchemaMismatchError,
)
from oracles import recount_trace
from synth import plain_schema


def rec(*true_ids):
    return {"features": {f"f{i}": f"f{i}" in true_ids for i in range(2)}}


def sample(episode, step, state, action, nxt):
    return TraceSample(episode, step, (state,), (action,), (nxt,))


@pytest.fixture
def tiny_schema():
    return plain_schema(2, task_ids=("f1",))


class TestBuild:
    def test_single_sample(self, tiny_schema):
        m = build_abstraction([sample(0, 0, rec(), "a", rec("f0"))], tiny_schema)
        assert m.n_states == 2
        assert m.n_transitions == 1
        [edge] = m.out_edges[(0,)]
        assert edge.target == (1,)
        assert edge.count == 1
        assert edge.probability == 1.0

    def test_symmetric_split(self, tiny_schema):
        samples = [
            sample(0, 0, rec(), "a", rec("f0")),
            sample(1, 0, rec(), "a", rec("f1")),
        ]
        m = build_abstraction(samples, tiny_schema)
        probs = {e.target: e.probability for e in m.out_edges[(0,)]}
        assert probs == {(1,): 0.5, (2,): 0.5}

    def test_self_loops_recorded(self, tiny_schema):
        m = build_abstraction([sample(0, 0, rec(), "a", rec())], tiny_schema)
        [edge] = m.out_edges[(0,)]
        assert edge.source == edge.target == (0,)

    def test_empty_stream_rejected(self, tiny_schema):
        with pytest.raises(PreconditionError):
            build_abstraction([], tiny_schema)

    def test_counts_order_insensitive(self, sr3_domain, sr3_samples):
        shuffled = list(sr3_samples)
        random.Random(0).shuffle(shuffled)
        a = build_abstraction(sr3_samples, sr3_domain.schema)
        b = build_abstraction(shuffled, sr3_domain.schema)
        assert a.counts == b.counts

    def test_state_action_normalization(self, tiny_schema):
        samples = [
            sample(0, 0, rec(), "a", rec("f0")),
            sample(1, 0, rec(), "b", rec("f1")),
        ]
        m = build_abstraction(samples, tiny_schema, normalization="state-action")
        probs = {(e.action, e.target): e.probability for e in m.out_edges[(0,)]}
        assert probs == {(("a",), (1,)): 1.0, (("b",), (2,)): 1.0}


class TestInitialStates:
    def test_differing_initials_rejected(self, tiny_schema):
        samples = [
            sample(0, 0, rec(), "a", rec("f1")),
            sample(1, 0, rec("f0"), "a", rec("f1")),
        ]
        with pytest.raises(MultipleInitialStatesError):
            build_abstraction(samples, tiny_schema)

    def test_virtual_init_keeps_distribution(self, tiny_schema):
        samples = [
            sample(0, 0, rec(), "a", rec("f1")),
            sample(1, 0, rec("f0"), "a", rec("f1")),
            sample(2, 0, rec(), "a", rec("f1")),
        ]
        m = build_abstraction(samples, tiny_schema, virtual_init=True)
        assert m.has_virtual_init
        assert m.initial_distribution() == {(0,): 2 / 3, (1,): 1 / 3}


class TestInvariants:
    def test_soundness_and_recount_oracle(self, sr3_domain, sr3_abstraction,
                                          sr3_trace_path):
        # independent recount straight off the trace file
        counts, initials = recount_trace(sr3_trace_path, sr3_domain.schema)
        assert dict(counts) == sr3_abstraction.counts
        assert dict(initials) == sr3_abstraction.initial_counts
        # every stored transition is witnessed at least once
        assert all(c >= 1 for c in sr3_abstraction.counts.values())

    def test_probability_mass_sums_to_one(self, sr3_abstraction):
        for s in sr3_abstraction.states:
            edges = sr3_abstraction.out_edges[s]
            if edges:
                assert abs(sum(e.probability for e in edges) - 1.0) <= 1e-9

    def test_state_space_bound(self, sr3_abstraction):
        bound = (2 ** sr3_abstraction.schema.n_features) ** sr3_abstraction.n_agents
        assert sr3_abstraction.n_states <= bound

    def test_zero_count_rejected(self, tiny_schema):
        with pytest.raises(PreconditionError):
            PolicyAbstraction(tiny_schema, 1, {((0,), ("a",), (1,)): 0}, (0,))

    def test_empty_rejected(self, tiny_schema):
        with pytest.raises(PreconditionError):
            PolicyAbstraction(tiny_schema, 1, {}, (0,))


class TestFiles:
    def test_roundtrip(self, tmp_path, sr3_domain, sr3_abstraction):
        path = tmp_path / "m.mmdp"
        save_abstraction(sr3_abstraction, path)
        loaded = load_abstraction(path, sr3_domain.schema)
        assert loaded == sr3_abstraction
        assert loaded.states == sr3_abstraction.states

    def test_file_bytes_stable(self, tmp_path, sr3_abstraction):
        p1, p2 = tmp_path / "a.mmdp", tmp_path / "b.mmdp"
        save_abstraction(sr3_abstraction, p1)
        save_abstraction(sr3_abstraction, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_file_fails_checksum(self, tmp_path, sr3_domain,
                                           sr3_abstraction):
        path = tmp_path / "m.mmdp"
        save_abstraction(sr3_abstraction, path)
        lines = path.read_text().splitlines()
        truncated = tmp_path / "bad.mmdp"
        truncated.write_text("\n".join(lines[:-5] + [lines[-1]]) + "\n")
        with pytest.raises(AbstractionFormatError):
            load_abstraction(truncated, sr3_domain.schema)

    def test_corrupted_line_fails_checksum(self, tmp_path, sr3_domain,
                                           sr3_abstraction):
        path = tmp_path / "m.mmdp"
        save_abstraction(sr3_abstraction, path)
        lines = path.read_text().splitlines()
        middle = len(lines) // 2
        lines[middle] = lines[middle] + "0"
        bad = tmp_path / "bad.mmdp"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(AbstractionFormatError):
            load_abstraction(bad, sr3_domain.schema)

    def test_wrong_schema_rejected(self, tmp_path, sr3_abstraction):
        path = tmp_path / "m.mmdp"
        save_abstraction(sr3_abstraction, path)
        with pytest.raises(SchemaMismatchError):
            load_abstraction(path, plain_schema(6))

    def test_version_rejected(self, tmp_path, sr3_domain, sr3_abstraction):
        path = tmp_path / "m.mmdp"
        save_abstraction(sr3_abstraction, path)
        text = path.read_text().replace("mapex-mmdp 1", "mapex-mmdp 2", 1)
        body, _, _ = text.rpartition("checksum ")
        import hashlib
        digest = hashlib.sha256(body.encode()).hexdigest()
        bad = tmp_path / "v2.mmdp"
        bad.write_text(body + f"checksum {digest}\n")
        with pytest.raises(AbstractionFormatError):
            load_abstraction(bad, sr3_domain.schema)
