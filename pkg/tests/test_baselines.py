"""Tests for the first-sense, most-frequent-sense and maximum-relatedness baselines."""

import numpy as np
import pytest

from src.baselines import Baseline, disambiguate_baseline_pedersen, run_baseline
from src.corpus import parse_dataset
from src.heuristics import HeuristicStore
from src.models import POS, Measure, Provenance
from src.similarity import Similarity, SimilarityConfig
from tests.conftest import make_sentence


@pytest.fixture(scope="module")
def path_sim(graph):
    return Similarity(graph, None, SimilarityConfig(measure=Measure.PATH))


def _by_id(predictions):
    return {p.instance_id: p.synset for p in predictions}


class TestPedersen:
    def test_worked_example(self, graph, path_sim, bank_sentence, mini_wn):
        chosen = _by_id(disambiguate_baseline_pedersen(bank_sentence, graph, path_sim))
        assert chosen == {"d000.s000.t000": mini_wn.sid("walk_feet"), "d000.s000.t001": mini_wn.sid("institution")}

    def test_threshold_drops_weak_links(self, graph, path_sim, bank_sentence, mini_wn):
        chosen = _by_id(disambiguate_baseline_pedersen(bank_sentence, graph, path_sim, threshold=0.5))
        # nothing clears the threshold: every score is zero and the first sense wins
        assert chosen["d000.s000.t001"] == mini_wn.sid("slope")

    def test_window(self, graph, path_sim, mini_wn):
        sentence = make_sentence("x.s0", 0, [
            ("bank", "n", "x.t0"), ("plant", "n", "x.t1"), ("river", "n", "x.t2"), ("river", "n", "x.t3"),
        ])
        whole = _by_id(disambiguate_baseline_pedersen(sentence, graph, path_sim))
        near = _by_id(disambiguate_baseline_pedersen(sentence, graph, path_sim, window=1))
        assert whole["x.t0"] == mini_wn.sid("slope")
        assert near["x.t0"] == mini_wn.sid("depository")

    def test_matches_exhaustive_scoring(self, graph, path_sim):
        lexicon = [("bank", "n"), ("walk", "v"), ("plant", "n"), ("faculty", "n"), ("money", "n")]
        rng = np.random.default_rng(8)
        for n in range(50):
            picks = [lexicon[i] for i in rng.integers(0, len(lexicon), size=3)]
            sentence = make_sentence(f"x.s{n}", 0, [(l, p, f"x.s{n}.t{i}") for i, (l, p) in enumerate(picks)])
            senses = [graph.senses_of(l, POS.parse(p)) for l, p in picks]
            expected = {}
            for i, own in enumerate(senses):
                totals = [
                    sum(max(path_sim(s.synset, t.synset) for t in other)
                        for j, other in enumerate(senses) if j != i)
                    for s in own
                ]
                expected[f"x.s{n}.t{i}"] = own[int(np.argmax(totals))].synset
            assert _by_id(disambiguate_baseline_pedersen(sentence, graph, path_sim)) == expected


class TestRunBaseline:
    def test_first_sense(self, graph, dataset_path, mini_wn):
        result = run_baseline(Baseline.WN1ST, parse_dataset(dataset_path), graph)
        chosen = _by_id(result.predictions)
        assert len(chosen) == 8
        assert result.skipped == ["mini.d001.s000.t003"]
        assert chosen["mini.d000.s000.t001"] == mini_wn.sid("slope")
        assert {p.provenance for p in result.predictions} == {Provenance.BASELINE}

    def test_most_frequent_sense(self, graph, dataset_path, mini_wn):
        store = HeuristicStore({mini_wn.key("institution", "bank"): 5, mini_wn.key("ability", "faculty"): 2})
        chosen = _by_id(run_baseline(Baseline.MFS, parse_dataset(dataset_path), graph, store).predictions)
        assert chosen["mini.d000.s000.t001"] == mini_wn.sid("institution")
        assert chosen["mini.d001.s000.t000"] == mini_wn.sid("ability")
        assert chosen["mini.d001.s000.t001"] == mini_wn.sid("industrial_plant")

    def test_pedersen_over_documents(self, graph, dataset_path, path_sim):
        result = run_baseline(Baseline.PEDERSEN, parse_dataset(dataset_path), graph, similarity=path_sim,
                              pos_of_interest=frozenset({POS.NOUN}))
        ids = [p.instance_id for p in result.predictions]
        assert ids == sorted(ids)
        assert "mini.d000.s000.t000" not in ids
        assert result.skipped == ["mini.d001.s000.t003"]

    def test_pedersen_needs_similarity(self, graph, dataset_path):
        with pytest.raises(ValueError):
            run_baseline(Baseline.PEDERSEN, parse_dataset(dataset_path), graph)
