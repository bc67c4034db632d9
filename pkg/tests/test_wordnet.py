"""Tests for the WordNet loader and graph queries."""

import itertools
import os
import shutil

import numpy as np
import pytest

from src.models import POS, DanglingReferenceError, UnsupportedTaxonomyError, WordNetFormatError
from src.wordnet import (
    ALL_RELATIONS, TAXONOMY_EDGES, WordNetGraph, lcs, load_wordnet, senses_of, shortest_path_len, virtual_root,
)
from tests.conftest import MINI_WORDNET, SynsetSpec, write_wordnet


class TestLoad:
    def test_sense_counts(self, graph):
        assert len(graph.senses_of("bank", POS.NOUN)) == 3
        assert len(graph.senses_of("walk", POS.VERB)) == 2
        assert len(graph.senses_of("faculty", POS.NOUN)) == 2

    def test_senses_ranked_in_index_order(self, graph, mini_wn):
        senses = senses_of(graph, "plant", POS.NOUN)
        assert [s.sense_number for s in senses] == [1, 2]
        assert senses[0].synset == mini_wn.sid("industrial_plant")
        assert "industrial labor" in graph.synset(senses[0].synset).gloss

    def test_absent_lemma_is_empty(self, graph):
        assert senses_of(graph, "zzzz-not-a-word", POS.NOUN) == []

    def test_sense_numbers_have_no_gaps(self, graph):
        for (lemma, pos), entries in graph.index.items():
            assert [e.sense_number for e in entries] == list(range(1, len(entries) + 1))

    def test_sense_keys_from_index_sense(self, graph, mini_wn):
        entry = graph.senses_of("bank", POS.NOUN)[1]
        assert entry.sense_key == mini_wn.key("institution", "bank")
        assert graph.sense_by_key(entry.sense_key) == entry
        assert graph.synset_of_key(entry.sense_key) == mini_wn.sid("institution")
        assert graph.synset_of_key("nothing%1:00:00::") is None

    def test_multiword_lemma_lookup(self, graph):
        assert len(graph.senses_of("physical entity", POS.NOUN)) == 1
        assert len(graph.senses_of("Physical_Entity", POS.NOUN)) == 1

    def test_satellite_stored_as_adjective(self, graph, mini_wn):
        sid = mini_wn.sid("abrupt")
        assert sid.pos == POS.ADJ
        synset = graph.synset(sid)
        assert synset.is_satellite
        assert synset.sense_keys == ("abrupt%5:00:00:steep:00",)

    def test_relations_resolve(self, graph):
        for synset in graph.synsets.values():
            for _, target in synset.relations:
                assert target in graph.synsets

    def test_constructed_keys_without_index_sense(self, tmp_path, mini_wn):
        built = write_wordnet(str(tmp_path), with_sense_index=False)
        constructed = load_wordnet(built.directory)
        assert constructed.senses_of("bank", POS.NOUN)[2].sense_key == mini_wn.key("depository", "bank")
        assert constructed.synset(built.sid("abrupt")).sense_keys == ("abrupt%5:00:00:steep:00",)

    def test_missing_file(self, tmp_path, mini_wn):
        for name in os.listdir(mini_wn.directory):
            shutil.copy(os.path.join(mini_wn.directory, name), tmp_path / name)
        os.remove(tmp_path / "data.verb")
        with pytest.raises(FileNotFoundError):
            load_wordnet(str(tmp_path))

    def test_malformed_line_reports_location(self, tmp_path, mini_wn):
        for name in os.listdir(mini_wn.directory):
            shutil.copy(os.path.join(mini_wn.directory, name), tmp_path / name)
        with open(tmp_path / "data.adv", "a", encoding="utf-8") as f:
            f.write("00099999 02 r zz | broken\n")
        with pytest.raises(WordNetFormatError) as excinfo:
            load_wordnet(str(tmp_path))
        assert excinfo.value.line == 4
        assert excinfo.value.path.endswith("data.adv")

    def test_dangling_reference(self, tmp_path):
        built = write_wordnet(str(tmp_path))
        with open(os.path.join(built.directory, "data.verb"), "a", encoding="utf-8") as f:
            f.write("00077777 30 v 01 stroll 0 001 @ 00012345 v 0000 | walk leisurely  \n")
        with pytest.raises(DanglingReferenceError):
            load_wordnet(built.directory)

    def test_hypernym_on_adjective_rejected(self, tmp_path):
        specs = list(MINI_WORDNET) + [SynsetSpec("sharp", "a", ["sharp"], ["steep"], gloss="pointed")]
        built = write_wordnet(str(tmp_path), specs)
        with pytest.raises(WordNetFormatError):
            load_wordnet(built.directory)


class TestTaxonomy:
    def test_depth_counts_nodes_from_virtual_root(self, graph, mini_wn):
        assert graph.depth(virtual_root(POS.NOUN)) == 1
        assert graph.depth(mini_wn.sid("entity")) == 2
        assert graph.depth(mini_wn.sid("slope")) == 6
        assert graph.depth(mini_wn.sid("depository")) == 7
        assert graph.depth(mini_wn.sid("walk_feet")) == 3

    def test_max_depth(self, graph):
        assert graph.max_depth(POS.NOUN) == 7
        assert graph.max_depth(POS.VERB) == 3
        with pytest.raises(UnsupportedTaxonomyError):
            graph.max_depth(POS.ADJ)

    def test_ancestors_include_self_and_root(self, graph, mini_wn):
        ancestors = graph.ancestors(mini_wn.sid("river"))
        assert mini_wn.sid("river") in ancestors
        assert mini_wn.sid("geological_formation") in ancestors
        assert virtual_root(POS.NOUN) in ancestors
        assert mini_wn.sid("abstraction") not in ancestors

    def test_lcs_reflexive(self, graph, mini_wn):
        x = mini_wn.sid("slope")
        assert lcs(graph, x, x) == x

    def test_lcs_of_child_and_parent(self, graph, mini_wn):
        assert lcs(graph, mini_wn.sid("building"), mini_wn.sid("artifact")) == mini_wn.sid("artifact")

    def test_lcs_deepest_shared_ancestor(self, graph, mini_wn):
        assert lcs(graph, mini_wn.sid("slope"), mini_wn.sid("river")) == mini_wn.sid("geological_formation")
        assert lcs(graph, mini_wn.sid("depository"), mini_wn.sid("river")) == mini_wn.sid("object")

    def test_lcs_matches_exhaustive_intersection(self, graph):
        nouns = [sid for sid in graph.synsets if sid.pos == POS.NOUN]
        for a, b in itertools.combinations(nouns, 2):
            common = graph.ancestors(a) & graph.ancestors(b)
            deepest = max(graph.depth(s) for s in common)
            assert graph.depth(lcs(graph, a, b)) == deepest
            assert graph.depth(lcs(graph, a, b)) <= min(graph.depth(a), graph.depth(b))

    def test_verb_roots_meet_at_virtual_root(self, graph, mini_wn):
        assert lcs(graph, mini_wn.sid("walk_feet"), mini_wn.sid("walk_with")) == virtual_root(POS.VERB)

    def test_lcs_cross_pos_unsupported(self, graph, mini_wn):
        with pytest.raises(UnsupportedTaxonomyError):
            lcs(graph, mini_wn.sid("walk_feet"), mini_wn.sid("slope"))
        with pytest.raises(UnsupportedTaxonomyError):
            lcs(graph, mini_wn.sid("steep"), mini_wn.sid("quick"))


def _brute_force_distance(graph: WordNetGraph, a, b, edges) -> float:
    """Length of the shortest simple path, enumerating every simple path from a."""
    neighbours = {}
    for sid, synset in graph.synsets.items():
        for rel, target in synset.relations:
            if rel in edges:
                neighbours.setdefault(sid, set()).add(target)
                neighbours.setdefault(target, set()).add(sid)
    best = np.inf

    def walk(node, seen, length):
        nonlocal best
        if length >= best:
            return
        if node == b:
            best = length
            return
        for nxt in neighbours.get(node, ()):
            if nxt not in seen:
                walk(nxt, seen | {nxt}, length + 1)

    walk(a, {a}, 0)
    return best


class TestShortestPath:
    def test_identity(self, graph, mini_wn):
        assert shortest_path_len(graph, mini_wn.sid("slope"), mini_wn.sid("slope")) == 0

    def test_adjacent(self, graph, mini_wn):
        assert shortest_path_len(graph, mini_wn.sid("slope"), mini_wn.sid("geological_formation")) == 1

    def test_siblings(self, graph, mini_wn):
        assert shortest_path_len(graph, mini_wn.sid("slope"), mini_wn.sid("river")) == 2

    def test_verbs_through_virtual_root(self, graph, mini_wn):
        assert shortest_path_len(graph, mini_wn.sid("walk_feet"), mini_wn.sid("walk_with")) == 4

    def test_disconnected_in_taxonomy(self, graph, mini_wn):
        assert shortest_path_len(graph, mini_wn.sid("walk_feet"), mini_wn.sid("slope")) is None

    def test_cross_pos_over_all_relations(self, graph, mini_wn):
        assert shortest_path_len(graph, mini_wn.sid("walk_feet"), mini_wn.sid("institution"), ALL_RELATIONS) == 4
        assert shortest_path_len(graph, mini_wn.sid("walk_with"), mini_wn.sid("institution"), ALL_RELATIONS) is None

    def test_matches_exhaustive_enumeration(self, graph, mini_wn):
        names = ["slope", "river", "institution", "depository", "walk_act", "money", "walk_feet", "deposit"]
        for a, b in itertools.combinations(names, 2):
            expected = _brute_force_distance(graph, mini_wn.sid(a), mini_wn.sid(b), ALL_RELATIONS)
            actual = shortest_path_len(graph, mini_wn.sid(a), mini_wn.sid(b), ALL_RELATIONS)
            assert (actual is None and np.isinf(expected)) or actual == expected

    def test_symmetry_and_triangle_inequality(self, graph):
        rng = np.random.default_rng(7)
        nouns = sorted(sid for sid in graph.synsets if sid.pos == POS.NOUN)
        for _ in range(200):
            a, b, c = (nouns[i] for i in rng.integers(0, len(nouns), size=3))
            ab = graph.shortest_path_len(a, b, TAXONOMY_EDGES)
            ba = graph.shortest_path_len(b, a, TAXONOMY_EDGES)
            bc = graph.shortest_path_len(b, c, TAXONOMY_EDGES)
            ac = graph.shortest_path_len(a, c, TAXONOMY_EDGES)
            assert ab == ba
            assert ac <= ab + bc

    def test_distance_cache_is_bounded(self, mini_wn):
        small = load_wordnet(mini_wn.directory, distance_cache_size=2)
        for name in ["slope", "river", "money", "group"]:
            small.distances_from(mini_wn.sid(name))
        assert len(small._distance_rows) == 2
