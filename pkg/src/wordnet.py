"""
WordNet 3.0 knowledge graph.
Parses the flat-file database (index.*, data.*, index.sense) into an immutable
in-memory graph with sense lookup, taxonomy depth, LCS and shortest paths.
"""

import logging
import os
import re
import threading
from collections import OrderedDict
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .models import (
    POS, SS_TYPE_NUMBERS, TAXONOMIC_POS,
    DanglingReferenceError, SenseEntry, Synset, SynsetId,
    UnsupportedTaxonomyError, WordNetFormatError,
    lemma_of_sense_key, pos_of_sense_key,
)

logger = logging.getLogger(__name__)

POS_FILE_SUFFIX = {
    POS.NOUN: "noun",
    POS.VERB: "verb",
    POS.ADJ: "adj",
    POS.ADV: "adv",
}

RELATION_NAMES = {
    "!": "antonym",
    "@": "hypernym",
    "@i": "instance_hypernym",
    "~": "hyponym",
    "~i": "instance_hyponym",
    "#m": "member_holonym",
    "#s": "substance_holonym",
    "#p": "part_holonym",
    "%m": "member_meronym",
    "%s": "substance_meronym",
    "%p": "part_meronym",
    "=": "attribute",
    "+": "derivation",
    ";c": "domain_topic",
    "-c": "member_topic",
    ";r": "domain_region",
    "-r": "member_region",
    ";u": "domain_usage",
    "-u": "member_usage",
    "*": "entailment",
    ">": "cause",
    "^": "also_see",
    "$": "verb_group",
    "&": "similar_to",
    "<": "participle",
    "\\": "pertainym",
}

VIRTUAL_ROOT_OFFSET = "00000000"
VIRTUAL_ROOT_RELATION = "virtual_root"

HYPERNYM_RELATIONS = frozenset({"hypernym", "instance_hypernym"})
# Hypernym edges plus the links from every real root to its POS's virtual root
TAXONOMY_EDGES = HYPERNYM_RELATIONS | {VIRTUAL_ROOT_RELATION}
ALL_RELATIONS = frozenset(RELATION_NAMES.values())

_ADJ_MARKER = re.compile(r"\((a|p|ip)\)$")


def virtual_root(pos: POS) -> SynsetId:
    return SynsetId(pos, VIRTUAL_ROOT_OFFSET)


class WordNetGraph:
    """Immutable WordNet graph. Safe for concurrent readers once constructed."""

    def __init__(
        self,
        synsets: Dict[SynsetId, Synset],
        index: Dict[Tuple[str, POS], List[SenseEntry]],
        distance_cache_size: int = 256,
    ):
        self.synsets = MappingProxyType(dict(synsets))
        self.index = MappingProxyType({k: tuple(v) for k, v in index.items()})
        self._by_key = {
            entry.sense_key: entry
            for entries in self.index.values()
            for entry in entries
        }

        self._hypernyms: Dict[SynsetId, Tuple[SynsetId, ...]] = {}
        for sid, synset in self.synsets.items():
            ups = tuple(t for rel, t in synset.relations if rel in HYPERNYM_RELATIONS)
            if not ups and sid.pos in TAXONOMIC_POS:
                ups = (virtual_root(sid.pos),)
            self._hypernyms[sid] = ups
        for pos in TAXONOMIC_POS:
            self._hypernyms[virtual_root(pos)] = ()

        self._nodes: List[SynsetId] = sorted(self._hypernyms)
        self._node_index = {sid: i for i, sid in enumerate(self._nodes)}

        self.depth_cache = MappingProxyType(self._compute_depths())
        self._max_depth = {
            pos: max((d for sid, d in self.depth_cache.items() if sid.pos == pos), default=1)
            for pos in TAXONOMIC_POS
        }

        self._ancestor_cache: Dict[SynsetId, FrozenSet[SynsetId]] = {}
        self._adjacency: Dict[FrozenSet[str], sparse.csr_matrix] = {}
        self._distance_rows: "OrderedDict[Tuple[FrozenSet[str], int], np.ndarray]" = OrderedDict()
        self._distance_cache_size = max(1, distance_cache_size)
        self._lock = threading.Lock()

    # =========================================================================
    # Lookup
    # =========================================================================

    def senses_of(self, lemma: str, pos: POS) -> List[SenseEntry]:
        key = ("_".join(lemma.lower().split()), pos)
        return list(self.index.get(key, ()))

    def sense_by_key(self, sense_key: str) -> Optional[SenseEntry]:
        return self._by_key.get(sense_key)

    def synset_of_key(self, sense_key: str) -> Optional[SynsetId]:
        entry = self._by_key.get(sense_key)
        return entry.synset if entry else None

    def synset(self, sid: SynsetId) -> Synset:
        return self.synsets[sid]

    def is_virtual_root(self, sid: SynsetId) -> bool:
        return sid.offset == VIRTUAL_ROOT_OFFSET and sid.pos in TAXONOMIC_POS

    def __contains__(self, sid: SynsetId) -> bool:
        return sid in self._node_index

    def __len__(self) -> int:
        return len(self.synsets)

    # =========================================================================
    # Taxonomy
    # =========================================================================

    def hypernyms(self, sid: SynsetId) -> Tuple[SynsetId, ...]:
        """Direct hypernyms (instance hypernyms included); real roots point at the virtual root."""
        return self._hypernyms.get(sid, ())

    def ancestors(self, sid: SynsetId) -> FrozenSet[SynsetId]:
        """Hypernym closure including sid itself."""
        cached = self._ancestor_cache.get(sid)
        if cached is not None:
            return cached
        seen: Set[SynsetId] = {sid}
        todo = [sid]
        while todo:
            for hyper in self._hypernyms.get(todo.pop(), ()):
                if hyper not in seen:
                    seen.add(hyper)
                    todo.append(hyper)
        result = frozenset(seen)
        self._ancestor_cache[sid] = result
        return result

    def depth(self, sid: SynsetId) -> int:
        """Longest hypernym path to the virtual root, counted in nodes (virtual root = 1)."""
        if sid not in self.depth_cache:
            raise UnsupportedTaxonomyError(f"{sid} has no taxonomy depth")
        return self.depth_cache[sid]

    def max_depth(self, pos: POS) -> int:
        if pos not in TAXONOMIC_POS:
            raise UnsupportedTaxonomyError(f"No taxonomy for POS '{pos.value}'")
        return self._max_depth[pos]

    def lcs(self, a: SynsetId, b: SynsetId) -> Optional[SynsetId]:
        """Deepest common hypernym ancestor; ties resolve to the lowest SynsetId."""
        if a.pos != b.pos or a.pos not in TAXONOMIC_POS:
            raise UnsupportedTaxonomyError(
                f"LCS needs two synsets of one taxonomy, got {a} and {b}")
        common = self.ancestors(a) & self.ancestors(b)
        if not common:
            return None
        return min(common, key=lambda s: (-self.depth_cache[s], s))

    def _compute_depths(self) -> Dict[SynsetId, int]:
        depths: Dict[SynsetId, int] = {}
        for pos in TAXONOMIC_POS:
            depths[virtual_root(pos)] = 1
        for start in self._nodes:
            if start in depths or start.pos not in TAXONOMIC_POS:
                continue
            stack = [start]
            on_path = {start}
            while stack:
                node = stack[-1]
                pending = [h for h in self._hypernyms[node] if h not in depths]
                if pending:
                    for hyper in pending:
                        if hyper in on_path:
                            raise WordNetFormatError(f"Hypernym cycle through {hyper}")
                    nxt = pending[0]
                    stack.append(nxt)
                    on_path.add(nxt)
                    continue
                depths[node] = 1 + max(depths[h] for h in self._hypernyms[node])
                stack.pop()
                on_path.discard(node)
        return depths

    # =========================================================================
    # Paths
    # =========================================================================

    def shortest_path_len(self, a: SynsetId, b: SynsetId,
                          edge_set: Iterable[str] = TAXONOMY_EDGES) -> Optional[int]:
        """Edge count of the shortest undirected path over the selected relations."""
        if a == b:
            return 0
        if a not in self._node_index or b not in self._node_index:
            return None
        row = self.distances_from(a, edge_set)
        value = row[self._node_index[b]]
        return None if np.isinf(value) else int(value)

    def distances_from(self, source: SynsetId, edge_set: Iterable[str] = TAXONOMY_EDGES) -> np.ndarray:
        """Breadth-first distances from source to every node (inf when unreachable)."""
        edges = frozenset(edge_set)
        key = (edges, self._node_index[source])
        with self._lock:
            row = self._distance_rows.get(key)
            if row is not None:
                self._distance_rows.move_to_end(key)
                return row
        adjacency = self._adjacency_for(edges)
        row = np.asarray(csgraph.shortest_path(
            adjacency, method="D", directed=False, unweighted=True, indices=[key[1]]
        ), dtype=np.float32).reshape(-1)
        row.setflags(write=False)
        with self._lock:
            self._distance_rows[key] = row
            while len(self._distance_rows) > self._distance_cache_size:
                self._distance_rows.popitem(last=False)
        return row

    def _adjacency_for(self, edges: FrozenSet[str]) -> sparse.csr_matrix:
        with self._lock:
            cached = self._adjacency.get(edges)
        if cached is not None:
            return cached
        rows: List[int] = []
        cols: List[int] = []
        for sid, synset in self.synsets.items():
            i = self._node_index[sid]
            for rel, target in synset.relations:
                if rel in edges:
                    rows.append(i)
                    cols.append(self._node_index[target])
        if VIRTUAL_ROOT_RELATION in edges:
            for sid, ups in self._hypernyms.items():
                for hyper in ups:
                    if self.is_virtual_root(hyper):
                        rows.append(self._node_index[sid])
                        cols.append(self._node_index[hyper])
        n = len(self._nodes)
        data = np.ones(len(rows), dtype=np.float64)
        matrix = sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
        # Undirected and unweighted: collapse duplicate edges
        matrix = ((matrix + matrix.T) > 0).astype(np.float64).tocsr()
        with self._lock:
            self._adjacency.setdefault(edges, matrix)
            return self._adjacency[edges]


# =============================================================================
# Module-level API
# =============================================================================

def senses_of(graph: WordNetGraph, lemma: str, pos: POS) -> List[SenseEntry]:
    return graph.senses_of(lemma, pos)


def lcs(graph: WordNetGraph, a: SynsetId, b: SynsetId) -> Optional[SynsetId]:
    return graph.lcs(a, b)


def shortest_path_len(graph: WordNetGraph, a: SynsetId, b: SynsetId,
                      edge_set: Iterable[str] = TAXONOMY_EDGES) -> Optional[int]:
    return graph.shortest_path_len(a, b, edge_set)


# =============================================================================
# Loading
# =============================================================================

class _RawSynset:
    __slots__ = ("sid", "lex_filenum", "ss_type", "words", "pointers", "gloss")

    def __init__(self, sid, lex_filenum, ss_type, words, pointers, gloss):
        self.sid = sid
        self.lex_filenum = lex_filenum
        self.ss_type = ss_type
        self.words = words
        self.pointers = pointers
        self.gloss = gloss


def load_wordnet(db_dir: str, distance_cache_size: int = 256) -> WordNetGraph:
    """
    Load a WordNet 3.0 database directory.

    Args:
        db_dir: Directory holding index.{noun,verb,adj,adv}, data.{...} and index.sense
        distance_cache_size: Number of single-source BFS rows kept in memory

    Returns:
        The loaded WordNetGraph
    """
    db_dir = str(db_dir)
    paths = {}
    for pos, suffix in POS_FILE_SUFFIX.items():
        for kind in ("index", "data"):
            path = os.path.join(db_dir, f"{kind}.{suffix}")
            if not os.path.isfile(path):
                raise FileNotFoundError(f"WordNet file not found: {path}")
            paths[(kind, pos)] = path

    raw: Dict[SynsetId, _RawSynset] = {}
    for pos in POS_FILE_SUFFIX:
        for record in _read_data_file(paths[("data", pos)], pos):
            raw[record.sid] = record

    relations: Dict[SynsetId, Tuple[Tuple[str, SynsetId], ...]] = {}
    for sid, record in raw.items():
        edges = []
        for symbol, target, path, lineno in record.pointers:
            if target not in raw:
                raise DanglingReferenceError(
                    f"Pointer '{symbol}' from {sid} targets unknown synset {target}", path, lineno)
            name = RELATION_NAMES.get(symbol)
            if name is None:
                logger.warning("Unknown pointer symbol '%s' in %s", symbol, sid)
                name = symbol
            if name in HYPERNYM_RELATIONS and sid.pos not in TAXONOMIC_POS:
                raise WordNetFormatError(f"Hypernym edge on non-taxonomic synset {sid}", path, lineno)
            edges.append((name, target))
        relations[sid] = tuple(edges)

    ordered: Dict[Tuple[str, POS], List[SynsetId]] = {}
    for pos in POS_FILE_SUFFIX:
        for lemma, offsets, path, lineno in _read_index_file(paths[("index", pos)], pos):
            sids = []
            for offset in offsets:
                sid = SynsetId(pos, offset)
                if sid not in raw:
                    raise DanglingReferenceError(
                        f"Index entry '{lemma}' references unknown synset {sid}", path, lineno)
                sids.append(sid)
            ordered[(lemma, pos)] = sids

    sense_path = os.path.join(db_dir, "index.sense")
    if os.path.isfile(sense_path):
        keys = _read_sense_index(sense_path, raw)
    else:
        logger.warning("index.sense not found in %s; constructing sense keys from data files", db_dir)
        keys = _construct_sense_keys(raw)

    synsets: Dict[SynsetId, Synset] = {}
    for sid, record in raw.items():
        lemmas = tuple(word for word, _ in record.words)
        sense_keys = tuple(
            keys.get((word.lower(), sid), "") for word, _ in record.words
        )
        synsets[sid] = Synset(
            id=sid,
            lemmas=lemmas,
            gloss=record.gloss,
            relations=relations[sid],
            sense_keys=sense_keys,
            lex_filenum=record.lex_filenum,
            ss_type=record.ss_type,
            lex_ids=tuple(lex_id for _, lex_id in record.words),
        )
    for pos in TAXONOMIC_POS:
        root = virtual_root(pos)
        synsets[root] = Synset(id=root, lemmas=("*ROOT*",), gloss="", relations=(), sense_keys=())

    index: Dict[Tuple[str, POS], List[SenseEntry]] = {}
    missing_keys = 0
    for (lemma, pos), sids in ordered.items():
        entries = []
        for rank, sid in enumerate(sids, start=1):
            key = keys.get((lemma, sid))
            if key is None:
                missing_keys += 1
                key = _fallback_key(lemma, raw[sid])
            entries.append(SenseEntry(lemma=lemma, pos=pos, sense_number=rank, sense_key=key, synset=sid))
        index[(lemma, pos)] = entries
    if missing_keys:
        logger.warning("%d index senses had no sense key in index.sense; keys were constructed", missing_keys)

    graph = WordNetGraph(synsets, index, distance_cache_size=distance_cache_size)
    logger.info("Loaded WordNet from %s: %d synsets, %d lemma entries", db_dir, len(raw), len(index))
    return graph


def _is_license_line(line: str) -> bool:
    return line.startswith(" ")


def _read_data_file(path: str, pos: POS) -> Iterable[_RawSynset]:
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip() or _is_license_line(line):
                continue
            yield _parse_data_line(line.rstrip("\n"), pos, path, lineno)


def _parse_data_line(line: str, pos: POS, path: str, lineno: int) -> _RawSynset:
    body, sep, gloss = line.partition(" | ")
    if not sep:
        body, gloss = line.rstrip(" |"), ""
    tokens = body.split()
    try:
        offset = tokens[0]
        lex_filenum = int(tokens[1])
        ss_type = tokens[2]
        if POS.parse(ss_type) != pos:
            raise WordNetFormatError(f"ss_type '{ss_type}' in data file for '{pos.value}'", path, lineno)
        w_cnt = int(tokens[3], 16)
        words = []
        i = 4
        for _ in range(w_cnt):
            word = _ADJ_MARKER.sub("", tokens[i])
            words.append((word, int(tokens[i + 1], 16)))
            i += 2
        p_cnt = int(tokens[i])
        i += 1
        pointers = []
        for _ in range(p_cnt):
            symbol, target_offset, target_pos = tokens[i], tokens[i + 1], tokens[i + 2]
            pointers.append((symbol, SynsetId(POS.parse(target_pos), target_offset), path, lineno))
            i += 4
    except WordNetFormatError:
        raise
    except (IndexError, ValueError) as e:
        raise WordNetFormatError(f"Malformed data line ({e})", path, lineno)
    if not (len(offset) == 8 and offset.isdigit()):
        raise WordNetFormatError(f"Malformed synset offset '{offset}'", path, lineno)
    if not words:
        raise WordNetFormatError("Synset without words", path, lineno)
    return _RawSynset(SynsetId(pos, offset), lex_filenum, ss_type, tuple(words), pointers, gloss.strip())


def _read_index_file(path: str, pos: POS):
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip() or _is_license_line(line):
                continue
            tokens = line.split()
            try:
                lemma = tokens[0]
                synset_cnt = int(tokens[2])
                p_cnt = int(tokens[3])
                offsets = tokens[4 + p_cnt + 2:]
            except (IndexError, ValueError) as e:
                raise WordNetFormatError(f"Malformed index line ({e})", path, lineno)
            if POS.parse(tokens[1]) != pos:
                raise WordNetFormatError(f"POS '{tokens[1]}' in index file for '{pos.value}'", path, lineno)
            if len(offsets) != synset_cnt:
                raise WordNetFormatError(
                    f"Expected {synset_cnt} synset offsets for '{lemma}', found {len(offsets)}", path, lineno)
            yield lemma.lower(), offsets, path, lineno


def _read_sense_index(path: str, raw: Dict[SynsetId, _RawSynset]) -> Dict[Tuple[str, SynsetId], str]:
    keys: Dict[Tuple[str, SynsetId], str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if len(tokens) < 2 or "%" not in tokens[0]:
                raise WordNetFormatError("Malformed index.sense line", path, lineno)
            sense_key, offset = tokens[0], tokens[1]
            try:
                sid = SynsetId(pos_of_sense_key(sense_key), offset)
            except ValueError as e:
                raise WordNetFormatError(str(e), path, lineno)
            if sid not in raw:
                raise DanglingReferenceError(f"Sense key {sense_key} references unknown synset {sid}", path, lineno)
            keys[(lemma_of_sense_key(sense_key), sid)] = sense_key
    logger.info("Loaded %d sense keys from %s", len(keys), path)
    return keys


def _construct_sense_keys(raw: Dict[SynsetId, _RawSynset]) -> Dict[Tuple[str, SynsetId], str]:
    keys: Dict[Tuple[str, SynsetId], str] = {}
    for sid, record in raw.items():
        head, head_id = "", ""
        if record.ss_type == "s":
            for symbol, target, _, _ in record.pointers:
                head_record = raw.get(target)
                if symbol == "&" and head_record is not None and head_record.ss_type == "a":
                    head_word, head_lex_id = head_record.words[0]
                    head, head_id = head_word.lower(), f"{head_lex_id:02d}"
                    break
        for word, lex_id in record.words:
            keys[(word.lower(), sid)] = (
                f"{word.lower()}%{SS_TYPE_NUMBERS[record.ss_type]}:"
                f"{record.lex_filenum:02d}:{lex_id:02d}:{head}:{head_id}"
            )
    return keys


def _fallback_key(lemma: str, record: _RawSynset) -> str:
    lex_id = 0
    for word, word_lex_id in record.words:
        if word.lower() == lemma:
            lex_id = word_lex_id
    return f"{lemma}%{SS_TYPE_NUMBERS[record.ss_type]}:{record.lex_filenum:02d}:{lex_id:02d}::"
