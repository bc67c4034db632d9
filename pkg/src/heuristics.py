"""
Sense-frequency heuristics from sense-annotated training data (SemCor cntlist, OMSTI keys).
Evaluates H(s) and the most-frequent-sense / WordNet-first-sense baselines.
"""

import logging
from collections import Counter, defaultdict
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .models import (
    POS, CountFileFormatError, KeyFileFormatError, SenseEntry, UnknownLemmaError,
    lemma_of_sense_key, pos_of_sense_key,
)
from .wordnet import WordNetGraph

logger = logging.getLogger(__name__)

SOURCE_SEMCOR = "semcor"
SOURCE_OMSTI = "omsti"
SOURCE_SEMCOR_OMSTI = "semcor+omsti"

MAX_SENSE_NUMBER = 99

# Sense-number column when both integer columns look like sense numbers, by sense-key column
_DEFAULT_SENSE_COLUMN = {0: 1, 1: 2, 2: 1}


class HeuristicStore:
    """Per-sense-key counts and the derived per-word totals."""

    def __init__(self, sense_count: Mapping[str, int], source_label: str = SOURCE_SEMCOR):
        self.sense_count: Dict[str, int] = {k: int(v) for k, v in sense_count.items() if v > 0}
        self.source_label = source_label
        word_count: Dict[Tuple[str, POS], int] = defaultdict(int)
        for sense_key, count in self.sense_count.items():
            word_count[(lemma_of_sense_key(sense_key), pos_of_sense_key(sense_key))] += count
        self.word_count: Dict[Tuple[str, POS], int] = dict(word_count)

    def count(self, sense_key: str) -> int:
        return self.sense_count.get(sense_key, 0)

    def word_total(self, lemma: str, pos: POS) -> int:
        return self.word_count.get((lemma, pos), 0)

    def __len__(self) -> int:
        return len(self.sense_count)

    def __contains__(self, sense_key: str) -> bool:
        return sense_key in self.sense_count


def merge_stores(*stores: HeuristicStore, source_label: Optional[str] = None) -> HeuristicStore:
    """Sum the counts of several stores (SemCor + OMSTI)."""
    total: Counter = Counter()
    for store in stores:
        total.update(store.sense_count)
    label = source_label or "+".join(s.source_label for s in stores)
    return HeuristicStore(total, label)


# =============================================================================
# Ingestion
# =============================================================================

def load_semcor_cntlist(path: str, source_label: str = SOURCE_SEMCOR) -> HeuristicStore:
    """
    Load a cntlist-style file (`tag_cnt sense_key sense_number`, or the `.rev` order).

    The sense key is the token containing '%'. Of the two integers, the sense-number
    column is the one that stays within 1..99 on every line; the layout must be
    consistent across the whole file.
    """
    rows: List[Tuple[int, List[str], int]] = []
    key_column: Optional[int] = None
    sense_candidates = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith("#"):
                continue
            key_positions = [i for i, tok in enumerate(tokens) if "%" in tok]
            if not key_positions:
                raise CountFileFormatError("No sense key (token with '%') on line", path, lineno)
            if len(tokens) != 3 or len(key_positions) != 1:
                raise CountFileFormatError("Expected a sense key and two integers", path, lineno)
            if key_column is None:
                key_column = key_positions[0]
                sense_candidates = {i for i in range(3) if i != key_column}
            elif key_positions[0] != key_column:
                raise CountFileFormatError(
                    f"Inconsistent column order: sense key in column {key_positions[0] + 1}, "
                    f"expected column {key_column + 1}", path, lineno)
            for col in list(sense_candidates):
                try:
                    value = int(tokens[col])
                except ValueError:
                    raise CountFileFormatError(f"Non-integer field '{tokens[col]}'", path, lineno)
                if not 1 <= value <= MAX_SENSE_NUMBER:
                    sense_candidates.discard(col)
            if not sense_candidates:
                raise CountFileFormatError(
                    "Inconsistent column order: no column can hold sense numbers", path, lineno)
            rows.append((lineno, tokens, key_positions[0]))

    counts: Counter = Counter()
    if not rows:
        return HeuristicStore(counts, source_label)

    if len(sense_candidates) == 1:
        sense_column = next(iter(sense_candidates))
    else:
        sense_column = _DEFAULT_SENSE_COLUMN[key_column]
    count_column = ({0, 1, 2} - {key_column, sense_column}).pop()

    skipped = 0
    for lineno, tokens, _ in rows:
        try:
            count = int(tokens[count_column])
            pos_of_sense_key(tokens[key_column])
        except ValueError as e:
            raise CountFileFormatError(str(e), path, lineno)
        if count <= 0:
            skipped += 1
            continue
        counts[tokens[key_column]] += count
    logger.info("Loaded %d sense counts from %s (%d zero-count lines skipped)", len(counts), path, skipped)
    return HeuristicStore(counts, source_label)


def load_key_file_counts(path: str, source_label: str = SOURCE_OMSTI) -> HeuristicStore:
    """Count every sense key listed in an `instance_id key [key...]` file."""
    counts: Counter = Counter()
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith("#"):
                continue
            if len(tokens) < 2:
                raise KeyFileFormatError("Instance without sense keys", path, lineno)
            for sense_key in tokens[1:]:
                if "%" not in sense_key:
                    raise KeyFileFormatError(f"Not a sense key: '{sense_key}'", path, lineno)
                counts[sense_key] += 1
    logger.info("Loaded %d distinct sense keys from %s", len(counts), path)
    return HeuristicStore(counts, source_label)


# =============================================================================
# Heuristic function and baselines
# =============================================================================

def heuristic(store: Optional[HeuristicStore], graph: WordNetGraph, sense: SenseEntry) -> float:
    """
    H(s): P(s|w) for senses seen in training data, 1/Count(w) for unseen senses of a
    seen word, and 1 when the word never occurs (no effect on the matrix).
    """
    if store is None:
        return 1.0
    word_total = store.word_total(sense.lemma, sense.pos)
    if word_total == 0:
        return 1.0
    count = store.count(sense.sense_key)
    if count > 0:
        return count / word_total
    return 1.0 / word_total


def heuristic_weights(store: Optional[HeuristicStore], graph: WordNetGraph,
                      senses: Sequence[SenseEntry]) -> np.ndarray:
    return np.array([heuristic(store, graph, s) for s in senses], dtype=np.float64)


def wn_first_sense(graph: WordNetGraph, lemma: str, pos: POS) -> SenseEntry:
    senses = graph.senses_of(lemma, pos)
    if not senses:
        raise UnknownLemmaError(lemma, pos)
    return senses[0]


def mfs_sense(store: Optional[HeuristicStore], graph: WordNetGraph, lemma: str, pos: POS) -> SenseEntry:
    """Most frequent sense in the training counts; ties and unseen words fall back to WordNet order."""
    senses = graph.senses_of(lemma, pos)
    if not senses:
        raise UnknownLemmaError(lemma, pos)
    if store is None:
        return senses[0]
    return max(senses, key=lambda s: (store.count(s.sense_key), -s.sense_number))

