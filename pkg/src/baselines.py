"""
Baseline disambiguators: WordNet first sense, most frequent sense, and maximum relatedness.
All produce predictions in the engine's format with provenance `baseline`.
"""

import enum
import logging
from typing import List, Optional, Sequence

import numpy as np

from .engine import CorpusResult
from .heuristics import HeuristicStore, mfs_sense, wn_first_sense
from .models import Document, Prediction, Provenance, SenseEntry, Sentence, TermInstance, UnknownLemmaError
from .similarity import Similarity
from .wordnet import WordNetGraph

logger = logging.getLogger(__name__)


class Baseline(str, enum.Enum):
    NONE = "none"
    WN1ST = "wn1st"
    MFS = "mfs"
    PEDERSEN = "pedersen"


def _prediction(term: TermInstance, sense: SenseEntry) -> Prediction:
    return Prediction(term.instance_id, sense.sense_key, Provenance.BASELINE, sense.synset)


def disambiguate_baseline_pedersen(sentence: Sentence, graph: WordNetGraph, similarity: Similarity,
                                   window: Optional[int] = None, threshold: float = 0.0,
                                   pos_of_interest=None) -> List[Prediction]:
    """
    Maximum relatedness: each target takes the sense maximizing the summed best similarity
    to the other words in its window.

    Args:
        window: Number of targets on each side; None uses the whole sentence
        threshold: Only per-word maxima above this value are accumulated

    Returns:
        One prediction per target with at least one sense
    """
    terms = []
    for term in sentence.targets:
        if pos_of_interest is not None and term.pos not in pos_of_interest:
            continue
        senses = graph.senses_of(term.lookup_lemma, term.pos)
        if senses:
            terms.append((term, senses))

    predictions = []
    for i, (term, senses) in enumerate(terms):
        lo = 0 if window is None else max(0, i - window)
        hi = len(terms) if window is None else min(len(terms), i + window + 1)
        scores = np.zeros(len(senses), dtype=np.float64)
        for j in range(lo, hi):
            if j == i:
                continue
            other = terms[j][1]
            raw = similarity.matrix([s.synset for s in senses], [s.synset for s in other])
            best = raw.max(axis=1)
            scores += np.where(best > threshold, best, 0.0)
        predictions.append(_prediction(term, senses[int(np.argmax(scores))]))
    return predictions


def run_baseline(baseline: Baseline, docs: Sequence[Document], graph: WordNetGraph,
                 store: Optional[HeuristicStore] = None, similarity: Optional[Similarity] = None,
                 pos_of_interest=None, window: Optional[int] = None, threshold: float = 0.0) -> CorpusResult:
    """Run a baseline over whole documents."""
    predictions: List[Prediction] = []
    skipped: List[str] = []
    for doc in docs:
        for sentence in doc.sentences:
            if baseline == Baseline.PEDERSEN:
                if similarity is None:
                    raise ValueError("The pedersen baseline needs a similarity service")
                sent_predictions = disambiguate_baseline_pedersen(
                    sentence, graph, similarity, window, threshold, pos_of_interest)
                predictions.extend(sent_predictions)
                done = {p.instance_id for p in sent_predictions}
                skipped.extend(t.instance_id for t in sentence.targets
                               if t.instance_id not in done
                               and (pos_of_interest is None or t.pos in pos_of_interest))
                continue
            for term in sentence.targets:
                if pos_of_interest is not None and term.pos not in pos_of_interest:
                    continue
                try:
                    if baseline == Baseline.MFS:
                        sense = mfs_sense(store, graph, term.lookup_lemma, term.pos)
                    else:
                        sense = wn_first_sense(graph, term.lookup_lemma, term.pos)
                except UnknownLemmaError:
                    skipped.append(term.instance_id)
                    continue
                predictions.append(_prediction(term, sense))

    predictions.sort(key=lambda p: p.instance_id)
    logger.info("Baseline %s predicted %d instances (%d skipped)", baseline.value, len(predictions), len(skipped))
    return CorpusResult(predictions, sorted(skipped))
