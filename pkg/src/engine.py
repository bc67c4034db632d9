"""
Sequential contextual similarity matrix multiplication.

Consecutive ambiguous terms of a sentence are linked by contextual similarity
matrices (similarity x sense heuristics x document-context weight). The matrices
are chain-multiplied, the argmax cell of the final product is decomposed back
into one sense per term, and terms without local context are resolved from
the sentence, then from the whole document.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .heuristics import HeuristicStore, heuristic_weights
from .models import (
    POS, DocumentContext, Document, HeuristicSource, NoContextError, Prediction, Provenance,
    SenseEntry, Sentence, SynsetId, TermInstance, UnknownLemmaError,
)
from .similarity import Similarity, SimilarityConfig
from .wordnet import WordNetGraph

logger = logging.getLogger(__name__)

ALL_POS = frozenset(POS)


@dataclass(frozen=True)
class EngineConfig:
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    heuristic_source: HeuristicSource = HeuristicSource.SEMCOR
    doc_ctx_enabled: bool = True
    doc_cf_enabled: bool = True
    pos_of_interest: FrozenSet[POS] = ALL_POS
    doc_ctx_pos: FrozenSet[POS] = frozenset({POS.NOUN, POS.VERB})


@dataclass
class Csm:
    """Contextual similarity matrix between two consecutive ambiguous terms."""
    prev_term: TermInstance
    curr_term: TermInstance
    values: np.ndarray
    raw: np.ndarray
    scale_applied: Optional[float] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape


@dataclass
class ProductChain:
    csms: List[Csm]
    products: List[np.ndarray]

    @property
    def final(self) -> np.ndarray:
        return self.products[-1]


@dataclass
class DocumentResult:
    doc_id: str
    predictions: List[Prediction]
    skipped: List[str] = field(default_factory=list)


@dataclass
class CorpusResult:
    predictions: List[Prediction]
    skipped: List[str]

    def summary(self) -> Dict[str, int]:
        """Counts by provenance tag plus skipped (unknown-lemma) instances."""
        summary = dict(sorted(Counter(p.provenance.value for p in self.predictions).items()))
        summary["predicted"] = len(self.predictions)
        summary["skipped"] = len(self.skipped)
        return summary


@dataclass
class Candidate:
    term: TermInstance
    senses: List[SenseEntry]
    weights: np.ndarray


# =============================================================================
# Matrix building blocks
# =============================================================================

def doc_ctx_sim(sense: SenseEntry, ctx: Optional[DocumentContext], similarity: Similarity,
                enabled: bool = True) -> float:
    """Mean similarity of a sense to every document-context synset; 1 when there is no context."""
    if not enabled or ctx is None or len(ctx) == 0:
        return 1.0
    return float(np.mean([similarity(sense.synset, c) for c in ctx.synsets]))


def doc_ctx_weights(senses: Sequence[SenseEntry], ctx: Optional[DocumentContext],
                    similarity: Similarity, enabled: bool = True) -> np.ndarray:
    """Per-sense document-context weights; all-zero rows become neutral."""
    weights = np.array([doc_ctx_sim(s, ctx, similarity, enabled) for s in senses], dtype=np.float64)
    if not weights.any():
        return np.ones(len(senses), dtype=np.float64)
    return weights


def weighted_csm(prev: TermInstance, curr: TermInstance, raw: np.ndarray,
                 prev_weights: np.ndarray, curr_weights: np.ndarray, normalize: bool = True) -> Csm:
    values = raw * np.outer(prev_weights, curr_weights)
    scale = None
    if normalize:
        peak = values.max() if values.size else 0.0
        if peak > 0:
            scale = 1.0 / peak
            values = values * scale
    return Csm(prev, curr, values, raw, scale)


def build_csm(prev: TermInstance, curr: TermInstance, graph: WordNetGraph, similarity: Similarity,
              store: Optional[HeuristicStore] = None, ctx: Optional[DocumentContext] = None,
              config: EngineConfig = EngineConfig()) -> Csm:
    """
    CSM between two terms: cell (i, j) = SSR(s_i, s_j) * H(s_i) * H(s_j) * D(s_i) * D(s_j).

    Raises:
        UnknownLemmaError: when either lemma has no WordNet sense
    """
    prev_senses = _senses_or_raise(graph, prev)
    curr_senses = _senses_or_raise(graph, curr)
    if config.heuristic_source == HeuristicSource.OFF:
        store = None
    raw = similarity.matrix([s.synset for s in prev_senses], [s.synset for s in curr_senses])
    prev_w = (heuristic_weights(store, graph, prev_senses)
              * doc_ctx_weights(prev_senses, ctx, similarity, config.doc_ctx_enabled))
    curr_w = (heuristic_weights(store, graph, curr_senses)
              * doc_ctx_weights(curr_senses, ctx, similarity, config.doc_ctx_enabled))
    return weighted_csm(prev, curr, raw, prev_w, curr_w, config.similarity.normalize_per_matrix)


def _senses_or_raise(graph: WordNetGraph, term: TermInstance) -> List[SenseEntry]:
    senses = graph.senses_of(term.lookup_lemma, term.pos)
    if not senses:
        raise UnknownLemmaError(term.lookup_lemma, term.pos)
    return senses


def scsmm(csms: Sequence[Csm]) -> ProductChain:
    """Cumulative products P_0 = M_0, P_k = P_{k-1} . M_k."""
    if not csms:
        raise ValueError("Cannot multiply an empty chain")
    products = [csms[0].values.copy()]
    for k in range(1, len(csms)):
        if products[-1].shape[1] != csms[k].values.shape[0]:
            raise ValueError(f"Chain dimension mismatch at matrix {k}: "
                             f"{products[-1].shape} x {csms[k].values.shape}")
        products.append(products[-1] @ csms[k].values)
    return ProductChain(list(csms), products)


def backtrace(chain: ProductChain) -> List[int]:
    """
    Sense index per term (len(csms) + 1 terms) from the argmax cell of the final product.

    The first term keeps the argmax row throughout; each intermediate term takes the
    sense maximizing P_{k-1}[r, j] * M_k[j, c]. Ties go to the lowest index.

    Raises:
        NoContextError: when the final product is all zero
    """
    final = chain.final
    if not final.any():
        raise NoContextError("Final product matrix is all zero")
    r, c = np.unravel_index(int(np.argmax(final)), final.shape)
    m = len(chain.csms)
    choice = [0] * (m + 1)
    choice[0] = int(r)
    choice[m] = int(c)
    for k in range(m - 1, 0, -1):
        scores = chain.products[k - 1][r, :] * chain.csms[k].values[:, c]
        c = int(np.argmax(scores))
        choice[k] = c
    return choice


def _mean_similarity(senses: Sequence[SenseEntry], others: Sequence[SynsetId],
                     similarity: Similarity) -> np.ndarray:
    if not others:
        return np.zeros(len(senses), dtype=np.float64)
    return np.array([np.mean([similarity(s.synset, o) for o in others]) for s in senses], dtype=np.float64)


# =============================================================================
# Disambiguator
# =============================================================================

class Disambiguator:
    """
    Runs the full pipeline over documents.

    Shares one graph, similarity service and heuristic store; safe to use from
    several threads as long as each thread works on its own document.
    """

    def __init__(self, graph: WordNetGraph, similarity: Similarity,
                 store: Optional[HeuristicStore] = None, config: EngineConfig = EngineConfig()):
        self.graph = graph
        self.similarity = similarity
        self.store = None if config.heuristic_source == HeuristicSource.OFF else store
        self.config = config

    # -- per-term data --------------------------------------------------------

    def _candidate(self, term: TermInstance, senses: List[SenseEntry],
                   ctx: Optional[DocumentContext]) -> Candidate:
        weights = (heuristic_weights(self.store, self.graph, senses)
                   * doc_ctx_weights(senses, ctx, self.similarity, self.config.doc_ctx_enabled))
        return Candidate(term, senses, weights)

    def _raw(self, a: Candidate, b: Candidate) -> np.ndarray:
        return self.similarity.matrix([s.synset for s in a.senses], [s.synset for s in b.senses])

    def _predict(self, cand: Candidate, index: int, provenance: Provenance) -> Prediction:
        sense = cand.senses[index]
        return Prediction(cand.term.instance_id, sense.sense_key, provenance, sense.synset)

    def _heuristic_choice(self, cand: Candidate) -> Prediction:
        h = heuristic_weights(self.store, self.graph, cand.senses)
        return self._predict(cand, int(np.argmax(h)), Provenance.HEURISTIC_ONLY)

    # -- sentence level ------------------------------------------------------

    def _withhold(self, queue: List[Candidate]) -> Tuple[List[Candidate], List[Candidate]]:
        """Drop terms whose every raw block with a neighbour is all zero, until stable."""
        blocks: Dict[Tuple[int, int], bool] = {}
        withheld: List[Candidate] = []
        while len(queue) >= 2:
            nonzero = []
            for a, b in zip(queue, queue[1:]):
                key = (id(a), id(b))
                if key not in blocks:
                    blocks[key] = bool(self._raw(a, b).any())
                nonzero.append(blocks[key])
            keep = []
            for i, cand in enumerate(queue):
                links = []
                if i > 0:
                    links.append(nonzero[i - 1])
                if i < len(queue) - 1:
                    links.append(nonzero[i])
                if any(links):
                    keep.append(cand)
                else:
                    withheld.append(cand)
            if len(keep) == len(queue):
                break
            queue = keep
        return queue, withheld

    def fallback_sentence_context(self, cand: Candidate,
                                  sentence_predictions: Sequence[Prediction]) -> Optional[Prediction]:
        """Sense with the highest mean similarity to the other senses chosen in the sentence."""
        others = [p.synset for p in sentence_predictions
                  if p.instance_id != cand.term.instance_id and p.synset is not None]
        means = _mean_similarity(cand.senses, others, self.similarity)
        if not means.any():
            return None
        return self._predict(cand, int(np.argmax(means)), Provenance.SENTENCE_FALLBACK)

    def disambiguate_sentence(self, sentence: Sentence, ctx: Optional[DocumentContext] = None
                              ) -> Tuple[List[Prediction], List[Candidate], List[str]]:
        """
        Disambiguate one sentence.

        Returns:
            (predictions, terms left for carry-forward, skipped instance ids)
        """
        predictions: List[Prediction] = []
        skipped: List[str] = []
        queue: List[Candidate] = []
        for term in sentence.targets:
            if term.pos not in self.config.pos_of_interest:
                continue
            senses = self.graph.senses_of(term.lookup_lemma, term.pos)
            if not senses:
                logger.debug("No senses for '%s' (%s); skipping %s",
                             term.lookup_lemma, term.pos.value, term.instance_id)
                skipped.append(term.instance_id)
            elif len(senses) == 1:
                predictions.append(Prediction(term.instance_id, senses[0].sense_key,
                                              Provenance.SCSMM, senses[0].synset))
            else:
                queue.append(self._candidate(term, senses, ctx))

        chain_terms, unresolved = self._withhold(queue)
        if len(chain_terms) == 1:
            # a lone ambiguous term still sees the monosemous senses of its sentence
            cand = chain_terms[0]
            prediction = self.fallback_sentence_context(cand, predictions)
            if prediction is None:
                prediction = self._predict(cand, int(np.argmax(cand.weights)), Provenance.HEURISTIC_ONLY)
            predictions.append(prediction)
        elif chain_terms:
            csms = [weighted_csm(a.term, b.term, self._raw(a, b), a.weights, b.weights,
                                 self.config.similarity.normalize_per_matrix)
                    for a, b in zip(chain_terms, chain_terms[1:])]
            try:
                choice = backtrace(scsmm(csms))
                predictions.extend(self._predict(cand, idx, Provenance.SCSMM)
                                   for cand, idx in zip(chain_terms, choice))
            except NoContextError:
                logger.debug("No context in sentence %s; %d terms go to fallback",
                             sentence.sentence_id, len(chain_terms))
                unresolved = unresolved + chain_terms

        unresolved.sort(key=lambda c: c.term.position)
        leftovers: List[Candidate] = []
        for cand in unresolved:
            prediction = self.fallback_sentence_context(cand, predictions)
            if prediction is not None:
                predictions.append(prediction)
            elif self.config.doc_cf_enabled:
                leftovers.append(cand)
            else:
                predictions.append(self._heuristic_choice(cand))
        return predictions, leftovers, skipped

    # -- document level ------------------------------------------------------

    def carry_forward_document(self, leftovers: Sequence[Candidate],
                               predictions: Sequence[Prediction]) -> List[Prediction]:
        """Resolve leftovers against every sense chosen in the document."""
        doc_synsets = [p.synset for p in predictions if p.synset is not None]
        resolved = []
        for cand in leftovers:
            means = _mean_similarity(cand.senses, doc_synsets, self.similarity)
            if means.any():
                resolved.append(self._predict(cand, int(np.argmax(means)), Provenance.DOC_CARRY_FORWARD))
            else:
                resolved.append(self._heuristic_choice(cand))
        return resolved

    def disambiguate_document(self, doc: Document, ctx: Optional[DocumentContext] = None) -> DocumentResult:
        if ctx is None:
            ctx = doc.context
        predictions: List[Prediction] = []
        leftovers: List[Candidate] = []
        skipped: List[str] = []
        for sentence in doc.sentences:
            sent_predictions, sent_leftovers, sent_skipped = self.disambiguate_sentence(sentence, ctx)
            predictions.extend(sent_predictions)
            leftovers.extend(sent_leftovers)
            skipped.extend(sent_skipped)
        if leftovers:
            predictions.extend(self.carry_forward_document(leftovers, predictions))
        return DocumentResult(doc.doc_id, predictions, skipped)

    def disambiguate_corpus(self, docs: Sequence[Document],
                            contexts: Optional[Sequence[DocumentContext]] = None,
                            jobs: int = 1) -> CorpusResult:
        """Disambiguate documents in parallel; output is sorted by instance id."""
        if contexts is None:
            contexts = [doc.context for doc in docs]
        if len(contexts) != len(docs):
            raise ValueError(f"{len(docs)} documents but {len(contexts)} contexts")
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(self.disambiguate_document, docs, contexts))
        else:
            results = [self.disambiguate_document(doc, ctx) for doc, ctx in zip(docs, contexts)]

        predictions = sorted((p for r in results for p in r.predictions), key=lambda p: p.instance_id)
        skipped = sorted(i for r in results for i in r.skipped)
        logger.info("Disambiguated %d instances in %d documents (%d skipped)",
                    len(predictions), len(docs), len(skipped))
        return CorpusResult(predictions, skipped)


def disambiguate_sentence(sentence: Sentence, ctx: Optional[DocumentContext], disambiguator: Disambiguator
                          ) -> List[Prediction]:
    """Sentence-only run: leftovers are resolved against the sentence's own predictions."""
    predictions, leftovers, _ = disambiguator.disambiguate_sentence(sentence, ctx)
    return predictions + disambiguator.carry_forward_document(leftovers, predictions)
