"""
Evaluation corpus I/O: unified-framework XML datasets, gold and prediction key files,
document contexts (monosemous terms with nonzero TF-IDF) and dataset statistics.
"""

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import pandas as pd
from lxml import etree

from .models import (
    POS, ContextEntry, DatasetFormatError, Document, DocumentContext, GoldKeys,
    KeyFileFormatError, Prediction, Sentence, TermInstance,
)
from .wordnet import WordNetGraph

logger = logging.getLogger(__name__)

POS_TO_UPOS = {POS.NOUN: "NOUN", POS.VERB: "VERB", POS.ADJ: "ADJ", POS.ADV: "ADV"}

DEFAULT_DOC_CTX_POS = frozenset({POS.NOUN, POS.VERB})


# =============================================================================
# XML datasets
# =============================================================================

def parse_dataset(xml_path: str) -> List[Document]:
    """
    Parse a unified-framework data file (corpus/text/sentence with wf and instance tokens).

    Args:
        xml_path: Path to the `.data.xml` file

    Returns:
        Documents in file order, with empty contexts
    """
    try:
        tree = etree.parse(xml_path)
    except etree.XMLSyntaxError as e:
        raise DatasetFormatError(f"Malformed XML: {e.msg}", xml_path, e.lineno)

    root = tree.getroot()
    texts = [root] if root.tag == "text" else root.findall("text")
    documents = []
    n_instances = 0
    for text in texts:
        sentences = []
        for s_index, sentence in enumerate(text.findall("sentence")):
            tokens = []
            for token in sentence:
                if not isinstance(token.tag, str):
                    continue
                tokens.append(_parse_token(token, s_index, len(tokens), xml_path))
            sentences.append(Sentence(sentence.get("id", f"{text.get('id')}.s{s_index:03d}"),
                                      s_index, tuple(tokens)))
            n_instances += sum(1 for t in tokens if t.is_target)
        documents.append(Document(text.get("id", f"d{len(documents):03d}"), tuple(sentences)))
    logger.info("Parsed %d documents with %d instances from %s", len(documents), n_instances, xml_path)
    return documents


def _parse_token(element, sentence_index: int, position: int, path: str) -> TermInstance:
    surface = (element.text or "").strip()
    if element.tag == "instance":
        missing = [a for a in ("id", "lemma", "pos") if not element.get(a)]
        if missing:
            raise DatasetFormatError(f"instance missing attribute(s) {', '.join(missing)}",
                                     path, element.sourceline)
        try:
            pos = POS.parse(element.get("pos"))
        except ValueError as e:
            raise DatasetFormatError(str(e), path, element.sourceline)
        return TermInstance(element.get("lemma"), pos, surface, sentence_index, position, element.get("id"))
    if element.tag != "wf":
        raise DatasetFormatError(f"Unexpected element <{element.tag}>", path, element.sourceline)
    pos_tag = element.get("pos")
    try:
        pos = POS.parse(pos_tag) if pos_tag else None
    except ValueError:
        pos = None
    return TermInstance(element.get("lemma") or surface, pos, surface, sentence_index, position)


def write_dataset(docs: Sequence[Document], path: str, source: Optional[str] = None) -> None:
    """Serialize documents to unified-framework XML."""
    corpus = etree.Element("corpus", lang="en")
    if source:
        corpus.set("source", source)
    for doc in docs:
        text = etree.SubElement(corpus, "text", id=doc.doc_id)
        for sentence in doc.sentences:
            s_elem = etree.SubElement(text, "sentence", id=sentence.sentence_id)
            for token in sentence.tokens:
                tag = "instance" if token.is_target else "wf"
                t_elem = etree.SubElement(s_elem, tag)
                if token.is_target:
                    t_elem.set("id", token.instance_id)
                t_elem.set("lemma", token.lemma)
                if token.pos is not None:
                    t_elem.set("pos", POS_TO_UPOS[token.pos])
                t_elem.text = token.surface
    etree.ElementTree(corpus).write(path, pretty_print=True, xml_declaration=True, encoding="UTF-8")


# =============================================================================
# Key files
# =============================================================================

def parse_gold_keys(path: str) -> GoldKeys:
    """Read `instance_id key [key...]` lines into acceptable-key sets."""
    gold: Dict[str, frozenset] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tokens = line.split()
            if not tokens:
                continue
            instance_id, keys = tokens[0], tokens[1:]
            if not keys:
                raise KeyFileFormatError(f"Empty key set for '{instance_id}'", path, lineno)
            if instance_id in gold:
                raise KeyFileFormatError(f"Duplicate instance id '{instance_id}'", path, lineno)
            gold[instance_id] = frozenset(keys)
    return gold


def read_predictions(path: str) -> Dict[str, str]:
    """Read a prediction file: one `instance_id sense_key` per line."""
    predictions: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if len(tokens) != 2:
                raise KeyFileFormatError("Expected 'instance_id sense_key'", path, lineno)
            if tokens[0] in predictions:
                raise KeyFileFormatError(f"Duplicate prediction for '{tokens[0]}'", path, lineno)
            predictions[tokens[0]] = tokens[1]
    return predictions


def write_predictions(predictions: Iterable[Prediction], path: str) -> None:
    """Write predictions sorted by instance id, UTF-8, LF-terminated."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for p in sorted(predictions, key=lambda p: p.instance_id):
            f.write(f"{p.instance_id} {p.sense_key}\n")


def check_coverage(docs: Sequence[Document], gold: GoldKeys) -> Tuple[Set[str], Set[str]]:
    """Instance ids missing from the gold keys, and gold ids missing from the dataset."""
    dataset_ids = {t.instance_id for d in docs for t in d.targets}
    not_in_gold = dataset_ids - set(gold)
    not_in_dataset = set(gold) - dataset_ids
    if not_in_gold:
        logger.warning("%d dataset instances have no gold key", len(not_in_gold))
    if not_in_dataset:
        logger.warning("%d gold instances are absent from the dataset", len(not_in_dataset))
    return not_in_gold, not_in_dataset


# =============================================================================
# Document context
# =============================================================================

def _term_counts(doc: Document) -> Counter:
    return Counter((t.lookup_lemma, t.pos) for t in doc.targets)


def build_document_contexts(docs: Sequence[Document], graph: WordNetGraph,
                            doc_ctx_pos: Iterable[POS] = DEFAULT_DOC_CTX_POS) -> List[DocumentContext]:
    """
    Contexts for every document of a dataset: monosemous terms with tf-idf > 0.

    tf is the raw count in the document, idf = ln(N/df) over the dataset's documents.
    Entries keep first-occurrence order.
    """
    allowed = frozenset(doc_ctx_pos)
    term_counts = [_term_counts(doc) for doc in docs]
    df: Counter = Counter()
    for counts in term_counts:
        df.update(counts.keys())
    n_docs = len(docs)

    contexts = []
    for counts in term_counts:
        entries = []
        for (lemma, pos), tf in counts.items():
            if pos not in allowed:
                continue
            senses = graph.senses_of(lemma, pos)
            if len(senses) != 1:
                continue
            tfidf = tf * math.log(n_docs / df[(lemma, pos)])
            if tfidf > 0:
                entries.append(ContextEntry(lemma, pos, senses[0], tfidf))
        contexts.append(DocumentContext(tuple(entries)))
    return contexts


def build_document_context(doc: Document, docs: Sequence[Document], graph: WordNetGraph,
                           doc_ctx_pos: Iterable[POS] = DEFAULT_DOC_CTX_POS) -> DocumentContext:
    """Context of one document; `docs` is the whole dataset (IDF denominator)."""
    index = next(i for i, d in enumerate(docs) if d is doc or d.doc_id == doc.doc_id)
    return build_document_contexts(docs, graph, doc_ctx_pos)[index]


# =============================================================================
# Statistics
# =============================================================================

@dataclass
class Granularity:
    count: int = 0
    mean: float = 0.0
    max: int = 0
    mode: int = 0
    median: float = 0.0


@dataclass
class DatasetStats:
    n_docs: int = 0
    n_sentences: int = 0
    n_terms: int = 0
    avg_sentence_size: int = 0
    n_monosemous: int = 0
    n_ambiguous: int = 0
    n_unknown: int = 0
    ambiguity_rate: float = 0.0
    pos_terms: Dict[POS, int] = field(default_factory=dict)
    pos_monosemous: Dict[POS, int] = field(default_factory=dict)
    pos_ambiguity_rate: Dict[POS, float] = field(default_factory=dict)
    granularity: Dict[POS, Granularity] = field(default_factory=dict)


def _granularity(sense_counts: List[int]) -> Granularity:
    if not sense_counts:
        return Granularity()
    series = pd.Series(sense_counts)
    return Granularity(
        count=len(series),
        mean=float(series.mean()),
        max=int(series.max()),
        mode=int(series.mode().min()),
        median=float(series.median()),
    )


def dataset_stats(docs: Sequence[Document], graph: WordNetGraph) -> DatasetStats:
    """
    Dataset statistics over target instances.

    A term is ambiguous when its (lemma, pos) has more than one WordNet sense; every
    other term (including lemmas unknown to WordNet) counts as monosemous. Sentences
    without targets are left out of the average sentence size.
    """
    stats = DatasetStats(n_docs=len(docs))
    ambiguous_senses: Dict[POS, List[int]] = defaultdict(list)
    pos_terms: Counter = Counter()
    pos_monosemous: Counter = Counter()
    for doc in docs:
        for sentence in doc.sentences:
            targets = sentence.targets
            if not targets:
                continue
            stats.n_sentences += 1
            for term in targets:
                stats.n_terms += 1
                pos_terms[term.pos] += 1
                k = len(graph.senses_of(term.lookup_lemma, term.pos))
                if k == 0:
                    stats.n_unknown += 1
                if k > 1:
                    stats.n_ambiguous += 1
                    ambiguous_senses[term.pos].append(k)
                else:
                    stats.n_monosemous += 1
                    pos_monosemous[term.pos] += 1

    if stats.n_sentences:
        stats.avg_sentence_size = int(math.floor(stats.n_terms / stats.n_sentences + 0.5))
    if stats.n_terms:
        stats.ambiguity_rate = stats.n_ambiguous / stats.n_terms
    for pos in POS:
        if not pos_terms[pos]:
            continue
        stats.pos_terms[pos] = pos_terms[pos]
        stats.pos_monosemous[pos] = pos_monosemous[pos]
        stats.pos_ambiguity_rate[pos] = len(ambiguous_senses[pos]) / pos_terms[pos]
        stats.granularity[pos] = _granularity(ambiguous_senses[pos])
    return stats


def stats_frame(stats: DatasetStats) -> pd.DataFrame:
    """Long-form table (slice, metric, value) of every statistic."""
    rows = [
        ("all", "docs", stats.n_docs),
        ("all", "sentences", stats.n_sentences),
        ("all", "terms", stats.n_terms),
        ("all", "avg_sentence_size", stats.avg_sentence_size),
        ("all", "monosemous", stats.n_monosemous),
        ("all", "ambiguous", stats.n_ambiguous),
        ("all", "unknown", stats.n_unknown),
        ("all", "ambiguity_rate", round(stats.ambiguity_rate, 4)),
    ]
    for pos, n_terms in stats.pos_terms.items():
        g = stats.granularity[pos]
        rows.extend([
            (pos.value, "terms", n_terms),
            (pos.value, "monosemous", stats.pos_monosemous[pos]),
            (pos.value, "ambiguous", g.count),
            (pos.value, "ambiguity_rate", round(stats.pos_ambiguity_rate[pos], 4)),
            (pos.value, "granularity_mean", round(g.mean, 2)),
            (pos.value, "granularity_max", g.max),
            (pos.value, "granularity_mode", g.mode),
            (pos.value, "granularity_median", g.median),
        ])
    return pd.DataFrame(rows, columns=["slice", "metric", "value"], dtype=object)

