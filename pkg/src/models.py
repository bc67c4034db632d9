"""
Word Sense Disambiguation - Domain Models
Canonical data model shared by the knowledge graph, the engine and the scorer.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple


# ============================================================================
# ENUMS
# ============================================================================

class POS(str, enum.Enum):
    NOUN = "n"
    VERB = "v"
    ADJ = "a"
    ADV = "r"

    @classmethod
    def parse(cls, value: str) -> "POS":
        """Accept WordNet letters (including satellite 's'), or unified-framework tags."""
        text = value.strip()
        if text in UPOS_TO_POS:
            return UPOS_TO_POS[text]
        text = text.lower()
        if text == "s":
            return cls.ADJ
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"Unknown part of speech '{value}'")


UPOS_TO_POS = {
    "NOUN": POS.NOUN,
    "VERB": POS.VERB,
    "ADJ": POS.ADJ,
    "ADV": POS.ADV,
}

# ss_type digit used in sense keys
SS_TYPE_NUMBERS = {"n": 1, "v": 2, "a": 3, "r": 4, "s": 5}
SS_TYPE_BY_NUMBER = {1: POS.NOUN, 2: POS.VERB, 3: POS.ADJ, 4: POS.ADV, 5: POS.ADJ}

TAXONOMIC_POS = frozenset({POS.NOUN, POS.VERB})


class Measure(str, enum.Enum):
    PATH = "path"
    LCH = "lch"
    WUP = "wup"
    JCN = "jcn"


class CrossPosStrategy(str, enum.Enum):
    ZERO = "zero"
    FULL_GRAPH_PATH = "full-graph-path"


class HeuristicSource(str, enum.Enum):
    SEMCOR = "s"
    SEMCOR_OMSTI = "so"
    OFF = "off"


class Provenance(str, enum.Enum):
    SCSMM = "scsmm"
    SENTENCE_FALLBACK = "sentence-fallback"
    DOC_CARRY_FORWARD = "doc-carry-forward"
    HEURISTIC_ONLY = "heuristic-only"
    BASELINE = "baseline"


# ============================================================================
# EXCEPTIONS
# ============================================================================

class WsdError(Exception):
    """Base class for every error raised by the package."""


class InputFormatError(WsdError, ValueError):
    """Malformed input file; carries the location when known."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path and line is not None:
            location = f"{self.path}:{line}: "
        elif self.path:
            location = f"{self.path}: "
        super().__init__(f"{location}{message}")


class WordNetFormatError(InputFormatError):
    pass


class DanglingReferenceError(WordNetFormatError):
    pass


class IcFormatError(InputFormatError):
    pass


class CountFileFormatError(InputFormatError):
    pass


class DatasetFormatError(InputFormatError):
    pass


class KeyFileFormatError(InputFormatError):
    pass


class ConfigError(InputFormatError):
    pass


class UnknownLemmaError(WsdError, KeyError):
    def __init__(self, lemma: str, pos: "POS"):
        self.lemma = lemma
        self.pos = pos
        super().__init__(f"No WordNet senses for '{lemma}' ({pos.value})")

    def __str__(self) -> str:
        return self.args[0]


class UnsupportedTaxonomyError(WsdError):
    pass


class NoContextError(WsdError):
    """The final product of a chain carries no mass at all."""


class ScoringError(WsdError):
    pass


# ============================================================================
# KNOWLEDGE GRAPH
# ============================================================================

@dataclass(frozen=True, order=True)
class SynsetId:
    """(pos, offset) with the zero-padded offset exactly as written in the data files."""
    pos: POS
    offset: str

    def __str__(self) -> str:
        return f"{self.offset}-{self.pos.value}"


@dataclass(frozen=True)
class Synset:
    id: SynsetId
    lemmas: Tuple[str, ...]
    gloss: str
    relations: Tuple[Tuple[str, SynsetId], ...]
    sense_keys: Tuple[str, ...]
    lex_filenum: int = 0
    ss_type: str = "n"
    lex_ids: Tuple[int, ...] = ()

    @property
    def is_satellite(self) -> bool:
        return self.ss_type == "s"


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    pos: POS
    sense_number: int
    sense_key: str
    synset: SynsetId


# ============================================================================
# CORPUS
# ============================================================================

@dataclass(frozen=True)
class TermInstance:
    lemma: str
    pos: Optional[POS]
    surface: str
    sentence_index: int
    position: int
    instance_id: Optional[str] = None

    @property
    def is_target(self) -> bool:
        return self.instance_id is not None

    @property
    def lookup_lemma(self) -> str:
        """Lemma in WordNet index form: lowercase, multiword joined by '_'."""
        return "_".join(self.lemma.lower().split())


@dataclass(frozen=True)
class Sentence:
    sentence_id: str
    index: int
    tokens: Tuple[TermInstance, ...]

    @property
    def targets(self) -> List[TermInstance]:
        return [t for t in self.tokens if t.is_target]


@dataclass(frozen=True)
class ContextEntry:
    lemma: str
    pos: POS
    sense: SenseEntry
    tfidf: float


@dataclass(frozen=True)
class DocumentContext:
    entries: Tuple[ContextEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def synsets(self) -> List[SynsetId]:
        return [e.sense.synset for e in self.entries]


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: Tuple[Sentence, ...]
    context: DocumentContext = field(default_factory=DocumentContext)

    @property
    def targets(self) -> List[TermInstance]:
        return [t for s in self.sentences for t in s.targets]


GoldKeys = Dict[str, FrozenSet[str]]


# ============================================================================
# ENGINE OUTPUT
# ============================================================================

@dataclass(frozen=True)
class Prediction:
    instance_id: str
    sense_key: str
    provenance: Provenance
    synset: Optional[SynsetId] = None


def dataset_of(instance_id: str) -> str:
    """Unified-framework ids are prefixed with the dataset name (e.g. 'senseval2.d000.s000.t000')."""
    return instance_id.split(".", 1)[0]


def pos_of_sense_key(sense_key: str) -> POS:
    """POS encoded by the ss_type digit of a sense key."""
    try:
        lex_sense = sense_key.split("%", 1)[1]
        return SS_TYPE_BY_NUMBER[int(lex_sense.split(":", 1)[0])]
    except (IndexError, ValueError, KeyError):
        raise ValueError(f"Malformed sense key '{sense_key}'")


def lemma_of_sense_key(sense_key: str) -> str:
    return sense_key.split("%", 1)[0].lower()
