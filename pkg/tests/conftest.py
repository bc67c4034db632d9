"""
Shared fixtures: a miniature WordNet database written in the real flat-file formats,
a small unified-framework dataset, and helpers to build documents in memory.
"""

import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models import POS, Document, Sentence, SynsetId, TermInstance  # noqa: E402
from src.wordnet import load_wordnet  # noqa: E402

POS_SUFFIX = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
SS_TYPE_NUMBER = {"n": 1, "v": 2, "a": 3, "r": 4, "s": 5}
REVERSE_POINTER = {"@": "~", "@i": "~i", "+": "+", "&": "&", "!": "!"}

LICENSE = [
    "  1 This software and database is being provided to you, the LICENSEE, by",
    "  2 Princeton University under the following license.",
]


@dataclass
class SynsetSpec:
    name: str
    ss_type: str
    words: List[str]
    hypernyms: List[str] = field(default_factory=list)
    pointers: List[Tuple[str, str]] = field(default_factory=list)
    gloss: str = ""
    lex_filenum: int = 0

    @property
    def pos(self) -> str:
        return "a" if self.ss_type == "s" else self.ss_type


# Order matters: a lemma's senses are ranked in the order its synsets appear here.
MINI_WORDNET = [
    # nouns
    SynsetSpec("entity", "n", ["entity"], gloss="that which exists"),
    SynsetSpec("physical_entity", "n", ["physical_entity"], ["entity"], gloss="an entity with physical existence"),
    SynsetSpec("abstraction", "n", ["abstraction"], ["entity"], gloss="a general concept"),
    SynsetSpec("object", "n", ["object"], ["physical_entity"], gloss="a tangible thing"),
    SynsetSpec("geological_formation", "n", ["geological_formation"], ["object"], gloss="a natural formation"),
    SynsetSpec("slope", "n", ["slope", "bank"], ["geological_formation"],
               gloss="sloping land beside a body of water"),
    SynsetSpec("river", "n", ["river"], ["geological_formation"], gloss="a large natural stream of water"),
    SynsetSpec("institution", "n", ["institution", "bank"], ["group"],
               gloss="a financial institution that accepts deposits"),
    SynsetSpec("group", "n", ["group"], ["abstraction"], gloss="any number of entities considered as a unit"),
    SynsetSpec("artifact", "n", ["artifact"], ["object"], gloss="a man-made object"),
    SynsetSpec("building", "n", ["building"], ["artifact"], gloss="a structure with a roof and walls"),
    SynsetSpec("industrial_plant", "n", ["plant", "works"], ["building"],
               gloss="buildings for carrying on industrial labor"),
    SynsetSpec("organism", "n", ["organism"], ["physical_entity"], gloss="a living thing"),
    SynsetSpec("living_plant", "n", ["plant", "flora"], ["organism"], gloss="a living organism lacking locomotion"),
    SynsetSpec("teaching_staff", "n", ["faculty", "staff"], ["group"], gloss="the body of teachers"),
    SynsetSpec("attribute", "n", ["attribute"], ["abstraction"], gloss="an abstraction belonging to an entity"),
    SynsetSpec("ability", "n", ["faculty", "ability"], ["attribute"], gloss="an inherent cognitive capacity"),
    SynsetSpec("depository", "n", ["depository", "bank"], ["building"], gloss="a building where money is kept"),
    SynsetSpec("walk_act", "n", ["walk"], ["abstraction"], gloss="the act of traveling by foot"),
    SynsetSpec("money", "n", ["money"], ["abstraction"], gloss="the most common medium of exchange"),
    # verbs
    SynsetSpec("travel", "v", ["travel", "go"], gloss="change location"),
    SynsetSpec("walk_feet", "v", ["walk"], ["travel"], [("+", "walk_act")], gloss="use one's feet to advance"),
    SynsetSpec("accompany", "v", ["accompany"], gloss="go or travel along with"),
    SynsetSpec("walk_with", "v", ["walk"], ["accompany"], gloss="accompany or escort"),
    SynsetSpec("put", "v", ["put"], gloss="put into a certain place"),
    SynsetSpec("deposit", "v", ["deposit", "bank"], ["put"], [("+", "money")], gloss="put into a bank account"),
    # adjectives and adverbs
    SynsetSpec("steep", "a", ["steep"], gloss="having a sharp inclination"),
    SynsetSpec("abrupt", "s", ["abrupt"], pointers=[("&", "steep")], gloss="extremely steep"),
    SynsetSpec("quick", "a", ["quick"], gloss="accomplished rapidly"),
    SynsetSpec("quickly", "r", ["quickly"], pointers=[("\\", "quick")], gloss="with speed"),
]


@dataclass
class MiniWordNet:
    directory: str
    sids: Dict[str, SynsetId]
    keys: Dict[Tuple[str, str], str]

    def sid(self, name: str) -> SynsetId:
        return self.sids[name]

    def key(self, name: str, lemma: str) -> str:
        return self.keys[(name, lemma)]


def write_wordnet(directory: str, specs: List[SynsetSpec] = MINI_WORDNET,
                  with_sense_index: bool = True) -> MiniWordNet:
    """Write index.*, data.* and index.sense files; offsets are real byte offsets."""
    by_name = {s.name: s for s in specs}
    pointers: Dict[str, List[Tuple[str, str]]] = {s.name: [] for s in specs}
    for s in specs:
        for hyper in s.hypernyms:
            pointers[s.name].append(("@", hyper))
            pointers[hyper].append(("~", s.name))
        for symbol, target in s.pointers:
            pointers[s.name].append((symbol, target))
            reverse = REVERSE_POINTER.get(symbol)
            if reverse:
                pointers[target].append((reverse, s.name))

    # Sense ranks and lex ids per (lemma, pos)
    ranks: Dict[Tuple[str, str], List[str]] = {}
    for s in specs:
        for word in s.words:
            ranks.setdefault((word, s.pos), []).append(s.name)

    def lex_id(spec: SynsetSpec, word: str) -> int:
        return ranks[(word, spec.pos)].index(spec.name)

    def render(spec: SynsetSpec, offsets: Dict[str, str]) -> str:
        words = " ".join(f"{w} {lex_id(spec, w):x}" for w in spec.words)
        ptrs = " ".join(f"{sym} {offsets[t]} {by_name[t].ss_type} 0000" for sym, t in pointers[spec.name])
        body = f"{offsets[spec.name]} {spec.lex_filenum:02d} {spec.ss_type} {len(spec.words):02x} {words} " \
               f"{len(pointers[spec.name]):03d}"
        if ptrs:
            body += f" {ptrs}"
        return f"{body} | {spec.gloss}  \n"

    placeholder = {s.name: "00000000" for s in specs}
    header = "".join(line + "\n" for line in LICENSE)
    offsets: Dict[str, str] = {}
    for pos in POS_SUFFIX:
        position = len(header.encode("utf-8"))
        for s in specs:
            if s.pos != pos:
                continue
            offsets[s.name] = f"{position:08d}"
            position += len(render(s, placeholder).encode("utf-8"))

    for pos, suffix in POS_SUFFIX.items():
        with open(os.path.join(directory, f"data.{suffix}"), "w", encoding="utf-8", newline="\n") as f:
            f.write(header)
            for s in specs:
                if s.pos == pos:
                    f.write(render(s, offsets))
        with open(os.path.join(directory, f"index.{suffix}"), "w", encoding="utf-8", newline="\n") as f:
            f.write(header)
            for (lemma, lemma_pos), names in sorted(ranks.items()):
                if lemma_pos != pos:
                    continue
                symbols = sorted({sym for n in names for sym, _ in pointers[n]})
                parts = [lemma, pos, str(len(names)), str(len(symbols)), *symbols,
                         str(len(names)), "0", *(offsets[n] for n in names)]
                f.write(" ".join(parts) + "  \n")

    keys: Dict[Tuple[str, str], str] = {}
    sense_lines = []
    for s in specs:
        head, head_id = "", ""
        if s.ss_type == "s":
            heads = [t for sym, t in pointers[s.name] if sym == "&" and by_name[t].ss_type == "a"]
            head_spec = by_name[heads[0]]
            head, head_id = head_spec.words[0], f"{lex_id(head_spec, head_spec.words[0]):02d}"
        for word in s.words:
            key = f"{word}%{SS_TYPE_NUMBER[s.ss_type]}:{s.lex_filenum:02d}:{lex_id(s, word):02d}:{head}:{head_id}"
            keys[(s.name, word)] = key
            sense_lines.append(f"{key} {offsets[s.name]} {lex_id(s, word) + 1} 0\n")
    if with_sense_index:
        with open(os.path.join(directory, "index.sense"), "w", encoding="utf-8", newline="\n") as f:
            f.writelines(sorted(sense_lines))

    sids = {s.name: SynsetId(POS.parse(s.pos), offsets[s.name]) for s in specs}
    return MiniWordNet(directory, sids, keys)


@pytest.fixture(scope="session")
def mini_wn(tmp_path_factory) -> MiniWordNet:
    return write_wordnet(str(tmp_path_factory.mktemp("wordnet")))


@pytest.fixture(scope="session")
def graph(mini_wn):
    return load_wordnet(mini_wn.directory)


# =============================================================================
# Documents
# =============================================================================

def make_sentence(sentence_id: str, index: int, tokens: List[Tuple[str, Optional[str], Optional[str]]]) -> Sentence:
    """tokens: (lemma, pos letter or None, instance id or None)"""
    terms = tuple(
        TermInstance(lemma, POS.parse(pos) if pos else None, lemma, index, position, instance_id)
        for position, (lemma, pos, instance_id) in enumerate(tokens)
    )
    return Sentence(sentence_id, index, terms)


@pytest.fixture
def bank_sentence() -> Sentence:
    """I'm walking to the bank"""
    return make_sentence("d000.s000", 0, [
        ("I", None, None),
        ("walk", "v", "d000.s000.t000"),
        ("to", None, None),
        ("the", None, None),
        ("bank", "n", "d000.s000.t001"),
    ])


@pytest.fixture
def bank_document(bank_sentence) -> Document:
    return Document("d000", (bank_sentence,))


DATASET_XML = """<?xml version="1.0" encoding="UTF-8"?>
<corpus lang="en" source="mini">
<text id="mini.d000">
<sentence id="mini.d000.s000">
<wf lemma="I" pos="PRON">I</wf>
<instance id="mini.d000.s000.t000" lemma="walk" pos="VERB">walking</instance>
<wf lemma="to" pos="ADP">to</wf>
<wf lemma="the" pos="DET">the</wf>
<instance id="mini.d000.s000.t001" lemma="bank" pos="NOUN">bank</instance>
</sentence>
<sentence id="mini.d000.s001">
<wf lemma="the" pos="DET">The</wf>
<instance id="mini.d000.s001.t000" lemma="river" pos="NOUN">river</instance>
<instance id="mini.d000.s001.t001" lemma="river" pos="NOUN">river</instance>
<wf lemma="be" pos="VERB">was</wf>
<instance id="mini.d000.s001.t002" lemma="steep" pos="ADJ">steep</instance>
</sentence>
<sentence id="mini.d000.s002">
<wf lemma="." pos=".">.</wf>
</sentence>
</text>
<text id="mini.d001">
<sentence id="mini.d001.s000">
<instance id="mini.d001.s000.t000" lemma="faculty" pos="NOUN">faculty</instance>
<instance id="mini.d001.s000.t001" lemma="plant" pos="NOUN">plant</instance>
<instance id="mini.d001.s000.t002" lemma="money" pos="NOUN">money</instance>
<instance id="mini.d001.s000.t003" lemma="zzzz" pos="NOUN">zzzz</instance>
</sentence>
</text>
</corpus>
"""


@pytest.fixture
def dataset_path(tmp_path) -> str:
    path = tmp_path / "mini.data.xml"
    path.write_text(DATASET_XML, encoding="utf-8")
    return str(path)
