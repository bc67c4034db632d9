"""
Information content of WordNet concepts.
IC(c) = -ln p(c), with p estimated from corpus counts propagated up the hypernym taxonomy.
"""

import logging
import math
from collections import defaultdict
from typing import Dict, Mapping

from .models import POS, TAXONOMIC_POS, IcFormatError, SynsetId
from .wordnet import VIRTUAL_ROOT_OFFSET, WordNetGraph, virtual_root

logger = logging.getLogger(__name__)

IC_HEADER_PREFIX = "wnver::"


class IcTable:
    """Cumulative synset counts and per-POS totals. Immutable after construction."""

    def __init__(self, counts: Mapping[SynsetId, float], root_total: Mapping[POS, float],
                 smoothing: float = 1.0):
        self.counts: Dict[SynsetId, float] = dict(counts)
        self.root_total: Dict[POS, float] = dict(root_total)
        self.smoothing = smoothing

    def count(self, sid: SynsetId) -> float:
        value = self.counts.get(sid, 0.0)
        return value if value > 0 else self.smoothing

    def ic(self, sid: SynsetId) -> float:
        if sid.offset == VIRTUAL_ROOT_OFFSET:
            return 0.0
        total = self.root_total.get(sid.pos)
        if not total:
            return 0.0
        p = min(self.count(sid) / total, 1.0)
        return max(-math.log(p), 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IcTable):
            return NotImplemented
        return (self.counts == other.counts and self.root_total == other.root_total
                and self.smoothing == other.smoothing)


def ic(table: IcTable, sid: SynsetId) -> float:
    """Information content in nats."""
    return table.ic(sid)


def load_ic_file(path: str, smoothing: float = 1.0) -> IcTable:
    """
    Load an IC table in the `.dat` format (`wnver::<hash>` header, then `<offset><pos> <count> [ROOT]`).

    Counts are taken as already propagated. ROOT-flagged entries are summed into the
    per-POS totals; offset 0 denotes the virtual root.
    """
    counts: Dict[SynsetId, float] = {}
    root_total: Dict[POS, float] = defaultdict(float)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.strip()
            if lineno == 1:
                if text.startswith(IC_HEADER_PREFIX):
                    continue
                logger.warning("%s: missing '%s' header", path, IC_HEADER_PREFIX)
            if not text:
                continue
            fields = text.split()
            if len(fields) not in (2, 3) or (len(fields) == 3 and fields[2] != "ROOT"):
                raise IcFormatError("Expected '<offset><pos> <count> [ROOT]'", path, lineno)
            offset_pos, count_text = fields[0], fields[1]
            try:
                pos = POS(offset_pos[-1])
            except ValueError:
                raise IcFormatError(f"Unknown POS letter '{offset_pos[-1]}'", path, lineno)
            offset_digits = offset_pos[:-1]
            if not offset_digits.isdigit():
                raise IcFormatError(f"Malformed offset '{offset_digits}'", path, lineno)
            try:
                count = float(count_text)
            except ValueError:
                raise IcFormatError(f"Non-numeric count '{count_text}'", path, lineno)
            sid = SynsetId(pos, f"{int(offset_digits):08d}")
            counts[sid] = count
            if len(fields) == 3:
                root_total[pos] += count

    for pos in TAXONOMIC_POS:
        pos_counts = [c for sid, c in counts.items() if sid.pos == pos]
        if pos not in root_total and pos_counts:
            logger.warning("%s: no ROOT entries for POS '%s'; using the largest count", path, pos.value)
            root_total[pos] = max(pos_counts)
        if pos in root_total:
            counts.setdefault(virtual_root(pos), root_total[pos])
    logger.info("Loaded IC counts for %d synsets from %s", len(counts), path)
    return IcTable(counts, root_total, smoothing)


def compute_ic(graph: WordNetGraph, tagged_corpus: Mapping[str, float], smoothing: float = 1.0) -> IcTable:
    """
    Compute an IC table from sense-key counts.

    Args:
        graph: Loaded WordNet graph
        tagged_corpus: sense_key -> occurrence count (e.g. a HeuristicStore's sense_count)
        smoothing: Additive constant applied to every noun/verb synset after propagation

    Returns:
        IcTable whose virtual roots carry the per-POS totals
    """
    direct: Dict[SynsetId, float] = defaultdict(float)
    unresolved = 0
    for sense_key, count in tagged_corpus.items():
        sid = graph.synset_of_key(sense_key)
        if sid is None:
            unresolved += 1
            continue
        if sid.pos in TAXONOMIC_POS:
            direct[sid] += count
    if unresolved:
        logger.warning("Skipped %d sense keys not resolvable in WordNet while computing IC", unresolved)

    propagated: Dict[SynsetId, float] = defaultdict(float)
    for sid, count in direct.items():
        for ancestor in graph.ancestors(sid):
            propagated[ancestor] += count

    counts: Dict[SynsetId, float] = {}
    for sid in graph.synsets:
        if sid.pos in TAXONOMIC_POS:
            counts[sid] = propagated.get(sid, 0.0) + smoothing
    root_total = {pos: counts[virtual_root(pos)] for pos in TAXONOMIC_POS}
    return IcTable(counts, root_total, smoothing)


def write_ic_file(table: IcTable, path: str, wnver: str = "3.0") -> None:
    """Serialize a table so that load_ic_file reproduces it exactly."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{IC_HEADER_PREFIX}{wnver}\n")
        for sid in sorted(table.counts):
            flag = " ROOT" if sid.offset == VIRTUAL_ROOT_OFFSET else ""
            f.write(f"{int(sid.offset)}{sid.pos.value} {table.counts[sid]!r}{flag}\n")
