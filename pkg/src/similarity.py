"""
Sense-to-sense semantic similarity: PATH, LCH, WUP and JCN over the WordNet taxonomy,
with a configurable strategy for pairs the taxonomy cannot relate (cross-POS, adj/adv).
"""

import logging
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .information_content import IcTable
from .models import (
    POS, TAXONOMIC_POS, ConfigError, CrossPosStrategy, Measure, SynsetId,
)
from .wordnet import ALL_RELATIONS, TAXONOMY_EDGES, WordNetGraph

logger = logging.getLogger(__name__)

JCN_EPSILON = 1e-12


@dataclass(frozen=True)
class SimilarityConfig:
    measure: Measure = Measure.JCN
    jcn_zero_denominator_cap: float = 1e6
    cross_pos_strategy: CrossPosStrategy = CrossPosStrategy.FULL_GRAPH_PATH
    normalize_per_matrix: bool = True

    def __post_init__(self):
        if not self.jcn_zero_denominator_cap > 0:
            raise ConfigError(f"jcn_zero_denominator_cap must be > 0, got {self.jcn_zero_denominator_cap}")


def max_depth(graph: WordNetGraph, pos: POS) -> int:
    """Deepest node under the per-POS virtual root (cached by the graph)."""
    return graph.max_depth(pos)


class Similarity:
    """
    Similarity service over an immutable graph and IC table.

    Results are memoized per unordered pair; the memo is guarded by a lock so one
    instance can be shared by worker threads.
    """

    def __init__(self, graph: WordNetGraph, ic_table: Optional[IcTable] = None,
                 config: SimilarityConfig = SimilarityConfig(), cache_size: int = 1_000_000):
        if config.measure == Measure.JCN and ic_table is None:
            raise ConfigError("The JCN measure needs an information-content table")
        self.graph = graph
        self.ic_table = ic_table
        self.config = config
        self._memo: "OrderedDict[Tuple[SynsetId, SynsetId], float]" = OrderedDict()
        self._cache_size = cache_size
        self._lock = threading.Lock()

    def __call__(self, a: SynsetId, b: SynsetId) -> float:
        key = (a, b) if a <= b else (b, a)
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        value = self._compute(*key)
        with self._lock:
            self._memo[key] = value
            if len(self._memo) > self._cache_size:
                self._memo.popitem(last=False)
        return value

    def matrix(self, rows: Sequence[SynsetId], cols: Sequence[SynsetId]) -> np.ndarray:
        """Raw similarity block, rows x cols."""
        values = np.zeros((len(rows), len(cols)), dtype=np.float64)
        for i, a in enumerate(rows):
            for j, b in enumerate(cols):
                values[i, j] = self(a, b)
        return values

    # =========================================================================
    # Measures
    # =========================================================================

    def _compute(self, a: SynsetId, b: SynsetId) -> float:
        if a.pos == b.pos and a.pos in TAXONOMIC_POS:
            measure = self.config.measure
            if measure == Measure.PATH:
                return self.path(a, b)
            if measure == Measure.LCH:
                return self.lch(a, b)
            if measure == Measure.WUP:
                return self.wup(a, b)
            return self.jcn(a, b)
        if self.config.cross_pos_strategy == CrossPosStrategy.ZERO:
            return 0.0
        return self.path(a, b, ALL_RELATIONS)

    def path(self, a: SynsetId, b: SynsetId, edges=TAXONOMY_EDGES) -> float:
        distance = self.graph.shortest_path_len(a, b, edges)
        if distance is None:
            return 0.0
        return 1.0 / (1.0 + distance)

    def lch(self, a: SynsetId, b: SynsetId) -> float:
        distance = self.graph.shortest_path_len(a, b, TAXONOMY_EDGES)
        if distance is None:
            return 0.0
        nodes = distance + 1
        depth = self.graph.max_depth(a.pos)
        assert nodes <= 2 * depth, f"path of {nodes} nodes exceeds 2 x depth {depth}"
        return -math.log(nodes / (2.0 * depth))

    def wup(self, a: SynsetId, b: SynsetId) -> float:
        subsumer = self.graph.lcs(a, b)
        if subsumer is None:
            return 0.0
        return 2.0 * self.graph.depth(subsumer) / (self.graph.depth(a) + self.graph.depth(b))

    def jcn(self, a: SynsetId, b: SynsetId) -> float:
        cap = self.config.jcn_zero_denominator_cap
        subsumer = self.graph.lcs(a, b)
        lcs_ic = self.ic_table.ic(subsumer) if subsumer is not None else 0.0
        denominator = self.ic_table.ic(a) + self.ic_table.ic(b) - 2.0 * lcs_ic
        if denominator < JCN_EPSILON:
            return cap
        return min(1.0 / denominator, cap)


def similarity(graph: WordNetGraph, ic_table: Optional[IcTable], cfg: SimilarityConfig,
               a: SynsetId, b: SynsetId) -> float:
    """One-off similarity without a shared memo."""
    return Similarity(graph, ic_table, cfg)(a, b)
