"""
Command-line interface: disambiguate, score, stats, sim, build-ic and cache-heuristics.
Exit codes: 0 ok, 1 runtime failure, 2 input-format failure.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

import pandas as pd

from . import database
from .baselines import Baseline, run_baseline
from .config import (
    apply_overrides, engine_config, load_config, parse_on_off, parse_pos_list, wordnet_dir,
)
from .corpus import (
    build_document_contexts, check_coverage, dataset_stats, parse_dataset, parse_gold_keys, stats_frame,
    write_predictions,
)
from .engine import Disambiguator, EngineConfig
from .evaluation import format_report_text, format_report_tsv, score_files
from .heuristics import (
    SOURCE_OMSTI, SOURCE_SEMCOR, HeuristicStore, load_key_file_counts, load_semcor_cntlist, merge_stores,
)
from .information_content import IcTable, compute_ic, load_ic_file, write_ic_file
from .models import (
    POS, ConfigError, HeuristicSource, InputFormatError, Measure, ScoringError, WsdError,
)
from .similarity import Similarity
from .wordnet import WordNetGraph, load_wordnet

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# =============================================================================
# Resource loading
# =============================================================================

def _load_graph(config: Dict) -> WordNetGraph:
    return load_wordnet(wordnet_dir(config), config["runtime"]["distance_cache_size"])


def _load_semcor(config: Dict) -> Optional[HeuristicStore]:
    path = config["resources"]["semcor_cntlist"]
    return load_semcor_cntlist(path) if path else None


def _load_store(config: Dict, source: HeuristicSource,
                semcor: Optional[HeuristicStore] = None) -> Optional[HeuristicStore]:
    """Heuristic counts for the requested source, from the SQLite cache or the flat files."""
    if source == HeuristicSource.OFF:
        return None
    sources = [SOURCE_SEMCOR] if source == HeuristicSource.SEMCOR else [SOURCE_SEMCOR, SOURCE_OMSTI]
    db_path = config["resources"]["heuristics_db"]
    if db_path:
        session = database.init_db(db_path)()
        try:
            return database.load_store(session, sources)
        finally:
            session.close()

    if semcor is None:
        semcor = _load_semcor(config)
    if semcor is None:
        raise ConfigError("Heuristics need a SemCor cntlist: pass --semcor-cntlist or --heuristics off")
    if source == HeuristicSource.SEMCOR:
        return semcor
    omsti_path = config["resources"]["omsti_keys"]
    if not omsti_path:
        raise ConfigError("The 'so' heuristics need OMSTI keys: pass --omsti-keys")
    return merge_stores(semcor, load_key_file_counts(omsti_path))


def _load_ic(config: Dict, graph: WordNetGraph, semcor: Optional[HeuristicStore]) -> IcTable:
    source = config["resources"]["ic"]
    if source and source != "compute":
        return load_ic_file(source)
    if semcor is None:
        logger.warning("No SemCor counts available; information content computed from smoothing only")
        return compute_ic(graph, {})
    return compute_ic(graph, semcor.sense_count)


def _similarity(config: Dict, engine: EngineConfig, graph: WordNetGraph,
                semcor: Optional[HeuristicStore]) -> Similarity:
    ic_table = _load_ic(config, graph, semcor) if engine.similarity.measure == Measure.JCN else None
    return Similarity(graph, ic_table, engine.similarity, config["runtime"]["similarity_cache_size"])


def _split_sim_flag(value: Optional[str]):
    """`--sim` takes a measure name, or a path to an IC file (implying JCN)."""
    if value is None:
        return None, None
    if value.lower() in {m.value for m in Measure}:
        return value.lower(), None
    return Measure.JCN.value, value


# =============================================================================
# Subcommands
# =============================================================================

def cmd_disambiguate(args, config: Dict) -> int:
    measure, ic_path = _split_sim_flag(args.sim)
    apply_overrides(config, "engine", measure=measure, heuristics=args.heuristics, doc_ctx=args.doc_ctx,
                    doc_cf=args.doc_cf, pos_of_interest=args.pos, doc_ctx_pos=args.doc_ctx_pos,
                    cross_pos_strategy=args.cross_pos)
    apply_overrides(config, "resources", wordnet_dir=args.wordnet, semcor_cntlist=args.semcor_cntlist,
                    omsti_keys=args.omsti_keys, ic=args.ic or ic_path, heuristics_db=args.heuristics_db)
    apply_overrides(config, "runtime", jobs=args.jobs)
    engine = engine_config(config)

    graph = _load_graph(config)
    docs = parse_dataset(args.dataset)
    if args.gold:
        check_coverage(docs, parse_gold_keys(args.gold))
    baseline = Baseline(args.baseline)

    if baseline == Baseline.NONE:
        needs_ic = engine.similarity.measure == Measure.JCN and config["resources"]["ic"] in (None, "compute")
        semcor = _load_semcor(config) if needs_ic or not config["resources"]["heuristics_db"] else None
        store = _load_store(config, engine.heuristic_source, semcor)
        similarity = _similarity(config, engine, graph, semcor)
        contexts = build_document_contexts(docs, graph, engine.doc_ctx_pos) if engine.doc_ctx_enabled else None
        result = Disambiguator(graph, similarity, store, engine).disambiguate_corpus(
            docs, contexts, jobs=int(config["runtime"]["jobs"]))
    else:
        store = None
        similarity = None
        if baseline == Baseline.MFS:
            store = _load_store(config, engine.heuristic_source)
        if baseline == Baseline.PEDERSEN:
            similarity = _similarity(config, engine, graph, _load_semcor(config))
        result = run_baseline(baseline, docs, graph, store, similarity, engine.pos_of_interest,
                              threshold=args.threshold)

    write_predictions(result.predictions, args.out)
    for key, value in result.summary().items():
        print(f"{key}\t{value}")
    return 0


def cmd_score(args, config: Dict) -> int:
    try:
        pos = POS.parse(args.pos) if args.pos else None
    except ValueError as e:
        raise ConfigError(str(e))
    report = score_files(args.gold, args.pred, pos=pos, dataset=args.dataset, by_dataset=args.by_dataset)
    sys.stdout.write(format_report_tsv(report) if args.format == "tsv" else format_report_text(report))
    return 0


def cmd_stats(args, config: Dict) -> int:
    apply_overrides(config, "resources", wordnet_dir=args.wordnet)
    graph = _load_graph(config)
    frame = stats_frame(dataset_stats(parse_dataset(args.dataset), graph))
    if args.format == "tsv":
        sys.stdout.write(frame.to_csv(sep="\t", index=False, lineterminator="\n"))
    else:
        sys.stdout.write(frame.to_string(index=False) + "\n")
    return 0


def cmd_sim(args, config: Dict) -> int:
    apply_overrides(config, "engine", measure=args.measure, cross_pos_strategy=args.cross_pos)
    apply_overrides(config, "resources", wordnet_dir=args.wordnet, semcor_cntlist=args.semcor_cntlist,
                    ic=args.ic)
    engine = engine_config(config)
    graph = _load_graph(config)
    semcor = _load_semcor(config) if engine.similarity.measure == Measure.JCN else None
    similarity = _similarity(config, engine, graph, semcor)

    if args.k1 and args.k2:
        a, b = graph.sense_by_key(args.k1), graph.sense_by_key(args.k2)
        for key, sense in ((args.k1, a), (args.k2, b)):
            if sense is None:
                raise ConfigError(f"Unknown sense key '{key}'")
        print(f"{similarity(a.synset, b.synset):.6g}")
        return 0
    if not (args.l1 and args.p1 and args.l2 and args.p2):
        raise ConfigError("sim needs --k1/--k2 or --l1/--p1/--l2/--p2")

    try:
        pos1, pos2 = POS.parse(args.p1), POS.parse(args.p2)
    except ValueError as e:
        raise ConfigError(str(e))
    rows = graph.senses_of(args.l1.lower(), pos1)
    cols = graph.senses_of(args.l2.lower(), pos2)
    for lemma, pos, senses in ((args.l1, args.p1, rows), (args.l2, args.p2, cols)):
        if not senses:
            raise ConfigError(f"No WordNet senses for '{lemma}' ({pos})")
    values = similarity.matrix([s.synset for s in rows], [s.synset for s in cols])
    frame = pd.DataFrame(values,
                         index=[f"{s.lemma}{s.sense_number}" for s in rows],
                         columns=[f"{s.lemma}{s.sense_number}" for s in cols])
    sys.stdout.write(frame.to_string(float_format=lambda v: f"{v:.4f}") + "\n")
    return 0


def cmd_build_ic(args, config: Dict) -> int:
    apply_overrides(config, "resources", wordnet_dir=args.wordnet, semcor_cntlist=args.semcor_cntlist)
    graph = _load_graph(config)
    semcor = _load_semcor(config)
    if semcor is None:
        raise ConfigError("build-ic needs --semcor-cntlist")
    table = compute_ic(graph, semcor.sense_count, smoothing=args.smoothing)
    write_ic_file(table, args.out)
    print(f"synsets\t{len(table.counts)}")
    return 0


def cmd_cache_heuristics(args, config: Dict) -> int:
    apply_overrides(config, "resources", semcor_cntlist=args.semcor_cntlist, omsti_keys=args.omsti_keys,
                    heuristics_db=args.db)
    db_path = config["resources"]["heuristics_db"]
    if not db_path:
        raise ConfigError("cache-heuristics needs --db")
    stores = []
    if config["resources"]["semcor_cntlist"]:
        stores.append(load_semcor_cntlist(config["resources"]["semcor_cntlist"]))
    if config["resources"]["omsti_keys"]:
        stores.append(load_key_file_counts(config["resources"]["omsti_keys"]))
    if not stores:
        raise ConfigError("Nothing to cache: pass --semcor-cntlist and/or --omsti-keys")
    session = database.init_db(db_path)()
    try:
        for store in stores:
            database.save_store(session, store)
        for source in database.get_sources(session):
            print(f"{source}\t{database.get_source_total(session, source)}")
    finally:
        session.close()
    return 0


# =============================================================================
# Parser
# =============================================================================

def _pos_list(value: str) -> List[str]:
    return sorted(p.value for p in parse_pos_list(value))


def _on_off(value: str) -> bool:
    try:
        return parse_on_off(value)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsd", description="Knowledge-based all-words word sense disambiguation")
    parser.add_argument('--config', help='YAML config file (default: config.yaml)')
    parser.add_argument('--log-level', help='Logging level (DEBUG, INFO, WARNING, ...)')
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("disambiguate", help="Disambiguate a dataset and write predictions")
    p.add_argument('--dataset', required=True, help='Unified-framework .data.xml file')
    p.add_argument('--wordnet', help='WordNet 3.0 dict directory')
    p.add_argument('--heuristics', choices=[h.value for h in HeuristicSource])
    p.add_argument('--semcor-cntlist', help='SemCor cntlist file')
    p.add_argument('--omsti-keys', help='OMSTI key file')
    p.add_argument('--heuristics-db', help='SQLite cache written by cache-heuristics')
    p.add_argument('--ic', help="IC .dat file, or 'compute'")
    p.add_argument('--sim', help='Similarity measure (path, lch, wup, jcn) or an IC file for jcn')
    p.add_argument('--cross-pos', choices=['zero', 'full-graph-path'])
    p.add_argument('--doc-ctx', type=_on_off)
    p.add_argument('--doc-cf', type=_on_off)
    p.add_argument('--pos', type=_pos_list, help='POS of interest, e.g. n,v,a,r')
    p.add_argument('--doc-ctx-pos', type=_pos_list, help='POS of document-context terms, e.g. n,v')
    p.add_argument('--baseline', choices=[b.value for b in Baseline], default=Baseline.NONE.value)
    p.add_argument('--threshold', type=float, default=0.0, help='Relatedness threshold for the pedersen baseline')
    p.add_argument('--jobs', type=int, help='Documents processed in parallel')
    p.add_argument('--gold', help='Gold key file; warns about instances missing on either side')
    p.add_argument('--out', required=True, help='Prediction file to write')
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("score", help="Score predictions against gold keys")
    p.add_argument('--gold', required=True)
    p.add_argument('--pred', required=True)
    p.add_argument('--pos', help='Restrict to one POS')
    p.add_argument('--dataset', help='Restrict to one dataset')
    p.add_argument('--by-dataset', action='store_true')
    p.add_argument('--format', choices=['text', 'tsv'], default='text')
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", help="Dataset statistics")
    p.add_argument('--dataset', required=True)
    p.add_argument('--wordnet')
    p.add_argument('--format', choices=['text', 'tsv'], default='text')
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sim", help="Similarity between two words or two sense keys")
    p.add_argument('--l1')
    p.add_argument('--p1')
    p.add_argument('--l2')
    p.add_argument('--p2')
    p.add_argument('--k1', help='First sense key')
    p.add_argument('--k2', help='Second sense key')
    p.add_argument('--measure', choices=[m.value for m in Measure])
    p.add_argument('--cross-pos', choices=['zero', 'full-graph-path'])
    p.add_argument('--wordnet')
    p.add_argument('--semcor-cntlist')
    p.add_argument('--ic')
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("build-ic", help="Compute an IC table from SemCor counts")
    p.add_argument('--wordnet')
    p.add_argument('--semcor-cntlist')
    p.add_argument('--smoothing', type=float, default=1.0)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_build_ic)

    p = sub.add_parser("cache-heuristics", help="Preload sense counts into SQLite")
    p.add_argument('--db')
    p.add_argument('--semcor-cntlist')
    p.add_argument('--omsti-keys')
    p.set_defaults(func=cmd_cache_heuristics)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        level = (args.log_level or config["runtime"]["log_level"] or "WARNING").upper()
        logging.basicConfig(level=getattr(logging, level, logging.WARNING), format=LOG_FORMAT, stream=sys.stderr)
        return args.func(args, config)
    except (InputFormatError, ScoringError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (WsdError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
