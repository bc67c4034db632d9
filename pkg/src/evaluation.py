"""
Scoring of predictions against gold keys: precision, recall, F1 and F-alpha,
with per-POS and per-dataset breakdowns.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Union

import pandas as pd

from .corpus import parse_gold_keys, read_predictions
from .models import POS, GoldKeys, Prediction, ScoringError, dataset_of, pos_of_sense_key

logger = logging.getLogger(__name__)

PredictionInput = Union[Mapping[str, str], Iterable[Prediction]]


@dataclass
class ScoreReport:
    n_gold: int = 0
    n_attempted: int = 0
    n_correct: int = 0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    breakdowns: Dict[str, "ScoreReport"] = field(default_factory=dict)


def f1(p: float, r: float) -> float:
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def f_alpha(p: float, r: float, alpha: float) -> float:
    """1 / (alpha/P + (1 - alpha)/R); alpha = 0.5 gives F1."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if p == 0 or r == 0:
        return 0.0
    return 1.0 / (alpha / p + (1.0 - alpha) / r)


def _as_mapping(pred: PredictionInput) -> Dict[str, str]:
    if isinstance(pred, Mapping):
        return dict(pred)
    return {p.instance_id: p.sense_key for p in pred}


def _gold_pos(keys) -> Optional[str]:
    for key in sorted(keys):
        try:
            return pos_of_sense_key(key).value
        except ValueError:
            continue
    return None


def _report(frame: pd.DataFrame) -> ScoreReport:
    n_gold = len(frame)
    n_attempted = int(frame["attempted"].sum())
    n_correct = int(frame["correct"].sum())
    precision = n_correct / n_attempted if n_attempted else 0.0
    recall = n_correct / n_gold if n_gold else 0.0
    return ScoreReport(n_gold, n_attempted, n_correct, precision, recall, f1(precision, recall))


def score(gold: GoldKeys, pred: PredictionInput, pos: Optional[POS] = None,
          dataset: Optional[str] = None, by_pos: bool = True, by_dataset: bool = False) -> ScoreReport:
    """
    Score predictions; a prediction is correct when its key is in the gold set.

    Args:
        gold: Gold keys
        pred: Predictions (mapping instance_id -> sense_key, or Prediction objects)
        pos: Restrict to instances whose gold key has this POS
        dataset: Restrict to one dataset (instance id prefix)
        by_pos: Add per-POS breakdowns
        by_dataset: Add per-dataset breakdowns

    Raises:
        ScoringError: a predicted id does not exist in the gold keys
    """
    predictions = _as_mapping(pred)
    unknown = sorted(set(predictions) - set(gold))
    if unknown:
        raise ScoringError(f"{len(unknown)} predicted instance(s) not in gold, e.g. '{unknown[0]}'")

    rows = []
    for instance_id, keys in gold.items():
        predicted = predictions.get(instance_id)
        rows.append({
            "instance_id": instance_id,
            "dataset": dataset_of(instance_id),
            "pos": _gold_pos(keys),
            "attempted": predicted is not None,
            "correct": predicted is not None and predicted in keys,
        })
    frame = pd.DataFrame(rows, columns=["instance_id", "dataset", "pos", "attempted", "correct"])
    if pos is not None:
        frame = frame[frame["pos"] == pos.value]
    if dataset is not None:
        frame = frame[frame["dataset"] == dataset]

    report = _report(frame)
    if by_pos:
        for value, group in frame.groupby("pos", sort=True):
            report.breakdowns[f"pos={value}"] = _report(group)
    if by_dataset:
        for value, group in frame.groupby("dataset", sort=True):
            report.breakdowns[f"dataset={value}"] = _report(group)
    return report


def score_files(gold_path: str, pred_path: str, pos: Optional[POS] = None,
                dataset: Optional[str] = None, by_dataset: bool = False) -> ScoreReport:
    return score(parse_gold_keys(gold_path), read_predictions(pred_path), pos=pos,
                 dataset=dataset, by_dataset=by_dataset)


def _report_rows(report: ScoreReport) -> List[tuple]:
    return [("all", report)] + list(report.breakdowns.items())


def format_report_text(report: ScoreReport) -> str:
    lines = [f"{'slice':<24} {'gold':>7} {'attempted':>9} {'correct':>7} {'P':>7} {'R':>7} {'F1':>7}"]
    for name, r in _report_rows(report):
        lines.append(f"{name:<24} {r.n_gold:>7} {r.n_attempted:>9} {r.n_correct:>7} "
                     f"{100 * r.precision:>7.1f} {100 * r.recall:>7.1f} {100 * r.f1:>7.1f}")
    return "\n".join(lines) + "\n"


def format_report_tsv(report: ScoreReport) -> str:
    """Line-oriented `metric<TAB>slice<TAB>value` report."""
    lines = []
    for name, r in _report_rows(report):
        for metric, value in (("n_gold", r.n_gold), ("n_attempted", r.n_attempted),
                              ("n_correct", r.n_correct), ("precision", f"{r.precision:.6f}"),
                              ("recall", f"{r.recall:.6f}"), ("f1", f"{r.f1:.6f}")):
            lines.append(f"{metric}\t{name}\t{value}")
    return "\n".join(lines) + "\n"
