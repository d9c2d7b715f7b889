"""Edge-recovery scores: confusion counts over unordered vertex pairs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .exceptions import ParseError

# Reference values reported for the chain benchmark, columns n = 5..8.
REFERENCE_TABLE = {
    5: dict(tpe=0.72, tne=0.62, accuracy=0.66, precision=0.56, recall=0.72, f1=0.63),
    6: dict(tpe=0.75, tne=0.68, accuracy=0.71, precision=0.54, recall=0.75, f1=0.63),
    7: dict(tpe=0.67, tne=0.68, accuracy=0.67, precision=0.45, recall=0.67, f1=0.54),
    8: dict(tpe=0.68, tne=0.72, accuracy=0.71, precision=0.45, recall=0.68, f1=0.54),
}

ROW_LABELS = [
    ("tpe", "TP"),
    ("tne", "TN"),
    ("accuracy", "Accuracy"),
    ("precision", "Precision"),
    ("recall", "Recall"),
    ("f1", "F1-score"),
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsRecord:
    tpe: float
    tne: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: tuple = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["degenerate"] = list(self.degenerate)
        return d


METRIC_NAMES = [f.name for f in fields(MetricsRecord) if f.name != "degenerate"]


def _as_matrix(adj, name):
    A = np.asarray(adj)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    return A != 0


def confusion(pred, truth) -> ConfusionCounts:
    """Count over pairs ``i < j``; the diagonal is ignored."""
    P, T = _as_matrix(pred, "pred"), _as_matrix(truth, "truth")
    if P.shape != T.shape:
        raise ValueError(f"size mismatch: pred {P.shape[0]} vs truth {T.shape[0]} vertices")
    if not np.array_equal(P, P.T):
        raise ValueError("pred must be symmetric")
    iu = np.triu_indices(P.shape[0], k=1)
    p, t = P[iu], T[iu]
    return ConfusionCounts(
        tp=int(np.sum(p & t)), fp=int(np.sum(p & ~t)),
        tn=int(np.sum(~p & ~t)), fn=int(np.sum(~p & t)),
    )


def _ratio(num, den, name, flags):
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def metrics(counts: ConfusionCounts) -> MetricsRecord:
    """The six scores; a zero denominator yields 0 and a degenerate flag."""
    if counts.total <= 0:
        raise ValueError("no pairs to score")
    flags: list = []
    tpe = _ratio(counts.tp, counts.tp + counts.fn, "tpe", flags)
    tne = _ratio(counts.tn, counts.tn + counts.fp, "tne", flags)
    acc = (counts.tp + counts.tn) / counts.total
    prec = _ratio(counts.tp, counts.tp + counts.fp, "precision", flags)
    f1 = _ratio(2 * prec * tpe, prec + tpe, "f1", flags)
    if "tpe" in flags:
        flags.append("recall")
    return MetricsRecord(tpe, tne, acc, prec, tpe, f1, tuple(flags))


def aggregate(records) -> MetricsRecord:
    """Componentwise mean (F1 is averaged per run, not recomputed)."""
    records = list(records)
    if not records:
        raise ValueError("nothing to aggregate")
    means = {k: float(np.mean([getattr(r, k) for r in records])) for k in METRIC_NAMES}
    flags = sorted({f for r in records for f in r.degenerate})
    return MetricsRecord(**means, degenerate=tuple(flags))


def dump_metrics(record: MetricsRecord, **extra) -> str:
    doc = dict(extra)
    doc.update({k: round(getattr(record, k), 6) for k in METRIC_NAMES})
    doc["degenerate"] = list(record.degenerate)
    return json.dumps(doc, indent=2) + "\n"


def format_table(columns: dict, reference: dict | None = None) -> str:
    """Plain-text table, one row per metric, one column per vertex count.

    Args:
        columns: ``{n: MetricsRecord}``.
        reference: Optional ``{n: {metric: value}}`` printed in parentheses.
    """
    ns = sorted(columns)
    head = ["Number of vertices"] + [f"n={n}" for n in ns]
    rows = []
    for key, label in ROW_LABELS:
        row = [label]
        for n in ns:
            cell = f"{getattr(columns[n], key):.2f}"
            if reference is not None and n in reference:
                cell += f" ({reference[n][key]:.2f})"
            row.append(cell)
        rows.append(row)
    widths = [max(len(r[c]) for r in [head] + rows) for c in range(len(head))]
    sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    out = [sep]
    for r in [head] + rows:
        out.append("| " + " | ".join(cell.ljust(w) for cell, w in zip(r, widths)) + " |")
        out.append(sep)
    return "\n".join(out) + "\n"


def load_edge_document(text: str) -> np.ndarray:
    """Adjacency matrix from any document carrying ``n`` and ``edges``."""
    try:
        doc = json.loads(text)
        n = int(doc["n"])
        A = np.zeros((n, n), dtype=int)
        for e in doc["edges"]:
            i, j = int(e[0]), int(e[1])
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"invalid edge {e}")
            A[i, j] = A[j, i] = 1
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"bad edge document: {exc}") from exc
    return A
