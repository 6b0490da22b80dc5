"""Writers for the prediction and timing-log formats the loaders read."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from ..ingest import TIMING_HEADER
from ..metrics import EvalSet
from ..perf import TimingRecord


def dump_predictions(eval_set: EvalSet) -> str:
    """One JSON object per line with ``id``, ``label_index`` and ``scores``."""
    lines = [
        json.dumps({"id": s.sample_id, "label_index": s.true_label, "scores": list(s.scores)})
        for s in eval_set.samples
    ]
    return "\n".join(lines) + "\n"


def dump_timing_log(records: Iterable[TimingRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TIMING_HEADER)
    for r in records:
        writer.writerow([r.model_id, r.gpus, r.epoch, repr(float(r.seconds))])
    return buf.getvalue()
