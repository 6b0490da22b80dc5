"""Readers for class manifests, prediction records, timing logs and summary tables.

Every failure raises :class:`~procperf.errors.ValidationError` carrying the
file, line and field; no malformed record is skipped silently.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping, Union

from .errors import FormatError, ValidationError
from .metrics import EvalSet, Sample
from .perf import TimingRecord

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

TIMING_HEADER = ["model", "gpus", "epoch", "seconds"]
FIXTURE_GPUS = (2, 4, 8, 16, 32, 64)
FIXTURE_HEADER = [
    "model_type", "backbone", "top1", "top5", "auc_norm", "j_max", "k_at_jmax",
    *(f"t{g}" for g in FIXTURE_GPUS),
]
CHANCE_MODEL_TYPE = "random chance"
BUNDLED_TABLE = "@table3"


def bundled_fixture_path() -> Path:
    """Path of the summary table shipped with the package."""
    return Path(str(resources.files("procperf") / "data" / "table3.csv"))


def resolve_fixture_path(path: PathLike) -> Path:
    if str(path) == BUNDLED_TABLE:
        return bundled_fixture_path()
    return Path(path)


@dataclass(frozen=True)
class ClassManifest:
    classes: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.classes:
            raise ValidationError("class manifest is empty")
        if len(set(self.classes)) != len(self.classes):
            raise ValidationError("class names must be unique")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.classes)})

    def __len__(self) -> int:
        return len(self.classes)

    def index(self, name: str) -> int:
        return self._index[name]  # type: ignore[attr-defined]

    def __contains__(self, name: object) -> bool:
        return name in self._index  # type: ignore[attr-defined]


def load_class_manifest(path: PathLike) -> ClassManifest:
    """One class name per line; blank lines and ``#`` comments are skipped."""
    path = Path(path)
    names: list[str] = []
    first_seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            name = raw.strip()
            if not name or name.startswith("#"):
                continue
            if name in first_seen:
                raise ValidationError(
                    f"duplicate class {name!r} (first on line {first_seen[name]}, again on line {lineno})",
                    path=str(path), line=lineno,
                )
            first_seen[name] = lineno
            names.append(name)
    if not names:
        raise ValidationError("class manifest is empty", path=str(path))
    return ClassManifest(tuple(names))


def _parse_prediction(obj: object, manifest: ClassManifest, where: dict) -> Sample:
    if not isinstance(obj, dict):
        raise FormatError("record is not an object", **where)
    sid = obj.get("id")
    if not isinstance(sid, str) or not sid:
        raise ValidationError("missing or non-string id", field="id", **where)

    def fail(msg: str, fld: str) -> ValidationError:
        return ValidationError(f"{msg} (sample_id={sid!r})", field=fld, **where)

    scores = obj.get("scores")
    if not isinstance(scores, list):
        raise fail("scores must be an array", "scores")
    if len(scores) != len(manifest):
        raise fail(f"{len(scores)} scores, expected {len(manifest)}", "scores")
    for s in scores:
        if isinstance(s, bool) or not isinstance(s, (int, float)) or not math.isfinite(s):
            raise fail(f"non-finite or non-numeric score {s!r}", "scores")

    index = obj.get("label_index")
    name = obj.get("label_name")
    if index is None and name is None:
        raise fail("record has neither label_index nor label_name", "label_index")
    if index is not None:
        if isinstance(index, bool) or not isinstance(index, int) or not 0 <= index < len(manifest):
            raise fail(f"label_index {index!r} outside [0, {len(manifest)})", "label_index")
    if name is not None:
        if name not in manifest:
            raise fail(f"unknown label_name {name!r}", "label_name")
        if index is not None and manifest.index(name) != index:
            raise fail(
                f"label_index {index} conflicts with label_name {name!r} (index {manifest.index(name)})",
                "label_index",
            )
        index = manifest.index(name)
    return Sample(sid, index, tuple(scores))


def iter_predictions(path: PathLike, manifest: ClassManifest) -> Iterator[Sample]:
    """Stream samples from a newline-delimited JSON predictions file."""
    path = Path(path)
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            where = {"path": str(path), "line": lineno}
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", **where) from None
            sample = _parse_prediction(obj, manifest, where)
            if sample.sample_id in seen:
                raise ValidationError(
                    f"duplicate sample_id {sample.sample_id!r} (first on line {seen[sample.sample_id]})",
                    field="id", **where,
                )
            seen[sample.sample_id] = lineno
            yield sample


def load_predictions(path: PathLike, manifest: ClassManifest) -> EvalSet:
    samples = tuple(iter_predictions(path, manifest))
    if not samples:
        raise ValidationError("predictions file has no records", path=str(path))
    return EvalSet(len(manifest), samples)


def _read_csv(path: Path, header: list[str]) -> Iterator[tuple[int, dict[str, str]]]:
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise FormatError(f"expected header {','.join(header)!r}, got {first!r}", path=str(path), line=1)
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(
                    f"expected {len(header)} fields, got {len(row)}", path=str(path), line=lineno
                )
            yield lineno, {k: v.strip() for k, v in zip(header, row)}


def _num(value: str, kind: type, fld: str, where: dict):
    try:
        out = kind(value)
    except ValueError:
        raise ValidationError(f"cannot parse {value!r} as {kind.__name__}", field=fld, **where) from None
    if kind is float and not math.isfinite(out):
        raise ValidationError(f"non-finite value {value!r}", field=fld, **where)
    return out


def load_timing_log(path: PathLike) -> list[TimingRecord]:
    """CSV with header ``model,gpus,epoch,seconds``."""
    path = Path(path)
    records: list[TimingRecord] = []
    for lineno, row in _read_csv(path, TIMING_HEADER):
        where = {"path": str(path), "line": lineno}
        if not row["model"]:
            raise ValidationError("empty model id", field="model", **where)
        gpus = _num(row["gpus"], int, "gpus", where)
        epoch = _num(row["epoch"], int, "epoch", where)
        seconds = _num(row["seconds"], float, "seconds", where)
        try:
            records.append(TimingRecord(row["model"], gpus, epoch, seconds))
        except ValidationError as exc:
            raise ValidationError(exc.message, field=exc.field, **where) from None
    if not records:
        log.warning("%s: timing log has no records", path)
    return records


@dataclass(frozen=True)
class ModelSummaryFixture:
    """One pre-aggregated results row: accuracy in percent plus per-GPU epoch times."""

    model_type: str
    backbone: str
    top1: float
    top5: float | None
    auc_norm: float
    j_max: float
    k_at_jmax: int | None
    times: Mapping[int, float] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.model_type} {self.backbone}".strip()

    @property
    def is_chance(self) -> bool:
        return self.model_type == CHANCE_MODEL_TYPE

    def timing_records(self) -> list[TimingRecord]:
        return [TimingRecord(self.label, g, 0, s) for g, s in self.times.items()]


def load_summary_fixtures(path: PathLike) -> list[ModelSummaryFixture]:
    path = resolve_fixture_path(path)
    out: list[ModelSummaryFixture] = []
    for lineno, row in _read_csv(path, FIXTURE_HEADER):
        where = {"path": str(path), "line": lineno}
        top1 = _num(row["top1"], float, "top1", where)
        top5 = _num(row["top5"], float, "top5", where) if row["top5"] else None
        for fld, val in (("top1", top1), ("top5", top5)):
            if val is not None and not 0 <= val <= 100:
                raise ValidationError(f"percentage {val} outside [0, 100]", field=fld, **where)
        auc_n = _num(row["auc_norm"], float, "auc_norm", where)
        if not 0 < auc_n < 1:
            raise ValidationError(f"auc_norm {auc_n} outside (0, 1)", field="auc_norm", **where)
        j_max = _num(row["j_max"], float, "j_max", where)
        if not 0 <= j_max < 1:
            raise ValidationError(f"j_max {j_max} outside [0, 1)", field="j_max", **where)
        k = _num(row["k_at_jmax"], int, "k_at_jmax", where) if row["k_at_jmax"] else None
        times: dict[int, float] = {}
        for g in FIXTURE_GPUS:
            cell = row[f"t{g}"]
            if cell:
                sec = _num(cell, float, f"t{g}", where)
                if sec <= 0:
                    raise ValidationError(f"non-positive time {sec}", field=f"t{g}", **where)
                times[g] = sec
        out.append(
            ModelSummaryFixture(row["model_type"], row["backbone"], top1, top5, auc_n, j_max, k, times)
        )
    return out
