"""Turn pre-scored post streams into binary sentiment series.

Input records carry an id, a timestamp, a numeric sentiment value ``v`` and
optionally a bot flag.  Two line-oriented encodings are read: JSON objects
(one per line) and delimited columns with a header row; the format is
sniffed from the first data line.  Records are processed in non-decreasing
timestamp order (stable, so equal timestamps keep file order) and malformed
lines are counted and logged, never silently dropped.

Thresholding keeps ``v > T`` as 1 and ``v < -T`` as 0; everything in the
closed interval ``[-T, T]`` is discarded.  The bots-only subset filter runs
before thresholding and both removals are tracked separately, so the
counters always partition the input.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from ._validation import check_binary_series
from .errors import ConfigError, DataFormatError

__all__ = [
    "SERIES_MAGIC",
    "SUBSETS",
    "PostRecord",
    "BinarySeries",
    "Descriptives",
    "parse_records",
    "read_records",
    "binarize",
    "descriptives",
    "write_series",
    "read_series",
]

logger = logging.getLogger(__name__)

SUBSETS = ("entire", "bots_only")
SERIES_MAGIC = "# rpurn-series v1"


@dataclass(frozen=True, slots=True)
class PostRecord:
    id: str
    timestamp: float
    sentiment_value: float
    is_bot: bool | None = None


@dataclass(frozen=True)
class BinarySeries:
    """An ordered 0/1 sentiment series plus provenance counters.

    ``source_count`` always equals kept bits + threshold discards + subset
    removals, so no input record is ever unaccounted for.
    """

    values: np.ndarray
    source_count: int
    discarded_count: int
    subset_removed_count: int = 0
    subset: str = "entire"
    threshold: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", check_binary_series(self.values))
        if self.subset not in SUBSETS:
            raise ValueError(f"subset must be one of {SUBSETS}, got {self.subset!r}")
        expected = len(self.values) + self.discarded_count + self.subset_removed_count
        if self.source_count != expected:
            raise ValueError(
                f"counters do not partition the input: source_count={self.source_count}, "
                f"kept+discarded+removed={expected}"
            )

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, slots=True)
class Descriptives:
    posts: int
    pct_positive: float


def _parse_timestamp(raw) -> float:
    if isinstance(raw, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(raw, (int, float)):
        return float(raw)
    text = str(raw).strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(text.replace("Z", "+00:00")).timestamp()
    except ValueError:
        raise ValueError(f"unparseable timestamp {raw!r}") from None


def _parse_bot_flag(raw) -> bool | None:
    if raw is None or isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("", "none", "null"):
        return None
    if text in ("true", "1"):
        return True
    if text in ("false", "0"):
        return False
    raise ValueError(f"unparseable bot flag {raw!r}")


def _record_from_mapping(row: dict) -> PostRecord:
    missing = [k for k in ("id", "timestamp", "sentiment_value") if row.get(k) in (None, "")]
    if missing:
        raise ValueError(f"missing field(s) {missing}")
    return PostRecord(
        id=str(row["id"]),
        timestamp=_parse_timestamp(row["timestamp"]),
        sentiment_value=float(row["sentiment_value"]),
        is_bot=_parse_bot_flag(row.get("is_bot")),
    )


def parse_records(text: str) -> tuple[list[PostRecord], int]:
    """Parse record lines, returning ``(records, malformed_count)``.

    Records come back in input order; malformed lines are logged with their
    line numbers and skipped.
    """
    lines = text.splitlines()
    first_data = next((ln for ln in lines if ln.strip()), None)
    if first_data is None:
        raise DataFormatError("input contains no records")
    if first_data.lstrip().startswith("{"):
        return _parse_jsonl(lines)
    return _parse_delimited(text)


def _parse_jsonl(lines: list[str]) -> tuple[list[PostRecord], int]:
    records: list[PostRecord] = []
    malformed = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            if not isinstance(row, dict):
                raise ValueError("expected a JSON object")
            records.append(_record_from_mapping(row))
        except ValueError as exc:
            malformed += 1
            logger.warning("skipping malformed record at line %d: %s", lineno, exc)
    return records, malformed


def _parse_delimited(text: str) -> tuple[list[PostRecord], int]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "sentiment_value" not in reader.fieldnames:
        raise DataFormatError(
            "delimited input needs a header row including 'sentiment_value'"
        )
    records: list[PostRecord] = []
    malformed = 0
    for row in reader:
        lineno = reader.line_num
        try:
            records.append(_record_from_mapping(row))
        except ValueError as exc:
            malformed += 1
            logger.warning("skipping malformed record at line %d: %s", lineno, exc)
    return records, malformed


def read_records(path) -> tuple[list[PostRecord], int]:
    """Read and timestamp-sort records from a file; returns malformed count too."""
    text = Path(path).read_text(encoding="utf-8")
    records, malformed = parse_records(text)
    records.sort(key=lambda r: r.timestamp)  # stable: ties keep input order
    return records, malformed


def binarize(records, threshold: float, subset: str = "entire") -> BinarySeries:
    """Threshold ordered records into a 0/1 series.

    ``v > threshold`` maps to 1, ``v < -threshold`` to 0 and values inside
    the closed interval ``[-threshold, threshold]`` are discarded.  With
    ``subset="bots_only"`` records are first restricted to those flagged as
    bots; a missing flag on any record is a configuration error then.
    """
    threshold = float(threshold)
    if not threshold > 0.0:
        raise ConfigError(f"threshold must be positive, got {threshold}")
    if subset not in SUBSETS:
        raise ConfigError(f"subset must be one of {SUBSETS}, got {subset!r}")
    records = list(records)
    source_count = len(records)
    subset_removed = 0
    if subset == "bots_only":
        if any(r.is_bot is None for r in records):
            raise ConfigError(
                "subset=bots_only requires the is_bot field on every record"
            )
        kept = [r for r in records if r.is_bot]
        subset_removed = source_count - len(kept)
        records = kept
    bits = []
    discarded = 0
    for record in records:
        v = record.sentiment_value
        if v > threshold:
            bits.append(1)
        elif v < -threshold:
            bits.append(0)
        else:
            discarded += 1
    return BinarySeries(
        values=np.asarray(bits, dtype=np.uint8),
        source_count=source_count,
        discarded_count=discarded,
        subset_removed_count=subset_removed,
        subset=subset,
        threshold=threshold,
    )


def descriptives(series: BinarySeries) -> Descriptives:
    if len(series) == 0:
        raise ValueError("cannot describe an empty series")
    ones = int(series.values.sum())
    return Descriptives(posts=len(series), pct_positive=100.0 * ones / len(series))


# ---------------------------------------------------------------------------
# Series file format: '#'-prefixed key=value header, then one bit per line.
# ---------------------------------------------------------------------------


def write_series(series: BinarySeries, path) -> None:
    header = [
        SERIES_MAGIC,
        f"# subset={series.subset}",
        f"# threshold={'' if series.threshold is None else repr(series.threshold)}",
        f"# source_count={series.source_count}",
        f"# discarded_count={series.discarded_count}",
        f"# subset_removed_count={series.subset_removed_count}",
    ]
    bits = series.values
    body = np.empty(2 * bits.size, dtype=np.uint8)
    body[0::2] = bits + ord("0")
    body[1::2] = ord("\n")
    payload = ("\n".join(header) + "\n").encode("ascii") + body.tobytes()
    Path(path).write_bytes(payload)


def read_series(path) -> BinarySeries:
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n")
    if not lines or lines[0].decode("ascii", "replace").strip() != SERIES_MAGIC:
        raise DataFormatError(f"{path}: not a recognized series file")
    meta: dict[str, str] = {}
    body_start = 0
    for i, line in enumerate(lines):
        text = line.decode("ascii", "replace")
        if not text.startswith("#"):
            body_start = i
            break
        if "=" in text:
            key, _, value = text.lstrip("# ").partition("=")
            meta[key.strip()] = value.strip()
    else:
        body_start = len(lines)
    body = b"".join(lines[body_start:])
    arr = np.frombuffer(body, dtype=np.uint8)
    arr = arr[arr != ord("\r")]
    bits = arr - ord("0")
    if bits.size and not ((bits == 0) | (bits == 1)).all():
        raise DataFormatError(f"{path}: series body must contain only 0/1 lines")
    try:
        threshold_text = meta.get("threshold", "")
        return BinarySeries(
            values=bits,
            source_count=int(meta.get("source_count", bits.size)),
            discarded_count=int(meta.get("discarded_count", 0)),
            subset_removed_count=int(meta.get("subset_removed_count", 0)),
            subset=meta.get("subset", "entire"),
            threshold=float(threshold_text) if threshold_text else None,
        )
    except ValueError as exc:
        raise DataFormatError(f"{path}: invalid series header ({exc})") from None
