"""Region records, CSV ingestion and synthetic panels.

The wire format is a strict CSV with the header
``region_id,region_name,income,poverty_share,gini``: comma separated,
``.`` as the decimal mark, no extra columns.  Gini is a fraction in (0, 1);
percent-scaled Gini values and decimal commas are rejected rather than
coerced.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DataError,
    DuplicateIdError,
    GenerationError,
    ParameterError,
    RowError,
    SchemaError,
)

COLUMNS = ("region_id", "region_name", "income", "poverty_share", "gini")
FEATURES = ("income", "poverty_share", "gini")

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")

# Cluster means and sizes published for the 2018 k-means run:
# (income rub./month, share below living wage %, Gini), count.
TABLE1_CENTROIDS = (
    (19521.0, 24.37, 0.355),
    (62125.0, 8.00, 0.409),
    (30196.0, 13.50, 0.389),
    (25308.0, 13.70, 0.355),
)
TABLE1_COUNTS = (10, 9, 31, 35)
TABLE1_NAMES = ("First", "Second", "Third", "Fourth")


@dataclass(frozen=True)
class RegionRecord:
    region_id: str
    region_name: str
    income: float
    poverty_share: float
    gini: float

    def __post_init__(self):
        if not self.region_id:
            raise DataError("region_id must be non-empty")
        for name in FEATURES:
            if not math.isfinite(getattr(self, name)):
                raise DataError(f"{name} must be finite")
        if self.income <= 0:
            raise DataError(f"income must be positive, got {self.income!r}")
        if not 0 <= self.poverty_share <= 100:
            raise DataError(f"poverty_share out of range [0,100]: {self.poverty_share!r}")
        if not 0 < self.gini < 1:
            raise DataError(f"gini out of range (0,1): {self.gini!r}")

    def values(self) -> tuple[float, float, float]:
        return (self.income, self.poverty_share, self.gini)


@dataclass(frozen=True)
class Dataset:
    records: tuple[RegionRecord, ...]
    year: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if not self.records:
            raise DataError("dataset has no records")
        seen = set()
        for rec in self.records:
            if rec.region_id in seen:
                raise DuplicateIdError(f"duplicate region_id {rec.region_id!r}")
            seen.add(rec.region_id)

    def __len__(self):
        return len(self.records)

    @property
    def region_ids(self) -> list[str]:
        return [r.region_id for r in self.records]


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """An n x p block of finite reals with named columns.

    ``standardized`` records the transform applied: ``"none"`` or ``"zscore"``.
    The array is stored read-only.
    """

    values: np.ndarray
    column_names: tuple[str, ...] = FEATURES
    standardized: str = "none"

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2:
            raise DataError(f"feature matrix must be 2-D, got shape {arr.shape}")
        if arr.shape[1] != len(self.column_names):
            raise DataError("column_names length does not match matrix width")
        if not np.all(np.isfinite(arr)):
            raise DataError("feature matrix contains non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (
            self.column_names == other.column_names
            and self.standardized == other.standardized
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class Archetype:
    centroid: tuple[float, ...]
    count: int
    noise_scale: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "centroid", tuple(float(v) for v in self.centroid))
        object.__setattr__(self, "noise_scale", tuple(float(v) for v in self.noise_scale))
        if self.count <= 0:
            raise ParameterError("archetype count must be positive")
        if len(self.centroid) != len(self.noise_scale):
            raise ParameterError("centroid and noise_scale lengths differ")
        if any(s < 0 or not math.isfinite(s) for s in self.noise_scale):
            raise ParameterError("noise scales must be finite and nonnegative")


@dataclass(frozen=True)
class SyntheticSpec:
    archetypes: tuple[Archetype, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "archetypes", tuple(self.archetypes))
        if not self.archetypes:
            raise ParameterError("synthetic spec needs at least one archetype")

    @property
    def n(self) -> int:
        return sum(a.count for a in self.archetypes)


class SyntheticPanel(NamedTuple):
    dataset: Dataset
    labels: tuple[int, ...]


def _parse_number(text: str, field_name: str, row: int) -> float:
    text = text.strip()
    if not _NUMBER.fullmatch(text):
        raise RowError(f"{field_name} is not a number ({text!r})", row, field_name)
    value = float(text)
    if not math.isfinite(value):
        raise RowError(f"{field_name} is not finite", row, field_name)
    return value


def _check_header(header: Sequence[str]) -> None:
    header = [h.strip() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    extra = [h for h in header if h not in COLUMNS]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    if extra:
        raise SchemaError(f"unexpected column(s): {', '.join(extra)}")
    if len(header) != len(COLUMNS) or tuple(header) != COLUMNS:
        raise SchemaError(f"header must be exactly {','.join(COLUMNS)}")


def parse_dataset(csv_text: str, year: int | None = None) -> Dataset:
    """Parse panel CSV text into a validated :class:`Dataset`.

    Rows are numbered as in the file, the header being row 1.
    """
    if csv_text.startswith("﻿"):
        csv_text = csv_text[1:]
    reader = csv.reader(io.StringIO(csv_text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty input: header row required") from None
    _check_header(header)

    records = []
    seen: dict[str, int] = {}
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(COLUMNS):
            raise RowError(f"expected {len(COLUMNS)} fields, found {len(row)}", row_no, "")
        region_id = row[0].strip()
        if not region_id:
            raise RowError("region_id is empty", row_no, "region_id")
        if region_id in seen:
            raise DuplicateIdError(
                f"duplicate region_id {region_id!r} at row {row_no} (first seen at row {seen[region_id]})"
            )
        seen[region_id] = row_no
        income = _parse_number(row[2], "income", row_no)
        poverty = _parse_number(row[3], "poverty_share", row_no)
        gini = _parse_number(row[4], "gini", row_no)
        if income <= 0:
            raise RowError("income must be positive", row_no, "income")
        if not 0 <= poverty <= 100:
            raise RowError("poverty_share out of range [0,100]", row_no, "poverty_share")
        if not 0 < gini < 1:
            raise RowError("gini out of range (0,1)", row_no, "gini")
        records.append(RegionRecord(region_id, row[1], income, poverty, gini))
    if not records:
        raise DataError("no data rows")
    return Dataset(tuple(records), year)


def serialize_dataset(ds: Dataset) -> str:
    """Inverse of :func:`parse_dataset`; floats are written with ``repr``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in ds.records:
        writer.writerow([r.region_id, r.region_name, repr(r.income), repr(r.poverty_share), repr(r.gini)])
    return buf.getvalue()


def to_feature_matrix(ds: Dataset) -> FeatureMatrix:
    return FeatureMatrix(np.array([r.values() for r in ds.records], dtype=float), FEATURES, "none")


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


# Open bounds clamp to a point just inside the interval.
_EPS = 1e-9
_BOUNDS = ((_EPS, math.inf), (0.0, 100.0), (_EPS, 1.0 - _EPS))


def generate_synthetic(spec: SyntheticSpec, year: int | None = None) -> SyntheticPanel:
    """Draw a labelled panel around the archetype centroids.

    Each coordinate is ``centroid + noise_scale * z`` with ``z`` standard
    normal from a PCG64 stream seeded by ``spec.seed``; draws are made
    archetype by archetype, record by record, coordinate by coordinate.
    Values leaving the record domain are clamped; a clamp that moves a value
    by more than half its magnitude raises :class:`GenerationError`.
    """
    for a in spec.archetypes:
        if len(a.centroid) != len(FEATURES):
            raise ParameterError(f"archetype centroids need {len(FEATURES)} coordinates")
    rng = np.random.Generator(np.random.PCG64(spec.seed & 0xFFFFFFFFFFFFFFFF))
    records = []
    labels = []
    width = max(3, len(str(spec.n)))
    idx = 0
    for a_no, arch in enumerate(spec.archetypes):
        for _ in range(arch.count):
            z = rng.standard_normal(len(FEATURES))
            vals = []
            for j, name in enumerate(FEATURES):
                raw = arch.centroid[j] + arch.noise_scale[j] * float(z[j])
                lo, hi = _BOUNDS[j]
                clamped = _clamp(raw, lo, hi)
                if abs(clamped - raw) > 0.5 * abs(raw):
                    raise GenerationError(
                        f"noise too large for centroid: {name} drawn as {raw!r} for archetype {a_no}"
                    )
                vals.append(clamped)
            idx += 1
            records.append(
                RegionRecord(f"SYN-{idx:0{width}d}", f"Synthetic region {idx} (archetype {a_no + 1})", *vals)
            )
            labels.append(a_no)
    return SyntheticPanel(Dataset(tuple(records), year), tuple(labels))


def table1_spec(noise_fraction: float = 0.0, seed: int = 0) -> SyntheticSpec:
    """Four archetypes at the published cluster means and sizes.

    ``noise_fraction`` scales the per-coordinate noise relative to the
    smallest distance between two archetype centroids measured in z-scored
    units of the noise-free panel; it is converted back to raw units
    column by column.
    """
    if noise_fraction < 0:
        raise ParameterError("noise_fraction must be nonnegative")
    cents = np.array(TABLE1_CENTROIDS)
    counts = np.array(TABLE1_COUNTS, dtype=float)
    mean = counts @ cents / counts.sum()
    std = np.sqrt(counts @ (cents - mean) ** 2 / counts.sum())
    z = (cents - mean) / std
    gap = min(
        float(np.linalg.norm(z[i] - z[j])) for i in range(len(z)) for j in range(i + 1, len(z))
    )
    scale = tuple(float(s) for s in noise_fraction * gap * std)
    archetypes = tuple(Archetype(c, n, scale) for c, n in zip(TABLE1_CENTROIDS, TABLE1_COUNTS))
    return SyntheticSpec(archetypes, seed)


class LabelsFile(NamedTuple):
    region_ids: tuple[str, ...]
    clusters: tuple[int, ...]


def format_labels_csv(region_ids: Sequence[str], labels: Sequence[int]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region_id", "cluster"])
    for rid, lab in zip(region_ids, labels):
        writer.writerow([rid, int(lab)])
    return buf.getvalue()


def parse_labels_csv(text: str) -> LabelsFile:
    reader = csv.reader(io.StringIO(text.lstrip("﻿"), newline=""))
    header = [h.strip() for h in next(reader, [])]
    if header != ["region_id", "cluster"]:
        raise SchemaError("labels file header must be exactly region_id,cluster")
    ids, clusters = [], []
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise RowError("expected 2 fields", row_no, "")
        try:
            clusters.append(int(row[1]))
        except ValueError:
            raise RowError("cluster is not an integer", row_no, "cluster") from None
        ids.append(row[0].strip())
    return LabelsFile(tuple(ids), tuple(clusters))
