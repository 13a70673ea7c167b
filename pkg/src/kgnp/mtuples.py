"""Fixed-length attribute-triplet records (m-lets) and their statistics.

A subject's record is a sequence of exactly m triplets, one per attribute
kind, plus a positive/negative label.  The cardiovascular layout (m=11)
ships as a built-in schema in both paper units (years, meters) and the raw
units of the public CSV (days, centimeters).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DataError
from .terms import Atom, Num, Triplet

POSITIVE = "positive"
NEGATIVE = "negative"
UNKNOWN = "unknown"

CARDIO_ATTRIBUTES = (
    "age",
    "gender",
    "height",
    "weight",
    "ap_hi",
    "ap_lo",
    "cholesterol",
    "gluc",
    "smoke",
    "alco",
    "active",
)

CARDIO_FINITE = frozenset(
    {"gender", "cholesterol", "gluc", "smoke", "alco", "active"}
)

# Normal value intervals, in paper units (years / meters / kg / mmHg / levels).
CARDIO_INTERVALS = {
    "age": (0.0, 130.0),
    "gender": (1.0, 2.0),
    "height": (0.50, 2.30),
    "weight": (3.0, 200.0),
    "ap_hi": (60.0, 230.0),
    "ap_lo": (40.0, 220.0),
    "cholesterol": (1.0, 3.0),
    "gluc": (1.0, 3.0),
    "smoke": (0.0, 1.0),
    "alco": (0.0, 1.0),
    "active": (0.0, 1.0),
}

# The paper's attribute weights for the 11-let layout, in attribute order.
CARDIO_WEIGHTS = (4, 4, 2, 4, 8, 8, 7, 7, 2, 2, 2)

DAYS_PER_YEAR = 365.25


@dataclass
class DatasetSchema:
    attributes: Tuple[str, ...]
    label_column: str = "cardio"
    id_column: str = "id"
    delimiter: str = ";"
    finite: frozenset = frozenset()
    intervals: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    # multiply raw CSV values by this factor to get analysis (paper) units
    unit_scale: Dict[str, float] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.attributes)

    def scale(self, attribute: str, value: float) -> float:
        return value * self.unit_scale.get(attribute, 1.0)

    def interval(self, attribute: str) -> Optional[Tuple[float, float]]:
        return self.intervals.get(attribute)


def cardio_schema(kaggle_units: bool = False) -> DatasetSchema:
    """The 11-attribute cardiovascular layout.  With `kaggle_units` the CSV
    stores age in days and height in centimeters; intervals follow suit and
    unit scales convert back to years/meters for analysis."""
    intervals = dict(CARDIO_INTERVALS)
    scale: Dict[str, float] = {}
    if kaggle_units:
        intervals["age"] = (0.0, 130.0 * DAYS_PER_YEAR)
        intervals["height"] = (50.0, 230.0)
        scale = {"age": 1.0 / DAYS_PER_YEAR, "height": 0.01}
    return DatasetSchema(
        attributes=CARDIO_ATTRIBUTES,
        finite=CARDIO_FINITE,
        intervals=intervals,
        unit_scale=scale,
    )


@dataclass
class MTuple:
    id: str
    triplets: Tuple[Triplet, ...]
    label: str  # positive | negative | unknown

    def __post_init__(self):
        if self.label not in (POSITIVE, NEGATIVE, UNKNOWN):
            raise DataError("bad label %r" % self.label)

    def value(self, i: int) -> float:
        tail = self.triplets[i].tail
        if not isinstance(tail, Num):
            raise DataError("attribute %d of %s is not numeric" % (i, self.id))
        return tail.value

    def values(self) -> List[float]:
        return [self.value(i) for i in range(len(self.triplets))]


def _parse_value(text: str, column: str, lineno: int):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise DataError(
            "non-numeric value %r in column %r (line %d)" % (text, column, lineno)
        ) from None


def ingest_mtuples(
    path_or_text, schema: DatasetSchema, require_label: bool = True
) -> List[MTuple]:
    """One row per subject; the i-th triplet of each record is
    (row-id, attribute_i, value_i); label 1 -> positive, 0 -> negative.
    Without `require_label` a missing label column reads as unknown."""
    if hasattr(path_or_text, "read"):
        fh = path_or_text
        close = False
    else:
        fh = open(path_or_text, newline="", encoding="utf-8")
        close = True
    try:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        header = next(reader, None)
        if header is None:
            return []
        header = [h.strip() for h in header]
        required = [schema.id_column, *schema.attributes]
        has_label = schema.label_column in header
        if require_label and not has_label:
            raise DataError("missing column %r in CSV header" % schema.label_column)
        if has_label:
            required.append(schema.label_column)
        for col in required:
            if col not in header:
                raise DataError("missing column %r in CSV header" % col)
        col_index = {name: header.index(name) for name in required}
        out: List[MTuple] = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            rid = row[col_index[schema.id_column]].strip()
            if rid in seen:
                raise DataError("row-id collision: %r (line %d)" % (rid, lineno))
            seen.add(rid)
            triplets = tuple(
                Triplet(
                    Atom(rid),
                    attr,
                    Num(_parse_value(row[col_index[attr]], attr, lineno)),
                )
                for attr in schema.attributes
            )
            if has_label:
                raw_label = row[col_index[schema.label_column]].strip()
                if raw_label == "1":
                    label = POSITIVE
                elif raw_label == "0":
                    label = NEGATIVE
                else:
                    raise DataError("bad label %r (line %d)" % (raw_label, lineno))
            else:
                label = UNKNOWN
            out.append(MTuple(rid, triplets, label))
        return out
    finally:
        if close:
            fh.close()


def serialize_mtuples(mtuples: Sequence[MTuple], schema: DatasetSchema) -> str:
    """Inverse of ingest_mtuples for round-trip checks."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=schema.delimiter, lineterminator="\n")
    writer.writerow([schema.id_column, *schema.attributes, schema.label_column])
    for mt in mtuples:
        row = [mt.id]
        for t in mt.triplets:
            row.append(str(t.tail))
        row.append("1" if mt.label == POSITIVE else "0")
        writer.writerow(row)
    return buf.getvalue()


# -- attribute-risk statistics ------------------------------------------

# Bad-value thresholds in paper units: nine derived attributes, where
# bad-BMI replaces (height, weight, gender).
DEFAULT_BAD_SPEC: Dict[str, Callable[[float], bool]] = {
    "age": lambda v: v > 60,
    "ap_hi": lambda v: v > 130,
    "ap_lo": lambda v: v > 80,
    "cholesterol": lambda v: v != 1,
    "gluc": lambda v: v != 1,
    "smoke": lambda v: v == 1,
    "alco": lambda v: v == 1,
    "active": lambda v: v == 0,
    "bmi": lambda v: v > 25,
}

BMI_INPUTS = ("height", "weight", "gender")


def derived_record(mt: MTuple, schema: DatasetSchema) -> Dict[str, float]:
    """Scaled attribute values with BMI replacing (height, weight, gender)."""
    values = {}
    for i, attr in enumerate(schema.attributes):
        values[attr] = schema.scale(attr, mt.value(i))
    out = {a: v for a, v in values.items() if a not in BMI_INPUTS}
    if all(a in values for a in BMI_INPUTS):
        height_m = values["height"]
        weight_kg = values["weight"]
        if height_m <= 0:
            raise DataError("non-positive height for %s" % mt.id)
        out["bmi"] = weight_kg / (height_m * height_m)
    return out


def bad_attribute_rates(
    mtuples: Sequence[MTuple],
    bad_spec: Dict[str, Callable[[float], bool]],
    sample_n: int,
    seed: int,
    schema: Optional[DatasetSchema] = None,
) -> Dict[str, float]:
    """Sample without replacement, keep positives, and report per attribute
    the fraction of positives whose value is bad."""
    if schema is None:
        schema = cardio_schema()
    if sample_n > len(mtuples):
        raise DataError(
            "sample_n %d exceeds dataset size %d" % (sample_n, len(mtuples))
        )
    probe = derived_record(mtuples[0], schema) if mtuples else {}
    if set(bad_spec) != set(probe):
        raise DataError(
            "bad_spec covers %s but derived attributes are %s"
            % (sorted(bad_spec), sorted(probe))
        )
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(mtuples), size=sample_n, replace=False)
    sampled = [mtuples[i] for i in idx]
    positives = [mt for mt in sampled if mt.label == POSITIVE]
    count = len(positives)
    if count == 0:
        raise DataError("no positive samples in the draw")
    rates = {}
    for attr, predicate in bad_spec.items():
        bad = sum(1 for mt in positives if predicate(derived_record(mt, schema)[attr]))
        rates[attr] = bad / count
    return rates
