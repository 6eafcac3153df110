"""Curating benchmark families from per-solver timing records.

A formula is eligible when its fastest solver time lies in [10 s, 1 h].
Eligible formulas of one (fragment, status) family are grouped by that
time rounded half-up to whole minutes, and classes are then drained
round-robin, smallest files first, until the family holds `target` members.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

MIN_TIME, MAX_TIME = 10.0, 3600.0
ANSWERS = ("SAT", "UNSAT")
RECORD_FIELDS = ("formula", "fragment", "status", "solver", "time_s", "file_size")


@dataclass(frozen=True)
class BenchmarkRecord:
    formula: str
    fragment: str
    status: str
    times: dict[str, float]
    file_size: int

    @property
    def min_time(self) -> float:
        return min(self.times.values())

    @property
    def family(self) -> tuple[str, str]:
        return (self.fragment, self.status)


@dataclass
class FamilySelection:
    family: tuple[str, str]
    classes: dict[int, list[BenchmarkRecord]]
    chosen: list[tuple[BenchmarkRecord, int, int]] = field(default_factory=list)

    def counts(self) -> dict[int, int]:
        out = {k: 0 for k in self.classes}
        for _, key, _ in self.chosen:
            out[key] += 1
        return out

    def summary(self) -> str:
        fragment, status = self.family
        eligible = sum(len(v) for v in self.classes.values())
        return (
            f"{fragment} {status}: {len(self.chosen)} chosen from "
            f"{len(self.classes)} classes ({eligible} eligible)"
        )


def read_records(text: str) -> tuple[list[BenchmarkRecord], list[str]]:
    """Aggregate per-solver CSV rows into records.

    Rows whose status is not SAT/UNSAT or whose time is empty count as a
    timeout for that solver. Returns the records and the ids of rejected
    formulas (conflicting answers, mixed fragment or size, no answer at all).
    """
    reader = csv.DictReader(io.StringIO(text))
    missing = set(RECORD_FIELDS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"records file lacks columns {sorted(missing)}")
    rows = defaultdict(list)
    for row in reader:
        rows[row["formula"]].append(row)

    records, rejected = [], []
    for formula in sorted(rows):
        group = rows[formula]
        fragments = {r["fragment"].upper() for r in group}
        sizes = {int(r["file_size"]) for r in group}
        times, answers = {}, set()
        for r in group:
            status = r["status"].strip().upper()
            if status in ANSWERS and r["time_s"].strip():
                answers.add(status)
                t = float(r["time_s"])
                times[r["solver"]] = min(t, times.get(r["solver"], math.inf))
        if len(fragments) != 1 or len(sizes) != 1 or len(answers) != 1:
            rejected.append(formula)
            continue
        records.append(
            BenchmarkRecord(formula, fragments.pop(), answers.pop(), times, sizes.pop())
        )
    return records, rejected


def by_family(records: Iterable[BenchmarkRecord]) -> dict[tuple[str, str], list[BenchmarkRecord]]:
    out = defaultdict(list)
    for r in records:
        out[r.family].append(r)
    return dict(sorted(out.items()))


def minute_key(seconds: float) -> int:
    return math.floor(seconds / 60 + 0.5)


def classify(records: Iterable[BenchmarkRecord]) -> dict[int, list[BenchmarkRecord]]:
    """Minute classes of the in-window records, each sorted by (file size, id)."""
    classes = defaultdict(list)
    for r in records:
        t = r.min_time
        if MIN_TIME <= t <= MAX_TIME:
            classes[minute_key(t)].append(r)
    return {
        k: sorted(v, key=lambda r: (r.file_size, r.formula)) for k, v in sorted(classes.items())
    }


def select_family(
    classes: dict[int, Sequence[BenchmarkRecord]], target: int = 100
) -> FamilySelection:
    keys = sorted(classes)
    ordered = {k: sorted(classes[k], key=lambda r: (r.file_size, r.formula)) for k in keys}
    families = {r.family for v in ordered.values() for r in v}
    if len(families) > 1:
        raise ValueError(f"classes mix several families: {sorted(families)}")
    family = families.pop() if families else ("", "")
    sel = FamilySelection(family, ordered)
    depth = 0
    while len(sel.chosen) < target:
        took = False
        for k in keys:
            if depth < len(ordered[k]) and len(sel.chosen) < target:
                sel.chosen.append((ordered[k][depth], k, depth + 1))
                took = True
        if not took:
            break
        depth += 1
    return sel


def format_selection(selections: Sequence[FamilySelection]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["formula", "class", "rank"])
    for sel in selections:
        for rec, key, rank in sel.chosen:
            w.writerow([rec.formula, key, rank])
    return buf.getvalue()


def select_all(records: Iterable[BenchmarkRecord], target: int = 100) -> list[FamilySelection]:
    out = []
    for family, members in by_family(records).items():
        classes = classify(members)
        sel = select_family(classes, target) if classes else FamilySelection(family, {})
        sel.family = family
        out.append(sel)
    return out
