"""Deterministic CSV/JSON serialization for all pipeline artifacts.

Numbers are written with 12 significant digits and rows in a fixed
order, so identical inputs always produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .choice import DecisionProblem, TreatmentConfig
from .design import ChoiceRecord, grid_rows
from .equilibrium import SweepRow

GRID_COLUMNS = (
    "scale", "set_index", "position",
    "t_line_A", "t_serve_A",
    "t_serve1_B", "p_B", "t_line_B", "t_serve2_B",
    "exp_time_A", "exp_time_B",
)

CHOICES_COLUMNS = (
    "subject_id", "scale", "set_index", "position",
    "context", "transparency", "nudge", "deterministic",
    "chose_B",
)

SWEEP_COLUMNS = (
    "t_bar_line", "p_B",
    "transparency", "nudge", "priority",
    "rho_B", "lambda_A", "mu", "cost", "savings",
)

TRACE_COLUMNS = (
    "customer", "arrival_time", "route", "bot_failed",
    "queue_entry", "queue_exit", "service_start", "service_end",
)


def fmt(value) -> str:
    """Render one CSV cell: bools as 1/0, numbers at 12 significant digits."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return str(value)


def round12(obj):
    """Recursively round floats to 12 significant digits for JSON output.

    Non-finite floats become null; numpy scalars are converted via their
    item() where present.
    """
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    if isinstance(obj, bool):
        return obj
    if hasattr(obj, "item") and not isinstance(obj, (int, float, str)):
        obj = obj.item()
    if isinstance(obj, Fraction):
        obj = float(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    return obj


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: str | Path, obj) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(round12(obj), fh, indent=2)
        fh.write("\n")


def write_grid_csv(path: str | Path, decisions: Sequence[DecisionProblem]) -> None:
    rows = grid_rows(decisions)
    write_csv(path, GRID_COLUMNS, ([r[c] for c in GRID_COLUMNS] for r in rows))


def write_choices_csv(path: str | Path, records: Sequence[ChoiceRecord]) -> None:
    def row(r: ChoiceRecord):
        t = r.treatment
        return (
            r.subject_id, t.scale, r.set_index, r.position,
            t.context, t.transparency, t.nudge, t.deterministic,
            r.chose_B,
        )

    write_csv(path, CHOICES_COLUMNS, (row(r) for r in records))


def read_choices_csv(path: str | Path) -> list[ChoiceRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CHOICES_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"choice CSV missing columns: {sorted(missing)}")
        for row in reader:
            treatment = TreatmentConfig(
                context=row["context"] == "1",
                transparency=row["transparency"] == "1",
                nudge=row["nudge"] == "1",
                deterministic=row["deterministic"] == "1",
                scale=int(row["scale"]),
            )
            records.append(
                ChoiceRecord(
                    subject_id=row["subject_id"],
                    set_index=int(row["set_index"]),
                    position=int(row["position"]),
                    treatment=treatment,
                    chose_B=row["chose_B"] == "1",
                )
            )
    return records


def write_sweep_csv(path: str | Path, rows: Sequence[SweepRow]) -> None:
    def row(r: SweepRow):
        return (
            r.t_bar_line, r.p_B,
            r.scenario.transparency, r.scenario.nudge, r.scenario.priority,
            r.rho_B, r.lambda_A, r.mu, r.cost, r.savings_vs_baseline,
        )

    write_csv(path, SWEEP_COLUMNS, (row(r) for r in rows))


def write_trace_csv(path: str | Path, trace: Sequence[dict]) -> None:
    write_csv(path, TRACE_COLUMNS, ([t[c] for c in TRACE_COLUMNS] for t in trace))
