"""Per-step run records and their CSV form.

A trace holds one row per accepted step; row k is the state after k
steps. If the run spent oracle calls after its last accepted step, one
terminal row repeats that k with the final counters, so the last row
always carries the run's totals.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, fields

CSV_HEADER = ("k", "s_goldstein", "s_approx", "s_subgrad", "eps", "g_norm", "gap", "dist")


@dataclass(frozen=True)
class TraceRow:
    k: int
    s_goldstein: int
    s_approx: int
    s_subgrad: int
    eps: float
    g_norm: float
    gap: float
    dist: float


@dataclass
class Trace:
    initial_gap: float
    initial_dist: float
    rows: list[TraceRow] = field(default_factory=list)
    stop_reason: str = ""

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def steps(self) -> list[TraceRow]:
        """Rows of accepted steps, without the terminal row."""
        out = []
        prev_k = 0
        for r in self.rows:
            if r.k > prev_k:
                out.append(r)
            prev_k = r.k
        return out

    def counters(self) -> tuple[int, int, int]:
        if not self.rows:
            return (0, 0, 0)
        last = self.rows[-1]
        return (last.s_goldstein, last.s_approx, last.s_subgrad)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def write_csv(trace: Trace, path=None) -> str:
    """Serialize the rows; returns the text and writes it to ``path`` if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in trace.rows:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(path_or_text, initial_gap=float("nan"), initial_dist=float("nan")) -> Trace:
    if "\n" in str(path_or_text):
        text = str(path_or_text)
    else:
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected trace header {header}")
    types = {f.name: (int if f.type in ("int", int) else float) for f in fields(TraceRow)}
    rows = [TraceRow(**{name: types[name](v) for name, v in zip(CSV_HEADER, rec)})
            for rec in reader if rec]
    return Trace(initial_gap=initial_gap, initial_dist=initial_dist, rows=rows)
