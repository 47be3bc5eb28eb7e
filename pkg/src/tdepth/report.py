"""Optimization reports (JSON) and aggregate tables (CSV)."""
from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import Circuit, t_count, t_depth
from .config import Config
from .document import serialize
from .ga import Optimization

CSV_HEADER = ("instance", "n", "c", "t_total", "method", "td_before", "td_after",
              "tc_before", "tc_after", "rounds", "seconds", "seed")
TIMING_KEYS = frozenset({"wall_clock_seconds", "seconds"})


def percent_reduction(before: int, after: int) -> float:
    return 100.0 * (before - after) / before if before else 0.0


def circuit_digest(circuit: Circuit) -> str:
    return hashlib.sha256(serialize(circuit).encode()).hexdigest()


def optimization_report(original: Circuit, result: Optimization, config: Config, seconds: float,
                        source: str | None = None) -> dict:
    out = result.circuit
    td0, tc0 = t_depth(original), t_count(original)
    td1, tc1 = t_depth(out), t_count(out)
    return {
        "source": source,
        "input_sha256": circuit_digest(original),
        "output_sha256": circuit_digest(out),
        "n": original.n,
        "t_depth_before": td0,
        "t_depth_after": td1,
        "t_count_before": tc0,
        "t_count_after": tc1,
        "t_depth_reduction_pct": percent_reduction(td0, td1),
        "t_count_reduction_pct": percent_reduction(tc0, tc1),
        "expanded_t_depth": result.expanded_t_depth,
        "fell_back_unexpanded": result.fell_back,
        "rounds": len(result.logs),
        "residues_extracted": sum(lg.residues for lg in result.logs),
        "round_logs": [lg.as_dict() for lg in result.logs],
        "seed": config.ga.rng_seed,
        "policy": str(config.policy),
        "config": config.as_dict(),
        "wall_clock_seconds": seconds,
    }


def strip_timing(obj):
    """Copy of a report with every wall-clock field removed (for determinism checks)."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


@dataclass(frozen=True)
class CsvRow:
    instance: str
    n: int
    c: int
    t_total: int
    method: str
    td_before: int
    td_after: int
    tc_before: int
    tc_after: int
    rounds: int
    seconds: float
    seed: int | None

    def values(self) -> list:
        return [getattr(self, k) for k in CSV_HEADER]

    @property
    def td_reduction(self) -> float:
        return percent_reduction(self.td_before, self.td_after)

    @property
    def tc_reduction(self) -> float:
        return percent_reduction(self.tc_before, self.tc_after)


def csv_text(rows: Iterable[CsvRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        vals = row.values()
        vals[CSV_HEADER.index("seconds")] = f"{row.seconds:.4f}"
        w.writerow("" if v is None else v for v in vals)
    return buf.getvalue()


def summarize(rows: Sequence[CsvRow]) -> dict[str, dict]:
    """Mean reductions and runtime per method."""
    out: dict[str, dict] = {}
    for method in dict.fromkeys(r.method for r in rows):
        sel = [r for r in rows if r.method == method]
        out[method] = {
            "instances": len(sel),
            "mean_td_reduction_pct": sum(r.td_reduction for r in sel) / len(sel),
            "mean_tc_reduction_pct": sum(r.tc_reduction for r in sel) / len(sel),
            "mean_seconds": sum(r.seconds for r in sel) / len(sel),
        }
    return out
