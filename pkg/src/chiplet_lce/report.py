"""Deterministic CSV and JSON output.

Floats are written with 15 significant digits, rows and keys in a fixed
order and lines end with ``\\n`` on every platform, so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

from .config import Config
from .explorer import GridPoint, ParetoPoint, ParetoResult
from .metrics import RESULT_COLUMNS, EvalResult

SIG_DIGITS = 15


def fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, f".{SIG_DIGITS}g")
    if value is None:
        return ""
    return str(value)


def _round(value: Any) -> Any:
    """JSON-safe value with floats cut to the same precision as the CSV."""
    if isinstance(value, float):
        return None if not math.isfinite(value) else float(format(value, f".{SIG_DIGITS}g"))
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


def dumps_json(data: Any) -> str:
    return json.dumps(_round(data), indent=2) + "\n"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def result_json(result: EvalResult) -> str:
    return dumps_json(result.scalars())


def result_csv(result: EvalResult) -> str:
    s = result.scalars()
    return write_csv(RESULT_COLUMNS, [[s[c] for c in RESULT_COLUMNS]])


def sweep_csv(points: Sequence[GridPoint]) -> str:
    axes = list(points[0].deltas) if points else []
    header = ["index", *axes, *RESULT_COLUMNS]
    rows = []
    for p in points:
        s = p.result.scalars()
        rows.append([p.index, *(p.deltas[a] for a in axes), *(s[c] for c in RESULT_COLUMNS)])
    return write_csv(header, rows)


def sweep_json(points: Sequence[GridPoint]) -> str:
    return dumps_json([{"index": p.index, "deltas": p.deltas, **p.result.scalars()} for p in points])


PARETO_COLUMNS = ("total_cost", "mttf_arch", "lce", "capacity_transistors")


def frontier_csv(result: ParetoResult) -> str:
    axes = list(result.best.deltas)
    header = ["index", *axes, *PARETO_COLUMNS]
    rows = [[p.index, *(p.deltas[a] for a in axes), p.total_cost, p.mttf_arch, p.lce, p.capacity]
            for p in result.frontier]
    return write_csv(header, rows)


def best_json(point: ParetoPoint) -> str:
    return dumps_json({
        "index": point.index,
        "deltas": point.deltas,
        "metrics": point.result.scalars(),
        "config": point.config.to_dict(),
    })


def config_json(config: Config) -> str:
    return config.to_json()
