"""Grid sweeps and constrained minimum-LCE search over configuration fields."""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .config import Config, ConfigError, profile_path, resolve_path
from .metrics import EvalResult, active_core_transistors, evaluate
from .rng import derive_seed

DEFAULT_CAP = 10**6


class InfeasibleError(RuntimeError):
    """No point of the search space meets the capacity constraint."""


@dataclass(frozen=True)
class SweepAxis:
    path: str
    values: tuple

    def __post_init__(self):
        resolve_path(self.path)
        if not self.values:
            raise ConfigError(self.path, "axis needs at least one value")
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class GridPoint:
    index: int
    deltas: dict
    config: Config
    result: EvalResult | None = None


@dataclass(frozen=True)
class ParetoPoint:
    index: int
    deltas: dict
    config: Config = field(repr=False)
    capacity: int
    feasible: bool
    total_cost: float = math.nan
    mttf_arch: float = math.nan
    lce: float = math.nan
    result: EvalResult | None = field(default=None, repr=False)

    @property
    def redundancy(self) -> int:
        """Spare modules per chiplet plus spare chiplets plus router spares."""
        c = self.config
        return (c.chiplet.redundant_modules_a + c.package.redundant_chiplets
                + int(c.chiplet.router_redundancy_enabled))


@dataclass(frozen=True)
class ParetoResult:
    points: list
    frontier: list
    best: ParetoPoint


def grid_configs(base: Config, axes: Sequence[SweepAxis], cap: int = DEFAULT_CAP) -> list[GridPoint]:
    """Row-major cross product of the axes; each point gets a derived seed."""
    size = math.prod(len(ax.values) for ax in axes)
    if size > cap:
        raise ConfigError("axes", f"grid has {size} points, above the cap of {cap}")
    points = []
    for index, combo in enumerate(itertools.product(*(ax.values for ax in axes))):
        cfg = base
        deltas = {}
        for ax, value in zip(axes, combo):
            try:
                cfg = cfg.replace(ax.path, value)
            except ConfigError as err:
                raise ConfigError(err.field, f"invalid axis value {value!r}: {err}") from None
            deltas[ax.path] = value
        cfg = cfg.replace("sim.rng_seed", derive_seed(base.sim.rng_seed, index))
        points.append(GridPoint(index, deltas, cfg))
    return points


def evaluate_many(configs: Sequence[Config], threads: int = 1) -> list[EvalResult]:
    """Evaluate in input order; results do not depend on ``threads``."""
    if threads <= 1 or len(configs) <= 1:
        return [evaluate(c) for c in configs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(evaluate, configs, chunksize=1))


def sweep(base: Config, axes: Sequence[SweepAxis], threads: int = 1,
          cap: int = DEFAULT_CAP) -> list[GridPoint]:
    points = grid_configs(base, axes, cap)
    results = evaluate_many([p.config for p in points], threads)
    return [GridPoint(p.index, p.deltas, p.config, r) for p, r in zip(points, results)]


def dominates(q: ParetoPoint, p: ParetoPoint) -> bool:
    """``q`` is no costlier and no shorter-lived than ``p``, and better in one."""
    return (q.total_cost <= p.total_cost and q.mttf_arch >= p.mttf_arch
            and (q.total_cost < p.total_cost or q.mttf_arch > p.mttf_arch))


def pareto_frontier(points: Sequence[ParetoPoint]) -> list[ParetoPoint]:
    """Non-dominated feasible points, cheapest first."""
    feasible = [p for p in points if p.feasible]
    front = [p for p in feasible if not any(dominates(q, p) for q in feasible)]
    return sorted(front, key=lambda p: (p.total_cost, -p.mttf_arch, p.index))


def best_point(points: Sequence[ParetoPoint]) -> ParetoPoint:
    """Minimum LCE; ties go to lower cost, then less redundancy."""
    feasible = [p for p in points if p.feasible]
    if not feasible:
        raise InfeasibleError("no point in the search space meets the capacity constraint")
    return min(feasible, key=lambda p: (p.lce, p.total_cost, p.redundancy, p.index))


def pareto_min_lce(base: Config, space: Sequence[SweepAxis], capacity_constraint: float,
                   threads: int = 1, cap: int = DEFAULT_CAP) -> ParetoResult:
    """Exhaustive constrained search.

    Points whose active-core transistor count falls short of
    ``capacity_constraint`` are marked infeasible and not evaluated.
    """
    grid = grid_configs(base, space, cap)
    capacity = [active_core_transistors(p.config) for p in grid]
    todo = [p for p, c in zip(grid, capacity) if c >= capacity_constraint]
    results = dict(zip((p.index for p in todo), evaluate_many([p.config for p in todo], threads)))
    points = []
    for p, cap_p in zip(grid, capacity):
        r = results.get(p.index)
        if r is None:
            points.append(ParetoPoint(p.index, p.deltas, p.config, cap_p, False))
        else:
            points.append(ParetoPoint(p.index, p.deltas, p.config, cap_p, True,
                                      r.total_cost, r.mttf_arch, r.lce, r))
    best = best_point(points)
    return ParetoResult(points, pareto_frontier(points), best)


def parse_axes(spec: Any) -> list[SweepAxis]:
    """Axes from ``[{"path": ..., "values": [...]}, ...]`` or ``{path: [...], ...}``."""
    if isinstance(spec, dict):
        spec = spec.get("axes", spec)
    if isinstance(spec, dict):
        return [SweepAxis(k, tuple(v)) for k, v in spec.items()]
    if not isinstance(spec, list):
        raise ConfigError("axes", "expected a list or an object of axes")
    axes = []
    for item in spec:
        if not isinstance(item, dict) or "path" not in item or "values" not in item:
            raise ConfigError("axes", f"bad axis entry {item!r}")
        axes.append(SweepAxis(item["path"], tuple(item["values"])))
    return axes


def load_space(path: str | Path) -> list[SweepAxis]:
    path = profile_path(path)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError("space", f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ConfigError("space", f"{path}: line {err.lineno} column {err.colno}: {err.msg}") from None
    return parse_axes(data)
