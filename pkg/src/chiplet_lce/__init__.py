"""Lifecycle cost-effectiveness (LCE) modeling for redundant multi-chiplet designs.

Typical use::

    from chiplet_lce import load_config, evaluate
    result = evaluate(load_config())
    print(result.lce)
"""

from .config import (ChipletDesign, Config, ConfigError, CostBook, ModuleSpec, PackageDesign,
                     ProcessTech, SimSettings, load_config, parse_config)
from .explorer import InfeasibleError, SweepAxis, pareto_min_lce, sweep
from .metrics import EvalResult, EvaluationError, evaluate

__version__ = "0.1.0"

__all__ = [
    "ChipletDesign", "Config", "ConfigError", "CostBook", "EvalResult", "EvaluationError",
    "InfeasibleError", "ModuleSpec", "PackageDesign", "ProcessTech", "SimSettings", "SweepAxis",
    "evaluate", "load_config", "pareto_min_lce", "parse_config", "sweep",
]
