"""Configuration types, validation and JSON (de)serialisation.

All quantities are in arbitrary units (a.u.). Every field has a default taken
from the ``default-14nm`` profile, so ``{"schema": 1}`` is a complete
configuration. Objects are frozen after construction and safe to share
between workers.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

SCHEMA_VERSION = 1
PROFILE_DIR = Path(__file__).parent / "profiles"
DEFAULT_PROFILE = PROFILE_DIR / "default-14nm.json"


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


def _num(obj, name):
    value = getattr(obj, name)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(name, f"must be finite, got {value!r}")
    return float(value)


def _int(obj, name):
    value = getattr(obj, name)
    if isinstance(value, float) and value.is_integer():
        value = int(value)
        object.__setattr__(obj, name, value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    return value


def _flag(obj, name):
    value = getattr(obj, name)
    if not isinstance(value, bool):
        raise ConfigError(name, f"expected true/false, got {value!r}")
    return value


def _require(ok: bool, name: str, bound: str, value):
    if not ok:
        raise ConfigError(name, f"must satisfy {bound}, got {value!r}")


def _prob(obj, name, low_open=False):
    v = _num(obj, name)
    if low_open:
        _require(0.0 < v <= 1.0, name, "0 < value <= 1", v)
    else:
        _require(0.0 <= v <= 1.0, name, "0 <= value <= 1", v)
    return v


@dataclass(frozen=True)
class ProcessTech:
    defect_density_D: float = 0.002
    cluster_alpha: float = 3.0
    feature_lambda: float = 14.0
    layout_beta: float = 400.0
    si_cost_per_area: float = 0.1
    test_accuracy_Ytest: float = 0.95

    def __post_init__(self):
        _require(_num(self, "defect_density_D") >= 0, "defect_density_D", ">= 0", self.defect_density_D)
        _require(_num(self, "cluster_alpha") > 0, "cluster_alpha", "> 0", self.cluster_alpha)
        _require(_num(self, "feature_lambda") > 0, "feature_lambda", "> 0", self.feature_lambda)
        _require(_num(self, "layout_beta") > 0, "layout_beta", "> 0", self.layout_beta)
        _require(_num(self, "si_cost_per_area") >= 0, "si_cost_per_area", ">= 0", self.si_cost_per_area)
        v = _num(self, "test_accuracy_Ytest")
        _require(0.5 <= v <= 1.0, "test_accuracy_Ytest", "0.5 <= value <= 1", v)


@dataclass(frozen=True)
class ModuleSpec:
    core_transistors_Nt: int = 100_000_000
    router_transistors: int = 5_000_000
    core_fail_rate: float = 0.0025
    router_fail_rate: float = 0.0003

    def __post_init__(self):
        for name in ("core_transistors_Nt", "router_transistors"):
            v = _int(self, name)
            _require(1 <= v <= 10**12, name, "1 <= value <= 1e12", v)
        for name in ("core_fail_rate", "router_fail_rate"):
            _require(_num(self, name) > 0, name, "> 0", getattr(self, name))


@dataclass(frozen=True)
class ChipletDesign:
    grid_rows_M: int = 3
    grid_cols_N: int = 4
    required_cores: int = 12
    redundant_modules_a: int = 0
    router_redundancy_enabled: bool = False
    link_yield: float = 0.999
    link_fail_rate: float = 5e-05
    # extra series links charged per redundant module in the lifetime model
    noc_links_per_redundant_module: float = 0.5
    module: ModuleSpec = field(default_factory=ModuleSpec)

    def __post_init__(self):
        if isinstance(self.module, dict):
            object.__setattr__(self, "module", _build(ModuleSpec, self.module, "module"))
        elif not isinstance(self.module, ModuleSpec):
            raise ConfigError("module", f"expected an object, got {self.module!r}")
        for name in ("grid_rows_M", "grid_cols_N", "required_cores"):
            _require(_int(self, name) >= 1, name, ">= 1", getattr(self, name))
        _require(_int(self, "redundant_modules_a") >= 0, "redundant_modules_a", ">= 0", self.redundant_modules_a)
        grid = self.grid_rows_M * self.grid_cols_N
        _require(self.required_cores <= grid, "required_cores",
                 f"<= grid_rows_M * grid_cols_N ({grid})", self.required_cores)
        _flag(self, "router_redundancy_enabled")
        _prob(self, "link_yield")
        _require(_num(self, "link_fail_rate") > 0, "link_fail_rate", "> 0", self.link_fail_rate)
        _require(_num(self, "noc_links_per_redundant_module") >= 0,
                 "noc_links_per_redundant_module", ">= 0", self.noc_links_per_redundant_module)

    @property
    def placed_modules(self) -> int:
        return self.grid_rows_M * self.grid_cols_N + self.redundant_modules_a


@dataclass(frozen=True)
class PackageDesign:
    active_chiplets: int = 4
    redundant_chiplets: int = 0
    # None means every active chiplet is required
    functional_chiplet_threshold: int | None = None
    interposer_defect_ratio: float = 0.25
    interposer_module_area: float = 10.0
    interposer_link_yield: float = 0.999
    interposer_module_fail_rate: float = 0.02
    interposer_link_fail_rate: float = 0.015
    bond_yield_per_chiplet: float = 0.99
    int_sub_yield_Yintsub: float = 0.99
    # None means ceil(sqrt(active_chiplets)) interposer sites per row
    site_cols: int | None = None

    def __post_init__(self):
        _require(_int(self, "active_chiplets") >= 1, "active_chiplets", ">= 1", self.active_chiplets)
        _require(_int(self, "redundant_chiplets") >= 0, "redundant_chiplets", ">= 0", self.redundant_chiplets)
        if self.functional_chiplet_threshold is not None:
            v = _int(self, "functional_chiplet_threshold")
            _require(1 <= v <= self.active_chiplets, "functional_chiplet_threshold",
                     f"1 <= value <= active_chiplets ({self.active_chiplets})", v)
        v = _num(self, "interposer_defect_ratio")
        _require(0.0 < v <= 1.0, "interposer_defect_ratio", "0 < value <= 1", v)
        _require(_num(self, "interposer_module_area") >= 0, "interposer_module_area", ">= 0",
                 self.interposer_module_area)
        for name in ("interposer_link_yield", "bond_yield_per_chiplet", "int_sub_yield_Yintsub"):
            _prob(self, name, low_open=True)
        for name in ("interposer_module_fail_rate", "interposer_link_fail_rate"):
            _require(_num(self, name) > 0, name, "> 0", getattr(self, name))
        if self.site_cols is not None:
            _require(_int(self, "site_cols") >= 1, "site_cols", ">= 1", self.site_cols)

    @property
    def threshold(self) -> int:
        if self.functional_chiplet_threshold is None:
            return self.active_chiplets
        return self.functional_chiplet_threshold

    @property
    def bonded_chiplets(self) -> int:
        return self.active_chiplets + self.redundant_chiplets

    @property
    def sites_per_row(self) -> int:
        if self.site_cols is not None:
            return self.site_cols
        return math.isqrt(self.active_chiplets - 1) + 1


@dataclass(frozen=True)
class CostBook:
    data_wire_cost_Cdata: float = 0.001
    # data wires per on-chiplet mesh link
    data_wire_count_Ndata: int = 64
    nre_area_coeff_Kchip: float = 2000.0
    nre_fixed_Cfix: float = 100000.0
    interposer_cost_Cint: float = 5.0
    # added to interposer_cost_Cint for every bonded chiplet site
    interposer_cost_per_site: float = 1.0
    substrate_cost_Csub: float = 3.0
    nre_interposer: float = 50000.0
    production_volume: int = 100_000
    nre_share: bool = True

    def __post_init__(self):
        for name in ("data_wire_cost_Cdata", "nre_area_coeff_Kchip", "nre_fixed_Cfix",
                     "interposer_cost_Cint", "interposer_cost_per_site", "substrate_cost_Csub",
                     "nre_interposer"):
            _require(_num(self, name) >= 0, name, ">= 0", getattr(self, name))
        _require(_int(self, "data_wire_count_Ndata") >= 0, "data_wire_count_Ndata", ">= 0",
                 self.data_wire_count_Ndata)
        _require(_int(self, "production_volume") >= 1, "production_volume", ">= 1",
                 self.production_volume)
        _flag(self, "nre_share")

    def scaled(self, factor: float) -> "CostBook":
        """Every monetary entry multiplied by ``factor``."""
        money = ("data_wire_cost_Cdata", "nre_area_coeff_Kchip", "nre_fixed_Cfix",
                 "interposer_cost_Cint", "interposer_cost_per_site", "substrate_cost_Csub",
                 "nre_interposer")
        return dataclasses.replace(self, **{k: getattr(self, k) * factor for k in money})


DEGRADATION_SCOPES = ("module", "package", "both")
ETA_MODES = ("unconditional", "conditional")


@dataclass(frozen=True)
class SimSettings:
    mc_iterations: int = 100_000
    rng_seed: int = 20240601
    quadrature_rel_tol: float = 1e-9
    quadrature_tail_cut: float = 1e-12
    degradation_enabled: bool = False
    degradation_Kmax: int = 2
    degradation_scope: str = "module"
    eta_mode: str = "conditional"

    def __post_init__(self):
        _require(_int(self, "mc_iterations") >= 1000, "mc_iterations", ">= 1000", self.mc_iterations)
        v = _int(self, "rng_seed")
        _require(0 <= v < 2**64, "rng_seed", "0 <= value < 2**64", v)
        v = _num(self, "quadrature_rel_tol")
        _require(0 < v <= 1e-3, "quadrature_rel_tol", "0 < value <= 1e-3", v)
        v = _num(self, "quadrature_tail_cut")
        _require(0 < v <= 1e-6, "quadrature_tail_cut", "0 < value <= 1e-6", v)
        _flag(self, "degradation_enabled")
        _require(_int(self, "degradation_Kmax") >= 0, "degradation_Kmax", ">= 0", self.degradation_Kmax)
        _require(self.degradation_scope in DEGRADATION_SCOPES, "degradation_scope",
                 f"one of {DEGRADATION_SCOPES}", self.degradation_scope)
        _require(self.eta_mode in ETA_MODES, "eta_mode", f"one of {ETA_MODES}", self.eta_mode)


SECTIONS = {
    "process": ProcessTech,
    "chiplet": ChipletDesign,
    "package": PackageDesign,
    "costs": CostBook,
    "sim": SimSettings,
}


@dataclass(frozen=True)
class Config:
    process: ProcessTech = field(default_factory=ProcessTech)
    chiplet: ChipletDesign = field(default_factory=ChipletDesign)
    package: PackageDesign = field(default_factory=PackageDesign)
    costs: CostBook = field(default_factory=CostBook)
    sim: SimSettings = field(default_factory=SimSettings)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"schema": SCHEMA_VERSION}
        for name in SECTIONS:
            out[name] = dataclasses.asdict(getattr(self, name))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def replace(self, path: str, value) -> "Config":
        """Copy with the field at ``path`` (see :func:`resolve_path`) set to ``value``."""
        parts = resolve_path(path)
        data = self.to_dict()
        node = data
        for key in parts[:-1]:
            node = node[key]
        node[parts[-1]] = value
        return config_from_dict(data)


def _build(cls, data, prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(prefix, f"expected an object, got {data!r}")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{prefix}.{unknown[0]}", "unknown field")
    try:
        return cls(**data)
    except ConfigError as err:
        path = f"{prefix}.{err.field}" if err.field else prefix
        raise ConfigError(path, str(err).split(": ", 1)[-1]) from None


def config_from_dict(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("", "configuration must be a JSON object")
    schema = data.get("schema", None)
    if schema != SCHEMA_VERSION:
        raise ConfigError("schema", f"expected {SCHEMA_VERSION}, got {schema!r}")
    unknown = sorted(set(data) - set(SECTIONS) - {"schema", "description"})
    if unknown:
        raise ConfigError(unknown[0], "unknown section")
    parts = {name: _build(cls, data.get(name, {}), name) for name, cls in SECTIONS.items()}
    return Config(**parts)


def parse_config(text: str, source: str = "<string>") -> Config:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        lines = text.splitlines()
        context = lines[err.lineno - 1] if 0 < err.lineno <= len(lines) else ""
        raise ConfigError(
            "", f"{source}: line {err.lineno} column {err.colno}: {err.msg}\n    {context}"
        ) from None
    return config_from_dict(data)


def profile_path(name: str | Path) -> Path:
    """``name`` as given if it exists, else the bundled profile of that name."""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (PROFILE_DIR / path.name, PROFILE_DIR / (path.name + ".json")):
        if path.parent == Path(".") and candidate.exists():
            return candidate
    return path


def load_config(path: str | Path | None = None) -> Config:
    """Load and validate a JSON configuration; ``None`` loads the default profile.

    Bare names such as ``inter-chiplet-12`` resolve to the bundled profiles.
    """
    path = profile_path(path) if path is not None else DEFAULT_PROFILE
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError("", f"cannot read {path}: {err.strerror}") from None
    return parse_config(text, str(path))


def dump_config(config: Config, path: str | Path) -> None:
    Path(path).write_text(config.to_json(), encoding="utf-8")


def field_paths() -> dict[str, tuple[str, ...]]:
    """Every scalar field keyed by dotted path, e.g. ``chiplet.module.core_fail_rate``."""
    out: dict[str, tuple[str, ...]] = {}

    def walk(cls, prefix):
        for f in fields(cls):
            if f.name == "module":
                walk(ModuleSpec, prefix + ("module",))
            else:
                out[".".join(prefix + (f.name,))] = prefix + (f.name,)

    for name, cls in SECTIONS.items():
        walk(cls, (name,))
    return out


def resolve_path(path: str) -> tuple[str, ...]:
    """Dotted path or bare field name -> key tuple. Bare names must be unambiguous."""
    paths = field_paths()
    if path in paths:
        return paths[path]
    matches = [p for p in paths if p.rsplit(".", 1)[-1] == path]
    if len(matches) == 1:
        return paths[matches[0]]
    if matches:
        raise ConfigError(path, f"ambiguous field name, candidates: {', '.join(matches)}")
    raise ConfigError(path, "unknown configuration field")
