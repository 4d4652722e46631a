"""Lifecycle compute capacity (LCC), LCE and the end-to-end evaluation."""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import cost, faultsim, reliability, yields
from .config import Config
from .faultsim import MCDiagnostics


class EvaluationError(RuntimeError):
    """A pipeline stage failed; the message starts with the stage name."""

    def __init__(self, stage: str, err: Exception):
        self.stage = stage
        super().__init__(f"{stage}: {err}")


def lcc(mttf_arch: float, active_core_transistors: float) -> float:
    """Lifetime times the transistor count of the cores that deliver compute."""
    if mttf_arch <= 0 or active_core_transistors <= 0:
        raise ValueError("mttf_arch and active_core_transistors must be > 0")
    return mttf_arch * active_core_transistors


def lcc_degraded(mttf_deg: float, active_core_transistors: float) -> float:
    return lcc(mttf_deg, active_core_transistors)


def lce(total_cost: float, lifetime_compute: float) -> float:
    """Cost per unit of lifetime compute; lower is better."""
    if lifetime_compute <= 0:
        raise ZeroDivisionError("lifetime compute capacity must be > 0")
    return total_cost / lifetime_compute


def active_core_transistors(config: Config) -> int:
    """Required cores per chiplet times transistors per core times chiplets needed.

    Spares replace failed units and add no capacity.
    """
    c = config.chiplet
    return c.required_cores * c.module.core_transistors_Nt * config.package.threshold


@dataclass(frozen=True)
class EvalResult:
    chiplet_yield_Yob: float
    kgd_yield: float
    package_yield: float
    re_cost_chiplet: float
    re_cost_chip: float
    nre_per_chip: float
    total_cost: float
    mttf_chiplet: float
    mttf_arch: float
    lcc: float
    lce: float
    mc_diag: MCDiagnostics
    chiplet_yield_true: float
    bond_yield_mc: float
    capacity_transistors: int
    package_diag: MCDiagnostics

    def scalars(self) -> dict[str, float]:
        """Flat mapping in canonical column order (see :data:`RESULT_COLUMNS`)."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _DIAG_PREFIX:
                for g in fields(MCDiagnostics):
                    out[_DIAG_PREFIX[f.name] + g.name] = getattr(value, g.name)
            else:
                out[f.name] = value
        return out


_DIAG_PREFIX = {"mc_diag": "", "package_diag": "package_"}
RESULT_COLUMNS = tuple(
    _DIAG_PREFIX[f.name] + g.name if f.name in _DIAG_PREFIX else f.name
    for f in fields(EvalResult)
    for g in (fields(MCDiagnostics) if f.name in _DIAG_PREFIX else (None,))
)


def _stage(name):
    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except EvaluationError:
                raise
            except (ValueError, ArithmeticError) as err:
                raise EvaluationError(name, err) from err
        return inner
    return wrap


@_stage("yield")
def _yield_stage(config):
    c, tech = config.chiplet, config.process
    a_core = yields.core_area(c.module.core_transistors_Nt, tech.feature_lambda, tech.layout_beta)
    a_router = yields.core_area(c.module.router_transistors, tech.feature_lambda, tech.layout_beta)
    comp = faultsim.component_yields(c, tech)
    return a_core, a_router, comp


@_stage("chiplet-mc")
def _chiplet_stage(config, comp):
    y_true, diag = faultsim.mc_chiplet(config.chiplet, None, config.sim, yields=comp)
    y_ob = yields.observed_yield(y_true, config.process.test_accuracy_Ytest)
    kgd = yields.kgd_yield(y_true, config.process.test_accuracy_Ytest)
    return y_true, diag, y_ob, kgd


@_stage("package-mc")
def _package_stage(config, kgd):
    y_mod = faultsim.interposer_module_yield(config.package, config.process)
    return faultsim.mc_package(config.package, kgd, y_mod, config.sim)


@_stage("cost")
def _cost_stage(config, a_core, a_router, y_ob, y_ci):
    c, pkg, book = config.chiplet, config.package, config.costs
    layout = faultsim.chiplet_layout(c)
    si = config.process.si_cost_per_area
    spare_routers = layout.n_routers - layout.n_units
    module_si = [si * (a_core + a_router)] * c.placed_modules + [si * a_router] * spare_routers
    wires = book.data_wire_count_Ndata * layout.n_links
    re_chiplet = cost.chiplet_re_cost(module_si, book, y_ob, n_data=wires)
    bonded = pkg.bonded_chiplets
    re_chip = cost.package_re_cost(re_chiplet * bonded, book, y_ci, pkg.int_sub_yield_Yintsub,
                                   c_int=cost.interposer_cost(book, bonded))
    area = c.placed_modules * (a_core + a_router) + spare_routers * a_router
    nre_total = cost.package_nre_cost([cost.chiplet_nre_cost(area, book)] * bonded, book)
    nre_chip = cost.amortized_nre(nre_total, book.production_volume)
    return re_chiplet, re_chip, nre_chip, cost.total_cost(re_chip, nre_chip)


@_stage("reliability")
def _reliability_stage(config):
    sim = config.sim
    m_chiplet = reliability.mttf(reliability.chiplet_reliability(config.chiplet, sim), sim)
    m_arch = reliability.mttf(reliability.arch_reliability(config.package, m_chiplet, sim), sim)
    return m_chiplet, m_arch


@_stage("lce")
def _lce_stage(config, m_arch, total):
    capacity = active_core_transistors(config)
    if config.sim.degradation_enabled:
        life = lcc_degraded(m_arch, capacity)
    else:
        life = lcc(m_arch, capacity)
    return capacity, life, lce(total, life)


def evaluate(config: Config) -> EvalResult:
    """Yield, cost, lifetime and LCE for one configuration.

    Deterministic for a given configuration (the seed lives in ``config.sim``).
    """
    a_core, a_router, comp = _yield_stage(config)
    y_true, diag, y_ob, kgd = _chiplet_stage(config, comp)
    y_ci, pdiag = _package_stage(config, kgd)
    re_chiplet, re_chip, nre_chip, total = _cost_stage(config, a_core, a_router, y_ob, y_ci)
    m_chiplet, m_arch = _reliability_stage(config)
    capacity, life, value = _lce_stage(config, m_arch, total)
    return EvalResult(
        chiplet_yield_Yob=y_ob,
        kgd_yield=kgd,
        package_yield=y_ci * config.package.int_sub_yield_Yintsub,
        re_cost_chiplet=re_chiplet,
        re_cost_chip=re_chip,
        nre_per_chip=nre_chip,
        total_cost=total,
        mttf_chiplet=m_chiplet,
        mttf_arch=m_arch,
        lcc=life,
        lce=value,
        mc_diag=diag,
        chiplet_yield_true=y_true,
        bond_yield_mc=y_ci,
        capacity_transistors=capacity,
        package_diag=pdiag,
    )
