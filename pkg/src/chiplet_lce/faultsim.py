"""Monte Carlo fault injection for chiplet and package yield.

Each trial draws one uniform per component from its own counter-based
substream, in a fixed order: cores, routers (spares last), then links when
the link yield is below one. Trials are generated in vectorised blocks, the
distinct fault patterns in a block are analysed once each, and results are
accumulated as integer counts, so the estimate is identical however the work
is split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .config import ChipletDesign, PackageDesign, ProcessTech, SimSettings
from .mesh import ConnectivityReport, FaultPattern, MeshLayout, analyse, layout_for, migrate
from .yields import core_area, nbd_yield

BLOCK = 8192
Z95 = 1.959963984540054
_PACKAGE_SALT = 0x5A17C0DE0BADF00D


@dataclass(frozen=True)
class ComponentYields:
    core: float
    router: float
    link: float


@dataclass(frozen=True)
class MCDiagnostics:
    avg_connected_cores: float
    avg_active_routers: float
    avg_essential_routers: float
    yield_ci_halfwidth: float


def ci_halfwidth(p: float, n: int) -> float:
    """95% normal-approximation half-width of a binomial proportion."""
    return Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def chiplet_layout(design: ChipletDesign) -> MeshLayout:
    return layout_for(design.placed_modules, design.grid_cols_N, design.router_redundancy_enabled)


def package_layout(pkg: PackageDesign) -> MeshLayout:
    return layout_for(pkg.bonded_chiplets, pkg.sites_per_row, False)


def component_yields(design: ChipletDesign, tech: ProcessTech) -> ComponentYields:
    """Per-component manufacturing yields from the NBD model."""
    m = design.module
    a_core = core_area(m.core_transistors_Nt, tech.feature_lambda, tech.layout_beta)
    a_router = core_area(m.router_transistors, tech.feature_lambda, tech.layout_beta)
    return ComponentYields(
        core=nbd_yield(tech.defect_density_D, a_core, tech.cluster_alpha),
        router=nbd_yield(tech.defect_density_D, a_router, tech.cluster_alpha),
        link=design.link_yield,
    )


def _chiplet_yield_vector(layout: MeshLayout, yields: ComponentYields) -> np.ndarray:
    parts = [np.full(layout.n_units, yields.core), np.full(layout.n_routers, yields.router)]
    if yields.link < 1.0:
        parts.append(np.full(layout.n_links, yields.link))
    return np.concatenate(parts)


def _chiplet_pattern(layout: MeshLayout, failed: np.ndarray) -> FaultPattern:
    n, nr = layout.n_units, layout.n_routers
    idx = np.flatnonzero(failed)
    return FaultPattern(
        frozenset(int(i) for i in idx if i < n),
        frozenset(int(i) - n for i in idx if n <= i < n + nr),
        frozenset(int(i) - n - nr for i in idx if i >= n + nr),
    )


def inject_faults(design: ChipletDesign, yields: ComponentYields, stream: rng.Substream) -> FaultPattern:
    """Mark each component failed with probability one minus its yield."""
    layout = chiplet_layout(design)
    y = _chiplet_yield_vector(layout, yields)
    return _chiplet_pattern(layout, stream.random(len(y)) >= y)


def apply_router_migration(design: ChipletDesign, pattern: FaultPattern) -> FaultPattern:
    return migrate(chiplet_layout(design), pattern)


def connectivity(design: ChipletDesign, pattern: FaultPattern) -> ConnectivityReport:
    layout = chiplet_layout(design)
    if pattern.core_router is None and design.router_redundancy_enabled:
        pattern = migrate(layout, pattern)
    return analyse(layout, pattern, design.required_cores)


def _run(seed, iterations, yvec, evaluate_row):
    """Shared trial loop; ``evaluate_row`` maps a failure row to a report."""
    cache: dict[bytes, ConnectivityReport] = {}
    functional = cores = active = essential = 0
    for start in range(0, iterations, BLOCK):
        idx = np.arange(start, min(iterations, start + BLOCK), dtype=np.uint64)
        failed = rng.uniforms(seed, idx, len(yvec)) >= yvec
        packed = np.packbits(failed, axis=1)
        uniq, counts = np.unique(packed, axis=0, return_counts=True)
        for row, count in zip(uniq, counts):
            key = row.tobytes()
            rep = cache.get(key)
            if rep is None:
                bits = np.unpackbits(row)[: len(yvec)].astype(bool)
                rep = cache[key] = evaluate_row(bits)
            count = int(count)
            functional += count * rep.functional
            cores += count * rep.largest_cluster_cores
            active += count * rep.active_routers
            essential += count * rep.essential_routers
    p = functional / iterations
    diag = MCDiagnostics(
        avg_connected_cores=cores / iterations,
        avg_active_routers=active / iterations,
        avg_essential_routers=essential / iterations,
        yield_ci_halfwidth=ci_halfwidth(p, iterations),
    )
    return p, diag


def mc_chiplet(design: ChipletDesign, tech: ProcessTech | None, settings: SimSettings,
               yields: ComponentYields | None = None, seed: int | None = None):
    """Estimate chiplet yield by fault injection and cluster search.

    Component yields come from ``tech`` through the NBD model unless given
    explicitly. Returns ``(yield, MCDiagnostics)``.
    """
    if yields is None:
        yields = component_yields(design, tech)
    layout = chiplet_layout(design)
    yvec = _chiplet_yield_vector(layout, yields)
    seed = settings.rng_seed if seed is None else seed

    def evaluate_row(bits):
        pattern = _chiplet_pattern(layout, bits)
        if design.router_redundancy_enabled:
            pattern = migrate(layout, pattern)
        return analyse(layout, pattern, design.required_cores)

    return _run(seed, settings.mc_iterations, yvec, evaluate_row)


def package_seed(seed: int) -> int:
    return int(rng.mix64(np.uint64(seed ^ _PACKAGE_SALT)))


def mc_package(pkg: PackageDesign, kgd_yield: float, interposer_module_yield: float,
               settings: SimSettings, seed: int | None = None):
    """Estimate the chiplet-to-interposer bonding yield.

    Each bonded site (active or spare) holds a chiplet that is bad with
    probability ``1 - kgd_yield`` and whose bond fails with probability
    ``1 - bond_yield_per_chiplet``. Interposer modules act as routers and
    interposer links as mesh links. The package works when the largest group
    of interconnected good chiplets reaches the functional threshold.
    """
    layout = package_layout(pkg)
    n = layout.n_units
    parts = [np.full(n, kgd_yield), np.full(n, pkg.bond_yield_per_chiplet),
             np.full(n, interposer_module_yield)]
    if pkg.interposer_link_yield < 1.0:
        parts.append(np.full(layout.n_links, pkg.interposer_link_yield))
    yvec = np.concatenate(parts)
    seed = package_seed(settings.rng_seed) if seed is None else seed
    threshold = pkg.threshold

    def evaluate_row(bits):
        bad = np.flatnonzero(bits[:n] | bits[n:2 * n])
        routers = np.flatnonzero(bits[2 * n:3 * n])
        links = np.flatnonzero(bits[3 * n:])
        pattern = FaultPattern(frozenset(bad.tolist()), frozenset(routers.tolist()),
                               frozenset(links.tolist()))
        return analyse(layout, pattern, threshold)

    return _run(seed, settings.mc_iterations, yvec, evaluate_row)


def interposer_module_yield(pkg: PackageDesign, tech: ProcessTech) -> float:
    """NBD yield of one interposer module at the reduced interposer defect density."""
    return nbd_yield(tech.defect_density_D * pkg.interposer_defect_ratio,
                     pkg.interposer_module_area, tech.cluster_alpha)
