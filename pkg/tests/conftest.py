"""Independent oracles shared by the test modules.

The structure function here is built on networkx and a direct
re-implementation of the row-shift repair rule, so it does not reuse the
package's own cluster search.
"""

import itertools
import math
import sys

import networkx as nx
import numpy as np
import pytest

from chiplet_lce.config import ChipletDesign, ModuleSpec, SimSettings
from chiplet_lce.faultsim import ComponentYields, chiplet_layout


def grid_position(k, cols):
    return divmod(k, cols)


def oracle_graph(design: ChipletDesign):
    """Routers as nodes keyed by grid position, 4-neighbour edges, spare routers per row."""
    n = design.placed_modules
    cols = design.grid_cols_N
    rows = -(-n // cols)
    widths = [min(cols, n - r * cols) for r in range(rows)]
    pos = {}
    for k in range(n):
        pos[grid_position(k, cols)] = ("m", k)
    if design.router_redundancy_enabled:
        for r, w in enumerate(widths):
            pos[(r, w)] = ("s", r)
    g = nx.Graph()
    g.add_nodes_from(pos.values())
    for (r, c), node in pos.items():
        for nb in ((r, c + 1), (r + 1, c)):
            if nb in pos:
                g.add_edge(node, pos[nb])
    return g, widths


def oracle_assignment(design, widths, failed_cores, failed_routers):
    """Core -> router node, by the documented rule: own router, else the next one in the row."""
    cols = design.grid_cols_N
    taken = set(failed_routers)
    out = {}
    for r, w in enumerate(widths):
        row = [("m", r * cols + c) for c in range(w)]
        if design.router_redundancy_enabled:
            row.append(("s", r))
        for c in range(w):
            core = r * cols + c
            if core in failed_cores:
                continue
            options = row[c:c + 2] if design.router_redundancy_enabled else row[c:c + 1]
            for node in options:
                if node not in taken:
                    taken.add(node)
                    out[core] = node
                    break
    return out


def oracle_cluster(design, failed_cores, failed_routers, failed_edges):
    """Largest number of attached working cores inside one connected set of working routers."""
    g, widths = oracle_graph(design)
    h = g.copy()
    h.remove_nodes_from(failed_routers)
    h.remove_edges_from(failed_edges)
    assign = oracle_assignment(design, widths, failed_cores, failed_routers)
    best = 0
    for comp in nx.connected_components(h):
        best = max(best, sum(1 for node in assign.values() if node in comp))
    return best


def enumerate_chiplet_yield(design: ChipletDesign, yields: ComponentYields) -> float:
    """Exact functional probability by summing over every fault pattern."""
    g, _ = oracle_graph(design)
    cores = list(range(design.placed_modules))
    routers = sorted(g.nodes, key=lambda x: (x[0] != "m", x[1]))
    edges = sorted(tuple(sorted(e)) for e in g.edges) if yields.link < 1.0 else []
    comps = ([("c", c, yields.core) for c in cores] + [("r", r, yields.router) for r in routers]
             + [("l", e, yields.link) for e in edges])
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(comps)):
        prob = 1.0
        fc, fr, fl = set(), set(), set()
        for failed, (kind, ident, y) in zip(bits, comps):
            prob *= (1.0 - y) if failed else y
            if failed:
                {"c": fc, "r": fr, "l": fl}[kind].add(ident)
        if prob == 0.0:
            continue
        if oracle_cluster(design, fc, fr, fl) >= design.required_cores:
            total += prob
    return total


def component_count(design: ChipletDesign, link_yield: float) -> int:
    layout = chiplet_layout(design)
    return layout.n_units + layout.n_routers + (layout.n_links if link_yield < 1.0 else 0)


def random_small_design(rng: np.random.Generator, max_components: int = 12):
    while True:
        cols = int(rng.integers(1, 4))
        rows = int(rng.integers(1, 3))
        a = int(rng.integers(0, 3))
        redundant = bool(rng.integers(0, 2))
        link_y = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.8, 0.99))
        required = int(rng.integers(1, rows * cols + 1))
        design = ChipletDesign(grid_rows_M=rows, grid_cols_N=cols, required_cores=required,
                               redundant_modules_a=a, router_redundancy_enabled=redundant,
                               link_yield=link_y)
        if component_count(design, link_y) <= max_components:
            yields = ComponentYields(float(rng.uniform(0.6, 0.99)), float(rng.uniform(0.6, 0.99)), link_y)
            return design, yields


def binomial_sigma(p, n):
    return math.sqrt(p * (1.0 - p) / n)


@pytest.fixture
def quick_sim():
    return SimSettings(mc_iterations=4000, rng_seed=11)


@pytest.fixture
def small_module():
    return ModuleSpec()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.LINES):
        terminalreporter.write_line(acceptance.LINES[n])
