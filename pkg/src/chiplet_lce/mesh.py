"""Mesh topology, M:1 router migration and cluster search.

Modules (a core attached to its own router) fill a grid row-major, ``cols``
per row; redundant modules continue into appended rows. With router
redundancy every row gets one spare router placed right after its last module.
Routers link to their four grid neighbours, spares included.

Router indices: ``0 .. n_units-1`` are module routers, ``n_units + r`` is the
spare of row ``r``. Core ``k`` can use router ``k`` or, when the row has a
spare, the next router to its right (its alternate routing line).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class FaultPattern:
    failed_cores: frozenset = frozenset()
    failed_routers: frozenset = frozenset()
    failed_links: frozenset = frozenset()
    # core -> router after repair, -1 when disconnected; None before repair
    core_router: tuple | None = None


@dataclass(frozen=True)
class ConnectivityReport:
    largest_cluster_cores: int
    active_routers: int
    essential_routers: int
    functional: bool


class MeshLayout:
    def __init__(self, n_units: int, cols: int, spare_per_row: bool = False):
        if n_units < 1 or cols < 1:
            raise ValueError("n_units and cols must be >= 1")
        self.n_units = n_units
        self.cols = cols
        self.spare_per_row = spare_per_row
        self.n_rows = -(-n_units // cols)
        self.row_widths = [min(cols, n_units - r * cols) for r in range(self.n_rows)]

        position = {}
        for k in range(n_units):
            position[divmod(k, cols)] = k
        self.row_routers = []
        for r, w in enumerate(self.row_widths):
            row = [r * cols + c for c in range(w)]
            if spare_per_row:
                position[(r, w)] = n_units + r
                row.append(n_units + r)
            self.row_routers.append(tuple(row))
        self.n_routers = n_units + (self.n_rows if spare_per_row else 0)

        edges = []
        for (r, c), i in position.items():
            for nb in ((r, c + 1), (r + 1, c)):
                j = position.get(nb)
                if j is not None:
                    edges.append((min(i, j), max(i, j)))
        self.edges = tuple(sorted(edges))
        self.adjacency = [[] for _ in range(self.n_routers)]
        for e, (i, j) in enumerate(self.edges):
            self.adjacency[i].append((j, e))
            self.adjacency[j].append((i, e))

        # candidate routers for each core, primary first
        self.core_options = []
        for r, row in enumerate(self.row_routers):
            for c in range(self.row_widths[r]):
                opts = (row[c], row[c + 1]) if spare_per_row else (row[c],)
                self.core_options.append(opts)

    @property
    def n_links(self) -> int:
        return len(self.edges)


@lru_cache(maxsize=256)
def layout_for(n_units: int, cols: int, spare_per_row: bool) -> MeshLayout:
    return MeshLayout(n_units, cols, spare_per_row)


def migrate(layout: MeshLayout, pattern: FaultPattern) -> FaultPattern:
    """Attach every working core to a working router.

    Cores are handled left to right within each row: a core keeps its own
    router if it works and is free, otherwise shifts to its alternate. Each
    core has two adjacent candidates, so this greedy order gives a maximum
    matching per row. Rows never lend routers to each other.
    """
    taken = set(pattern.failed_routers)
    assignment = []
    for core, options in enumerate(layout.core_options):
        if core in pattern.failed_cores:
            assignment.append(-1)
            continue
        chosen = -1
        for router in options:
            if router not in taken:
                chosen = router
                taken.add(router)
                break
        assignment.append(chosen)
    return FaultPattern(pattern.failed_cores, pattern.failed_routers,
                        pattern.failed_links, tuple(assignment))


def _components(layout: MeshLayout, pattern: FaultPattern):
    alive = [r not in pattern.failed_routers for r in range(layout.n_routers)]
    label = [-1] * layout.n_routers
    comps = []
    for start in range(layout.n_routers):
        if not alive[start] or label[start] >= 0:
            continue
        label[start] = len(comps)
        members = [start]
        stack = [start]
        while stack:
            node = stack.pop()
            for nb, e in layout.adjacency[node]:
                if alive[nb] and label[nb] < 0 and e not in pattern.failed_links:
                    label[nb] = len(comps)
                    members.append(nb)
                    stack.append(nb)
        comps.append(members)
    return comps, label


def _connected_within(layout, allowed: set, targets: list, failed_links) -> bool:
    if len(targets) <= 1:
        return True
    seen = {targets[0]}
    stack = [targets[0]]
    while stack:
        node = stack.pop()
        for nb, e in layout.adjacency[node]:
            if nb in allowed and nb not in seen and e not in failed_links:
                seen.add(nb)
                stack.append(nb)
    return all(t in seen for t in targets)


def analyse(layout: MeshLayout, pattern: FaultPattern, required: int) -> ConnectivityReport:
    """Largest cluster of working, attached cores reachable through working routers and links."""
    if pattern.core_router is None:
        pattern = FaultPattern(
            pattern.failed_cores, pattern.failed_routers, pattern.failed_links,
            tuple(-1 if (k in pattern.failed_cores or k in pattern.failed_routers) else k
                  for k in range(layout.n_units)),
        )
    comps, label = _components(layout, pattern)
    active = layout.n_routers - len(pattern.failed_routers)

    cores_in = [0] * len(comps)
    for router in pattern.core_router:
        if router >= 0:
            cores_in[label[router]] += 1
    if not comps or max(cores_in) == 0:
        return ConnectivityReport(0, active, 0, required <= 0)
    best = max(range(len(comps)), key=lambda i: (cores_in[i], -min(comps[i])))
    size = cores_in[best]

    support = set(comps[best])
    carriers = sorted({r for r in pattern.core_router if r >= 0 and label[r] == best})
    for router in sorted(support - set(carriers), reverse=True):
        support.discard(router)
        if not _connected_within(layout, support, carriers, pattern.failed_links):
            support.add(router)
    return ConnectivityReport(size, active, len(support), size >= required)
