import random
from fractions import Fraction

import pytest

from contractnet.deals import Deal, is_rational, is_structural
from contractnet.explore import all_allocations
from contractnet.model import Allocation, ResourceSetting, TableUtility


def alloc(*labels: str) -> Allocation:
    return Allocation.from_labels(list(labels))


def random_table_setting(
    rng: random.Random, n: int, m: int, lo: int = 0, hi: int = 9
) -> ResourceSetting:
    utilities = []
    for _ in range(n):
        entries = {
            b: Fraction(rng.randint(lo, hi))
            for b in rng.sample(range(1 << m), k=min(1 << m, 6))
        }
        utilities.append(TableUtility(entries, default=Fraction(rng.randint(lo, hi))))
    return ResourceSetting(m, tuple(utilities))


def oracle_shortest_length(setting, source, target, structural, rationality, budget=0):
    """Independent shortest-path oracle: explicit edge relaxation over the
    full allocation graph, with no successor generation shared with the
    package's search."""
    nodes = list(all_allocations(setting.agent_count, setting.resource_count))
    index = {a: i for i, a in enumerate(nodes)}
    edges = [[] for _ in nodes]  # (target index, irrational?)
    for a in nodes:
        for b in nodes:
            if a == b:
                continue
            deal = Deal(a, b)
            if not is_structural(deal, structural):
                continue
            edges[index[a]].append(
                (index[b], 0 if is_rational(deal, rationality, setting) else 1)
            )
    # layered Bellman-Ford over (node, budget spent)
    inf = float("inf")
    dist = {(index[source], 0): 0}
    frontier = [(index[source], 0)]
    while frontier:
        nxt = []
        for node, spent in frontier:
            d = dist[(node, spent)]
            for other, cost in edges[node]:
                spent2 = spent + cost
                if spent2 > budget:
                    continue
                if dist.get((other, spent2), inf) > d + 1:
                    dist[(other, spent2)] = d + 1
                    nxt.append((other, spent2))
        frontier = nxt
    best = [d for (node, _), d in dist.items() if node == index[target]]
    return min(best) if best else None


@pytest.fixture
def rng():
    return random.Random(20240812)
