"""Search and verification over the implicit contract-net graph.

Everything here is exact and deterministic: successor enumeration is
ordered (resources ascending, receiving agent ascending), breadth-first
search returns the minimal-length, lexicographically least path, and all
welfare comparisons use exact rationals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterator, Optional, Union

from .constructions.instance import ConstructedInstance
from .deals import (
    Deal,
    NotADealError,
    O_CONTRACT,
    Rationality,
    StructuralClass,
    is_rational,
    is_structural,
)
from .model import Allocation, ResourceSetting, TableUtility, bundle_members

DEFAULT_NODE_CAP = 1_000_000
SCAN_NODE_CAP = 4096


class CapExceededError(RuntimeError):
    """An exhaustive scan would exceed its node cap."""


class Evaluator:
    """Memoises per-allocation agent values and welfare for one setting."""

    def __init__(self, setting: ResourceSetting):
        self.setting = setting
        self._cache: dict[Allocation, tuple[tuple[Fraction, ...], Fraction]] = {}

    def values(self, allocation: Allocation) -> tuple[Fraction, ...]:
        return self._entry(allocation)[0]

    def sigma(self, allocation: Allocation) -> Fraction:
        return self._entry(allocation)[1]

    def _entry(self, allocation: Allocation):
        entry = self._cache.get(allocation)
        if entry is None:
            values = self.setting.agent_values(allocation)
            entry = (values, sum(values, Fraction(0)))
            self._cache[allocation] = entry
        return entry


def _rational_step(
    ev: Evaluator,
    source: Allocation,
    target: Allocation,
    rationality: Rationality,
) -> bool:
    if rationality is Rationality.NONE:
        return True
    before = ev.values(source)
    after = ev.values(target)
    if rationality is Rationality.IR:
        return ev.sigma(target) > ev.sigma(source)
    if rationality is Rationality.COOPERATIVE:
        return all(a >= b for a, b in zip(after, before)) and any(
            a > b for a, b in zip(after, before)
        )
    agents = [
        i for i, (p, q) in enumerate(zip(source.bundles, target.bundles)) if p != q
    ]
    if rationality is Rationality.EQUITABLE:
        return min(after[i] for i in agents) > min(before[i] for i in agents)
    if rationality is Rationality.PIGOU_DALTON:
        if len(agents) != 2:
            return False
        i, j = agents
        if before[i] + before[j] != after[i] + after[j]:
            return False
        return abs(after[i] - after[j]) < abs(before[i] - before[j])
    raise ValueError(rationality)


def all_allocations(agent_count: int, resource_count: int) -> Iterator[Allocation]:
    """Every allocation, in ascending owner-vector order."""
    for owners in product(range(agent_count), repeat=resource_count):
        yield Allocation.from_owners(owners, agent_count)


def structural_successors(
    allocation: Allocation, cls: StructuralClass
) -> Iterator[Allocation]:
    """All allocations one structural-class deal away, deterministic order."""
    n = allocation.agent_count
    m = allocation.resource_count
    if cls.kind == "O":
        owners = allocation.owners()
        for r in range(m):
            for a in range(n):
                if a != owners[r]:
                    yield allocation.move(r, a)
        return
    if cls.kind == "swap":
        for i, j in combinations(range(n), 2):
            for ri in bundle_members(allocation.bundles[i]):
                for rj in bundle_members(allocation.bundles[j]):
                    yield allocation.move(ri, j).move(rj, i)
        return
    if cls.kind == "unrestricted":
        for other in all_allocations(n, m):
            if other != allocation:
                yield other
        return
    # M(k): redistribute the pooled holdings of every agent subset of size
    # 2..k; requiring every member to change makes each target appear once.
    for size in range(2, (cls.k or 0) + 1):
        if size > n:
            break
        for agents in combinations(range(n), size):
            pool = list(
                bundle_members(
                    sum(allocation.bundles[a] for a in agents)
                )
            )
            for assignment in product(agents, repeat=len(pool)):
                masks = list(allocation.bundles)
                for a in agents:
                    for r in pool:
                        masks[a] &= ~(1 << r)
                for r, a in zip(pool, assignment):
                    masks[a] |= 1 << r
                if all(masks[a] != allocation.bundles[a] for a in agents):
                    yield Allocation(m, tuple(masks))


@dataclass(frozen=True)
class PathQuery:
    """A contract-path question: which deals are allowed, and what to reach.

    `budget` is the number of steps allowed to violate the rationality
    condition (the structural class always binds); `source`/`target` may be
    omitted for operations that only need the deal classes.
    """

    setting: ResourceSetting
    source: Optional[Allocation] = None
    target: Optional[Allocation] = None
    structural: StructuralClass = O_CONTRACT
    rationality: Rationality = Rationality.IR
    budget: int = 0
    node_cap: int = DEFAULT_NODE_CAP

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValueError("the irrationality budget cannot be negative")
        if (
            self.source is not None
            and self.target is not None
            and self.source == self.target
        ):
            raise NotADealError("a path query needs two distinct allocations")


@dataclass(frozen=True)
class PathResult:
    """Outcome of a shortest-path query.

    `outcome` is "found", "unreachable" (exhausted the reachable graph), or
    "cap-exceeded" (gave up; existence undecided).
    """

    outcome: str
    path: Optional[tuple[Allocation, ...]] = None
    length: Optional[int] = None
    explored: int = 0


def phi_successors(allocation: Allocation, query: PathQuery) -> list[Allocation]:
    """All allocations one class-satisfying deal away from `allocation`."""
    ev = Evaluator(query.setting)
    return [
        succ
        for succ in structural_successors(allocation, query.structural)
        if _rational_step(ev, allocation, succ, query.rationality)
    ]


def shortest_path(query: PathQuery) -> PathResult:
    """Breadth-first minimal path under the query's classes and budget."""
    if query.source is None or query.target is None:
        raise NotADealError("shortest_path needs both endpoints")
    ev = Evaluator(query.setting)
    source, target = query.source, query.target
    # best budget spent per visited allocation; a revisit is useful only
    # with strictly less budget spent
    best_budget: dict[Allocation, int] = {source: 0}
    parents: dict[tuple[Allocation, int], tuple[Allocation, int]] = {}
    frontier: deque[tuple[Allocation, int]] = deque([(source, 0)])
    explored = 0
    while frontier:
        current, spent = frontier.popleft()
        explored += 1
        if explored > query.node_cap:
            return PathResult("cap-exceeded", explored=explored)
        for succ in structural_successors(current, query.structural):
            cost = spent
            if not _rational_step(ev, current, succ, query.rationality):
                cost += 1
                if cost > query.budget:
                    continue
            if best_budget.get(succ, cost + 1) <= cost:
                continue
            best_budget[succ] = cost
            parents[(succ, cost)] = (current, spent)
            if succ == target:
                path = [succ]
                key = (succ, cost)
                while key in parents:
                    key = parents[key]
                    path.append(key[0])
                path.reverse()
                return PathResult(
                    "found", tuple(path), len(path) - 1, explored
                )
            frontier.append((succ, cost))
    return PathResult("unreachable", explored=explored)


def unrestricted_o_path(source: Allocation, target: Allocation) -> tuple[Allocation, ...]:
    """Move every misplaced resource once, in index order.

    The length equals the number of resources whose owner differs, so it
    is never more than m; no rationality condition is applied.
    """
    deal = Deal(source, target)  # validates distinctness and shape
    path = [source]
    current = source
    target_owners = target.owners()
    for r, owner in enumerate(current.owners()):
        if owner != target_owners[r]:
            current = current.move(r, target_owners[r])
            path.append(current)
    assert current == target
    return tuple(path)


def is_pareto_optimal(
    allocation: Allocation,
    setting: ResourceSetting,
    node_cap: int = SCAN_NODE_CAP,
) -> bool:
    """No other allocation weakly improves everyone and strictly someone."""
    n, m = setting.agent_count, setting.resource_count
    if n**m > node_cap:
        raise CapExceededError(f"{n}^{m} allocations exceed the scan cap")
    ev = Evaluator(setting)
    mine = ev.values(allocation)
    for other in all_allocations(n, m):
        if other == allocation:
            continue
        theirs = ev.values(other)
        if all(t >= v for t, v in zip(theirs, mine)) and any(
            t > v for t, v in zip(theirs, mine)
        ):
            return False
    return True


def run_maximal_path(
    start: Allocation,
    query: PathQuery,
    tie_rule: Union[str, Callable[[list[Allocation]], Allocation]] = "first",
) -> tuple[Allocation, ...]:
    """Apply class-satisfying deals until none exists; returns the walk.

    The rationality class must not be `none` (no termination guarantee).
    `tie_rule` picks among the candidate successors: "first" takes the
    lexicographically least by bundle tuple, or pass a callable.
    """
    if query.rationality is Rationality.NONE:
        raise ValueError("maximal walks need a rationality condition to terminate")
    ev = Evaluator(query.setting)
    pick = (
        (lambda options: min(options, key=lambda a: a.bundles))
        if tie_rule == "first"
        else tie_rule
    )
    path = [start]
    current = start
    step_cap = query.node_cap
    for _ in range(step_cap):
        options = [
            succ
            for succ in structural_successors(current, query.structural)
            if _rational_step(ev, current, succ, query.rationality)
        ]
        if not options:
            return tuple(path)
        chosen = pick(options)
        if chosen not in options:
            raise ValueError("tie rule returned a non-candidate allocation")
        current = chosen
        path.append(current)
    raise CapExceededError("maximal walk exceeded the step cap")


def l_max_scan(
    setting: ResourceSetting,
    structural: StructuralClass,
    rationality: Rationality,
    node_cap: int = SCAN_NODE_CAP,
) -> Optional[int]:
    """Worst shortest-path length over all realizable rationality-class deals.

    Returns None ("undefined") when no class deal is realizable by a class
    path.  Exhaustive over all ordered allocation pairs, so guarded.
    """
    n, m = setting.agent_count, setting.resource_count
    if n**m > node_cap:
        raise CapExceededError(f"{n}^{m} allocations exceed the scan cap")
    ev = Evaluator(setting)
    allocations = list(all_allocations(n, m))
    worst: Optional[int] = None
    for source in allocations:
        # one breadth-first sweep per source gives every reachable target
        distance: dict[Allocation, int] = {source: 0}
        frontier = deque([source])
        while frontier:
            current = frontier.popleft()
            for succ in structural_successors(current, structural):
                if succ in distance:
                    continue
                if not _rational_step(ev, current, succ, rationality):
                    continue
                distance[succ] = distance[current] + 1
                frontier.append(succ)
        for target, dist in distance.items():
            if target == source:
                continue
            deal = Deal(source, target)
            if not is_rational(deal, rationality, setting):
                continue
            if worst is None or dist > worst:
                worst = dist
    return worst


# ---------------------------------------------------------------------------
# Uniqueness verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniquenessCertificate:
    steps: int
    successors_checked: int
    shortcuts_checked: int


@dataclass(frozen=True)
class UniquenessViolation:
    at_index: int
    deal: Optional[Deal]
    reason: str


VerifyOutcome = Union[UniquenessCertificate, UniquenessViolation]


def verify_unique_path(
    instance: ConstructedInstance, node_cap: int = DEFAULT_NODE_CAP
) -> VerifyOutcome:
    """Certify that the expected path is the only class-satisfying one.

    Checks, for every on-path allocation, that exactly one class deal
    leads anywhere and that it reaches the next path element, and that no
    later path element is a structural-class shortcut.  Returns the first
    violating deal otherwise.
    """
    path = instance.expected_path
    setting = instance.setting
    if not is_rational(instance.designated_deal, instance.rationality, setting):
        return UniquenessViolation(
            0, instance.designated_deal, "designated deal fails its rationality class"
        )
    shortcuts = 0
    for i in range(len(path)):
        for j in range(i + 2, len(path)):
            shortcuts += 1
            if is_structural(Deal(path[i], path[j]), instance.structural):
                return UniquenessViolation(
                    i, Deal(path[i], path[j]), f"structural shortcut to index {j}"
                )
    if instance.structural.kind == "M":
        checked = _verify_successors_mk(instance, node_cap)
    else:
        checked = _verify_successors_enumerated(instance, node_cap)
    if isinstance(checked, UniquenessViolation):
        return checked
    return UniquenessCertificate(len(path) - 1, checked, shortcuts)


def _verify_successors_enumerated(
    instance: ConstructedInstance, node_cap: int
) -> Union[int, UniquenessViolation]:
    path = instance.expected_path
    ev = Evaluator(instance.setting)
    checked = 0
    for i in range(len(path) - 1):
        current, expected = path[i], path[i + 1]
        found: Optional[Allocation] = None
        for succ in structural_successors(current, instance.structural):
            checked += 1
            if checked > node_cap:
                raise CapExceededError("successor scan exceeded the node cap")
            if not _rational_step(ev, current, succ, instance.rationality):
                continue
            if found is not None:
                other = succ if succ != expected else found
                return UniquenessViolation(
                    i, Deal(current, other), "second class-satisfying successor"
                )
            found = succ
        if found != expected:
            return UniquenessViolation(
                i,
                Deal(current, found) if found is not None else None,
                "expected successor is not the unique continuation",
            )
    return checked


def _verify_successors_mk(
    instance: ConstructedInstance, node_cap: int
) -> Union[int, UniquenessViolation]:
    """Structured scan for block-cycle instances.

    Any allocation giving some agent a bundle outside its utility table is
    ruled out arithmetically by the table defaults; the remaining
    candidates (products of on-table bundles that tile the resources) are
    enumerated exhaustively.
    """
    setting = instance.setting
    path = instance.expected_path
    utilities = setting.utilities
    if not all(isinstance(u, TableUtility) for u in utilities):
        raise CapExceededError(
            "structured uniqueness scan needs explicit table utilities"
        )
    ev = Evaluator(setting)
    _check_default_penalties(instance, ev)

    m = setting.resource_count
    full = (1 << m) - 1
    candidate_bundles = [sorted(u.entries.keys()) for u in utilities]
    checked = 0

    def tilings(agent: int, used: int, masks: list[int]) -> Iterator[tuple[int, ...]]:
        if agent == len(candidate_bundles):
            if used == full:
                yield tuple(masks)
            return
        for bundle in candidate_bundles[agent]:
            if bundle & used:
                continue
            masks.append(bundle)
            yield from tilings(agent + 1, used | bundle, masks)
            masks.pop()

    for i in range(len(path) - 1):
        current, expected = path[i], path[i + 1]
        found: Optional[Allocation] = None
        for masks in tilings(0, 0, []):
            checked += 1
            if checked > node_cap:
                raise CapExceededError("structured scan exceeded the node cap")
            candidate = Allocation(m, masks)
            if candidate == current:
                continue
            deal = Deal(current, candidate)
            if not is_structural(deal, instance.structural):
                continue
            if not _rational_step(ev, current, candidate, instance.rationality):
                continue
            if found is not None:
                other = candidate if candidate != expected else found
                return UniquenessViolation(
                    i, Deal(current, other), "second class-satisfying successor"
                )
            found = candidate
        if found != expected:
            return UniquenessViolation(
                i,
                Deal(current, found) if found is not None else None,
                "expected successor is not the unique continuation",
            )
    return checked


def _check_default_penalties(instance: ConstructedInstance, ev: Evaluator) -> None:
    """Arithmetic part of the structured scan's certificate.

    Verifies the table defaults are low enough that an allocation holding
    any off-table bundle can never satisfy the instance's rationality
    class against an on-path allocation.
    """
    setting = instance.setting
    utilities = setting.utilities
    path = instance.expected_path
    if any(not u.entries for u in utilities):
        raise CapExceededError("structured scan needs non-empty utility tables")
    defaults = [u.default for u in utilities]
    maxima = [max(u.entries.values()) for u in utilities]
    path_values = [ev.values(p) for p in path]
    min_agent_value = min(min(vals) for vals in path_values)
    if instance.rationality is Rationality.IR:
        min_sigma = min(ev.sigma(p) for p in path)
        worst_off = max(
            d + sum(mx for j, mx in enumerate(maxima) if j != i)
            for i, d in enumerate(defaults)
        )
        if worst_off > min_sigma:
            raise CapExceededError(
                "table defaults too weak to exclude off-table allocations"
            )
    else:
        if any(d >= min_agent_value for d in defaults):
            raise CapExceededError(
                "table defaults too weak to exclude off-table allocations"
            )
