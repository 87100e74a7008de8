"""Multi-agent round-schedule family: one deal short of k agents at a time.

The resource set splits into one block of s resources per agent pair.
Each block is traded only between its two agents, whose holdings walk a
Hamiltonian cycle of the s-cube (one direction per agent).  A round of k
deals advances every pair's cube position by k-2; utilities reward the
walk so the schedule is the sole rational path in its contract class,
a property the uniqueness verifier re-establishes per instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from ..deals import Rationality, m_contract
from ..hypercube import HamCycle, ham_cycle
from ..model import Allocation, ResourceSetting, TableUtility, complement_bundle
from .instance import (
    CLAIM_LENGTH_FORMULA,
    CLAIM_NO_SHORTER,
    CLAIM_UNIQUE_PATH,
    FIXTURE_CYCLE_3,
    ConstructedInstance,
    ConstructionError,
)


def b_matrix(k: int) -> list[list[bool]]:
    """Antisymmetric seed matrix deciding which agent starts with each block.

    Resolves the recurrence b[i][j] = not b[i][j-1] above the diagonal with
    the diagonal read as False, so b[i][i+1] is True and values alternate
    along each row; below the diagonal b[i][j] = not b[j][i].
    """
    if k < 3:
        raise ConstructionError("the seed matrix needs at least 3 agents")
    out = [[False] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i < j:
                out[i][j] = (j - i) % 2 == 1
            elif i > j:
                out[i][j] = (i - j) % 2 == 0
    return out


@dataclass(frozen=True)
class CubeState:
    """Round/stage counters plus the symmetric cube-position table."""

    x: int
    p: int
    positions: dict  # (i, j) with i < j -> cube position (not wrapped)

    def chi(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("cube positions are defined for distinct agents")
        return self.positions[(i, j) if i < j else (j, i)]


def _schedule(k: int, deals: int) -> list[CubeState]:
    """Cube-position states for the initial allocation plus `deals` steps.

    The state entered at stage p leaves agent p out of the deal, so every
    pair not containing p advances one cube position.
    """
    pairs = list(combinations(range(k), 2))
    positions = {pair: 0 for pair in pairs}
    states = [CubeState(0, k - 1, dict(positions))]
    x, p = 1, 0
    for _ in range(deals):
        for pair in pairs:
            if p not in pair:
                positions[pair] += 1
        states.append(CubeState(x, p, dict(positions)))
        p += 1
        if p == k:
            x, p = x + 1, 0
    return states


def reappearance_r(k: int, s: int) -> int:
    """Deals until agent 0 first regains its starting bundle.

    The least r > 1 such that agent 0's holding repeats; r = q*k for the
    smallest q with q*(k-2) divisible by 2^s, and r >= 2^s always.
    """
    if k < 3:
        raise ConstructionError("the schedule needs at least 3 agents")
    if s < 2:
        raise ConstructionError("blocks need at least 2 resources")
    period = 1 << s
    q = 1
    while q * (k - 2) % period:
        q += 1
    r = q * k
    assert r >= period
    return r


def _layout(k: int, s: int):
    pairs = list(combinations(range(k), 2))
    base = {pair: idx * s for idx, pair in enumerate(pairs)}
    return pairs, base


def default_cycle(s: int) -> HamCycle:
    """The cycle generators use unless one is supplied.

    For s = 3 this is the worked-example fixture so the published tables
    reproduce exactly; other dimensions use the inductive cycle.
    """
    return FIXTURE_CYCLE_3 if s == 3 else ham_cycle(s)


def _allocations(
    k: int, s: int, cycle: HamCycle, states: list[CubeState]
) -> list[Allocation]:
    pairs, base = _layout(k, s)
    m = s * len(pairs)
    seed = b_matrix(k)
    forward = cycle.masks
    backward = cycle.complement()
    period = len(forward)
    block_full = (1 << s) - 1

    allocations = []
    for state in states:
        masks = [0] * k
        for i, j in pairs:
            pos = state.chi(i, j) % period
            sub_i = forward[pos] if seed[i][j] else backward[pos]
            masks[i] |= sub_i << base[(i, j)]
            masks[j] |= (sub_i ^ block_full) << base[(i, j)]
        allocations.append(Allocation(m, tuple(masks)))
    return allocations


def default_deal_count(k: int, s: int) -> int:
    """Longest safe default path length: reappearance_r(k, s) - 2 deals.

    Agent k-1's cube positions all coincide one stage before each round
    boundary, so its opening bundle already reappears after r-1 deals (one
    deal before agent 0's).  A path that long would give the endpoints an
    M(k-1) shortcut and make the utility tables ill-defined; stopping one
    deal earlier avoids both and still exceeds 2^s - 1 deals.
    """
    return reappearance_r(k, s) - 2


def build_mk_path(
    k: int,
    s: int,
    cycle: Optional[HamCycle] = None,
    deals: Optional[int] = None,
) -> list[Allocation]:
    """The round-schedule contract path; see default_deal_count for the
    default length."""
    cycle = cycle if cycle is not None else default_cycle(s)
    if cycle.dimension != s:
        raise ConstructionError("cycle dimension must match the block size")
    if deals is None:
        deals = default_deal_count(k, s)
    if deals < 1:
        raise ConstructionError("the path needs at least one deal")
    return _allocations(k, s, cycle, _schedule(k, deals))


def _bundle_values(
    k: int,
    allocations: list[Allocation],
    states: list[CubeState],
    value_at,  # (state, agent) -> Fraction
) -> list[dict[int, Fraction]]:
    """Per-agent bundle tables collected along the path.

    A bundle repeating with a different value would make the utility
    ill-defined; the default path length keeps that impossible, and this
    guards it.
    """
    tables: list[dict[int, Fraction]] = [dict() for _ in range(k)]
    for state, allocation in zip(states, allocations):
        for i in range(k):
            bundle = allocation.bundles[i]
            value = value_at(state, i)
            previous = tables[i].setdefault(bundle, value)
            if previous != value:
                raise ConstructionError(
                    f"agent {i} revisits a bundle with a conflicting value; "
                    "shorten the path"
                )
    return tables


def _mk_instance_parts(k, s, cycle, deals):
    cycle = cycle if cycle is not None else default_cycle(s)
    if cycle.dimension != s:
        raise ConstructionError("cycle dimension must match the block size")
    if deals is None:
        deals = default_deal_count(k, s)
    states = _schedule(k, deals)
    allocations = _allocations(k, s, cycle, states)
    return states, allocations


def build_thm6(
    k: int,
    s: int,
    cycle: Optional[HamCycle] = None,
    deals: Optional[int] = None,
) -> ConstructedInstance:
    """k-agent instance realisable in one M(k) deal but needing the whole
    round schedule under IR M(k-1) contracts.

    On-path bundles are worth the sum of the agent's cube positions; any
    other bundle is worth -2^(k*m), so no allocation leaving the schedule
    can ever raise welfare.  Per-step uniqueness is a per-instance fact,
    not an assumption: once cube positions wrap past 2^s, two agents'
    wrapped-ahead holdings can occasionally re-tile with the others'
    older bundles (k=5, s=2 is such a case), and the verifier reports it.
    Paths of at most 2^s - 1 deals can never wrap and always certify.
    """
    states, allocations = _mk_instance_parts(k, s, cycle, deals)
    m = allocations[0].resource_count
    penalty = Fraction(-(1 << (k * m)))

    def value_at(state: CubeState, agent: int) -> Fraction:
        return Fraction(sum(state.chi(agent, j) for j in range(k) if j != agent))

    tables = _bundle_values(k, allocations, states, value_at)
    setting = ResourceSetting(
        m, tuple(TableUtility(t, default=penalty) for t in tables)
    )
    return ConstructedInstance(
        name="thm6",
        params={"k": k, "s": s, "m": m, "deals": len(allocations) - 1},
        setting=setting,
        expected_path=tuple(allocations),
        structural=m_contract(k - 1),
        rationality=Rationality.IR,
        claims=frozenset(
            {CLAIM_UNIQUE_PATH, CLAIM_LENGTH_FORMULA, CLAIM_NO_SHORTER}
        ),
        length_bound=Fraction((1 << s) - 1),
    )


def build_cor3(
    k: int,
    s: int,
    variant: Rationality,
    cycle: Optional[HamCycle] = None,
    deals: Optional[int] = None,
) -> ConstructedInstance:
    """Money-free variants of the round-schedule instance."""
    if variant is Rationality.COOPERATIVE:
        base = build_thm6(k, s, cycle, deals)
        return ConstructedInstance(
            name="cor3",
            params={**base.params, "variant": str(variant)},
            setting=base.setting,
            expected_path=base.expected_path,
            structural=base.structural,
            rationality=Rationality.COOPERATIVE,
            claims=frozenset(
                {CLAIM_UNIQUE_PATH, CLAIM_LENGTH_FORMULA, CLAIM_NO_SHORTER}
            ),
            length_bound=base.length_bound,
        )
    if variant is not Rationality.EQUITABLE:
        raise ConstructionError(f"unsupported variant {variant}")

    states, allocations = _mk_instance_parts(k, s, cycle, deals)
    m = allocations[0].resource_count
    kk = k * k

    def value_at(state: CubeState, agent: int) -> Fraction:
        x, p = state.x, state.p
        if p == k - 1:
            return Fraction(x * kk + k - agent)
        if agent == 0:
            return Fraction((x - 1) * kk + k + p)
        if p < agent - 1:
            return Fraction((x - 1) * kk + k - agent + p + 1)
        if p in (agent - 1, agent):
            return Fraction(x * kk + 1)
        return Fraction(x * kk + 1 + p - agent)

    tables = _bundle_values(k, allocations, states, value_at)
    setting = ResourceSetting(
        m, tuple(TableUtility(t, default=Fraction(-1)) for t in tables)
    )
    return ConstructedInstance(
        name="cor3",
        params={
            "k": k,
            "s": s,
            "m": m,
            "deals": len(allocations) - 1,
            "variant": str(variant),
        },
        setting=setting,
        expected_path=tuple(allocations),
        structural=m_contract(k - 1),
        rationality=Rationality.EQUITABLE,
        claims=frozenset(
            {CLAIM_UNIQUE_PATH, CLAIM_LENGTH_FORMULA, CLAIM_NO_SHORTER}
        ),
        length_bound=Fraction((1 << s) - 1),
    )


def multi_transform(
    path: list[Allocation], k: int, s: int
) -> list[Allocation]:
    """Double the resource set so every bundle has size (k-1)*s.

    Each block gains a mirror block; whatever part of a block an agent
    holds, it holds the complementary part of the mirror.  Steps remain
    deals among the same k-1 agents, now as one-for-one swaps per pair.
    """
    pairs, base = _layout(k, s)
    m = s * len(pairs)
    block_full = (1 << s) - 1
    if not path or path[0].resource_count != m or path[0].agent_count != k:
        raise ConstructionError("path does not match the k/s block layout")
    out = []
    for allocation in path:
        masks = [0] * k
        for i, j in pairs:
            sub_i = allocation.bundles[i] >> base[(i, j)] & block_full
            masks[i] |= sub_i << base[(i, j)]
            masks[i] |= (sub_i ^ block_full) << (m + base[(i, j)])
            sub_j = sub_i ^ block_full
            masks[j] |= sub_j << base[(i, j)]
            masks[j] |= (sub_j ^ block_full) << (m + base[(i, j)])
        out.append(Allocation(2 * m, tuple(masks)))
    return out


def build_multi(
    k: int,
    s: int,
    cycle: Optional[HamCycle] = None,
    deals: Optional[int] = None,
) -> ConstructedInstance:
    """Doubled-resource schedule carrying structural claims only.

    No certified utility family ships with this transform, so the setting
    holds all-zero utilities and the rationality class is `none`.
    """
    path = multi_transform(build_mk_path(k, s, cycle, deals), k, s)
    m = path[0].resource_count
    setting = ResourceSetting(m, tuple(TableUtility({}) for _ in range(k)))
    return ConstructedInstance(
        name="multi",
        params={"k": k, "s": s, "m": m, "deals": len(path) - 1},
        setting=setting,
        expected_path=tuple(path),
        structural=m_contract(k - 1),
        rationality=Rationality.NONE,
        claims=frozenset(),
        length_bound=Fraction((1 << s) - 1),
    )
