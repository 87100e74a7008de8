"""Deal classification: structural contract classes and rationality conditions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import Allocation, ResourceSetting, sigma_u


class NotADealError(ValueError):
    """The two allocations do not form a deal (equal, or shape mismatch)."""


@dataclass(frozen=True)
class Deal:
    """An ordered pair of distinct allocations of the same setting shape."""

    source: Allocation
    target: Allocation

    def __post_init__(self) -> None:
        if (
            self.source.resource_count != self.target.resource_count
            or self.source.agent_count != self.target.agent_count
        ):
            raise NotADealError("allocations have different shapes")
        if self.source == self.target:
            raise NotADealError("a deal needs two distinct allocations")


@dataclass(frozen=True)
class StructuralClass:
    """One of: single-resource (O), swap, M(k) with 2 <= k, or unrestricted."""

    kind: str
    k: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ("O", "swap", "M", "unrestricted"):
            raise ValueError(f"unknown structural kind {self.kind!r}")
        if self.kind == "M":
            if self.k is None or self.k < 2:
                raise ValueError("M(k) needs k >= 2")
        elif self.k is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    def __str__(self) -> str:
        return f"M({self.k})" if self.kind == "M" else self.kind


O_CONTRACT = StructuralClass("O")
SWAP = StructuralClass("swap")
UNRESTRICTED = StructuralClass("unrestricted")


def m_contract(k: int) -> StructuralClass:
    return StructuralClass("M", k)


class Rationality(Enum):
    IR = "IR"
    COOPERATIVE = "cooperative"
    EQUITABLE = "equitable"
    PIGOU_DALTON = "pigou-dalton"
    NONE = "none"

    def __str__(self) -> str:
        return self.value


def involved_agents(deal: Deal) -> frozenset[int]:
    """Indices of the agents whose bundle changes; size >= 2 for partitions."""
    return frozenset(
        i
        for i, (p, q) in enumerate(zip(deal.source.bundles, deal.target.bundles))
        if p != q
    )


def is_structural(deal: Deal, cls: StructuralClass) -> bool:
    """Does the deal belong to the structural contract class?"""
    if cls.kind == "unrestricted":
        return True
    src, dst = deal.source.bundles, deal.target.bundles
    if cls.kind == "O":
        moved = 0
        for p, q in zip(src, dst):
            moved += (p & ~q).bit_count()
        return moved == 1
    if cls.kind == "swap":
        agents = involved_agents(deal)
        if len(agents) != 2:
            return False
        return all(
            (src[i] & ~dst[i]).bit_count() == 1 and (dst[i] & ~src[i]).bit_count() == 1
            for i in agents
        )
    # M(k)
    agents = involved_agents(deal)
    if not 2 <= len(agents) <= (cls.k or 0):
        return False
    # Partition pairs preserve the involved agents' pooled resources
    # automatically; keep the definitional check as a debug assertion.
    assert _pool(src, agents) == _pool(dst, agents)
    return True


def _pool(bundles: tuple[int, ...], agents: frozenset[int]) -> int:
    mask = 0
    for i in agents:
        mask |= bundles[i]
    return mask


def is_rational(deal: Deal, rationality: Rationality, setting: ResourceSetting) -> bool:
    """Does the deal satisfy the rationality condition under the setting?"""
    if rationality is Rationality.NONE:
        return True
    before = setting.agent_values(deal.source)
    after = setting.agent_values(deal.target)
    if rationality is Rationality.IR:
        return sum(after) > sum(before)
    if rationality is Rationality.COOPERATIVE:
        return all(a >= b for a, b in zip(after, before)) and any(
            a > b for a, b in zip(after, before)
        )
    agents = involved_agents(deal)
    if rationality is Rationality.EQUITABLE:
        # The minimum ranges over the involved agents only, not all agents.
        return min(after[i] for i in agents) > min(before[i] for i in agents)
    if rationality is Rationality.PIGOU_DALTON:
        if len(agents) != 2:
            return False
        i, j = sorted(agents)
        if before[i] + before[j] != after[i] + after[j]:
            return False
        return abs(after[i] - after[j]) < abs(before[i] - before[j])
    raise ValueError(rationality)


def deal_sigma_u(deal: Deal, setting: ResourceSetting) -> tuple:
    """(before, after) utilitarian welfare of a deal, for reports."""
    return sigma_u(deal.source, setting), sigma_u(deal.target, setting)
