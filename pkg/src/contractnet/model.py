"""Core data model: bundles, allocations, utility functions, welfare measures.

Bundles are plain ints used as bitmasks over the resource indices
``0 .. m-1``.  The textual form is an m-character binary label whose
*leftmost* character is resource 0, so ``"1101"`` is the bundle
``{r0, r1, r3}``.  All utility values are exact rationals
(:class:`fractions.Fraction`); no floating point enters the core.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

RationalLike = Union[Fraction, int, str]

MONOTONE_ENUMERATION_LIMIT = 24


class InvalidAllocationError(ValueError):
    """Bundles do not form a partition of the resource set."""


class ResourceLimitError(ValueError):
    """An exhaustive enumeration guard was exceeded."""


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints and 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


# ---------------------------------------------------------------------------
# Bundle labels
# ---------------------------------------------------------------------------

def label_to_bundle(label: str) -> int:
    """Parse a binary label ("1101", leftmost char = resource 0) to a bitmask."""
    mask = 0
    for i, ch in enumerate(label):
        if ch == "1":
            mask |= 1 << i
        elif ch != "0":
            raise ValueError(f"bad label character {ch!r} in {label!r}")
    return mask


def bundle_to_label(bundle: int, m: int) -> str:
    """Render a bitmask as an m-character binary label."""
    if bundle < 0 or bundle >> m:
        raise ValueError(f"bundle {bundle:#x} does not fit in {m} bits")
    return "".join("1" if bundle >> i & 1 else "0" for i in range(m))


def complement_bundle(bundle: int, m: int) -> int:
    return ~bundle & ((1 << m) - 1)


def bundle_members(bundle: int) -> Iterator[int]:
    """Yield resource indices held in the bundle, ascending."""
    while bundle:
        low = bundle & -bundle
        yield low.bit_length() - 1
        bundle ^= low


def bundle_from_members(members: Iterable[int]) -> int:
    mask = 0
    for r in members:
        mask |= 1 << r
    return mask


def bundle_size(bundle: int) -> int:
    return bundle.bit_count()


# ---------------------------------------------------------------------------
# Allocations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Allocation:
    """A partition of the m resources among the agents.

    ``bundles[i]`` is agent i's holding as a bitmask.  The partition
    property (pairwise disjoint, union covers everything) is checked at
    construction; owner vectors and two-agent labels are derived views.
    """

    resource_count: int
    bundles: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bundles) < 2:
            raise InvalidAllocationError("an allocation needs at least two agents")
        full = (1 << self.resource_count) - 1
        union = 0
        total = 0
        for b in self.bundles:
            if b < 0 or b >> self.resource_count:
                raise InvalidAllocationError("bundle outside the resource set")
            union |= b
            total += b.bit_count()
        if union != full or total != self.resource_count:
            raise InvalidAllocationError("bundles do not partition the resource set")

    @classmethod
    def from_owners(cls, owners: Sequence[int], agent_count: int) -> "Allocation":
        masks = [0] * agent_count
        for r, a in enumerate(owners):
            if not 0 <= a < agent_count:
                raise InvalidAllocationError(f"owner {a} out of range")
            masks[a] |= 1 << r
        return cls(len(owners), tuple(masks))

    @classmethod
    def pair(cls, m: int, first_bundle: int) -> "Allocation":
        """Two-agent allocation determined by agent 0's bundle."""
        return cls(m, (first_bundle, complement_bundle(first_bundle, m)))

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "Allocation":
        lengths = {len(s) for s in labels}
        if len(lengths) != 1:
            raise InvalidAllocationError("agent labels have mixed lengths")
        (m,) = lengths
        return cls(m, tuple(label_to_bundle(s) for s in labels))

    @property
    def agent_count(self) -> int:
        return len(self.bundles)

    def owner(self, resource: int) -> int:
        bit = 1 << resource
        for i, b in enumerate(self.bundles):
            if b & bit:
                return i
        raise IndexError(resource)

    def owners(self) -> tuple[int, ...]:
        out = [0] * self.resource_count
        for i, b in enumerate(self.bundles):
            for r in bundle_members(b):
                out[r] = i
        return tuple(out)

    def labels(self) -> tuple[str, ...]:
        return tuple(bundle_to_label(b, self.resource_count) for b in self.bundles)

    def move(self, resource: int, to_agent: int) -> "Allocation":
        """Reassign one resource; the single-resource deal step."""
        bit = 1 << resource
        src = self.owner(resource)
        masks = list(self.bundles)
        masks[src] &= ~bit
        masks[to_agent] |= bit
        return Allocation(self.resource_count, tuple(masks))


# ---------------------------------------------------------------------------
# Utility functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableUtility:
    """Sparse explicit utility: listed bundles plus a default for the rest."""

    entries: Mapping[int, Fraction]
    default: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", {b: as_fraction(v) for b, v in self.entries.items()}
        )
        object.__setattr__(self, "default", as_fraction(self.default))

    def value(self, bundle: int) -> Fraction:
        return self.entries.get(bundle, self.default)


@dataclass(frozen=True)
class AdditiveUtility:
    """u(S) is the sum of per-resource values over the members of S."""

    singleton_values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "singleton_values",
            tuple(as_fraction(v) for v in self.singleton_values),
        )

    def value(self, bundle: int) -> Fraction:
        total = Fraction(0)
        for r in bundle_members(bundle):
            total += self.singleton_values[r]
        return total


@dataclass(frozen=True)
class ZeroOneUtility:
    """Yields 1 on the listed bundles and 0 elsewhere."""

    ones: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ones", frozenset(self.ones))

    def value(self, bundle: int) -> Fraction:
        return Fraction(1) if bundle in self.ones else Fraction(0)


@dataclass(frozen=True)
class ClosedFormUtility:
    """Total function handle registered by a construction.

    Exists so builders over many resources never materialise 2^m table
    entries; `describe` names the rule for reprs and error messages.
    """

    fn: Callable[[int], Fraction] = field(compare=False)
    describe: str = "closed-form"

    def value(self, bundle: int) -> Fraction:
        return as_fraction(self.fn(bundle))


Utility = Union[TableUtility, AdditiveUtility, ZeroOneUtility, ClosedFormUtility]


def evaluate(utility: Utility, bundle: int) -> Fraction:
    """Value of `utility` at `bundle`; total over all bundles."""
    return utility.value(bundle)


def utility_as_table(utility: Utility, m: int) -> TableUtility:
    """Materialise any utility kind into an explicit sparse table.

    The most frequent value over all 2^m bundles becomes the default, so
    constructions that are constant almost everywhere stay small.
    """
    if isinstance(utility, TableUtility):
        return utility
    if m > 20:
        raise ResourceLimitError(f"refusing to materialise 2^{m} table entries")
    values: dict[int, Fraction] = {b: utility.value(b) for b in range(1 << m)}
    counts: dict[Fraction, int] = {}
    for v in values.values():
        counts[v] = counts.get(v, 0) + 1
    default = max(counts, key=lambda v: (counts[v], -abs(v)))
    entries = {b: v for b, v in values.items() if v != default}
    return TableUtility(entries, default)


# ---------------------------------------------------------------------------
# Settings and welfare
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResourceSetting:
    """Agents, resources, and one utility function per agent."""

    resource_count: int
    utilities: tuple[Utility, ...]

    def __post_init__(self) -> None:
        if len(self.utilities) < 2:
            raise ValueError("a setting needs at least two agents")
        if self.resource_count < 1:
            raise ValueError("a setting needs at least one resource")
        object.__setattr__(self, "utilities", tuple(self.utilities))

    @property
    def agent_count(self) -> int:
        return len(self.utilities)

    def check_allocation(self, allocation: Allocation) -> None:
        if (
            allocation.resource_count != self.resource_count
            or allocation.agent_count != self.agent_count
        ):
            raise InvalidAllocationError("allocation does not match the setting")

    def agent_values(self, allocation: Allocation) -> tuple[Fraction, ...]:
        self.check_allocation(allocation)
        return tuple(
            u.value(b) for u, b in zip(self.utilities, allocation.bundles)
        )


def sigma_u(allocation: Allocation, setting: ResourceSetting) -> Fraction:
    """Utilitarian social welfare: the sum of every agent's utility."""
    return sum(setting.agent_values(allocation), Fraction(0))


def sigma_e(allocation: Allocation, setting: ResourceSetting) -> Fraction:
    """Egalitarian social welfare: the minimum over all agents."""
    return min(setting.agent_values(allocation))


def is_monotone(utility: Utility, m: int) -> bool:
    """True iff adding any resource never lowers the utility.

    Checks u(S) <= u(S + r) for every bundle S and r outside S, which by
    transitivity is the full subset condition.  Enumerates 2^m bundles,
    guarded by MONOTONE_ENUMERATION_LIMIT.
    """
    if m > MONOTONE_ENUMERATION_LIMIT:
        raise ResourceLimitError(
            f"monotonicity check over 2^{m} bundles exceeds the guard"
        )
    values = [utility.value(b) for b in range(1 << m)]
    for b in range(1 << m):
        vb = values[b]
        for r in range(m):
            if not b >> r & 1 and vb > values[b | (1 << r)]:
                return False
    return True
