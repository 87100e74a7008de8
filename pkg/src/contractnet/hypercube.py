"""Hypercube combinatorics: snake-in-the-box paths and Hamiltonian cycles.

A *snake* here is an induced path in the m-cube: consecutive labels differ
in exactly one bit and any two labels at distance >= 2 along the path
differ in at least two bits (condition SC).  Cycles and snakes are the raw
material the instance constructions consume.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

from .model import ResourceLimitError, bundle_to_label, complement_bundle, label_to_bundle

EXHAUSTIVE_DIMENSION_LIMIT = 7


class DimensionMismatchError(ValueError):
    """Labels in one sequence have different dimensions."""


class SearchFailureError(RuntimeError):
    """The snake search produced no usable path within its budget."""


def _parse_labels(labels: Sequence[str]) -> tuple[int, tuple[int, ...]]:
    lengths = {len(s) for s in labels}
    if len(lengths) > 1:
        raise DimensionMismatchError(f"mixed label lengths {sorted(lengths)}")
    m = lengths.pop() if lengths else 0
    return m, tuple(label_to_bundle(s) for s in labels)


def _sc_ok(masks: Sequence[int], m: int) -> bool:
    if len(set(masks)) != len(masks):
        return False
    for a, b in zip(masks, masks[1:]):
        if (a ^ b).bit_count() != 1:
            return False
    for i in range(len(masks)):
        for j in range(i + 2, len(masks)):
            if (masks[i] ^ masks[j]).bit_count() < 2:
                return False
    return True


def has_sc_property(labels: Sequence[str]) -> bool:
    """True iff the label sequence is an induced (condition-SC) cube path."""
    m, masks = _parse_labels(labels)
    if m == 0:
        return False
    return _sc_ok(masks, m)


@dataclass(frozen=True)
class SnakePath:
    """A validated SC path; `masks[0]` is the start label."""

    dimension: int
    masks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.dimension < 2:
            raise DimensionMismatchError("snakes need dimension >= 2")
        if not self.masks:
            raise ValueError("a path needs at least one label")
        for v in self.masks:
            if v < 0 or v >> self.dimension:
                raise DimensionMismatchError("label outside the cube")
        if not _sc_ok(self.masks, self.dimension):
            raise ValueError("label sequence violates the path or SC condition")

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "SnakePath":
        m, masks = _parse_labels(labels)
        return cls(m, masks)

    @property
    def length(self) -> int:
        """Number of deals (edges), one less than the number of labels."""
        return len(self.masks) - 1

    def labels(self) -> tuple[str, ...]:
        return tuple(bundle_to_label(v, self.dimension) for v in self.masks)


@dataclass(frozen=True)
class HamCycle:
    """A Hamiltonian cycle of the s-cube starting at the all-ones label."""

    dimension: int
    masks: tuple[int, ...]

    def __post_init__(self) -> None:
        s = self.dimension
        if s < 2:
            raise DimensionMismatchError("cycles need dimension >= 2")
        if len(self.masks) != 1 << s or len(set(self.masks)) != 1 << s:
            raise ValueError("cycle must visit each label exactly once")
        if self.masks[0] != (1 << s) - 1:
            raise ValueError("cycle must start at the all-ones label")
        for a, b in zip(self.masks, self.masks[1:] + self.masks[:1]):
            if (a ^ b).bit_count() != 1:
                raise ValueError("consecutive cycle labels must differ in one bit")

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "HamCycle":
        s, masks = _parse_labels(labels)
        return cls(s, masks)

    def labels(self) -> tuple[str, ...]:
        return tuple(bundle_to_label(v, self.dimension) for v in self.masks)

    def complement(self) -> tuple[int, ...]:
        """The label-wise complement cycle, which starts at all-zeros."""
        return tuple(complement_bundle(v, self.dimension) for v in self.masks)


def _inductive_cycle(s: int) -> list[int]:
    # Base two-dimensional cycle <00, 01, 11, 10>, then lift one dimension
    # at a time: <0a1, 1a1, 1ap, ..., 1a2, 0a2, ..., 0ap>.  The new bit is
    # the new leftmost label character, i.e. mask bit 0 of the larger cube.
    cycle = [0b00, 0b10, 0b11, 0b01]  # masks for labels 00, 01, 11, 10
    dim = 2
    while dim < s:
        lifted = [c << 1 for c in cycle]
        out = [lifted[0], lifted[0] | 1]
        out.extend(lifted[i] | 1 for i in range(len(lifted) - 1, 0, -1))
        out.extend(lifted[i] for i in range(1, len(lifted)))
        cycle = out
        dim += 1
    return cycle


def ham_cycle(s: int) -> HamCycle:
    """Deterministic cycle of the s-cube, rotated to start at all-ones."""
    if s < 2:
        raise DimensionMismatchError("cycles need dimension >= 2")
    cycle = _inductive_cycle(s)
    top = (1 << s) - 1
    at = cycle.index(top)
    return HamCycle(s, tuple(cycle[at:] + cycle[:at]))


# ---------------------------------------------------------------------------
# Snake search
# ---------------------------------------------------------------------------

def _neighbour_bitsets(m: int) -> list[int]:
    out = []
    for v in range(1 << m):
        mask = 0
        for b in range(m):
            mask |= 1 << (v ^ (1 << b))
        out.append(mask)
    return out


def _exhaustive_search(m: int, canonical: bool) -> list[int]:
    """Longest SC path from the all-zeros label, by pruned DFS.

    The canonical form fixes the start at 0^m and forces never-used flip
    bits to appear in ascending order, which quotients out the cube's bit
    permutation symmetry; an availability bound prunes hopeless branches.
    """
    full = (1 << (1 << m)) - 1
    nbr_bits = _neighbour_bitsets(m)
    best: list[int] = [0]
    path = [0]

    def extend(head: int, forbidden: int, used: int) -> None:
        nonlocal best
        if len(path) > len(best):
            best = path.copy()
        if len(path) + (~forbidden & full).bit_count() <= len(best):
            return
        limit = min(used + 1, m) if canonical else m
        blocked = forbidden | nbr_bits[head]
        for b in range(limit):
            v = head ^ (1 << b)
            if forbidden >> v & 1:
                continue
            path.append(v)
            extend(v, blocked | (1 << v), max(used, b + 1))
            path.pop()

    extend(0, 1, 0)
    return best


def _heuristic_search(
    m: int, budget: float, seed: int, rollouts: Optional[int] = None
) -> list[int]:
    """Randomised greedy rollouts; keeps the longest path found.

    Each rollout grows the path by the most-constrained next label (fewest
    onward moves), with random tie-breaking, then restarts.  A fixed
    `rollouts` count makes the result exactly reproducible; otherwise the
    wall-clock budget decides how many restarts happen.
    """
    rng = random.Random(seed)
    nbrs = [[v ^ (1 << b) for b in range(m)] for v in range(1 << m)]
    nbr_bits = _neighbour_bitsets(m)
    best: list[int] = [0]
    deadline = time.monotonic() + budget
    done = 0
    while (done < rollouts) if rollouts is not None else (
        done == 0 or time.monotonic() < deadline
    ):
        done += 1
        head = 0
        path = [0]
        forbidden = 1
        while True:
            blocked = forbidden | nbr_bits[head]
            scored = []
            for v in nbrs[head]:
                if forbidden >> v & 1:
                    continue
                after = blocked | nbr_bits[v] | (1 << v)
                onward = sum(1 for w in nbrs[v] if not after >> w & 1)
                scored.append((onward, rng.random(), v))
            if not scored:
                break
            _, _, v = min(scored)
            path.append(v)
            forbidden = blocked | (1 << v)
            head = v
        if len(path) > len(best):
            best = path
    return best


def snake_search(
    m: int,
    mode: str = "exhaustive",
    budget: float = 10.0,
    seed: int = 0,
    canonical: bool = True,
    rollouts: Optional[int] = None,
) -> SnakePath:
    """Search the m-cube for a long SC path starting at the all-zeros label.

    Exhaustive mode returns a maximum-length path and is limited to
    m <= EXHAUSTIVE_DIMENSION_LIMIT.  Heuristic mode returns the longest
    path found within `budget` seconds for a fixed seed; passing
    `rollouts` replaces the time limit with an exact restart count, which
    makes the result machine-independent.
    """
    if m < 2:
        raise DimensionMismatchError("snakes need dimension >= 2")
    if mode == "exhaustive":
        if m > EXHAUSTIVE_DIMENSION_LIMIT:
            raise ResourceLimitError(
                f"exhaustive snake search is limited to m <= {EXHAUSTIVE_DIMENSION_LIMIT}"
            )
        masks = _exhaustive_search(m, canonical)
    elif mode == "heuristic":
        masks = _heuristic_search(m, budget, seed, rollouts)
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    if len(masks) < 2:
        raise SearchFailureError("no path longer than a single label was found")
    return SnakePath(m, tuple(masks))


# ---------------------------------------------------------------------------
# Catalog files: a dimension header line, then one label per line
# ---------------------------------------------------------------------------

def write_catalog(labels: Iterable[str], dimension: int, stream: TextIO) -> None:
    stream.write(f"{dimension}\n")
    for label in labels:
        stream.write(label + "\n")


def read_catalog(stream: TextIO) -> tuple[int, tuple[str, ...]]:
    lines = [ln.strip() for ln in stream if ln.strip()]
    if not lines:
        raise ValueError("empty catalog file")
    dimension = int(lines[0])
    labels = tuple(lines[1:])
    for label in labels:
        if len(label) != dimension:
            raise DimensionMismatchError(
                f"label {label!r} does not match dimension {dimension}"
            )
    return dimension, labels


def load_snake(stream: TextIO) -> SnakePath:
    dimension, labels = read_catalog(stream)
    m, masks = _parse_labels(labels)
    if labels and m != dimension:
        raise DimensionMismatchError("labels do not match the header dimension")
    return SnakePath(dimension, masks)


def load_cycle(stream: TextIO) -> HamCycle:
    dimension, labels = read_catalog(stream)
    s, masks = _parse_labels(labels)
    if labels and s != dimension:
        raise DimensionMismatchError("labels do not match the header dimension")
    return HamCycle(dimension, masks)
