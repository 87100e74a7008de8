"""Two-agent worst-case families driven directly by a snake path.

Each construction fixes the welfare sum along the snake so that the snake
itself is the unique rational single-resource contract path realising the
deal from its first to its last allocation; only the per-agent split of
that sum changes between the rationality variants.
"""

from __future__ import annotations

from fractions import Fraction

from ..deals import O_CONTRACT, Rationality
from ..hypercube import SnakePath
from ..model import Allocation, ResourceSetting, TableUtility, complement_bundle
from .instance import (
    CLAIM_LENGTH_FORMULA,
    CLAIM_UNIQUE_PATH,
    ConstructedInstance,
    ConstructionError,
)

#: The two-agent exponential lower bound applies from this many resources up.
SNAKE_BOUND_MIN_DIMENSION = 7


def snake_length_bound(m: int) -> Fraction:
    """Guaranteed-path-length formula value (77/256)*2^m - 2."""
    return Fraction(77, 256) * (1 << m) - 2


def _length_bound(m: int):
    return snake_length_bound(m) if m >= SNAKE_BOUND_MIN_DIMENSION else None


def pair_allocations(snake: SnakePath) -> tuple[Allocation, ...]:
    """Two-agent allocations ⟨label, complement⟩ along the snake."""
    m = snake.dimension
    return tuple(Allocation.pair(m, mask) for mask in snake.masks)


def build_thm3(snake: SnakePath) -> ConstructedInstance:
    """Unique-IR-path instance: welfare climbs by exactly 1 per snake step.

    The welfare sum at the k-th snake label is k; it is split between the
    agents as ceil(k/2) / floor(k/2), which reproduces the worked four-
    resource table exactly.  Off the snake both utilities default to 0.
    """
    m = snake.dimension
    u1 = {}
    u2 = {}
    for i, mask in enumerate(snake.masks):
        k = i + 1
        u1[mask] = Fraction((k + 1) // 2)
        u2[complement_bundle(mask, m)] = Fraction(k // 2)
    setting = ResourceSetting(m, (TableUtility(u1), TableUtility(u2)))
    return ConstructedInstance(
        name="thm3",
        params={"m": m},
        setting=setting,
        expected_path=pair_allocations(snake),
        structural=O_CONTRACT,
        rationality=Rationality.IR,
        claims=frozenset({CLAIM_UNIQUE_PATH, CLAIM_LENGTH_FORMULA}),
        length_bound=_length_bound(m),
    )


def build_cor1(snake: SnakePath, variant: Rationality) -> ConstructedInstance:
    """Money-free variants over the same snake path.

    cooperative: agent 0 gains 1 per step while agent 1 stays at 0;
    equitable: both agents sit at k on the k-th label; pigou-dalton keeps
    the sum pinned at 2^m while the utility gap shrinks by 2 per step.
    """
    m = snake.dimension
    index_table = {
        mask: Fraction(i + 1) for i, mask in enumerate(snake.masks)
    }
    complement_of = {
        complement_bundle(mask, m): value for mask, value in index_table.items()
    }
    u1 = TableUtility(index_table)
    if variant is Rationality.COOPERATIVE:
        u2 = TableUtility({})
    elif variant is Rationality.EQUITABLE:
        u2 = TableUtility(complement_of)
    elif variant is Rationality.PIGOU_DALTON:
        full = Fraction(1 << m)
        u2 = TableUtility(
            {mask: full - value for mask, value in complement_of.items()},
            default=full,
        )
    else:
        raise ConstructionError(f"unsupported variant {variant}")
    setting = ResourceSetting(m, (u1, u2))
    return ConstructedInstance(
        name="cor1",
        params={"m": m, "variant": str(variant)},
        setting=setting,
        expected_path=pair_allocations(snake),
        structural=O_CONTRACT,
        rationality=variant,
        claims=frozenset({CLAIM_UNIQUE_PATH, CLAIM_LENGTH_FORMULA}),
        length_bound=_length_bound(m),
    )


def build_cor2(
    snake: SnakePath, variant: Rationality, agent_count: int
) -> ConstructedInstance:
    """The two-agent families padded with empty-handed bystander agents.

    Bystanders hold nothing along the whole path.  For IR, equitable and
    pigou-dalton their utilities make handing them anything fail the
    rationality condition outright, so per-step uniqueness carries over.
    The cooperative variant's all-zero bystanders are indifferent: on a
    downward snake step, parking the dropped resource with a bystander is
    cooperatively rational too, so several cooperative realisations exist
    and that variant carries the length claim only.  Every cooperative
    deal must strictly raise agent 0's value, which single-resource steps
    can only advance one snake position at a time, so the shortest-path
    length is the snake length regardless.
    """
    if agent_count < 3:
        raise ConstructionError("bystander construction needs at least 3 agents")
    m = snake.dimension
    if variant is Rationality.IR:
        base = build_thm3(snake)
        bystander = TableUtility({0: Fraction(1)})
    elif variant is Rationality.COOPERATIVE:
        base = build_cor1(snake, variant)
        bystander = TableUtility({})
    elif variant is Rationality.EQUITABLE:
        base = build_cor1(snake, variant)
        bystander = TableUtility({0: Fraction(1 << m)})
    elif variant is Rationality.PIGOU_DALTON:
        base = build_cor1(snake, variant)
        bystander = TableUtility({}, default=Fraction(1 << m))
    else:
        raise ConstructionError(f"unsupported variant {variant}")
    utilities = base.setting.utilities + (bystander,) * (agent_count - 2)
    setting = ResourceSetting(m, utilities)
    path = tuple(
        Allocation(m, (mask, complement_bundle(mask, m)) + (0,) * (agent_count - 2))
        for mask in snake.masks
    )
    claims = {CLAIM_LENGTH_FORMULA}
    if variant is not Rationality.COOPERATIVE:
        claims.add(CLAIM_UNIQUE_PATH)
    return ConstructedInstance(
        name="cor2",
        params={"m": m, "variant": str(variant), "n": agent_count},
        setting=setting,
        expected_path=path,
        structural=O_CONTRACT,
        rationality=variant,
        claims=frozenset(claims),
        length_bound=_length_bound(m),
    )
