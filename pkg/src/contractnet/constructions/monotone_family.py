"""Monotone-utility worst-case families over a doubled resource set.

A snake over s resources is doubled into 2s resources by pairing every
label with its complement on a mirror set, then interpolating one label
between each doubled pair so the result is again a single-resource
contract path.  Bundle sizes along that path stay within {s, s+1}, which
is what makes monotone utility functions possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from ..deals import O_CONTRACT, Rationality
from ..hypercube import SnakePath
from ..model import (
    Allocation,
    ClosedFormUtility,
    ResourceSetting,
    bundle_from_members,
    complement_bundle,
)
from .instance import (
    CLAIM_LENGTH_FORMULA,
    CLAIM_MONOTONE,
    CLAIM_UNIQUE_PATH,
    ConstructedInstance,
    ConstructionError,
)

#: The doubled-family lower bound applies from this snake dimension up.
DOUBLED_BOUND_MIN_DIMENSION = 7


def doubled_length_bound(s: int) -> Fraction:
    """Guaranteed-path-length formula value (77/128)*2^s - 3."""
    return Fraction(77, 128) * (1 << s) - 3


def ext_transform(snake: SnakePath) -> SnakePath:
    """Interpolated doubling of a snake: a 2s-dimensional SC path.

    Odd-position labels are ``alpha . complement(alpha)`` (weight s); each
    interpolated label joins two neighbours and has weight s+1.
    """
    s = snake.dimension
    masks = snake.masks
    out = []
    for i, alpha in enumerate(masks):
        out.append(alpha | complement_bundle(alpha, s) << s)
        if i + 1 < len(masks):
            nxt = masks[i + 1]
            if alpha & nxt == alpha:  # alpha is the subset
                out.append(nxt | complement_bundle(alpha, s) << s)
            else:
                out.append(alpha | complement_bundle(nxt, s) << s)
    return SnakePath(2 * s, tuple(out))


@dataclass(frozen=True)
class LabelClass:
    """Classification of one weight-(s+1) label relative to the doubled path.

    kind is "good" (the label sits on the path), "digression" (one
    single-resource step off an odd path label), or "inaccessible";
    `origin` is the 1-based odd-label index a digression departs from,
    or the path position index for good labels.
    """

    kind: str
    origin: Optional[int] = None


def _digression_origins(ext: SnakePath) -> dict[int, int]:
    """Map each digression label to the odd index i of its base label.

    Digressions are the one-bit supersets of an odd label other than the
    path's own interpolated labels; supersets of the terminal label do not
    count (the path is halted there), they stay inaccessible.
    """
    two_s = ext.dimension
    good = set(ext.masks[1::2])
    path = set(ext.masks)
    out: dict[int, int] = {}
    for j in range(0, len(ext.masks) - 1, 2):  # odd labels except the terminal
        base = ext.masks[j]
        i = j // 2 + 1
        for bit in range(two_s):
            superset = base | 1 << bit
            if superset == base or superset in good or superset in path:
                continue
            out[superset] = i
    return out


def classify_labels(ext: SnakePath, s: int) -> dict[int, LabelClass]:
    """Total classification of all C(2s, s+1) weight-(s+1) labels."""
    if ext.dimension != 2 * s:
        raise ConstructionError("path dimension must be twice the snake dimension")
    good = {mask: j // 2 + 1 for j, mask in enumerate(ext.masks) if j % 2 == 1}
    digressions = _digression_origins(ext)
    out: dict[int, LabelClass] = {}
    for members in combinations(range(2 * s), s + 1):
        mask = bundle_from_members(members)
        if mask in good:
            out[mask] = LabelClass("good", good[mask])
        elif mask in digressions:
            out[mask] = LabelClass("digression", digressions[mask])
        else:
            out[mask] = LabelClass("inaccessible")
    return out


def _path_positions(ext: SnakePath) -> dict[int, int]:
    return {mask: j for j, mask in enumerate(ext.masks)}


def _doubled_setting(
    snake: SnakePath,
    odd_parity: bool,
    pair_of,  # (kind, data) -> (u1 value, u2-at-complement value)
) -> tuple[ResourceSetting, tuple[Allocation, ...], int]:
    """Shared assembly for the doubled families.

    `pair_of` receives the classification of a 2s-bit bundle gamma and
    returns the exact pair (u1(gamma), u2(complement(gamma))).  With odd
    parity one extra resource is pinned to agent 1 in every allocation and
    ignored by both utilities.
    """
    s = snake.dimension
    ext = ext_transform(snake)
    two_s = 2 * s
    t = len(snake.masks)
    positions = _path_positions(ext)
    digressions = _digression_origins(ext)

    def classify(gamma: int):
        j = positions.get(gamma)
        if j is not None:
            if j % 2 == 0:
                return "odd", j // 2 + 1  # gamma is the (2i-1)-th path label
            return "good", j // 2 + 1  # gamma is the interpolated 2i-th label
        weight = gamma.bit_count()
        if weight == s + 1 and gamma in digressions:
            return "digression", digressions[gamma]
        if weight <= s - 1:
            return "low", None
        if weight == s:
            return "off-path", None
        if weight == s + 1:
            return "inaccessible", None
        return "big", None  # weight >= s+2

    m = two_s + 1 if odd_parity else two_s
    pin = 1 << two_s if odd_parity else 0
    trim = (1 << two_s) - 1

    def u1_fn(bundle: int) -> Fraction:
        return pair_of(*classify(bundle & trim))[0]

    def u2_fn(bundle: int) -> Fraction:
        gamma = complement_bundle(bundle & trim, two_s)
        return pair_of(*classify(gamma))[1]

    u1 = ClosedFormUtility(u1_fn, describe=f"doubled-path agent 0 (t={t})")
    u2 = ClosedFormUtility(u2_fn, describe=f"doubled-path agent 1 (t={t})")
    setting = ResourceSetting(m, (u1, u2))
    path = tuple(
        Allocation(m, (mask, complement_bundle(mask, two_s) | pin))
        for mask in ext.masks
    )
    return setting, path, t


def build_thm4(snake: SnakePath, odd_parity: bool = False) -> ConstructedInstance:
    """Monotone two-agent instance whose unique IR path is the doubled snake."""
    t = len(snake.masks)

    def pair_of(kind: str, i: Optional[int]) -> tuple[Fraction, Fraction]:
        # First element: u1 at the classified bundle gamma; second: u2 at
        # its complement.  u1 tracks path progress; u2 depends only on the
        # complement's size (0 below s-1, 2t+1 at s-1, 2t+2 from s up).
        if kind == "odd":
            return Fraction(2 * i - 1), Fraction(2 * t + 2)
        if kind == "good":
            return Fraction(2 * i + 1), Fraction(2 * t + 1)
        if kind == "digression":
            return Fraction(2 * i), Fraction(2 * t + 1)
        if kind in ("low", "off-path"):
            return Fraction(0), Fraction(2 * t + 2)
        if kind == "inaccessible":
            return Fraction(2 * t - 1), Fraction(2 * t + 1)
        return Fraction(2 * t - 1), Fraction(0)  # weight >= s+2

    setting, path, t = _doubled_setting(snake, odd_parity, pair_of)
    m = setting.resource_count
    return ConstructedInstance(
        name="thm4",
        params={"s": snake.dimension, "m": m, "parity": "odd" if odd_parity else "even"},
        setting=setting,
        expected_path=path,
        structural=O_CONTRACT,
        rationality=Rationality.IR,
        claims=frozenset({CLAIM_UNIQUE_PATH, CLAIM_MONOTONE, CLAIM_LENGTH_FORMULA}),
        length_bound=doubled_length_bound(snake.dimension)
        if snake.dimension >= DOUBLED_BOUND_MIN_DIMENSION
        else None,
    )


def build_thm5(
    snake: SnakePath,
    variant: Rationality,
    odd_parity: bool = False,
    monotone_repair: bool = False,
) -> ConstructedInstance:
    """Money-free monotone variants over the doubled snake path.

    The equitable variant's literal table is not monotone: agent 1's value
    at the complement of the terminal path label is 2t, above the 2t-1
    plateau its supersets receive, and is_monotone rightly rejects it.
    `monotone_repair` raises that plateau to 2t (the smallest change that
    restores monotonicity); path values, equitability and uniqueness are
    untouched.  The cooperative variant never needs this: its path values
    stay below the plateau.
    """
    t = len(snake.masks)
    top = Fraction(2 * t - 1)

    if variant is Rationality.COOPERATIVE:

        def pair_of(kind: str, i: Optional[int]) -> tuple[Fraction, Fraction]:
            if kind == "odd":
                return Fraction(i), Fraction(i)
            if kind == "good":
                return Fraction(i + 1), Fraction(i)
            if kind == "digression":
                return Fraction(i), Fraction(i - 1)
            if kind in ("low", "off-path"):
                return Fraction(0), top
            return top, Fraction(0)  # inaccessible or weight >= s+2

    elif variant is Rationality.EQUITABLE:
        plateau = Fraction(2 * t) if monotone_repair else top

        def pair_of(kind: str, i: Optional[int]) -> tuple[Fraction, Fraction]:
            if kind == "odd":
                return Fraction(2 * i - 1), Fraction(2 * i)
            if kind == "good":
                return Fraction(2 * i + 1), Fraction(2 * i)
            if kind == "digression":
                return Fraction(2 * i), Fraction(2 * i - 1)
            if kind in ("low", "off-path"):
                return Fraction(0), plateau
            return top, Fraction(0)

    else:
        raise ConstructionError(f"unsupported variant {variant}")

    setting, path, t = _doubled_setting(snake, odd_parity, pair_of)
    m = setting.resource_count
    params = {
        "s": snake.dimension,
        "m": m,
        "variant": str(variant),
        "parity": "odd" if odd_parity else "even",
    }
    if monotone_repair:
        params["monotone_repair"] = True
    claims = {CLAIM_UNIQUE_PATH, CLAIM_LENGTH_FORMULA}
    if variant is not Rationality.EQUITABLE or monotone_repair:
        # the literal equitable table is knowingly non-monotone, so that
        # variant only claims monotonicity once repaired
        claims.add(CLAIM_MONOTONE)
    return ConstructedInstance(
        name="thm5",
        params=params,
        setting=setting,
        expected_path=path,
        structural=O_CONTRACT,
        rationality=variant,
        claims=frozenset(claims),
        length_bound=doubled_length_bound(snake.dimension)
        if snake.dimension >= DOUBLED_BOUND_MIN_DIMENSION
        else None,
    )
