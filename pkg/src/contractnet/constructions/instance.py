"""Constructed worst-case instances and the built-in worked-example fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from ..deals import Deal, Rationality, StructuralClass, is_rational, is_structural
from ..hypercube import HamCycle, SnakePath
from ..model import Allocation, ResourceSetting

CLAIM_UNIQUE_PATH = "unique-path"
CLAIM_MONOTONE = "monotone-utilities"
CLAIM_LENGTH_FORMULA = "length-formula"
CLAIM_NO_SHORTER = "no-shorter-class-path"

ALL_CLAIMS = frozenset(
    {CLAIM_UNIQUE_PATH, CLAIM_MONOTONE, CLAIM_LENGTH_FORMULA, CLAIM_NO_SHORTER}
)

# Worked-example fixtures: the four-resource snake, the three-resource snake
# behind the doubled monotone family, and the three-cube Hamiltonian cycle
# used by the block-cycle family.  Generators reproduce the corresponding
# published tables bit-for-bit from these.
FIXTURE_SNAKE_4 = SnakePath.from_labels(
    ["0000", "1000", "1010", "1110", "0110", "0111", "0101", "1101"]
)
FIXTURE_SNAKE_3 = SnakePath.from_labels(["000", "001", "101", "111", "110"])
FIXTURE_CYCLE_3 = HamCycle.from_labels(
    ["111", "110", "010", "011", "001", "000", "100", "101"]
)


class ConstructionError(ValueError):
    """A builder was given unusable parameters or inputs."""


@dataclass(frozen=True)
class ConstructedInstance:
    """A setting, a designated deal, and the expected unique rational path.

    `claims` names the certified properties a verifier must re-establish;
    `length_bound` carries the family's lower-bound formula value when the
    parameters are inside its validity range.
    """

    name: str
    params: Mapping[str, object]
    setting: ResourceSetting
    expected_path: tuple[Allocation, ...]
    structural: StructuralClass
    rationality: Rationality
    claims: frozenset[str]
    length_bound: Optional[Fraction] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "claims", frozenset(self.claims))
        if not self.claims <= ALL_CLAIMS:
            raise ConstructionError(f"unknown claims {self.claims - ALL_CLAIMS}")
        if len(self.expected_path) < 2:
            raise ConstructionError("expected path needs at least one deal")
        for step, (a, b) in enumerate(zip(self.expected_path, self.expected_path[1:])):
            deal = Deal(a, b)
            if not is_structural(deal, self.structural):
                raise ConstructionError(
                    f"path step {step} violates the {self.structural} class"
                )
            if not is_rational(deal, self.rationality, self.setting):
                raise ConstructionError(
                    f"path step {step} violates the {self.rationality} condition"
                )

    @property
    def designated_deal(self) -> Deal:
        return Deal(self.expected_path[0], self.expected_path[-1])

    @property
    def expected_length(self) -> int:
        return len(self.expected_path) - 1
