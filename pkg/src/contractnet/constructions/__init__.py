"""Worst-case instance constructions."""

from .cycle_family import (
    CubeState,
    b_matrix,
    build_cor3,
    build_mk_path,
    build_multi,
    build_thm6,
    default_cycle,
    multi_transform,
    reappearance_r,
)
from .instance import (
    ALL_CLAIMS,
    CLAIM_LENGTH_FORMULA,
    CLAIM_MONOTONE,
    CLAIM_NO_SHORTER,
    CLAIM_UNIQUE_PATH,
    FIXTURE_CYCLE_3,
    FIXTURE_SNAKE_3,
    FIXTURE_SNAKE_4,
    ConstructedInstance,
    ConstructionError,
)
from .monotone_family import (
    DOUBLED_BOUND_MIN_DIMENSION,
    LabelClass,
    build_thm4,
    build_thm5,
    classify_labels,
    doubled_length_bound,
    ext_transform,
)
from .snake_family import (
    SNAKE_BOUND_MIN_DIMENSION,
    build_cor1,
    build_cor2,
    build_thm3,
    pair_allocations,
    snake_length_bound,
)

__all__ = [
    "ALL_CLAIMS",
    "CLAIM_LENGTH_FORMULA",
    "CLAIM_MONOTONE",
    "CLAIM_NO_SHORTER",
    "CLAIM_UNIQUE_PATH",
    "DOUBLED_BOUND_MIN_DIMENSION",
    "FIXTURE_CYCLE_3",
    "FIXTURE_SNAKE_3",
    "FIXTURE_SNAKE_4",
    "SNAKE_BOUND_MIN_DIMENSION",
    "ConstructedInstance",
    "ConstructionError",
    "CubeState",
    "LabelClass",
    "b_matrix",
    "build_cor1",
    "build_cor2",
    "build_cor3",
    "build_mk_path",
    "build_multi",
    "build_thm3",
    "build_thm4",
    "build_thm5",
    "build_thm6",
    "classify_labels",
    "default_cycle",
    "doubled_length_bound",
    "ext_transform",
    "multi_transform",
    "pair_allocations",
    "reappearance_r",
    "snake_length_bound",
]
