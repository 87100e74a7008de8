"""Claim-by-claim verification of constructed instances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from .constructions.instance import (
    CLAIM_LENGTH_FORMULA,
    CLAIM_MONOTONE,
    CLAIM_NO_SHORTER,
    CLAIM_UNIQUE_PATH,
    ConstructedInstance,
)
from .deals import m_contract
from .explore import (
    DEFAULT_NODE_CAP,
    Evaluator,
    PathQuery,
    UniquenessCertificate,
    _rational_step,
    shortest_path,
    structural_successors,
    verify_unique_path,
)
from .model import is_monotone

#: Largest state space for the independent shortest-path cross-check.
CROSS_CHECK_MAX_STATES = 1 << 16


@dataclass(frozen=True)
class ClaimReport:
    claim: str
    passed: bool
    detail: str


def verify_claims(
    instance: ConstructedInstance, node_cap: int = DEFAULT_NODE_CAP
) -> list[ClaimReport]:
    """Check every claim the instance carries; one report per claim."""
    reports = []
    for claim in sorted(instance.claims):
        if claim == CLAIM_UNIQUE_PATH:
            reports.append(_check_unique_path(instance, node_cap))
        elif claim == CLAIM_MONOTONE:
            reports.append(_check_monotone(instance))
        elif claim == CLAIM_LENGTH_FORMULA:
            reports.append(_check_length(instance, node_cap))
        elif claim == CLAIM_NO_SHORTER:
            reports.append(_check_no_shorter(instance, node_cap))
    return reports


def _check_unique_path(
    instance: ConstructedInstance, node_cap: int
) -> ClaimReport:
    outcome = verify_unique_path(instance, node_cap)
    if isinstance(outcome, UniquenessCertificate):
        return ClaimReport(
            CLAIM_UNIQUE_PATH,
            True,
            f"{outcome.steps} steps, {outcome.successors_checked} successors and "
            f"{outcome.shortcuts_checked} shortcut pairs scanned",
        )
    where = outcome.deal.target.labels() if outcome.deal is not None else "?"
    return ClaimReport(
        CLAIM_UNIQUE_PATH,
        False,
        f"at path index {outcome.at_index}: {outcome.reason} (deal to {where})",
    )


def _check_monotone(instance: ConstructedInstance) -> ClaimReport:
    m = instance.setting.resource_count
    for i, utility in enumerate(instance.setting.utilities):
        if not is_monotone(utility, m):
            return ClaimReport(CLAIM_MONOTONE, False, f"agent {i} is not monotone")
    return ClaimReport(
        CLAIM_MONOTONE, True, f"all {instance.setting.agent_count} agents monotone"
    )


def _check_length(instance: ConstructedInstance, node_cap: int) -> ClaimReport:
    length = instance.expected_length
    bound = instance.length_bound
    if bound is not None and length < bound:
        return ClaimReport(
            CLAIM_LENGTH_FORMULA,
            False,
            f"path length {length} is below the bound {bound}",
        )
    setting = instance.setting
    if setting.agent_count**setting.resource_count <= CROSS_CHECK_MAX_STATES:
        # independent cross-check: breadth-first search must agree exactly
        result = shortest_path(
            PathQuery(
                setting=setting,
                source=instance.expected_path[0],
                target=instance.expected_path[-1],
                structural=instance.structural,
                rationality=instance.rationality,
                node_cap=node_cap,
            )
        )
        if result.outcome != "found" or result.length != length:
            return ClaimReport(
                CLAIM_LENGTH_FORMULA,
                False,
                f"search found {result.outcome}/{result.length}, expected {length}",
            )
        detail = f"length {length} matches search"
    else:
        detail = f"length {length}"
    if bound is not None:
        detail += f", >= bound {bound} (ceil {math.ceil(bound)})"
    return ClaimReport(CLAIM_LENGTH_FORMULA, True, detail)


def _check_no_shorter(instance: ConstructedInstance, node_cap: int) -> ClaimReport:
    """No class-satisfying deal in the next-smaller structural class exists
    from the path start, so no such path can realise the deal at all."""
    if instance.structural.kind != "M" or (instance.structural.k or 0) < 3:
        return ClaimReport(
            CLAIM_NO_SHORTER, False, "claim only applies to M(k) instances with k >= 3"
        )
    smaller = m_contract(instance.structural.k - 1)
    ev = Evaluator(instance.setting)
    start = instance.expected_path[0]
    checked = 0
    for succ in structural_successors(start, smaller):
        checked += 1
        if checked > node_cap:
            return ClaimReport(
                CLAIM_NO_SHORTER, False, "neighbour scan exceeded the node cap"
            )
        if _rational_step(ev, start, succ, instance.rationality):
            return ClaimReport(
                CLAIM_NO_SHORTER,
                False,
                f"{smaller} successor {succ.labels()} satisfies "
                f"{instance.rationality}",
            )
    return ClaimReport(
        CLAIM_NO_SHORTER,
        True,
        f"none of {checked} {smaller} neighbours of the start is "
        f"{instance.rationality}",
    )
