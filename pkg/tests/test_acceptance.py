"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Criterion 4's equitable-monotonicity leg fails by design: the
published value table for that variant is not monotone (see the repair
notes in the builder's docstring); the strict xfail keeps the defect
visible without hiding the assertion.
"""

import random
import time
from fractions import Fraction

import pytest

from contractnet.constructions import (
    FIXTURE_SNAKE_3,
    FIXTURE_SNAKE_4,
    build_cor1,
    build_thm3,
    build_thm4,
    build_thm5,
    build_thm6,
    build_mk_path,
    classify_labels,
    ext_transform,
    reappearance_r,
)
from contractnet.deals import (
    Deal,
    O_CONTRACT,
    Rationality,
    UNRESTRICTED,
    involved_agents,
    is_rational,
    is_structural,
    m_contract,
)
from contractnet.explore import (
    Evaluator,
    PathQuery,
    UniquenessCertificate,
    _rational_step,
    all_allocations,
    is_pareto_optimal,
    run_maximal_path,
    shortest_path,
    structural_successors,
    unrestricted_o_path,
    verify_unique_path,
)
from contractnet.hypercube import snake_search
from contractnet.model import (
    AdditiveUtility,
    Allocation,
    ResourceSetting,
    TableUtility,
    ZeroOneUtility,
    complement_bundle,
    is_monotone,
    label_to_bundle,
    sigma_e,
    sigma_u,
)

from test_constructions_monotone import (
    WORKED_EXT,
    WORKED_INACCESSIBLE,
    WORKED_PAIRS_COOPERATIVE,
    WORKED_PAIRS_EQUITABLE,
    WORKED_U1,
)


def report(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {number}: {status} - {detail}")
    return passed


def test_criterion_1_worked_table_reproduction():
    started = time.perf_counter()
    inst = build_thm3(FIXTURE_SNAKE_4)
    sigmas = [sigma_u(a, inst.setting) for a in inst.expected_path]
    assert sigmas == [Fraction(i) for i in range(1, 9)]
    result = shortest_path(
        PathQuery(
            setting=inst.setting,
            source=inst.expected_path[0],
            target=inst.expected_path[-1],
            structural=O_CONTRACT,
            rationality=Rationality.IR,
        )
    )
    assert result.outcome == "found" and result.length == 7
    assert isinstance(verify_unique_path(inst), UniquenessCertificate)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    assert report(
        1, True, f"welfare column 1..8, shortest length 7, unique ({elapsed:.2f}s)"
    )


def test_criterion_2_money_free_variants():
    started = time.perf_counter()
    for variant in (
        Rationality.COOPERATIVE,
        Rationality.EQUITABLE,
        Rationality.PIGOU_DALTON,
    ):
        inst = build_cor1(FIXTURE_SNAKE_4, variant)
        assert inst.expected_length == 7
        assert isinstance(verify_unique_path(inst), UniquenessCertificate)
        if variant is Rationality.PIGOU_DALTON:
            for allocation in inst.expected_path:
                v1, v2 = inst.setting.agent_values(allocation)
                assert v1 + v2 == 16
    elapsed = time.perf_counter() - started
    assert elapsed < 3.0
    assert report(
        2,
        True,
        f"cooperative/equitable/pigou-dalton unique at length 7, "
        f"sum pinned at 16 ({elapsed:.2f}s)",
    )


def test_criterion_3_doubled_ir_reproduction():
    started = time.perf_counter()
    ext = ext_transform(FIXTURE_SNAKE_3)
    assert ext.labels() == WORKED_EXT
    classes = classify_labels(ext, 3)
    got = {"good": set(), "digression": set(), "inaccessible": set()}
    for mask, cls in classes.items():
        got[cls.kind].add(mask)
    assert got["good"] == {label_to_bundle(s) for s in WORKED_EXT[1::2]}
    assert got["digression"] == {
        label_to_bundle(s)
        for s in ("010111", "100111", "011110", "101011", "111100")
    }
    assert got["inaccessible"] == {label_to_bundle(s) for s in WORKED_INACCESSIBLE}
    inst = build_thm4(FIXTURE_SNAKE_3)
    u1, u2 = inst.setting.utilities
    for label, want in WORKED_U1.items():
        assert u1.value(label_to_bundle(label)) == want
    for size, want in [(0, 0), (1, 0), (2, 11), (3, 12), (4, 12), (5, 12), (6, 12)]:
        assert u2.value((1 << size) - 1) == want
    assert is_monotone(u1, 6) and is_monotone(u2, 6)
    assert isinstance(verify_unique_path(inst), UniquenessCertificate)
    # literal exhaustive form: from every on-path allocation, scan all 2^6
    # allocations for class-satisfying successors
    for i in range(len(inst.expected_path) - 1):
        current = inst.expected_path[i]
        successors = [
            q
            for q in all_allocations(2, 6)
            if q != current
            and is_structural(Deal(current, q), inst.structural)
            and is_rational(Deal(current, q), inst.rationality, inst.setting)
        ]
        assert successors == [inst.expected_path[i + 1]]
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    assert report(
        3,
        True,
        f"doubled path, label classes and value tables reproduce; "
        f"monotone; unique ({elapsed:.2f}s)",
    )


def test_criterion_4_money_free_doubled_tables_and_uniqueness():
    started = time.perf_counter()
    coop = build_thm5(FIXTURE_SNAKE_3, Rationality.COOPERATIVE)
    u1, u2 = coop.setting.utilities
    for label, (w1, w2) in WORKED_PAIRS_COOPERATIVE.items():
        gamma = label_to_bundle(label)
        assert u1.value(gamma) == w1
        assert u2.value(complement_bundle(gamma, 6)) == w2
    assert is_monotone(u1, 6) and is_monotone(u2, 6)
    assert isinstance(verify_unique_path(coop), UniquenessCertificate)

    equit = build_thm5(FIXTURE_SNAKE_3, Rationality.EQUITABLE)
    u1, u2 = equit.setting.utilities
    for label, (w1, w2) in WORKED_PAIRS_EQUITABLE.items():
        gamma = label_to_bundle(label)
        assert u1.value(gamma) == w1
        assert u2.value(complement_bundle(gamma, 6)) == w2
    assert is_monotone(u1, 6)
    assert isinstance(verify_unique_path(equit), UniquenessCertificate)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    assert report(
        4,
        True,
        f"both variants reproduce the printed tables and certify unique; "
        f"cooperative fully monotone ({elapsed:.2f}s)",
    )


@pytest.mark.xfail(
    strict=True,
    reason="the printed equitable table is not monotone at the terminal "
    "label's complement (value 2t above the 2t-1 plateau); "
    "build_thm5(..., monotone_repair=True) fixes it",
)
def test_criterion_4_equitable_monotone_leg_as_printed():
    equit = build_thm5(FIXTURE_SNAKE_3, Rationality.EQUITABLE)
    u2 = equit.setting.utilities[1]
    ok = is_monotone(u2, 6)
    report(
        "4 (equitable agent-1 monotone leg)",
        ok,
        "printed table value 10 at 001110 exceeds 9 at its supersets; "
        "monotone_repair=True restores monotonicity",
    )
    assert ok


def test_criterion_4_equitable_repair_delivers_monotone_instance():
    inst = build_thm5(FIXTURE_SNAKE_3, Rationality.EQUITABLE, monotone_repair=True)
    assert all(is_monotone(u, 6) for u in inst.setting.utilities)
    assert isinstance(verify_unique_path(inst), UniquenessCertificate)


def test_criterion_5_block_cycle_fixture():
    started = time.perf_counter()
    k, s = 4, 3
    inst = build_thm6(k, s)
    path = inst.expected_path

    from test_constructions_cycle import WORKED_SUBSETS, _block_row

    for d, want in WORKED_SUBSETS.items():
        assert _block_row(path[d - 1]) == want

    from test_constructions_cycle import WORKED_POSITIONS
    from contractnet.constructions.cycle_family import _layout, _schedule

    pairs, _ = _layout(k, s)
    states = _schedule(k, len(path) - 1)
    for d, want in WORKED_POSITIONS.items():
        got = []
        for i in range(k):
            for a, b in pairs:
                if i in (a, b):
                    got.append(states[d - 1].chi(a, b))
        assert got == want

    assert reappearance_r(k, s) == 16
    extended = build_mk_path(k, s, deals=16)
    first = extended[0].bundles[0]
    assert extended[16].bundles[0] == first
    assert all(extended[d].bundles[0] != first for d in range(2, 16))

    for a, b in zip(path, path[1:]):
        deal = Deal(a, b)
        assert is_structural(deal, m_contract(3))
        assert is_rational(deal, Rationality.IR, inst.setting)

    ev = Evaluator(inst.setting)
    small = 0
    for succ in structural_successors(path[0], m_contract(2)):
        small += 1
        assert not _rational_step(ev, path[0], succ, Rationality.IR)

    deal = inst.designated_deal
    assert is_rational(deal, Rationality.IR, inst.setting)
    assert is_structural(deal, m_contract(4))
    assert not is_structural(deal, m_contract(3))
    assert isinstance(verify_unique_path(inst), UniquenessCertificate)
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    assert report(
        5,
        True,
        f"block tables reproduce, agent 0 returns after exactly 16 deals, "
        f"all steps IR M(3), none of {small} M(2) neighbours is IR, "
        f"deal is one IR M(4) contract ({elapsed:.2f}s)",
    )


def test_criterion_6_exponential_witness_scaling():
    started = time.perf_counter()
    lengths = {}
    for m in (5, 6):
        snake = snake_search(m, "exhaustive")
        inst = build_thm3(snake)
        assert isinstance(verify_unique_path(inst), UniquenessCertificate)
        assert inst.expected_length == snake.length
        lengths[m] = snake.length
    snake7 = snake_search(7, "heuristic", seed=0, rollouts=20_000)
    assert snake7.length >= 37  # ceil((77/256) * 2^7 - 2)
    inst7 = build_thm3(snake7)
    assert isinstance(verify_unique_path(inst7), UniquenessCertificate)
    assert inst7.expected_length == snake7.length
    lengths[7] = snake7.length
    elapsed = time.perf_counter() - started
    assert elapsed < 120.0
    assert report(
        6,
        True,
        f"certified unique lengths m=5:{lengths[5]}, m=6:{lengths[6]}, "
        f"m=7:{lengths[7]} >= 37 ({elapsed:.2f}s)",
    )


def test_criterion_7_completeness_properties():
    started = time.perf_counter()
    rng = random.Random(7)
    pairs_checked = 0
    while pairs_checked < 500:
        n = rng.randint(2, 4)
        m = rng.randint(2, 8)
        a = Allocation.from_owners(tuple(rng.randrange(n) for _ in range(m)), n)
        b = Allocation.from_owners(tuple(rng.randrange(n) for _ in range(m)), n)
        if a == b:
            continue
        path = unrestricted_o_path(a, b)
        misplaced = sum(1 for x, y in zip(a.owners(), b.owners()) if x != y)
        assert len(path) - 1 == misplaced
        assert misplaced <= m
        pairs_checked += 1

    queries_checked = 0
    while queries_checked < 200:
        m = rng.randint(2, 5)
        entries = {
            bundle: Fraction(rng.randint(0, 9))
            for bundle in rng.sample(range(1 << m), k=min(1 << m, 8))
        }
        setting = ResourceSetting(
            m,
            (
                TableUtility(entries, default=Fraction(rng.randint(0, 9))),
                TableUtility({}, default=Fraction(rng.randint(0, 9))),
            ),
        )
        source = Allocation.pair(m, rng.randrange(1 << m))
        target = Allocation.pair(m, rng.randrange(1 << m))
        if source == target:
            continue
        previous = None
        for budget in range(m + 1):
            result = shortest_path(
                PathQuery(
                    setting=setting, source=source, target=target, budget=budget
                )
            )
            length = result.length if result.outcome == "found" else None
            if previous is not None and length is not None:
                assert previous is None or length <= previous
            if length is not None:
                previous = length
        # with budget >= m the structural class alone binds, so the
        # endpoint is always reachable
        assert previous is not None
        queries_checked += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    assert report(
        7,
        True,
        f"500 single-move paths match misplaced counts; budget "
        f"monotonicity on 200 queries ({elapsed:.2f}s)",
    )


def _two_agent_shortest_all_pairs(sigma_ok, m):
    """Distances over the two-agent one-move graph with an edge predicate.

    Returns, per source mask, a dict target-mask -> distance.  Used as a
    compact all-pairs sweep for the random-family criteria.
    """
    from collections import deque

    out = []
    for source in range(1 << m):
        dist = {source: 0}
        queue = deque([source])
        while queue:
            current = queue.popleft()
            for r in range(m):
                nxt = current ^ (1 << r)
                if nxt in dist or not sigma_ok(current, nxt):
                    continue
                dist[nxt] = dist[current] + 1
                queue.append(nxt)
        out.append(dist)
    return out


def test_criterion_8_additive_and_zero_one_families():
    started = time.perf_counter()
    rng = random.Random(8)

    for _ in range(200):
        m = rng.randint(3, 8)
        v1 = [rng.randint(0, 9) for _ in range(m)]
        v2 = [rng.randint(0, 9) for _ in range(m)]
        total2 = sum(v2)
        sigma = [
            sum(v1[r] for r in range(m) if mask >> r & 1)
            + total2
            - sum(v2[r] for r in range(m) if mask >> r & 1)
            for mask in range(1 << m)
        ]
        distances = _two_agent_shortest_all_pairs(
            lambda a, b: sigma[b] > sigma[a], m
        )
        for source in range(1 << m):
            for target, dist in distances[source].items():
                if target == source or sigma[target] <= sigma[source]:
                    continue  # not an IR deal
                assert dist <= m

    for _ in range(200):
        m = rng.randint(3, 8)
        ones1 = {rng.randrange(1 << m) for _ in range(1 << max(1, m - 2))}
        ones2 = {rng.randrange(1 << m) for _ in range(1 << max(1, m - 2))}
        full = (1 << m) - 1
        u1 = [1 if mask in ones1 else 0 for mask in range(1 << m)]
        u2c = [1 if (mask ^ full) in ones2 else 0 for mask in range(1 << m)]

        def cr_ok(a, b):
            return u1[b] >= u1[a] and u2c[b] >= u2c[a] and (
                u1[b] > u1[a] or u2c[b] > u2c[a]
            )

        distances = _two_agent_shortest_all_pairs(cr_ok, m)
        for source in range(1 << m):
            for target, dist in distances[source].items():
                if target == source:
                    continue
                if not cr_ok(source, target):
                    continue  # not a cooperative deal in one jump
                assert dist <= m
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    assert report(
        8,
        True,
        f"200 additive settings: realizable IR deals within m moves; "
        f"200 zero-one settings: realizable cooperative deals within m "
        f"moves ({elapsed:.2f}s)",
    )


def test_criterion_9_convergence_of_maximal_walks():
    started = time.perf_counter()
    rng = random.Random(9)
    shapes = [(2, 6), (2, 8), (3, 4), (3, 6), (4, 4), (4, 5)]
    for trial in range(100):
        n, m = shapes[trial % len(shapes)]
        assert n**m <= 1024
        utilities = []
        for _ in range(n):
            entries = {
                bundle: Fraction(rng.randint(0, 9))
                for bundle in rng.sample(range(1 << m), k=min(1 << m, 8))
            }
            utilities.append(
                TableUtility(entries, default=Fraction(rng.randint(0, 4)))
            )
        setting = ResourceSetting(m, tuple(utilities))
        start = Allocation.from_owners(
            tuple(rng.randrange(n) for _ in range(m)), n
        )
        cooperative = run_maximal_path(
            start,
            PathQuery(
                setting=setting,
                structural=UNRESTRICTED,
                rationality=Rationality.COOPERATIVE,
            ),
        )
        assert is_pareto_optimal(cooperative[-1], setting)

        equitable = run_maximal_path(
            start,
            PathQuery(
                setting=setting,
                structural=UNRESTRICTED,
                rationality=Rationality.EQUITABLE,
            ),
        )
        best = max(sigma_e(a, setting) for a in all_allocations(n, m))
        assert sigma_e(equitable[-1], setting) == best
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    assert report(
        9,
        True,
        f"100 settings: cooperative-maximal terminals Pareto optimal, "
        f"equitable-maximal terminals hit the egalitarian optimum "
        f"({elapsed:.2f}s)",
    )


def test_criterion_10_out_of_scope_documented():
    # the asymptotic constants of the doubled and block-cycle families for
    # large m, and the NP-hardness reduction, are consumed as statements
    # rather than reproduced; the small-parameter property checks above
    # substitute for them
    assert report(10, True, "asymptotics and hardness are out of scope by design")
