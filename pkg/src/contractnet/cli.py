"""Command-line interface: generate / verify / solve / bench plus catalogs.

Exit codes: 0 success, 2 claim failure, 3 infeasible or cap exceeded,
4 usage or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .constructions import (
    FIXTURE_SNAKE_3,
    FIXTURE_SNAKE_4,
    ConstructionError,
    build_cor1,
    build_cor2,
    build_cor3,
    build_multi,
    build_thm3,
    build_thm4,
    build_thm5,
    build_thm6,
    default_cycle,
)
from .deals import NotADealError, Rationality
from .explore import (
    CapExceededError,
    PathQuery,
    shortest_path,
)
from .files import (
    InstanceFile,
    InstanceFormatError,
    dumps_instance,
    load_instance,
    rationality_from_str,
    structural_from_str,
)
from .hypercube import (
    DimensionMismatchError,
    HamCycle,
    SnakePath,
    ham_cycle,
    load_cycle,
    load_snake,
    snake_search,
    write_catalog,
)
from .model import Allocation, ResourceSetting, AdditiveUtility, ZeroOneUtility
from .verify import verify_claims

EXIT_OK = 0
EXIT_CLAIM_FAILURE = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 4

SNAKE_FIXTURES = {3: FIXTURE_SNAKE_3, 4: FIXTURE_SNAKE_4}
FIXTURE_NAMES = ("paper-fixture", "fixture")

CSV_COLUMNS = [
    "construction",
    "m",
    "k",
    "s",
    "variant",
    "path_length",
    "bound",
    "search_seconds",
    "verified",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        raise UsageError(message)


def _variant(text: str) -> Rationality:
    try:
        return rationality_from_str(text)
    except InstanceFormatError as exc:
        raise UsageError(str(exc))


def _resolve_snake(args, dimension: int) -> SnakePath:
    """Fixture for the worked dimensions, a catalog file, or a search."""
    choice: Optional[str] = getattr(args, "snake", None)
    if choice in FIXTURE_NAMES:
        if dimension not in SNAKE_FIXTURES:
            raise UsageError(
                f"no built-in fixture snake for dimension {dimension}"
            )
        return SNAKE_FIXTURES[dimension]
    if choice is not None:
        with open(choice, "r", encoding="utf-8") as fh:
            snake = load_snake(fh)
        if snake.dimension != dimension:
            raise UsageError(
                f"snake file has dimension {snake.dimension}, expected {dimension}"
            )
        return snake
    if dimension in SNAKE_FIXTURES:
        return SNAKE_FIXTURES[dimension]
    mode = args.mode or ("exhaustive" if dimension <= 6 else "heuristic")
    return snake_search(
        dimension,
        mode=mode,
        budget=args.budget,
        seed=args.seed,
        rollouts=getattr(args, "rollouts", None),
    )


def _resolve_cycle(args, s: int) -> HamCycle:
    choice: Optional[str] = getattr(args, "cycle", None)
    if choice in FIXTURE_NAMES or choice is None:
        return default_cycle(s)
    if choice == "inductive":
        return ham_cycle(s)
    with open(choice, "r", encoding="utf-8") as fh:
        cycle = load_cycle(fh)
    if cycle.dimension != s:
        raise UsageError(
            f"cycle file has dimension {cycle.dimension}, expected {s}"
        )
    return cycle


def _write_out(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def _cmd_generate(args) -> int:
    name = args.construction
    if name == "thm3":
        instance = build_thm3(_resolve_snake(args, args.m))
    elif name == "cor1":
        instance = build_cor1(_resolve_snake(args, args.m), _variant(args.variant))
    elif name == "cor2":
        instance = build_cor2(
            _resolve_snake(args, args.m), _variant(args.variant), args.n
        )
    elif name == "thm4":
        instance = build_thm4(
            _resolve_snake(args, args.s), odd_parity=args.parity == "odd"
        )
    elif name == "thm5":
        instance = build_thm5(
            _resolve_snake(args, args.s),
            _variant(args.variant),
            odd_parity=args.parity == "odd",
            monotone_repair=args.monotone_repair,
        )
    elif name == "thm6":
        instance = build_thm6(args.k, args.s, _resolve_cycle(args, args.s), args.deals)
    elif name == "cor3":
        instance = build_cor3(
            args.k, args.s, _variant(args.variant), _resolve_cycle(args, args.s), args.deals
        )
    elif name == "multi":
        instance = build_multi(args.k, args.s, _resolve_cycle(args, args.s), args.deals)
    else:
        raise UsageError(f"unknown construction {name!r}")
    doc = InstanceFile.from_instance(instance)
    _write_out(dumps_instance(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        doc = load_instance(fh)
    if not doc.claims:
        return EXIT_OK
    instance = doc.to_instance()
    reports = verify_claims(instance, node_cap=args.node_cap)
    failed = False
    for report in reports:
        status = "PASS" if report.passed else "FAIL"
        print(f"claim {report.claim}: {status} ({report.detail})")
        failed = failed or not report.passed
    return EXIT_CLAIM_FAILURE if failed else EXIT_OK


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _parse_allocation(text: str, setting: ResourceSetting) -> Allocation:
    labels = text.split(",")
    allocation = Allocation.from_labels(labels)
    setting.check_allocation(allocation)
    return allocation


def _cmd_solve(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        doc = load_instance(fh)
    setting = doc.setting
    if args.source is not None:
        source = _parse_allocation(args.source, setting)
    elif doc.deal is not None:
        source = doc.deal.source
    else:
        raise UsageError("no --from given and the file has no designated deal")
    if args.target is not None:
        target = _parse_allocation(args.target, setting)
    elif doc.deal is not None:
        target = doc.deal.target
    else:
        raise UsageError("no --to given and the file has no designated deal")
    structural = (
        structural_from_str(args.structural)
        if args.structural
        else (doc.structural or structural_from_str("O"))
    )
    rationality = (
        rationality_from_str(args.rationality)
        if args.rationality
        else (doc.rationality or Rationality.IR)
    )
    query = PathQuery(
        setting=setting,
        source=source,
        target=target,
        structural=structural,
        rationality=rationality,
        budget=args.budget,
        node_cap=args.node_cap,
    )
    result = shortest_path(query)
    if result.outcome != "found":
        print(result.outcome)
        print(f"explored {result.explored}")
        return EXIT_INFEASIBLE
    if args.csv:
        writer = csv.writer(sys.stdout)
        writer.writerow(
            ["step"] + [f"agent{i}" for i in range(setting.agent_count)]
        )
        for step, allocation in enumerate(result.path):
            writer.writerow([step, *allocation.labels()])
    else:
        for allocation in result.path:
            print(" ".join(allocation.labels()))
        print(f"length {result.length}")
        print(f"explored {result.explored}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _parse_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _bench_instance_row(name: str, instance, elapsed: float, node_cap: int) -> dict:
    reports = verify_claims(instance, node_cap=node_cap)
    verified = "ok" if all(r.passed for r in reports) else "FAIL"
    params = instance.params
    return {
        "construction": name,
        "m": params.get("m", ""),
        "k": params.get("k", ""),
        "s": params.get("s", ""),
        "variant": params.get("variant", ""),
        "path_length": instance.expected_length,
        "bound": "" if instance.length_bound is None else str(instance.length_bound),
        "search_seconds": f"{elapsed:.3f}",
        "verified": verified,
    }


def _random_additive_setting(rng: random.Random, m: int) -> ResourceSetting:
    def values():
        return tuple(Fraction(rng.randint(0, 9)) for _ in range(m))

    return ResourceSetting(m, (AdditiveUtility(values()), AdditiveUtility(values())))


def _random_zero_one_setting(rng: random.Random, m: int) -> ResourceSetting:
    def ones():
        count = rng.randint(1, max(1, (1 << m) // 4))
        return ZeroOneUtility(
            frozenset(rng.randrange(1 << m) for _ in range(count))
        )

    return ResourceSetting(m, (ones(), ones()))


def _bench_random_family(
    family: str, m_values: list[int], trials: int, seed: int, node_cap: int
) -> list[dict]:
    from .deals import Deal, is_rational
    from .explore import all_allocations

    rationality = Rationality.IR if family == "additive" else Rationality.COOPERATIVE
    rows = []
    rng = random.Random(seed)
    for m in m_values:
        start = time.perf_counter()
        worst = 0
        ok = True
        for _ in range(trials):
            setting = (
                _random_additive_setting(rng, m)
                if family == "additive"
                else _random_zero_one_setting(rng, m)
            )
            deal = None
            for _attempt in range(200):
                source = Allocation.pair(m, rng.randrange(1 << m))
                target = Allocation.pair(m, rng.randrange(1 << m))
                if source == target:
                    continue
                candidate = Deal(source, target)
                if is_rational(candidate, rationality, setting):
                    deal = candidate
                    break
            if deal is None:
                continue
            result = shortest_path(
                PathQuery(
                    setting=setting,
                    source=deal.source,
                    target=deal.target,
                    rationality=rationality,
                    node_cap=node_cap,
                )
            )
            if result.outcome == "found":
                worst = max(worst, result.length)
                ok = ok and result.length <= m
        rows.append(
            {
                "construction": family,
                "m": m,
                "k": "",
                "s": "",
                "variant": str(rationality),
                "path_length": worst,
                "bound": str(m),
                "search_seconds": f"{time.perf_counter() - start:.3f}",
                "verified": "ok" if ok else "FAIL",
            }
        )
    return rows


def _cmd_bench(args) -> int:
    rows: list[dict] = []
    family = args.family
    if family in ("thm3", "cor1"):
        for m in _parse_range(args.m_range or ""):
            start = time.perf_counter()
            snake = _resolve_snake(args, m)
            if family == "thm3":
                instance = build_thm3(snake)
            else:
                instance = build_cor1(snake, _variant(args.variant))
            elapsed = time.perf_counter() - start
            rows.append(_bench_instance_row(family, instance, elapsed, args.node_cap))
    elif family in ("thm4", "thm5"):
        for s in _parse_range(args.s_range or ""):
            start = time.perf_counter()
            snake = _resolve_snake(args, s)
            if family == "thm4":
                instance = build_thm4(snake, odd_parity=args.parity == "odd")
            else:
                instance = build_thm5(
                    snake, _variant(args.variant), odd_parity=args.parity == "odd"
                )
            elapsed = time.perf_counter() - start
            rows.append(_bench_instance_row(family, instance, elapsed, args.node_cap))
    elif family in ("thm6", "cor3"):
        for s in _parse_range(args.s_range or ""):
            start = time.perf_counter()
            if family == "thm6":
                instance = build_thm6(args.k, s)
            else:
                instance = build_cor3(args.k, s, _variant(args.variant))
            elapsed = time.perf_counter() - start
            rows.append(_bench_instance_row(family, instance, elapsed, args.node_cap))
    elif family in ("additive", "zero-one"):
        rows = _bench_random_family(
            family, _parse_range(args.m_range or ""), args.trials, args.seed, args.node_cap
        )
    else:
        raise UsageError(f"unknown bench family {family!r}")

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.plot:
        _emit_plot(rows, args.plot)
    return EXIT_OK


def _emit_plot(rows: list[dict], path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    by_construction: dict[str, list[tuple[int, int]]] = {}
    for row in rows:
        if row["m"] == "" or row["path_length"] in ("", None):
            continue
        by_construction.setdefault(row["construction"], []).append(
            (int(row["m"]), int(row["path_length"]))
        )
    for name, points in sorted(by_construction.items()):
        points.sort()
        ax.semilogy(
            [p[0] for p in points], [max(p[1], 1) for p in points], marker="o", label=name
        )
    ax.set_xlabel("resources (m)")
    ax.set_ylabel("path length")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# ---------------------------------------------------------------------------
# catalogs
# ---------------------------------------------------------------------------

def _cmd_snake(args) -> int:
    if args.snake in FIXTURE_NAMES:
        snake = SNAKE_FIXTURES.get(args.m)
        if snake is None:
            raise UsageError(f"no built-in fixture snake for dimension {args.m}")
    else:
        mode = args.mode or ("exhaustive" if args.m <= 6 else "heuristic")
        snake = snake_search(
            args.m,
            mode=mode,
            budget=args.budget,
            seed=args.seed,
            rollouts=args.rollouts,
        )
    buf = io.StringIO()
    write_catalog(snake.labels(), snake.dimension, buf)
    _write_out(buf.getvalue(), args.out)
    print(f"length {snake.length}", file=sys.stderr)
    return EXIT_OK


def _cmd_cycle(args) -> int:
    cycle = default_cycle(args.s) if args.fixture else ham_cycle(args.s)
    buf = io.StringIO()
    write_catalog(cycle.labels(), cycle.dimension, buf)
    _write_out(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_snake_options(parser: _Parser) -> None:
    parser.add_argument(
        "--snake",
        help="'paper-fixture' for the built-in worked-example snake "
        "(dimensions 3 and 4), or a catalog file path; default: fixture "
        "when available, otherwise a search",
    )
    parser.add_argument(
        "--mode", choices=["exhaustive", "heuristic"], help="snake search mode"
    )
    parser.add_argument(
        "--budget", type=float, default=10.0, help="heuristic search seconds"
    )
    parser.add_argument(
        "--rollouts",
        type=int,
        help="exact heuristic restart count (overrides --budget; reproducible)",
    )
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> _Parser:
    parser = _Parser(prog="contractnet")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build an instance file")
    gen_sub = gen.add_subparsers(dest="construction", required=True)

    for name in ("thm3", "cor1", "cor2"):
        p = gen_sub.add_parser(name)
        p.add_argument("--m", type=int, required=True, help="resource count")
        _add_snake_options(p)
        if name == "cor1":
            p.add_argument(
                "--variant",
                required=True,
                choices=["cooperative", "equitable", "pigou-dalton"],
            )
        if name == "cor2":
            p.add_argument(
                "--variant",
                required=True,
                choices=["IR", "cooperative", "equitable", "pigou-dalton"],
            )
            p.add_argument("--n", type=int, required=True, help="agent count >= 3")
        p.add_argument("--out", help="output file (default stdout)")
        p.set_defaults(func=_cmd_generate)

    for name in ("thm4", "thm5"):
        p = gen_sub.add_parser(name)
        p.add_argument("--s", type=int, required=True, help="snake dimension")
        p.add_argument("--parity", choices=["even", "odd"], default="even")
        _add_snake_options(p)
        if name == "thm5":
            p.add_argument(
                "--variant", required=True, choices=["cooperative", "equitable"]
            )
            p.add_argument(
                "--monotone-repair",
                action="store_true",
                help="raise the equitable low-bundle plateau so agent 1 "
                "is monotone (see the builder notes)",
            )
        p.add_argument("--out", help="output file (default stdout)")
        p.set_defaults(func=_cmd_generate)

    for name in ("thm6", "cor3", "multi"):
        p = gen_sub.add_parser(name)
        p.add_argument("--k", type=int, required=True, help="agent count")
        p.add_argument("--s", type=int, required=True, help="block size")
        p.add_argument(
            "--cycle",
            help="'paper-fixture' (s=3 default), 'inductive', or a catalog file",
        )
        p.add_argument("--deals", type=int, help="path length override")
        if name == "cor3":
            p.add_argument(
                "--variant", required=True, choices=["cooperative", "equitable"]
            )
        p.add_argument("--out", help="output file (default stdout)")
        p.set_defaults(func=_cmd_generate)

    ver = sub.add_parser("verify", help="re-check an instance file's claims")
    ver.add_argument("file")
    ver.add_argument("--node-cap", type=int, default=1_000_000)
    ver.set_defaults(func=_cmd_verify)

    sol = sub.add_parser("solve", help="shortest class-satisfying path")
    sol.add_argument("file")
    sol.add_argument("--from", dest="source", help="comma-separated agent labels")
    sol.add_argument("--to", dest="target", help="comma-separated agent labels")
    sol.add_argument("--structural", help="O, swap, M(k), or unrestricted")
    sol.add_argument(
        "--rationality",
        help="IR, cooperative, equitable, pigou-dalton, or none",
    )
    sol.add_argument("--budget", type=int, default=0, help="allowed irrational steps")
    sol.add_argument("--node-cap", type=int, default=1_000_000)
    sol.add_argument("--csv", action="store_true")
    sol.set_defaults(func=_cmd_solve)

    ben = sub.add_parser("bench", help="emit experiment rows as CSV")
    ben.add_argument(
        "family",
        choices=["thm3", "cor1", "thm4", "thm5", "thm6", "cor3", "additive", "zero-one"],
    )
    ben.add_argument("--m-range", help="e.g. 4:7")
    ben.add_argument("--s-range", help="e.g. 2:3")
    ben.add_argument("--k", type=int, default=4)
    ben.add_argument("--variant", default="cooperative")
    ben.add_argument("--parity", choices=["even", "odd"], default="even")
    ben.add_argument("--trials", type=int, default=20)
    ben.add_argument("--node-cap", type=int, default=1_000_000)
    _add_snake_options(ben)
    ben.add_argument("--out", help="CSV output file (default stdout)")
    ben.add_argument("--plot", help="also write an SVG length plot")
    ben.set_defaults(func=_cmd_bench)

    snk = sub.add_parser("snake", help="search a snake and write a catalog")
    snk.add_argument("--m", type=int, required=True)
    _add_snake_options(snk)
    snk.add_argument("--out", help="catalog file (default stdout)")
    snk.set_defaults(func=_cmd_snake)

    cyc = sub.add_parser("cycle", help="write a Hamiltonian-cycle catalog")
    cyc.add_argument("--s", type=int, required=True)
    cyc.add_argument(
        "--fixture",
        action="store_true",
        help="prefer the worked-example cycle where available",
    )
    cyc.add_argument("--out", help="catalog file (default stdout)")
    cyc.set_defaults(func=_cmd_cycle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceFormatError, DimensionMismatchError, NotADealError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceededError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
