"""Command line interface: ``codeclass classify|extend|analyze|shard|merge``.

Exit status is 0 on success, 1 for usage errors and 2 for runtime failures
(unreadable input, incomplete merges, unsupported parameters).
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .augment import AugTask, EngineUnsupported, RunStats, classify_col, classify_row, shard_of
from .canon import canonical_form
from .clf import CLFError, read_clf, write_clf
from .code import (
    is_projective,
    is_self_orthogonal,
    meets_dual_distance,
    minimal_codeword_count,
)
from .latext import ExtensionProblem, LatticeTask, build_system, classify_lattice, enumerate_solutions, extend_seed
from .sieve import dedup

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class RuntimeFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shard_spec(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)/(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError("expected INDEX/TOTAL, e.g. 0/4")
    i, t = int(m.group(1)), int(m.group(2))
    if t < 1 or not 0 <= i < t:
        raise argparse.ArgumentTypeError("need 0 <= INDEX < TOTAL")
    return i, t


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="codeclass", description="Classification of linear codes over F2, F3, F4.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify codes with given parameters")
    c.add_argument("--q", type=int, required=True, choices=(2, 3, 4))
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--dmin", type=int, default=1)
    c.add_argument("--ddual", type=int, default=2, help="dual distance lower bound (1 allows zero columns)")
    c.add_argument("--delta", type=int, default=1, help="all weights divisible by DELTA")
    c.add_argument("--even", action="store_true", help="same as --delta 2")
    c.add_argument("--selforth", choices=("euclidean", "hermitian"))
    c.add_argument("--algo", choices=("aug-col", "aug-row", "lattice"), default="aug-col")
    c.add_argument("--shard", type=_shard_spec, help="run only shard INDEX/TOTAL")
    c.add_argument("--seeds", type=Path, help="complete list of smaller codes to start from")
    c.add_argument("--out", type=Path)
    c.add_argument("--workers", type=int, default=1, help="run all shards in this many processes")
    c.add_argument("--checkpoint", type=Path, help="directory receiving a code list per completed level")
    c.add_argument("--resume", action="store_true", help="continue from the last level in --checkpoint")

    e = sub.add_parser("extend", help="lengthen the codes of a list by lattice point enumeration")
    e.add_argument("input", type=Path)
    e.add_argument("--r", type=int, required=True)
    e.add_argument("--delta", type=int, default=1)
    e.add_argument("--a", type=int, required=True)
    e.add_argument("--b", type=int, required=True)
    e.add_argument("--forbidden", type=int, nargs="*", default=[])
    e.add_argument("--show-solutions", action="store_true")
    e.add_argument("--out", type=Path)

    a = sub.add_parser("analyze", help="report properties of the codes of a list")
    a.add_argument("input", type=Path)
    a.add_argument(
        "--metric",
        required=True,
        choices=("minimal-codewords", "weight-enumerator", "aut-order", "self-orthogonality"),
    )

    s = sub.add_parser("shard", help="split a code list into shards by invariants")
    s.add_argument("input", type=Path)
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--outdir", type=Path, required=True)

    m = sub.add_parser("merge", help="merge shard outputs into one canonical list")
    m.add_argument("inputs", type=Path, nargs="+")
    m.add_argument("--out", type=Path, required=True)
    return p


# ---------------------------------------------------------------- classify


def _engine_run(args: argparse.Namespace, shard, seeds, on_level, stats: RunStats):
    delta = 2 if args.even and args.delta == 1 else args.delta
    if args.algo == "lattice":
        if seeds is not None:
            raise UsageError("--seeds is not supported with the lattice engine")
        a = max(1, -(-args.dmin // delta))
        task = LatticeTask(
            args.q,
            args.n,
            args.k,
            delta=delta,
            a=a,
            b=max(a, args.n // delta),
            selforth=args.selforth,
            projective=args.ddual >= 3,
            pad=args.ddual <= 1,
        )
        codes = list(classify_lattice(task, shard=shard))
        if args.ddual > 3:
            codes = [c for c in codes if meets_dual_distance(c, args.ddual)]
        return codes
    task = AugTask(args.q, args.n, args.k, args.dmin, args.ddual, delta, args.selforth)
    engine = classify_col if args.algo == "aug-col" else classify_row
    return list(engine(task, seeds, stats=stats, shard=shard, on_level=on_level))


def _shard_job(payload):
    args, shard, seeds = payload
    return _engine_run(args, shard, seeds, None, RunStats())


def _validate(args):
    if args.k < 1 or args.n < 1:
        raise UsageError("n and k must be positive")
    if args.k > args.n:
        raise UsageError(f"k={args.k} exceeds n={args.n}")
    if args.dmin < 1 or args.ddual < 1 or args.delta < 1 or args.workers < 1:
        raise UsageError("distance bounds, divisor and worker count must be positive")
    if args.selforth == "hermitian" and args.q != 4:
        raise UsageError("--selforth hermitian needs --q 4")
    if args.resume and not args.checkpoint:
        raise UsageError("--resume needs --checkpoint")
    if args.resume and args.ddual <= 1:
        raise UsageError("--resume is unavailable when zero columns are allowed")
    if (args.checkpoint or args.resume) and args.algo == "lattice":
        raise UsageError("checkpoints are kept by the augmentation engines only")


def cmd_classify(args) -> int:
    _validate(args)
    t0 = time.time()
    seeds = None
    if args.seeds:
        lst = read_clf(args.seeds)
        if lst.q != args.q:
            raise UsageError("seed list is over a different field")
        seeds = lst.codes
    on_level = None
    if args.checkpoint:
        args.checkpoint.mkdir(parents=True, exist_ok=True)
        if args.resume:
            files = sorted(args.checkpoint.glob("level-*.clf"), key=lambda p: int(p.stem.split("-")[1]))
            if files:
                seeds = read_clf(files[-1]).codes

        def on_level(length, codes):
            write_clf(args.checkpoint / f"level-{length}.clf", args.q, codes, [f"completed level {length}"])

    stats = RunStats()
    if args.workers > 1 and args.shard is None:
        total = args.workers
        jobs = [(args, (i, total), seeds) for i in range(total)]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            codes = [c for part in pool.map(_shard_job, jobs) for c in part]
    else:
        codes = _engine_run(args, args.shard, seeds, on_level, stats)
    canon = dedup(codes)
    comments = [f"classify q={args.q} n={args.n} k={args.k} dmin={args.dmin} ddual={args.ddual} algo={args.algo}"]
    if args.shard:
        comments.append(f"shard {args.shard[0]}/{args.shard[1]}")
    if args.out:
        write_clf(args.out, args.q, canon, comments)
    print(f"classes={len(canon)}")
    for length, cnt in sorted(stats.level_counts.items()):
        print(f"level {length}: {cnt}")
    print(f"time={time.time() - t0:.2f}s")
    return EXIT_OK


# ---------------------------------------------------------------- extend


def cmd_extend(args) -> int:
    lst = read_clf(args.input)
    if args.r < 1 or args.delta < 1 or not 1 <= args.a <= args.b:
        raise UsageError("need r >= 1, delta >= 1 and 1 <= a <= b")
    found = []
    nsol = 0
    for idx, seed in enumerate(lst.codes):
        prob = ExtensionProblem(seed, args.r, args.delta, args.a, args.b, frozenset(args.forbidden))
        try:
            system = build_system(prob)
        except ValueError as exc:
            raise RuntimeFailure(f"seed {idx}: {exc}") from None
        if args.show_solutions:
            if min(seed._point_data[1]) >= args.r:
                for sol in enumerate_solutions(system, min_positive=args.r):
                    nsol += 1
                    print(f"seed {idx}: x={_tup(sol.x)} y={_tup(sol.y)}")
        found.extend(extend_seed(prob))
    out = dedup(found)
    if args.out:
        write_clf(args.out, lst.q, out, [f"extend r={args.r} delta={args.delta} a={args.a} b={args.b}"])
    if args.show_solutions:
        print(f"solutions={nsol}")
    print(f"classes={len(out)}")
    return EXIT_OK


def _tup(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


# ---------------------------------------------------------------- analyze


def cmd_analyze(args) -> int:
    lst = read_clf(args.input)
    values = []
    for i, c in enumerate(lst.codes):
        if args.metric == "minimal-codewords":
            v = minimal_codeword_count(c)
            values.append((v, is_projective(c)))
            print(f"{i}\tn={c.n}\tk={c.k}\t{v}")
        elif args.metric == "weight-enumerator":
            print(f"{i}\tn={c.n}\tk={c.k}\t" + " ".join(map(str, c.weight_enumerator)))
        elif args.metric == "aut-order":
            v = canonical_form(c).aut.order
            values.append((v, True))
            print(f"{i}\tn={c.n}\tk={c.k}\t{v}")
        else:
            forms = ["euclidean"] + (["hermitian"] if c.q == 4 else [])
            res = " ".join(f"{fm}={is_self_orthogonal(c, fm)}" for fm in forms)
            print(f"{i}\tn={c.n}\tk={c.k}\t{res}")
    if values:
        nums = [v for v, _ in values]
        print(f"count={len(nums)} min={min(nums)} max={max(nums)}")
        if args.metric == "minimal-codewords":
            proj = [v for v, p in values if p]
            if proj:
                print(f"min_projective={min(proj)}")
    else:
        print(f"count={len(lst.codes)}")
    return EXIT_OK


# ---------------------------------------------------------------- shard / merge


def cmd_shard(args) -> int:
    if args.total < 1:
        raise UsageError("--total must be positive")
    lst = read_clf(args.input)
    args.outdir.mkdir(parents=True, exist_ok=True)
    parts = [[] for _ in range(args.total)]
    for c in lst.codes:
        parts[shard_of(c, args.total)].append(c)
    for i, part in enumerate(parts):
        write_clf(args.outdir / f"shard-{i}-of-{args.total}.clf", lst.q, part, [f"shard {i}/{args.total}"])
    print(" ".join(f"shard{i}={len(p)}" for i, p in enumerate(parts)))
    return EXIT_OK


_SHARD_TAG = re.compile(r"^shard (\d+)/(\d+)$")


def cmd_merge(args) -> int:
    seen: dict[int, set[int]] = {}
    codes = []
    q = None
    for path in args.inputs:
        lst = read_clf(path)
        if q is None:
            q = lst.q
        elif lst.q != q:
            raise RuntimeFailure(f"{path}: field differs from the other shards")
        tags = [m for m in (_SHARD_TAG.match(c) for c in lst.comments) if m]
        if tags:
            i, t = int(tags[0].group(1)), int(tags[0].group(2))
            seen.setdefault(t, set()).add(i)
        codes.extend(lst.codes)
    if len(seen) > 1:
        raise RuntimeFailure("inputs come from different shard counts")
    for t, got in seen.items():
        missing = sorted(set(range(t)) - got)
        if missing:
            raise RuntimeFailure(f"incomplete merge: missing shard(s) {missing} of {t}")
    out = dedup(codes)
    write_clf(args.out, q, out, [])
    print(f"classes={len(out)}")
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "extend": cmd_extend,
    "analyze": cmd_analyze,
    "shard": cmd_shard,
    "merge": cmd_merge,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"codeclass: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CLFError, RuntimeFailure, EngineUnsupported, OSError) as exc:
        print(f"codeclass: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        print("codeclass: interrupted; completed levels remain in the checkpoint", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
