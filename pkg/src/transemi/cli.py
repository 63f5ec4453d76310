"""Command line front end.

Commands: analyze, check, represent, roundtrip, generate. Exit code 0 when
every check passes, 1 on any failure, 2 on input errors. Reports are
deterministic for fixed inputs and flags; timings are attached only with
--timings so default output is byte-stable.
"""

from __future__ import annotations

import argparse
import random
import sys as _sys

from . import generators, instances
from .abstract_system import AbstractSystem, derived_props, validate
from .closure import check_representability, closure_fixpoint, least_closed_oracle, oracle_budget
from .errors import CapExceededError, InstanceFormatError, TransemiError
from .reports import Report
from .representation import rep_relations, sum_representation, verify_representability
from .trans_semigroup import TransSystem, check_adjacency_laws, check_domain_meet, generate


def _common_flags(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
    if needs_input:
        p.add_argument("--input", required=True, help="instance file (YAML)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=256, help="closure element budget")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--oracle", choices=("on", "off"), default="off",
                   help="cross-check closures against the brute-force oracle")
    p.add_argument("--pairs-parallel", choices=("on", "off"), default="off",
                   help="build per-pair representations on a thread pool")
    p.add_argument("--timings", action="store_true", help="include timings in output")


def _load(args) -> tuple[instances.Instance, AbstractSystem, TransSystem | None]:
    inst = instances.parse_instance(args.input)
    if isinstance(inst, instances.TransInstance):
        tsys = inst.build(cap=args.cap)
        return inst, tsys.abstract(), tsys
    return inst, inst.build(), None


def _emit(report: Report, args) -> int:
    if args.format == "machine":
        print(report.to_json(include_timings=args.timings))
    else:
        print(report.to_text(include_timings=args.timings))
    return 0 if report.passed else 1


def _oracle_entries(ab: AbstractSystem, report: Report) -> None:
    if ab.size > oracle_budget():
        report.add("closure-oracle-agreement", True, [],
                   f"skipped: carrier {ab.size} above oracle budget")
        return
    bad = []
    for x in range(ab.size):
        for y in range(x, ab.size):
            seed = (1 << x) | (1 << y)
            fast = closure_fixpoint(ab, seed, witnesses=False).closed_bits
            slow = least_closed_oracle(ab, seed)
            if fast != slow:
                bad.append({"seed": sorted({x, y}), "engine": fast, "oracle": slow})
    report.add("closure-oracle-agreement", not bad, bad[:10],
               "" if not bad else f"{len(bad)} seeds disagree")


def cmd_analyze(args) -> int:
    inst, ab, tsys = _load(args)
    report = Report("analysis")
    if tsys is not None:
        report.add("closure-built", True, [],
                   f"{tsys.size} maps on {tsys.base_size} points from {len(inst.maps)} seeds")
        report.add("relation-sizes", True, [],
                   f"zeta={int(tsys.zeta.sum())} xi={int(tsys.xi.sum())} "
                   f"delta={int(tsys.delta.sum())}")
    report.add("system-size", True, [], f"carrier of {ab.size} elements")
    report.add("abstract-relation-sizes", True, [],
               f"zeta={int(ab.zeta.sum())} xi={int(ab.xi.sum())} delta={int(ab.delta.sum())}")
    report.extend(validate(ab), prefix="hypotheses/")
    return _emit(report, args)


def cmd_check(args) -> int:
    inst, ab, tsys = _load(args)
    report = Report("checks")
    hyp = validate(ab)
    report.extend(hyp, prefix="hypotheses/")
    if hyp.passed:
        report.extend(derived_props(ab), prefix="derived/")
        report.extend(check_representability(ab), prefix="axioms/")
    if tsys is not None:
        report.extend(check_adjacency_laws(tsys), prefix="concrete/")
        bad = []
        total = 0
        for i in range(tsys.size):
            for j in range(i, tsys.size):
                sub = check_domain_meet(tsys, [i, j] if i != j else [i])
                total += 1
                if not sub.passed:
                    bad.extend(sub.failures()[0].witnesses)
        report.add("concrete/closure-domain-bound", not bad, bad[:10],
                   f"{total} subsets checked")
    if args.oracle == "on" and hyp.passed:
        _oracle_entries(ab, report)
    return _emit(report, args)


def cmd_represent(args) -> int:
    inst, ab, tsys = _load(args)
    report = verify_representability(ab, parallel=args.pairs_parallel == "on")
    if report.passed:
        rep = sum_representation(ab, parallel=args.pairs_parallel == "on")
        zeta_p, xi_p, delta_p = rep_relations(rep)
        report.add("representation-built", True, [],
                   f"carrier of {rep.num_points} points, "
                   f"{len(rep.maps)} maps, xi pairs={int(xi_p.sum())}, "
                   f"delta pairs={int(delta_p.sum())}")
    return _emit(report, args)


def cmd_roundtrip(args) -> int:
    inst, ab, tsys = _load(args)
    report = Report("roundtrip")
    if tsys is None:
        report.add("input-kind", False, [{"kind": "abstract"}],
                   "roundtrip needs a transformations instance")
        return _emit(report, args)
    report.add("closure-built", True, [],
               f"{tsys.size} maps on {tsys.base_size} points")
    report.extend(verify_representability(ab, parallel=args.pairs_parallel == "on"))
    return _emit(report, args)


def cmd_generate(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "transformations":
        while True:
            seeds = [
                generators.random_partial_map(rng, args.points)
                for _ in range(args.maps)
            ]
            try:
                tsys = generate(seeds, args.cap)
                break
            except CapExceededError:
                continue
        inst = instances.trans_instance_from_system(
            tsys, name=f"generated-{args.seed}", seed=args.seed, seeds_only=seeds
        )
    else:
        if args.size <= 2:
            pool = generators.enumerate_valid_abstract(args.size)
            ab = pool[rng.randrange(len(pool))]
        else:
            ab = generators.sample_valid_abstract(rng, args.size, 1)[0]
        inst = instances.abstract_instance_from_system(
            ab, name=f"generated-{args.seed}", seed=args.seed
        )
    text = instances.render_instance(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="transemi",
        description="intersection-closed semigroups of partial transformations: "
                    "checkers, closures, and representation building",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("analyze", cmd_analyze),
        ("check", cmd_check),
        ("represent", cmd_represent),
        ("roundtrip", cmd_roundtrip),
    ):
        p = sub.add_parser(name)
        _common_flags(p)
        p.set_defaults(fn=fn)

    g = sub.add_parser("generate")
    _common_flags(g, needs_input=False)
    g.add_argument("--kind", choices=("transformations", "abstract"),
                   default="transformations")
    g.add_argument("--points", type=int, default=3, help="carrier points (transformations)")
    g.add_argument("--maps", type=int, default=2, help="seed map count (transformations)")
    g.add_argument("--size", type=int, default=2, help="carrier size (abstract)")
    g.add_argument("--out", help="write the instance here instead of stdout")
    g.set_defaults(fn=cmd_generate)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InstanceFormatError as exc:
        print(f"input error: {exc}", file=_sys.stderr)
        return 2
    except TransemiError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
