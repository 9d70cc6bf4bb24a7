"""Command-line front end.

Every command writes exactly one deterministic document to stdout for a
given flag set and prime: wall-clock numbers and canonicalization notices
go to stderr so reruns are byte-identical. Exit codes: 0 success, 1 for a
mathematically negative verdict (a certified obstruction or a pipeline
disagreement), 2 for usage, validation, and capacity errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .complexes import build_slice, slice_to_json, slice_to_text
from .errors import CapacityError, MismatchError
from .homology import DEFAULT_PRIME, is_prime, reduced_betti
from .koszul import tor_dimension
from .lattice import multidegree, veronese_points
from .npchecker import FAILS, NpQuery, check_np, cross_validate
from .reptheory import tor_schur_decomposition


def _parse_b(text: str) -> tuple[int, ...]:
    try:
        coords = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"multidegree {text!r} is not comma-separated integers")
    if not coords:
        raise ValueError("empty multidegree")
    return coords


def _canonicalize(coords: tuple[int, ...]) -> tuple[int, ...]:
    canon = tuple(sorted(coords, reverse=True))
    if canon != coords:
        print(f"note: multidegree {coords} canonicalized to {canon}",
              file=sys.stderr)
    return canon


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("SYZCHECK_THREADS")
    return int(env) if env else 1


def _store(args) -> str | None:
    if getattr(args, "store", None) is not None:
        return args.store
    return os.environ.get("SYZCHECK_STORE") or None


def _strategy(args) -> str:
    return "exact" if getattr(args, "exact", False) else "modular_first"


def _prime(args) -> int:
    prime = getattr(args, "prime", None)
    if prime is None:
        return DEFAULT_PRIME
    if not is_prime(prime):
        raise ValueError(f"--prime {prime} is not prime")
    return prime


def _emit_json(doc) -> int:
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def cmd_points(args) -> int:
    config = veronese_points(args.n, args.d)
    if args.format == "json":
        return _emit_json({"n": args.n, "d": args.d,
                           "count": len(config.points),
                           "points": [list(p) for p in config.points]})
    sep = "," if args.format == "csv" else " "
    for point in config.points:
        print(sep.join(str(x) for x in point))
    return 0


def cmd_complex(args) -> int:
    if args.format == "csv":
        raise ValueError("complex has no csv form; use text or json")
    config = veronese_points(args.n, args.d)
    coords = _canonicalize(_parse_b(args.b))
    try:
        lo, hi = (int(x) for x in args.j.split(","))
    except ValueError:
        raise ValueError(f"-j expects 'lo,hi', got {args.j!r}")
    slc = build_slice(config, coords, lo, hi)
    if args.format == "json":
        return _emit_json(slice_to_json(slc))
    print(slice_to_text(slc))
    return 0


def cmd_betti(args) -> int:
    config = veronese_points(args.n, args.d)
    coords = _canonicalize(_parse_b(args.b))
    b = multidegree(config, coords)  # membership-validating
    slc = build_slice(config, coords, -1, args.j + 1,
                      find_cone_apex=args.cone_shortcut)
    bn = reduced_betti(slc, args.j, _strategy(args), prime=_prime(args))
    if args.format == "json":
        return _emit_json({"b": list(coords), "degree": b.total_degree,
                           "j": bn.j, "value": bn.value,
                           "certified": bn.certified})
    if args.format == "csv":
        print("b,j,value,certified")
        print(f"{' '.join(str(x) for x in coords)},{bn.j},{bn.value},"
              f"{str(bn.certified).lower()}")
        return 0
    print(f"reduced homology rank at b={coords}, dimension {bn.j}: "
          f"{bn.value} ({'certified' if bn.certified else 'modular only'})")
    return 0


def _build_query(args) -> NpQuery:
    return NpQuery(n=args.n, d=args.d, p=args.p, q_max=args.qmax,
                   slack=args.slack, field_strategy=_strategy(args),
                   prime=_prime(args), threads=_threads(args),
                   store_path=_store(args),
                   use_cone_shortcut=args.cone_shortcut)


def cmd_check_np(args) -> int:
    verdict = check_np(_build_query(args))
    if args.format == "json":
        _emit_json(verdict.to_json())
    elif args.format == "csv":
        w = verdict.witness
        print("status,witness_b,witness_degree,witness_q,value,certified")
        if w is None:
            print(f"{verdict.status},,,,,")
        else:
            b = " ".join(str(x) for x in w.b.coords)
            print(f"{verdict.status},{b},{w.b.total_degree},{w.q},"
                  f"{w.betti.value},{str(w.betti.certified).lower()}")
    else:
        print(verdict.text())
    return 1 if verdict.status == FAILS else 0


def cmd_koszul(args) -> int:
    weight = None
    if args.b is not None:
        weight = _canonicalize(_parse_b(args.b))
    slice_ = tor_dimension(args.p, args.q, args.n, args.d, weight=weight,
                           strategy=_strategy(args), prime=_prime(args))
    if args.format == "json":
        return _emit_json(slice_.to_json())
    if args.format == "csv":
        print("b,mult")
        for b, m in sorted(slice_.weights.items(), reverse=True):
            print(f"{' '.join(str(x) for x in b)},{m}")
        return 0
    print(f"graded piece (p={args.p}, q={args.q}): total_dim {slice_.total_dim}")
    for b, m in sorted(slice_.weights.items(), reverse=True):
        print(f"  weight {b}: {m}")
    return 0


def cmd_schur(args) -> int:
    dec = tor_schur_decomposition(args.p, args.q, args.d, args.vdim,
                                  strategy=_strategy(args))
    if args.format == "json":
        return _emit_json(dec.to_json())
    if args.format == "csv":
        print("partition,mult")
        for term in dec.to_json():
            print(f"{' '.join(str(x) for x in term['partition'])},{term['mult']}")
        return 0
    if not dec.terms:
        print("zero representation")
    for term in dec.to_json():
        print(f"partition {tuple(term['partition'])}: multiplicity {term['mult']}")
    return 0


def cmd_cross_validate(args) -> int:
    report = cross_validate(args.n, args.d, args.p, args.q,
                            strategy=_strategy(args), prime=_prime(args),
                            store_path=_store(args))
    if args.format == "json":
        return _emit_json(report.to_json())
    if args.format == "csv":
        print("b,tor,betti")
        for pr in report.pairs:
            print(f"{' '.join(str(x) for x in pr.coords)},{pr.tor},{pr.betti}")
        return 0
    print(f"{report.matches} matches, {report.mismatches} mismatches "
          f"({report.compared} weights compared)")
    for coords, value in report.matched_pairs():
        print(f"  b={coords}: both pipelines give {value}")
    return 0


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    verdict = check_np(_build_query(args))
    total = time.perf_counter() - t0
    print(f"bench: {verdict.jobs_total} jobs in {total:.2f}s "
          f"({verdict.jobs_reused} reused)", file=sys.stderr)
    print(verdict.text())
    return 1 if verdict.status == FAILS else 0


def _add_common(sub, *, prime=True, fmt=True, exact=True, threads=False,
                store=False, cone=False):
    if fmt:
        sub.add_argument("--format", choices=("json", "csv", "text"),
                         default="text")
    if prime:
        sub.add_argument("--prime", type=int, default=None,
                         help="odd prime below 2^31 for the modular stage")
    if exact:
        sub.add_argument("--exact", action="store_true",
                         help="skip the modular stage, rationally certify everything")
    if threads:
        sub.add_argument("--threads", type=int, default=None,
                         help="worker processes (env SYZCHECK_THREADS)")
    if store:
        sub.add_argument("--store", default=None,
                         help="results directory (env SYZCHECK_STORE)")
    if cone:
        sub.add_argument("--cone-shortcut", action="store_true",
                         help="skip homology when a vertex cones the whole band")


def _positive(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {val}")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syzcheck",
        description="certified multigraded Betti numbers and syzygy "
                    "linearity verdicts for Veronese embeddings")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("points", help="list the monomial point configuration")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    _add_common(sp, prime=False, exact=False)
    sp.set_defaults(func=cmd_points)

    sp = subs.add_parser("complex", help="materialize a divisor complex band")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("-b", required=True, help="bound vector, comma-separated")
    sp.add_argument("-j", required=True, help="dimension band 'lo,hi'")
    _add_common(sp, prime=False, exact=False)
    sp.set_defaults(func=cmd_complex)

    sp = subs.add_parser("betti", help="one reduced homology rank")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("-b", required=True, help="multidegree, comma-separated")
    sp.add_argument("-j", type=int, required=True, help="homological dimension")
    _add_common(sp, cone=True)
    sp.set_defaults(func=cmd_betti)

    sp = subs.add_parser("check-np", help="linearity verdict for (n, d, p)")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("-p", type=_positive, required=True)
    sp.add_argument("--slack", type=int, default=None,
                    help="extra degrees beyond q+2 to sweep (default: effective n)")
    sp.add_argument("--qmax", type=int, default=None,
                    help="cap on the homological index q (default: p)")
    _add_common(sp, threads=True, store=True, cone=True)
    sp.set_defaults(func=cmd_check_np)

    sp = subs.add_parser("koszul", help="graded Tor piece from the contraction complex")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("-p", type=_positive, required=True)
    sp.add_argument("-q", type=_positive, required=True)
    sp.add_argument("-b", default=None, help="optional single weight, comma-separated")
    _add_common(sp)
    sp.set_defaults(func=cmd_koszul)

    sp = subs.add_parser("schur", help="Schur decomposition of a Tor piece")
    sp.add_argument("-p", type=_positive, required=True)
    sp.add_argument("-q", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("--vdim", type=_positive, required=True,
                    help="dimension of the underlying space (needs vdim >= p+1)")
    _add_common(sp, prime=False)
    sp.set_defaults(func=cmd_schur)

    sp = subs.add_parser("cross-validate",
                         help="assert the two pipelines agree at degree p+q")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("-p", type=_positive, required=True)
    sp.add_argument("-q", type=_positive, required=True)
    _add_common(sp, store=True)
    sp.set_defaults(func=cmd_cross_validate)

    sp = subs.add_parser("bench", help="run a verdict and report wall time on stderr")
    sp.add_argument("-n", type=_positive, required=True)
    sp.add_argument("-d", type=_positive, required=True)
    sp.add_argument("-p", type=_positive, required=True)
    sp.add_argument("--slack", type=int, default=None)
    sp.add_argument("--qmax", type=int, default=None)
    _add_common(sp, fmt=False, threads=True, store=True, cone=True)
    sp.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MismatchError as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return 1
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
