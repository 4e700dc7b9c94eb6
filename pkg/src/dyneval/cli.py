"""Command line: ``dyneval {sparsity,density,density-poly,bench,selftest}``.

Output is stable ``key=value`` lines, optionally followed by a table;
``--json`` emits one JSON document instead.  Randomized commands print the
effective seed so a run can be replayed exactly.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

from . import density, polyfield
from .bench import bench, format_rows, rows_as_dicts
from .dyncore import replay_check
from .polyfield import replay_check_poly
from .programs import CORPUS
from .prng import PrngState
from .sparsity import (
    PolyFileError, bit_length_bound, extension_degree, get_sparsity_gf, get_sparsity_integer,
    get_sparsity_mod_q, kronecker_black_box, mbb_from_sparse_poly, parse_sparse_poly,
)


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.data: dict = {}
        self.tables: list[str] = []

    def kv(self, key, value):
        self.data[key] = value
        if not self.as_json:
            print(f"{key}={value}")

    def table(self, text: str, rows=None, key="rows"):
        if rows is not None:
            self.data[key] = rows
        if not self.as_json:
            print(text)

    def close(self):
        if self.as_json:
            print(json.dumps(self.data, sort_keys=True, default=str))


def _seed(args, out: _Out) -> PrngState:
    seed = args.seed or secrets.token_hex(16)
    try:
        state = PrngState.from_seed(seed)
    except ValueError:
        raise SystemExit(f"error: --seed must be a hex string, got {seed!r}")
    out.kv("seed", seed)
    return state


def cmd_sparsity(args, out: _Out) -> int:
    try:
        with open(args.poly) as fh:
            f = parse_sparse_poly(fh.read())
    except PolyFileError as e:
        print(f"error: {args.poly}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    D, H = args.degree_bound, args.height_bound
    if D < 2 or H < 1:
        print("error: need --degree-bound >= 2 and --height-bound >= 1", file=sys.stderr)
        return 2
    state = _seed(args, out)
    if args.mode == "gf":
        if not args.q:
            print("error: --mode gf requires --q", file=sys.stderr)
            return 2
        f = f.reduce_mod(args.q)
    try:
        bb = mbb_from_sparse_poly(f, D, max(H, f.height))
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if f.height > H and args.mode != "gf":
        print(f"error: height {f.height} exceeds bound {H}", file=sys.stderr)
        return 2
    if f.num_vars > 1:
        bb = kronecker_black_box(bb, [D] * f.num_vars)
    Du = bb.degree_bound

    runs = []
    for i in range(args.reps):
        s = state if args.reps == 1 else state.fork(i)
        if args.mode == "composite":
            runs.append(get_sparsity_integer(bb, Du, max(H, 2), s))
        elif args.mode == "prime":
            q = args.q or density.random_prime(bit_length_bound(Du, max(H, 2)) + 1, s)
            runs.append(get_sparsity_mod_q(bb, Du, q, s))
        else:
            sdeg = args.ext_degree or extension_degree(args.q, Du)
            runs.append(get_sparsity_gf(bb, Du, args.q, sdeg, s))
    best = max(runs, key=lambda r: r.t)
    out.kv("t", best.t)
    if args.verbose:
        out.kv("mode", args.mode)
        out.kv("reps", args.reps)
        out.kv("probes", sum(r.probes for r in runs))
        out.kv("modulus", best.modulus)
        out.kv("truncated", int(any(r.truncated for r in runs)))
    return 0


def cmd_density(args, out: _Out) -> int:
    try:
        count = density.count_b_fat(args.b)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    bound = 1 << (2 * args.b - 2)
    ok = count >= bound
    out.kv("b", args.b)
    out.kv("count", count)
    out.kv("bound", bound)
    out.kv("result", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_density_poly(args, out: _Out) -> int:
    if not density.is_probable_prime(args.q):
        print(f"error: q = {args.q} is not prime", file=sys.stderr)
        return 2
    try:
        count = polyfield.count_d_fat(args.q, args.d)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    total = args.q ** (2 * args.d)
    ok = 4 * count >= total
    out.kv("q", args.q)
    out.kv("d", args.d)
    out.kv("count", count)
    out.kv("bound", total / 4)
    out.kv("fraction", f"{count / total:.6f}")
    out.kv("result", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_bench(args, out: _Out) -> int:
    try:
        bits = [int(x) for x in args.bits.split(",") if x]
        rows = bench(bits, args.trials, PrngState.from_seed(args.seed or "00"))
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    tests = sum(r.composite_tests for r in rows)
    out.kv("composite_primality_tests", tests)
    out.table(format_rows(rows), rows_as_dicts(rows))
    return 0 if tests == 0 else 1


def cmd_selftest(args, out: _Out) -> int:
    state = _seed(args, out)
    rows = []
    failures = 0
    tests = 0
    for prog in CORPUS:
        passed = 0
        for i in range(args.trials):
            r = replay_check(prog.fn, prog.input, state.fork(i), args.b)
            passed += r.ok
            tests += r.composite_tests
        for i in range(args.poly_trials):
            r = replay_check_poly(prog.fn, prog.input, args.poly_q, args.poly_s, state.fork(i))
            passed += r.ok
            tests += r.composite_tests
        total = args.trials + args.poly_trials
        failures += total - passed
        rows.append({"program": prog.name, "passed": passed, "total": total,
                     "result": "PASS" if passed == total else "FAIL"})
    out.kv("composite_primality_tests", tests)
    ok = failures == 0 and tests == 0
    out.kv("result", "PASS" if ok else "FAIL")
    width = max(len(r["program"]) for r in rows)
    text = "\n".join(f"{r['program']:<{width}}  {r['passed']:>5}/{r['total']:<5} {r['result']}"
                     for r in rows)
    out.table(text, rows)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dyneval", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="emit one JSON document")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", help="hex seed (random if omitted; always echoed)")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    sp = sub.add_parser("sparsity", help="count nonzero terms of a polynomial file")
    common(sp)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--degree-bound", type=int, required=True)
    sp.add_argument("--height-bound", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--mode", choices=("composite", "prime", "gf"), default="composite")
    sp.add_argument("--q", type=int, help="prime modulus (prime mode) or base field (gf mode)")
    sp.add_argument("--ext-degree", type=int, help="extension degree s for gf mode")
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_sparsity)

    sp = sub.add_parser("density", help="count b-fat 2b-bit integers")
    common(sp)
    sp.add_argument("--b", type=int, required=True)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("density-poly", help="count d-fat monic degree-2d polynomials")
    common(sp)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.set_defaults(func=cmd_density_poly)

    sp = sub.add_parser("bench", help="random prime generation vs composite sparsity")
    common(sp)
    sp.add_argument("--bits", default="64,128,256")
    sp.add_argument("--trials", type=int, default=3)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("selftest", help="replay-check the hosted program corpus")
    common(sp)
    sp.add_argument("--b", type=int, default=16)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--poly-trials", type=int, default=5)
    sp.add_argument("--poly-q", type=int, default=2)
    sp.add_argument("--poly-s", type=int, default=3)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sparsity" and args.reps < 1:
        print("error: --reps must be >= 1", file=sys.stderr)
        return 2
    out = _Out(args.json)
    status = args.func(args, out)
    out.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
