"""Command-line front end.

    kufpmul mul --format single 3F800000 3F800000
    kufpmul mul --format double --file pairs.txt
    kufpmul trace --format single 3FC00000 3FC00000
    kufpmul verify fp:single:1000000 --seed 42
    kufpmul bench --widths 16,24,32 --thresholds 2,4,8 --trials 20000
    kufpmul cost --width 32 --threshold 8

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

import numpy as np

from . import kernels
from .bitvec import UBits
from .costmodel import analyze, compare_schoolbook, reports_csv
from .fpmul import FpFormat, PackedFloat, fp_multiply, parse_format
from .karatsuba import DEFAULT_THRESHOLD, KaratsubaTrace, karatsuba_mul
from .oracle import FLAG_LABELS, fp_multiply_ref
from .urdhva import assemble_product_4x4, partial_terms_4x4, urdhva_4x4_fig5, urdhva_n

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
BENCH_HEADER = "width,threshold,leaf_multiplies,ns_per_multiply"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- mul / trace


def _operands(fmt: FpFormat, a_hex: str, b_hex: str) -> tuple[PackedFloat, PackedFloat]:
    try:
        return PackedFloat.from_hex(fmt, a_hex), PackedFloat.from_hex(fmt, b_hex)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def read_pairs(stream: TextIO, fmt: FpFormat) -> list[tuple[int, int]]:
    """One pair per line, two hex tokens; ``#`` lines and blank lines are skipped."""
    pairs = []
    for lineno, line in enumerate(stream, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        toks = text.split()
        if len(toks) != 2:
            raise UsageError(f"line {lineno}: expected two hex operands, got {len(toks)} tokens")
        try:
            a, b = (PackedFloat.from_hex(fmt, t).value for t in toks)
        except ValueError as exc:
            raise UsageError(f"line {lineno}: {exc}") from None
        pairs.append((a, b))
    return pairs


def multiply_pairs(fmt: FpFormat, pairs: list[tuple[int, int]], threshold: int) -> list[str]:
    digits = (fmt.width + 3) // 4
    if not pairs:
        return []
    if fmt.width <= 64:
        a = np.array([p[0] for p in pairs], dtype=np.uint64)
        b = np.array([p[1] for p in pairs], dtype=np.uint64)
        bits, flags = kernels.fp_multiply_batch(a, b, fmt, threshold)
        return [f"{v:0{digits}X} flags={FLAG_LABELS[f]}" for v, f in zip(bits.tolist(), flags.tolist())]
    out = []
    for a, b in pairs:
        res = fp_multiply(PackedFloat.from_int(fmt, a), PackedFloat.from_int(fmt, b), threshold)
        out.append(res.line())
    return out


def cmd_mul(args, out: TextIO) -> int:
    fmt = args.format
    if args.file:
        if args.operands:
            raise UsageError("give either two operands or --file, not both")
        if args.file == "-":
            pairs = read_pairs(sys.stdin, fmt)
        else:
            try:
                with open(args.file) as fh:
                    pairs = read_pairs(fh, fmt)
            except OSError as exc:
                raise UsageError(str(exc)) from None
        for line in multiply_pairs(fmt, pairs, args.threshold):
            print(line, file=out)
        return EXIT_OK
    if len(args.operands) != 2:
        raise UsageError("mul needs exactly two hex operands (or --file)")
    a, b = _operands(fmt, *args.operands)
    print(fp_multiply(a, b, args.threshold).line(), file=out)
    return EXIT_OK


def cmd_trace(args, out: TextIO) -> int:
    a, b = _operands(args.format, args.a, args.b)
    log: list[str] = []
    tree = KaratsubaTrace(a.format.sig_width, 0, 0)
    res = fp_multiply(a, b, args.threshold, log=log, ktrace=tree)
    print(f"format {a.format}: a={a.hex()} b={b.hex()} threshold={args.threshold}", file=out)
    for line in log:
        print(line, file=out)
        if line.startswith("significand product") and tree.product:
            print("karatsuba recursion:", file=out)
            for t in tree.lines():
                print("  " + t, file=out)
    print(res.line(), file=out)
    return EXIT_OK


# --------------------------------------------------------------------- verify


@dataclass
class VerifyReport:
    total: int
    failures: int
    first_failure: str | None = None

    @property
    def passed(self) -> int:
        return self.total - self.failures

    def lines(self) -> list[str]:
        out = [f"{self.passed}/{self.total} pass"]
        if self.first_failure:
            out.append(f"first failure: {self.first_failure}")
        return out


def verify_urdhva4() -> VerifyReport:
    fails, first = 0, None
    for a in range(16):
        for b in range(16):
            x, y = UBits(4, a), UBits(4, b)
            got = (urdhva_4x4_fig5(x, y).value, assemble_product_4x4(partial_terms_4x4(x, y)).value,
                   urdhva_n(x, y).value)
            if got != (a * b,) * 3:
                fails += 1
                first = first or f"a={a:#x} b={b:#x} got={got} expected={a * b}"
    return VerifyReport(256, fails, first)


def verify_urdhva8(backend: str | None = None) -> VerifyReport:
    a = np.repeat(np.arange(256, dtype=np.uint64), 256)
    b = np.tile(np.arange(256, dtype=np.uint64), 256)
    got = kernels.urdhva_batch(a, b, 8, backend=backend)
    bad = np.nonzero(got != a * b)[0]
    first = None
    if bad.size:
        i = int(bad[0])
        first = f"a={int(a[i]):#x} b={int(b[i]):#x} got={int(got[i]):#x} expected={int(a[i]) * int(b[i]):#x}"
    return VerifyReport(65536, int(bad.size), first)


def boundary_values(width: int) -> list[int]:
    top = (1 << width) - 1
    return sorted({0, 1, top, 1 << (width - 1), top >> 1})


def random_operands(rng: np.random.Generator, width: int, count: int) -> list[int]:
    """Uniform ``width``-bit ints, built from 32-bit draws so any width works."""
    words = (width + 31) // 32
    draws = rng.integers(0, 1 << 32, size=(count, words), dtype=np.uint64).tolist()
    mask = (1 << width) - 1
    out = []
    for row in draws:
        v = 0
        for w in row:
            v = (v << 32) | w
        out.append(v & mask)
    return out


def verify_karatsuba(width: int, trials: int, seed: int, threshold: int = DEFAULT_THRESHOLD,
                     backend: str | None = None) -> VerifyReport:
    rng = np.random.default_rng(seed)
    xs = random_operands(rng, width, trials)
    ys = random_operands(rng, width, trials)
    edges = boundary_values(width)
    edge_pairs = [(p, q) for p in edges for q in edges][:trials]
    for i, (p, q) in enumerate(edge_pairs):
        xs[i], ys[i] = p, q
    if width <= kernels.MAX_KERNEL_WIDTH:
        hi, lo = kernels.karatsuba_batch(np.array(xs, dtype=np.uint64), np.array(ys, dtype=np.uint64),
                                         width, threshold, backend=backend)
        got = kernels.join128(hi, lo)
    else:
        got = [karatsuba_mul(UBits(width, x), UBits(width, y), threshold).value for x, y in zip(xs, ys)]
    fails, first = 0, None
    for x, y, g in zip(xs, ys, got):
        if g != x * y:
            fails += 1
            first = first or f"a={x:#x} b={y:#x} got={g:#x} expected={x * y:#x}"
    return VerifyReport(trials, fails, first)


def random_patterns(rng: np.random.Generator, fmt: FpFormat, count: int, normals_only: bool) -> np.ndarray:
    bits = np.array(random_operands(rng, fmt.width, count), dtype=np.uint64)
    if normals_only:
        f = np.uint64(fmt.frac_width)
        exps = rng.integers(1, fmt.max_exp, size=count, dtype=np.uint64)
        keep = ~(np.uint64(fmt.max_exp) << f)
        bits = (bits & keep) | (exps << f)
    return bits


def verify_fp(fmt: FpFormat, trials: int, seed: int, threshold: int = DEFAULT_THRESHOLD,
              normals_only: bool = False, backend: str | None = None) -> VerifyReport:
    rng = np.random.default_rng(seed)
    a = random_patterns(rng, fmt, trials, normals_only)
    b = random_patterns(rng, fmt, trials, normals_only)
    if fmt.width <= 64:
        bits, flags = kernels.fp_multiply_batch(a, b, fmt, threshold, backend=backend)
        got = zip(bits.tolist(), flags.tolist())
    else:
        got = ((r.packed.value, r.flags.code) for r in (
            fp_multiply(PackedFloat.from_int(fmt, x), PackedFloat.from_int(fmt, y), threshold)
            for x, y in zip(a.tolist(), b.tolist())))
    fails, first = 0, None
    E, F, bias = fmt.exp_width, fmt.frac_width, fmt.bias
    digits = (fmt.width + 3) // 4
    for x, y, g in zip(a.tolist(), b.tolist(), got):
        ref = fp_multiply_ref(x, y, E, F, bias)
        if g != ref:
            fails += 1
            if first is None:
                first = (f"a={x:0{digits}X} b={y:0{digits}X} got={g[0]:0{digits}X} flags={FLAG_LABELS[g[1]]} "
                         f"expected={ref[0]:0{digits}X} flags={FLAG_LABELS[ref[1]]}")
    return VerifyReport(trials, fails, first)


def _positive(text: str, what: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise UsageError(f"{what} must be an integer, got {text!r}") from None
    if v < 1:
        raise UsageError(f"{what} must be positive, got {v}")
    return v


def run_scope(scope: str, seed: int, threshold: int, normals_only: bool = False,
              backend: str | None = None) -> VerifyReport:
    if scope == "urdhva4":
        return verify_urdhva4()
    if scope == "urdhva8":
        return verify_urdhva8(backend)
    head, _, rest = scope.partition(":")
    if head == "karatsuba":
        parts = rest.split(":")
        if len(parts) != 2:
            raise UsageError(f"expected karatsuba:<width>:<trials>, got {scope!r}")
        return verify_karatsuba(_positive(parts[0], "width"), _positive(parts[1], "trials"),
                                seed, threshold, backend)
    if head == "fp":
        fmt_text, _, trials = rest.rpartition(":")
        if not fmt_text:
            raise UsageError(f"expected fp:<format>:<trials>, got {scope!r}")
        try:
            fmt = parse_format(fmt_text)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return verify_fp(fmt, _positive(trials, "trials"), seed, threshold, normals_only, backend)
    raise UsageError(f"unknown verify scope {scope!r}; use urdhva4, urdhva8, "
                     "karatsuba:<width>:<trials> or fp:<format>:<trials>")


def cmd_verify(args, out: TextIO) -> int:
    rep = run_scope(args.scope, args.seed, args.threshold, args.normals_only, args.backend)
    for line in rep.lines():
        print(line, file=out)
    return EXIT_OK if rep.failures == 0 else EXIT_FAIL


# ---------------------------------------------------------------- bench/cost


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def time_multiply(width: int, threshold: int, trials: int, seed: int,
                  backend: str | None = None, clock: Callable[[], int] = time.perf_counter_ns) -> float:
    """Wall-clock nanoseconds per multiply over ``trials`` random operand pairs."""
    rng = np.random.default_rng(seed)
    xs = random_operands(rng, width, trials)
    ys = random_operands(rng, width, trials)
    if width <= kernels.MAX_KERNEL_WIDTH:
        a, b = np.array(xs, dtype=np.uint64), np.array(ys, dtype=np.uint64)
        kernels.karatsuba_batch(a[:2], b[:2], width, threshold, backend=backend)  # compile/warm
        t0 = clock()
        kernels.karatsuba_batch(a, b, width, threshold, backend=backend)
        return (clock() - t0) / trials
    ops = [(UBits(width, x), UBits(width, y)) for x, y in zip(xs, ys)]
    t0 = clock()
    for x, y in ops:
        karatsuba_mul(x, y, threshold)
    return (clock() - t0) / trials


def bench_rows(widths: Sequence[int], thresholds: Sequence[int], trials: int, seed: int,
               backend: str | None = None, extended: bool = False) -> list[str]:
    head = BENCH_HEADER + (",word_adds,recursion_depth,schoolbook_leaves,backend" if extended else "")
    rows = [head]
    for w in widths:
        if w < 8:
            raise UsageError(f"bench widths must be >= 8, got {w}")
        for t in thresholds:
            if not 1 <= t <= 8:
                raise UsageError(f"thresholds must be in 1..8, got {t}")
            rep = analyze(w, t)
            ns = time_multiply(w, t, trials, seed, backend)
            row = f"{w},{t},{rep.leaf_multiplies},{ns:.1f}"
            if extended:
                sb = compare_schoolbook(w, t)
                be = (backend or kernels.default_backend()) if w <= kernels.MAX_KERNEL_WIDTH else "structural"
                row += f",{rep.word_adds},{rep.recursion_depth},{sb.schoolbook_leaves},{be}"
            rows.append(row)
    return rows


def cmd_bench(args, out: TextIO) -> int:
    for row in bench_rows(args.widths, args.thresholds, args.trials, args.seed, args.backend, args.extended):
        print(row, file=out)
    return EXIT_OK


def cmd_cost(args, out: TextIO) -> int:
    reports = [analyze(w, t) for w in args.width for t in args.threshold]
    if args.csv:
        out.write(reports_csv(reports))
        return EXIT_OK
    for i, rep in enumerate(reports):
        if i:
            print(file=out)
        print(rep.text(), file=out)
        if rep.width >= rep.threshold:
            print(compare_schoolbook(rep.width, rep.threshold).text(), file=out)
    return EXIT_OK


# ---------------------------------------------------------------------- main


def _format_arg(text: str) -> FpFormat:
    try:
        return parse_format(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _threshold_arg(text: str) -> int:
    v = int(text)
    if not 1 <= v <= 8:
        raise argparse.ArgumentTypeError("threshold must be in 1..8")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kufpmul", description="Karatsuba-Urdhva floating-point multiplier model")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        if fmt:
            sp.add_argument("--format", type=_format_arg, default=parse_format("single"),
                            help="single, double or custom:<exp_width>:<frac_width>[:<bias>]")
        sp.add_argument("--threshold", type=_threshold_arg, default=DEFAULT_THRESHOLD,
                        help="largest width multiplied directly by an Urdhva leaf (1..8)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("mul", help="multiply hex-encoded floats")
    common(sp)
    sp.add_argument("operands", nargs="*", metavar="HEX")
    sp.add_argument("--file", help="batch file of hex pairs, one per line ('-' for stdin)")
    sp.set_defaults(func=cmd_mul)

    sp = sub.add_parser("trace", help="dump every stage of one multiplication")
    common(sp)
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("verify", help="check a stage against its oracle")
    common(sp, fmt=False)
    sp.add_argument("scope", help="urdhva4 | urdhva8 | karatsuba:<width>:<trials> | fp:<format>:<trials>")
    sp.add_argument("--normals-only", action="store_true", help="draw only normal-number operands")
    sp.add_argument("--backend", choices=kernels.available_backends())
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="time karatsuba_mul per width and threshold (CSV)")
    sp.add_argument("--widths", type=_int_list, default=[16, 24, 32, 53, 64])
    sp.add_argument("--thresholds", type=_int_list, default=[2, 4, 8])
    sp.add_argument("--trials", type=int, default=20000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--backend", choices=kernels.available_backends())
    sp.add_argument("--extended", action="store_true", help="append cost-model columns")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("cost", help="operation counts from the cost model")
    sp.add_argument("--width", type=_int_list, default=[32])
    sp.add_argument("--threshold", type=_int_list, default=[8])
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_cost)
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"kufpmul {args.command}: error: {exc}", file=err)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"kufpmul {args.command}: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
