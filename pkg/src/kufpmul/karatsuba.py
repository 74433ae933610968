"""Recursive Karatsuba multiplication over UBits with Urdhva leaves.

Operands of width n are split at m = ceil(n/2) into a high part of n - m bits
and a low part of m bits. Each level does exactly three multiplies:

    P_hh  = X_l * Y_l                    (width n - m)
    P_ll  = X_r * Y_r                    (width m)
    P_mid = (X_l + X_r) * (Y_l + Y_r)

and recombines  X*Y = P_hh << 2m  +  (P_mid - P_hh - P_ll) << m  +  P_ll.

The sums X_l + X_r are m + 1 bits wide. Only their low m bits go through the
recursive multiply; the carry bits are folded back in with gated adds, so the
recursion never grows past m bits and a width of t * 2**k costs exactly 3**k
leaf multiplies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitvec import UBits, WidthError, add_ripple, concat, shift_left, slice_bits, sub_borrow
from .urdhva import MAX_LEAF_WIDTH, UrdhvaTrace, urdhva_n, urdhva_trace

DEFAULT_THRESHOLD = 8

# Word-level adds per internal node: 2 operand sums, 3 carry corrections for
# the middle product, 2 subtractions, 1 final add (the outer terms concatenate).
ADDS_PER_NODE = 8


@dataclass(frozen=True)
class SplitPair:
    hi: UBits
    lo: UBits
    split_point: int

    def recombine(self) -> int:
        return (self.hi.value << self.split_point) | self.lo.value


def split(x: UBits, m: int) -> SplitPair:
    if not 0 < m < x.width:
        raise WidthError(f"split point {m} outside (0, {x.width})")
    return SplitPair(slice_bits(x, x.width - 1, m), slice_bits(x, m - 1, 0), m)


def split_point(n: int) -> int:
    return (n + 1) // 2


def check_threshold(threshold: int) -> None:
    if not 1 <= threshold <= MAX_LEAF_WIDTH:
        raise WidthError(f"threshold must be in [1, {MAX_LEAF_WIDTH}], got {threshold}")


@dataclass
class PlanNode:
    """Shape of one recursion node; no operand values."""

    width: int
    depth: int
    children: list[PlanNode] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


def build_plan(n: int, threshold: int = DEFAULT_THRESHOLD, depth: int = 0) -> PlanNode:
    """The recursion tree karatsuba_mul walks for width ``n``."""
    if n < 1:
        raise WidthError(f"width must be positive, got {n}")
    check_threshold(threshold)
    node = PlanNode(n, depth)
    if n > threshold:
        m = split_point(n)
        node.children = [
            build_plan(n - m, threshold, depth + 1),
            build_plan(m, threshold, depth + 1),
            build_plan(m, threshold, depth + 1),
        ]
    return node


def iter_preorder(node: PlanNode):
    yield node
    for c in node.children:
        yield from iter_preorder(c)


def leaf_schedule(n: int, threshold: int = DEFAULT_THRESHOLD) -> list[int]:
    """Leaf widths in preorder (hh, ll, mid at every level)."""
    return [p.width for p in iter_preorder(build_plan(n, threshold)) if p.is_leaf]


@dataclass
class MulStats:
    """Instrumentation filled in by karatsuba_mul as it runs."""

    leaves: list[int] = field(default_factory=list)
    children_per_node: list[int] = field(default_factory=list)
    word_adds: int = 0
    max_depth: int = 0
    # when set, every node re-derives X_l*Y_r + X_r*Y_l directly and compares
    check_identity: bool = False
    identity_checks: int = 0


@dataclass
class KaratsubaTrace:
    width: int
    a: int
    b: int
    depth: int = 0
    split_point: int = 0
    p_hh: int = 0
    p_ll: int = 0
    p_mid: int = 0
    carries: tuple[int, int] = (0, 0)
    product: int = 0
    children: list[KaratsubaTrace] = field(default_factory=list)
    leaf: UrdhvaTrace | None = None

    def lines(self) -> list[str]:
        pad = "  " * self.depth
        if self.leaf is not None:
            return self.leaf.lines(pad)
        out = [
            f"{pad}karatsuba {self.width}b split={self.split_point} a={self.a:#x} b={self.b:#x}",
            f"{pad}  P_hh={self.p_hh:#x} P_ll={self.p_ll:#x} P_mid={self.p_mid:#x} "
            f"sum_carries={self.carries[0]}{self.carries[1]}",
        ]
        for c in self.children:
            out.extend(c.lines())
        out.append(f"{pad}  product={self.product:#x}")
        return out


def _sum_halves(p: SplitPair, m: int) -> tuple[UBits, int]:
    s, c = add_ripple(p.hi.zext(m), p.lo)
    return s, c


def _gated(bit: int, x: UBits) -> UBits:
    return x if bit else UBits(x.width, 0)


def _mul(
    a: UBits,
    b: UBits,
    threshold: int,
    depth: int,
    stats: MulStats | None,
    trace: KaratsubaTrace | None,
) -> UBits:
    n = a.width
    if stats is not None:
        stats.max_depth = max(stats.max_depth, depth)
    if n <= threshold:
        if stats is not None:
            stats.leaves.append(n)
        if trace is not None:
            trace.leaf = urdhva_trace(a, b)
            trace.product = trace.leaf.product
        return urdhva_n(a, b)

    m = split_point(n)
    xa, xb = split(a, m), split(b, m)
    sa, ca = _sum_halves(xa, m)
    sb, cb = _sum_halves(xb, m)

    kids = [KaratsubaTrace(n - m, xa.hi.value, xb.hi.value, depth + 1),
            KaratsubaTrace(m, xa.lo.value, xb.lo.value, depth + 1),
            KaratsubaTrace(m, sa.value, sb.value, depth + 1)] if trace is not None else [None] * 3
    p_hh = _mul(xa.hi, xb.hi, threshold, depth + 1, stats, kids[0])
    p_ll = _mul(xa.lo, xb.lo, threshold, depth + 1, stats, kids[1])
    core = _mul(sa, sb, threshold, depth + 1, stats, kids[2])

    # (ca*2^m + sa)(cb*2^m + sb) = core + 2^m (ca*sb + cb*sa) + 2^2m ca*cb
    wm = 2 * m + 2
    mid, c0 = add_ripple(core.zext(wm), shift_left(_gated(ca, sb), m, wm))
    mid, c1 = add_ripple(mid, shift_left(_gated(cb, sa), m, wm))
    mid, c2 = add_ripple(mid, UBits(wm, (ca & cb) << (2 * m)))
    cross, b0 = sub_borrow(mid, p_hh.zext(wm))
    cross, b1 = sub_borrow(cross, p_ll.zext(wm))
    # all partial products are non-negative, so nothing may wrap
    assert c0 == c1 == c2 == 0 and b0 == b1 == 0

    w2 = 2 * n
    outer = concat(p_hh, p_ll)
    if outer.width < w2:
        outer = outer.zext(w2)
    product, cout = add_ripple(outer, shift_left(UBits(w2, cross.value), m))
    assert cout == 0

    if stats is not None:
        stats.children_per_node.append(3)
        stats.word_adds += ADDS_PER_NODE
        if stats.check_identity:
            direct = xa.hi.value * xb.lo.value + xa.lo.value * xb.hi.value
            if cross.value != direct:
                raise AssertionError(f"middle-term identity broken at width {n}: {cross.value} != {direct}")
            stats.identity_checks += 1
    if trace is not None:
        trace.split_point = m
        trace.p_hh, trace.p_ll, trace.p_mid = p_hh.value, p_ll.value, mid.value
        trace.carries = (ca, cb)
        trace.children = kids
        trace.product = product.value
    return product


def karatsuba_mul(
    a: UBits,
    b: UBits,
    threshold: int = DEFAULT_THRESHOLD,
    *,
    stats: MulStats | None = None,
    trace: KaratsubaTrace | None = None,
) -> UBits:
    """Exact ``a * b`` as a ``2n``-bit vector."""
    if a.width != b.width:
        raise WidthError(f"width mismatch: {a.width} vs {b.width}")
    check_threshold(threshold)
    if trace is not None:
        trace.width, trace.a, trace.b = a.width, a.value, b.value
    return _mul(a, b, threshold, 0, stats, trace)


def karatsuba_trace(a: UBits, b: UBits, threshold: int = DEFAULT_THRESHOLD) -> KaratsubaTrace:
    tr = KaratsubaTrace(a.width, a.value, b.value)
    karatsuba_mul(a, b, threshold, trace=tr)
    return tr
