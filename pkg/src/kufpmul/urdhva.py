"""Urdhva-Tiryagbhyam ("vertically and crosswise") leaf multipliers, n <= 8.

Column ``k`` of an n x n product collects every ``a_i * b_j`` with
``i + j == k``. Two readings of that scheme live here:

* the adder cascade: one adder per output column, each fed by its column's
  partial products plus everything above the LSB of the previous adder
  (``urdhva_4x4_fig5`` for 4 bits, ``urdhva_cascade`` for any n);
* the column-sum form: form the terms ``t_k`` first, then sum the shifted
  terms with carry-save reduction (``urdhva_n``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitvec import (
    UBits,
    WidthError,
    add_carry_save,
    add_ripple,
    shift_left,
)

MAX_LEAF_WIDTH = 8

# Declared widths of t0..t6 for the 4x4 case.
T4_WIDTHS = (1, 2, 2, 3, 2, 2, 1)


@dataclass(frozen=True)
class PartialTerms4:
    t0: UBits
    t1: UBits
    t2: UBits
    t3: UBits
    t4: UBits
    t5: UBits
    t6: UBits

    def __post_init__(self) -> None:
        for k, (t, w) in enumerate(zip(self.terms(), T4_WIDTHS)):
            if t.width != w:
                raise WidthError(f"t{k} must be {w} bits wide, got {t.width}")

    def terms(self) -> tuple[UBits, ...]:
        return (self.t0, self.t1, self.t2, self.t3, self.t4, self.t5, self.t6)


@dataclass
class AdderStep:
    """One adder of the cascade, as recorded for tracing."""

    column: int
    products: list[int]
    carry_in: int
    width: int
    total: int
    carry_save: bool

    @property
    def product_bit(self) -> int:
        return self.total & 1

    @property
    def carry_out(self) -> int:
        return self.total >> 1


@dataclass
class UrdhvaTrace:
    n: int
    a: int
    b: int
    terms: list[int] = field(default_factory=list)
    adders: list[AdderStep] = field(default_factory=list)
    product: int = 0

    def lines(self, indent: str = "") -> list[str]:
        out = [f"{indent}urdhva {self.n}x{self.n}: a={self.a:#x} b={self.b:#x}"]
        out.append(indent + "  " + " ".join(f"t{k}={t}" for k, t in enumerate(self.terms)))
        for s in self.adders:
            kind = "csa" if s.carry_save else "rca"
            out.append(
                f"{indent}  adder{s.column} [{kind} {s.width}b] "
                f"pp={''.join(map(str, s.products))} cin={s.carry_in} "
                f"sum={s.total} -> p{s.column}={s.product_bit}"
            )
        out.append(f"{indent}  product={self.product:#x}")
        return out


def _check_operands(a: UBits, b: UBits, lo: int = 1, hi: int = MAX_LEAF_WIDTH) -> int:
    if a.width != b.width:
        raise WidthError(f"width mismatch: {a.width} vs {b.width}")
    if not lo <= a.width <= hi:
        raise WidthError(f"leaf width {a.width} outside [{lo}, {hi}]")
    return a.width


def column_products(a: UBits, b: UBits, k: int) -> list[int]:
    """The vertical/crosswise products ``a_i * b_j`` with ``i + j == k``, i descending."""
    n = a.width
    return [a.bit(i) & b.bit(k - i) for i in range(min(k, n - 1), max(0, k - n + 1) - 1, -1)]


def column_terms(a: UBits, b: UBits) -> list[int]:
    """t_0 .. t_{2n-2} as plain ints."""
    return [sum(column_products(a, b, k)) for k in range(2 * a.width - 1)]


def partial_terms_4x4(a: UBits, b: UBits) -> PartialTerms4:
    _check_operands(a, b, 4, 4)
    return PartialTerms4(*(UBits(w, t) for w, t in zip(T4_WIDTHS, column_terms(a, b))))


def assemble_product_4x4(t: PartialTerms4) -> UBits:
    """Sum the three aligned rows s1, s2, s3 built from the terms' bits."""
    t0, t1, t2, t3, t4, t5, t6 = t.terms()
    # s1: t6 t5[0] t4[0] t3[0] t2[0] t1[0] t0 at weights 6..0
    s1 = t0.value
    for k, tk in enumerate((t1, t2, t3, t4, t5), start=1):
        s1 |= tk.bit(0) << k
    s1 |= t6.value << 6
    # s2: t5[1] .. t1[1] at weights 6..2
    s2 = 0
    for k, tk in enumerate((t1, t2, t3, t4, t5), start=1):
        s2 |= tk.bit(1) << (k + 1)
    # s3: t3[2] at weight 5
    s3 = t3.bit(2) << 5
    partial, c1 = add_ripple(UBits(8, s1), UBits(8, s2))
    product, c2 = add_ripple(partial, UBits(8, s3))
    assert c1 == 0 and c2 == 0
    return product


def _cascade(a: UBits, b: UBits, trace: UrdhvaTrace | None) -> UBits:
    n = a.width
    p = a.bit(0) & b.bit(0)
    rem, rem_max = 0, 0
    if trace is not None:
        trace.terms = column_terms(a, b)
    for k in range(1, 2 * n - 1):
        pps = column_products(a, b, k)
        ops = list(pps) + ([rem] if k > 1 else [])
        hi = len(pps) + rem_max
        w = hi.bit_length()
        vecs = [UBits(w, v) for v in ops]
        if len(vecs) >= 3:
            s, c = add_carry_save(vecs)
            ww = s.width + 1
            total, cout = add_ripple(s.zext(ww), shift_left(c, 1, ww))
        else:
            total, cout = add_ripple(vecs[0], vecs[1])
        assert cout == 0 and total.value <= hi
        if trace is not None:
            trace.adders.append(AdderStep(k, pps, ops[-1] if k > 1 else 0, w, total.value, len(vecs) >= 3))
        p |= (total.value & 1) << k
        rem, rem_max = total.value >> 1, hi >> 1
    # the top product bit is whatever the last adder carried out
    out = UBits(2 * n, p | (rem << (2 * n - 1)))
    if trace is not None:
        trace.product = out.value
    return out


def urdhva_cascade(a: UBits, b: UBits, trace: UrdhvaTrace | None = None) -> UBits:
    """n x n product through a chain of ``2n - 2`` column adders; adders with
    three or more inputs are carry-save."""
    _check_operands(a, b)
    return _cascade(a, b, trace)


def urdhva_4x4_fig5(a: UBits, b: UBits, trace: UrdhvaTrace | None = None) -> UBits:
    """The six-adder 4x4 architecture.

    p0 = a0*b0; p1..p6 are the LSBs of adders 1..6; adder k also takes the
    bits above the LSB of adder k-1; p7 is what adder 6 carries out.
    """
    _check_operands(a, b, 4, 4)
    return _cascade(a, b, trace)


def cascade_adder_count(n: int) -> int:
    """Adders instantiated by the cascade for an n x n leaf (counted, not assumed)."""
    tr = UrdhvaTrace(n, 0, 0)
    _cascade(UBits(n, 0), UBits(n, 0), tr)
    return len(tr.adders)


def urdhva_n(a: UBits, b: UBits) -> UBits:
    """Column-sum Urdhva multiply for 1 <= n <= 8.

    Terms ``t_k`` are shifted into place and reduced with carry-save stages;
    a single ripple add resolves the final sum/carry pair.
    """
    n = _check_operands(a, b)
    if n > MAX_LEAF_WIDTH:
        raise WidthError(f"urdhva leaves stop at {MAX_LEAF_WIDTH} bits; use karatsuba_mul")
    w = 2 * n
    rows = [UBits(w, t << k) for k, t in enumerate(column_terms(a, b))]
    if len(rows) == 1:
        return rows[0]
    if len(rows) == 2:
        total, _ = add_ripple(rows[0], rows[1])
        return total
    s, c = add_carry_save(rows)
    ww = s.width + 1
    total, _ = add_ripple(s.zext(ww), shift_left(c, 1, ww))
    # the exact product always fits in 2n bits
    return UBits(w, total.value)


def urdhva_trace(a: UBits, b: UBits) -> UrdhvaTrace:
    tr = UrdhvaTrace(a.width, a.value, b.value)
    urdhva_cascade(a, b, tr)
    return tr


__all__ = [
    "PartialTerms4",
    "UrdhvaTrace",
    "AdderStep",
    "partial_terms_4x4",
    "assemble_product_4x4",
    "urdhva_4x4_fig5",
    "urdhva_cascade",
    "urdhva_n",
    "urdhva_trace",
    "cascade_adder_count",
    "column_terms",
    "column_products",
]
