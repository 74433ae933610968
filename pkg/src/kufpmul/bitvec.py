"""Fixed-width unsigned bit-vectors and word-level adder models.

Bit 0 is the LSB everywhere. Values are Python ints, so widths are not
limited to the machine word (a 53x53 mantissa product needs 106 bits).
The adders differ only in how they are built, never in what they return:
ripple, carry-select and the final add of a carry-save tree are all
bit-identical to integer addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class WidthError(ValueError):
    """Raised when an operand violates a width or index contract."""


@dataclass(frozen=True, slots=True)
class UBits:
    width: int
    value: int = 0

    def __post_init__(self) -> None:
        if self.width < 1:
            raise WidthError(f"width must be positive, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise WidthError(f"value {self.value:#x} does not fit in {self.width} bits")

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __len__(self) -> int:
        return self.width

    def bit(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise WidthError(f"bit index {i} outside [0, {self.width})")
        return (self.value >> i) & 1

    def bits(self) -> list[int]:
        """LSB-first list of bits."""
        return [(self.value >> i) & 1 for i in range(self.width)]

    def zext(self, width: int) -> UBits:
        if width < self.width:
            raise WidthError(f"cannot zero-extend {self.width} bits down to {width}")
        return UBits(width, self.value)

    def hex(self) -> str:
        return f"{self.value:0{(self.width + 3) // 4}X}"

    def __repr__(self) -> str:
        return f"UBits({self.width}, {self.value:#x})"


def ubits(width: int, value: int) -> UBits:
    return UBits(width, value)


def _same_width(a: UBits, b: UBits) -> int:
    if a.width != b.width:
        raise WidthError(f"width mismatch: {a.width} vs {b.width}")
    return a.width


def full_adder(a: int, b: int, cin: int) -> tuple[int, int]:
    t = a ^ b
    return t ^ cin, (a & b) | (t & cin)


def add_ripple(a: UBits, b: UBits, cin: int = 0) -> tuple[UBits, int]:
    """Bit-serial ripple-carry add. Returns ``(sum, carry_out)``."""
    w = _same_width(a, b)
    carry = cin & 1
    out = 0
    av, bv = a.value, b.value
    for i in range(w):
        s, carry = full_adder((av >> i) & 1, (bv >> i) & 1, carry)
        out |= s << i
    return UBits(w, out), carry


def sub_borrow(a: UBits, b: UBits) -> tuple[UBits, int]:
    """Ripple-borrow subtract. ``borrow_out`` is 1 iff ``a < b``."""
    w = _same_width(a, b)
    borrow = 0
    out = 0
    av, bv = a.value, b.value
    for i in range(w):
        x, y = (av >> i) & 1, (bv >> i) & 1
        out |= (x ^ y ^ borrow) << i
        borrow = ((1 - x) & (y | borrow)) | (x & y & borrow)
    return UBits(w, out), borrow


def csa_3to2(x: int, y: int, z: int) -> tuple[int, int]:
    """One carry-save stage on raw ints: returns (sum, unshifted carry)."""
    return x ^ y ^ z, (x & y) | (x & z) | (y & z)


def add_carry_save(operands: Sequence[UBits]) -> tuple[UBits, UBits]:
    """Reduce three or more equal-width operands to a redundant ``(sum, carry)`` pair.

    ``sum + 2 * carry`` equals the integer total. Both vectors are widened to
    hold the full total, so no carry is ever dropped.
    """
    if len(operands) < 3:
        raise WidthError(f"carry-save addition needs at least 3 operands, got {len(operands)}")
    w = operands[0].width
    for op in operands[1:]:
        if op.width != w:
            raise WidthError(f"width mismatch: {w} vs {op.width}")
    out_width = (len(operands) * ((1 << w) - 1)).bit_length() or 1
    rows = [op.value for op in operands]
    while len(rows) > 3:
        s, c = csa_3to2(rows[0], rows[1], rows[2])
        rows = rows[3:] + [s, c << 1]
    s, c = csa_3to2(*rows)
    return UBits(out_width, s), UBits(out_width, c)


def add_carry_select(a: UBits, b: UBits, cin: int = 0, block: int = 4) -> tuple[UBits, int]:
    """Carry-select add: each block is summed for both carry-in values and
    the real carry picks one."""
    w = _same_width(a, b)
    carry = cin & 1
    out = 0
    for lo in range(0, w, block):
        bw = min(block, w - lo)
        xa = UBits(bw, (a.value >> lo) & ((1 << bw) - 1))
        xb = UBits(bw, (b.value >> lo) & ((1 << bw) - 1))
        s0, c0 = add_ripple(xa, xb, 0)
        s1, c1 = add_ripple(xa, xb, 1)
        s, carry = (s1, c1) if carry else (s0, c0)
        out |= s.value << lo
    return UBits(w, out), carry


def slice_bits(a: UBits, hi: int, lo: int) -> UBits:
    """Bits ``hi..lo`` inclusive, as a vector of width ``hi - lo + 1``."""
    if not 0 <= lo <= hi < a.width:
        raise WidthError(f"slice [{hi}:{lo}] out of range for width {a.width}")
    w = hi - lo + 1
    return UBits(w, (a.value >> lo) & ((1 << w) - 1))


def concat(hi_part: UBits, lo_part: UBits) -> UBits:
    return UBits(hi_part.width + lo_part.width, (hi_part.value << lo_part.width) | lo_part.value)


def shift_left(a: UBits, k: int, width: int | None = None) -> UBits:
    """Logical left shift; bits pushed past the result width are dropped.

    Pass ``width`` to widen the result first (``shift_left(x, k, x.width + k)``
    is lossless).
    """
    if k < 0:
        raise WidthError(f"negative shift {k}")
    w = a.width if width is None else width
    if w < a.width:
        raise WidthError(f"result width {w} narrower than operand width {a.width}")
    return UBits(w, (a.value << k) & ((1 << w) - 1))


def shift_right(a: UBits, k: int) -> UBits:
    if k < 0:
        raise WidthError(f"negative shift {k}")
    return UBits(a.width, a.value >> k)
