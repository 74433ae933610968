"""IEEE-754 style floating-point multiply built on the Karatsuba-Urdhva core.

Pipeline: unpack -> sign XOR -> exponent add/bias subtract -> significand
multiply -> normalize -> truncate (round toward zero) -> overflow/underflow
handling -> classify -> pack.

Inputs that are already NaN or infinite are not part of the multiplier's
datapath proper; they are handled up front with IEEE-754 propagation rules
(extension: NaN*x -> NaN, inf*0 -> NaN, inf*finite -> inf) so the function
is total.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import NamedTuple

from .bitvec import UBits, WidthError, add_ripple, concat, slice_bits, sub_borrow
from .karatsuba import DEFAULT_THRESHOLD, KaratsubaTrace, karatsuba_mul


class FormatMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FpFormat:
    exp_width: int
    frac_width: int
    bias: int
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.exp_width < 2 or self.frac_width < 1:
            raise WidthError(f"format needs exp_width >= 2 and frac_width >= 1, got {self}")
        if self.bias < 0:
            raise WidthError("bias must be non-negative")

    @property
    def width(self) -> int:
        return 1 + self.exp_width + self.frac_width

    @property
    def sig_width(self) -> int:
        return self.frac_width + 1

    @property
    def max_exp(self) -> int:
        """All-ones biased exponent (infinities and NaNs)."""
        return (1 << self.exp_width) - 1

    @property
    def quiet_nan_frac(self) -> int:
        return 1 << (self.frac_width - 1)

    def __str__(self) -> str:
        if self.name != "custom":
            return self.name
        return f"custom({self.exp_width},{self.frac_width},{self.bias})"


SINGLE = FpFormat(8, 23, 127, "single")
DOUBLE = FpFormat(11, 52, 1023, "double")


def custom_format(exp_width: int, frac_width: int, bias: int = 127) -> FpFormat:
    return FpFormat(exp_width, frac_width, bias)


def parse_format(text: str) -> FpFormat:
    """``single``, ``double`` or ``custom:<exp_width>:<frac_width>[:<bias>]``."""
    t = text.strip().lower()
    if t == "single":
        return SINGLE
    if t == "double":
        return DOUBLE
    if t.startswith("custom"):
        parts = t.replace("(", ":").replace(")", "").replace(",", ":").split(":")[1:]
        nums = [int(p) for p in parts if p]
        if len(nums) not in (2, 3):
            raise ValueError(f"custom format needs exp_width:frac_width[:bias], got {text!r}")
        return custom_format(*nums)
    raise ValueError(f"unknown format {text!r}")


@dataclass(frozen=True)
class PackedFloat:
    format: FpFormat
    bits: UBits

    def __post_init__(self) -> None:
        if self.bits.width != self.format.width:
            raise WidthError(f"{self.format} needs {self.format.width} bits, got {self.bits.width}")

    @classmethod
    def from_int(cls, fmt: FpFormat, value: int) -> PackedFloat:
        return cls(fmt, UBits(fmt.width, value))

    @classmethod
    def from_hex(cls, fmt: FpFormat, text: str) -> PackedFloat:
        """Parse a hex string of exactly the format's digit count."""
        t = text.strip()
        if t[:2].lower() == "0x":
            t = t[2:]
        digits = (fmt.width + 3) // 4
        if len(t) != digits:
            raise ValueError(f"{fmt} operands are {digits} hex digits, got {text!r}")
        value = int(t, 16)
        if value >> fmt.width:
            raise ValueError(f"{text!r} does not fit in {fmt.width} bits")
        return cls.from_int(fmt, value)

    @classmethod
    def from_float(cls, fmt: FpFormat, x: float) -> PackedFloat:
        if fmt == SINGLE:
            return cls.from_int(fmt, struct.unpack("<I", struct.pack("<f", x))[0])
        if fmt == DOUBLE:
            return cls.from_int(fmt, struct.unpack("<Q", struct.pack("<d", x))[0])
        raise ValueError("from_float only supports single and double")

    def to_float(self) -> float:
        if self.format == SINGLE:
            return struct.unpack("<f", struct.pack("<I", self.bits.value))[0]
        if self.format == DOUBLE:
            return struct.unpack("<d", struct.pack("<Q", self.bits.value))[0]
        raise ValueError("to_float only supports single and double")

    @property
    def value(self) -> int:
        return self.bits.value

    def hex(self) -> str:
        return self.bits.hex()


@dataclass(frozen=True)
class UnpackedFloat:
    sign: int
    biased_exp: UBits
    significand: UBits

    def __post_init__(self) -> None:
        hidden = self.significand.bit(self.significand.width - 1)
        if hidden != (self.biased_exp.value != 0):
            raise WidthError("hidden bit must be 1 exactly when the biased exponent is nonzero")

    @property
    def stored_fraction(self) -> int:
        return self.significand.value & ((1 << (self.significand.width - 1)) - 1)


@dataclass(frozen=True)
class FpFlags:
    zero: bool = False
    infinity: bool = False
    nan: bool = False
    denormal: bool = False

    def __post_init__(self) -> None:
        if self.zero + self.infinity + self.nan + self.denormal > 1:
            raise ValueError("at most one exception flag may be set")

    @property
    def label(self) -> str:
        for name, on in (("ZERO", self.zero), ("INF", self.infinity), ("NAN", self.nan), ("DENORM", self.denormal)):
            if on:
                return name
        return "-"

    @property
    def code(self) -> int:
        """0 none, 1 zero, 2 infinity, 3 NaN, 4 denormal (batch kernels use this)."""
        return {"-": 0, "ZERO": 1, "INF": 2, "NAN": 3, "DENORM": 4}[self.label]

    @classmethod
    def from_code(cls, code: int) -> FpFlags:
        return [cls(), cls(zero=True), cls(infinity=True), cls(nan=True), cls(denormal=True)][int(code)]


@dataclass(frozen=True)
class FpResult:
    packed: PackedFloat
    flags: FpFlags

    def line(self) -> str:
        return f"{self.packed.hex()} flags={self.flags.label}"


class Normalized(NamedTuple):
    significand: UBits
    exponent: int
    discarded: UBits | None
    shift: int  # +1 right shift on overflow, -k for k left shifts, 0 if already normal


def unpack(p: PackedFloat) -> UnpackedFloat:
    f = p.format
    sign = p.bits.bit(f.width - 1)
    e = slice_bits(p.bits, f.width - 2, f.frac_width)
    frac = slice_bits(p.bits, f.frac_width - 1, 0)
    hidden = UBits(1, int(e.value != 0))
    return UnpackedFloat(sign, e, concat(hidden, frac))


def pack(sign: int, biased_exp: UBits, stored_frac: UBits, fmt: FpFormat) -> PackedFloat:
    if sign not in (0, 1):
        raise WidthError(f"sign must be a single bit, got {sign}")
    if biased_exp.width != fmt.exp_width or stored_frac.width != fmt.frac_width:
        raise WidthError(
            f"{fmt} fields are {fmt.exp_width}/{fmt.frac_width} bits, "
            f"got {biased_exp.width}/{stored_frac.width}"
        )
    return PackedFloat(fmt, concat(concat(UBits(1, sign), biased_exp), stored_frac))


def sign_mul(s1: int, s2: int) -> int:
    return (s1 ^ s2) & 1


def _exp_work_width(exp_width: int, bias: int) -> int:
    return max(exp_width, bias.bit_length()) + 2


def exponent_add(e1: UBits, e2: UBits, bias: int) -> int:
    """``e1 + e2 - bias`` via a ripple-carry add and a ripple-borrow subtract.

    Works two bits wider than the exponent field so that overflow and
    underflow excursions come back as plain signed ints.
    """
    if e1.width != e2.width:
        raise WidthError(f"width mismatch: {e1.width} vs {e2.width}")
    w = _exp_work_width(e1.width, bias)
    total, carry = add_ripple(e1.zext(w), e2.zext(w))
    assert carry == 0
    diff, borrow = sub_borrow(total, UBits(w, bias))
    return diff.value - (1 << w) if borrow else diff.value


def mantissa_mul(m1: UBits, m2: UBits, threshold: int = DEFAULT_THRESHOLD,
                 trace: KaratsubaTrace | None = None) -> UBits:
    return karatsuba_mul(m1, m2, threshold, trace=trace)


def normalize(product: UBits, exp: int, min_exp: int = 1) -> Normalized:
    """Bring the double-width significand product back to ``1.f`` form.

    The product has two integer bits. If the top one is set, take the upper
    bits one place higher and bump the exponent. Otherwise, if the hidden
    position is empty (denormal operands), shift left one place per step and
    decrement the exponent, stopping once it reaches ``min_exp``.
    """
    if product.width % 2:
        raise WidthError("product width must be even (2 * significand width)")
    sw = product.width // 2
    f = sw - 1
    if product.value == 0:
        raise ValueError("zero products are short-circuited before normalization")
    if product.bit(2 * f + 1):
        return Normalized(slice_bits(product, 2 * f + 1, f + 1), exp + 1, slice_bits(product, f, 0), 1)
    v, shifts = product.value, 0
    while not (v >> (2 * f)) & 1 and exp > min_exp:
        v <<= 1
        exp -= 1
        shifts += 1
    p = UBits(product.width, v)
    return Normalized(slice_bits(p, 2 * f, f), exp, slice_bits(p, f - 1, 0), -shifts)


def classify_flags(biased_exp_result: int, stored_significand: UBits, exp_width: int = 8) -> FpFlags:
    """Four-way exception table on the packed result fields."""
    top = (1 << exp_width) - 1
    if not 0 <= biased_exp_result <= top:
        raise WidthError(f"biased exponent {biased_exp_result} outside [0, {top}]")
    nonzero = stored_significand.value != 0
    if biased_exp_result == 0:
        return FpFlags(denormal=True) if nonzero else FpFlags(zero=True)
    if biased_exp_result == top:
        return FpFlags(nan=True) if nonzero else FpFlags(infinity=True)
    return FpFlags()


def _result(sign: int, e: int, frac: int, fmt: FpFormat) -> FpResult:
    packed = pack(sign, UBits(fmt.exp_width, e), UBits(fmt.frac_width, frac), fmt)
    return FpResult(packed, classify_flags(e, UBits(fmt.frac_width, frac), fmt.exp_width))


def truncate_and_pack(sign: int, sig: UBits, exp: int, fmt: FpFormat,
                      log: list[str] | None = None) -> FpResult:
    """Round toward zero, clamp overflow to infinity and underflow gradually."""
    f = fmt.frac_width
    if exp >= fmt.max_exp:
        if log is not None:
            log.append(f"overflow: exponent {exp} >= {fmt.max_exp} -> infinity")
        return _result(sign, fmt.max_exp, 0, fmt)
    if exp >= 1:
        if sig.bit(f):
            return _result(sign, exp, sig.value & ((1 << f) - 1), fmt)
        # normalization stopped at the smallest exponent: already denormal form
        if log is not None:
            log.append("hidden bit clear at minimum exponent -> denormal")
        return _result(sign, 0, sig.value, fmt)
    shift = 1 - exp
    frac = sig.value >> shift if shift <= sig.width else 0
    if log is not None:
        log.append(f"underflow: exponent {exp} < 1, shift significand right {shift} -> frac {frac:#x}")
    return _result(sign, 0, frac, fmt)


def _special(sign: int, kind: str, fmt: FpFormat) -> FpResult:
    if kind == "nan":
        return _result(sign, fmt.max_exp, fmt.quiet_nan_frac, fmt)
    if kind == "inf":
        return _result(sign, fmt.max_exp, 0, fmt)
    return _result(sign, 0, 0, fmt)


def special_case(ua: UnpackedFloat, ub: UnpackedFloat, fmt: FpFormat) -> str | None:
    """'nan', 'inf' or 'zero' when an operand decides the result outright."""
    def kind(u: UnpackedFloat) -> str:
        if u.biased_exp.value == fmt.max_exp:
            return "nan" if u.stored_fraction else "inf"
        if u.biased_exp.value == 0 and u.stored_fraction == 0:
            return "zero"
        return "finite"

    ka, kb = kind(ua), kind(ub)
    if "nan" in (ka, kb):
        return "nan"
    if "inf" in (ka, kb):
        return "nan" if "zero" in (ka, kb) else "inf"
    if "zero" in (ka, kb):
        return "zero"
    return None


def fp_multiply(a: PackedFloat, b: PackedFloat, threshold: int = DEFAULT_THRESHOLD,
                log: list[str] | None = None, ktrace: KaratsubaTrace | None = None) -> FpResult:
    """Multiply two packed floats of the same format, truncating the product.

    ``log`` collects a human-readable stage dump; ``ktrace`` receives the
    Karatsuba recursion tree of the significand multiply.
    """
    if a.format != b.format:
        raise FormatMismatch(f"format mismatch: {a.format} vs {b.format}")
    fmt = a.format
    ua, ub = unpack(a), unpack(b)
    sign = sign_mul(ua.sign, ub.sign)
    if log is not None:
        for tag, u in (("a", ua), ("b", ub)):
            log.append(f"unpack {tag}: sign={u.sign} biased_exp={u.biased_exp.value} "
                       f"significand={u.significand.hex()}")
        log.append(f"sign: {ua.sign} xor {ub.sign} = {sign}")

    special = special_case(ua, ub, fmt)
    if special is not None:
        if log is not None:
            log.append(f"special operand -> {special}")
        return _special(sign, special, fmt)

    # denormal operands sit at the minimum exponent with a zero hidden bit
    ea = ua.biased_exp if ua.biased_exp.value else UBits(fmt.exp_width, 1)
    eb = ub.biased_exp if ub.biased_exp.value else UBits(fmt.exp_width, 1)
    exp = exponent_add(ea, eb, fmt.bias)
    if log is not None:
        log.append(f"exponent: {ea.value} + {eb.value} - {fmt.bias} = {exp}")

    product = mantissa_mul(ua.significand, ub.significand, threshold, ktrace)
    if log is not None:
        log.append(f"significand product: {product.hex()} ({product.width} bits)")

    norm = normalize(product, exp)
    if log is not None:
        if norm.shift > 0:
            log.append(f"normalize: overflow bit set, right shift 1, exponent -> {norm.exponent}")
        elif norm.shift < 0:
            log.append(f"normalize: left shift {-norm.shift}, exponent -> {norm.exponent}")
        else:
            log.append(f"normalize: shift 0, exponent {norm.exponent}")
        log.append(f"truncated guard bits: {norm.discarded.hex()} ({norm.discarded.width} bits)")

    res = truncate_and_pack(sign, norm.significand, norm.exponent, fmt, log)
    if log is not None:
        log.append(f"pack: {res.packed.hex()} flags={res.flags.label}")
    return res


def multiply_hex(fmt: FpFormat, a_hex: str, b_hex: str, threshold: int = DEFAULT_THRESHOLD) -> FpResult:
    return fp_multiply(PackedFloat.from_hex(fmt, a_hex), PackedFloat.from_hex(fmt, b_hex), threshold)
