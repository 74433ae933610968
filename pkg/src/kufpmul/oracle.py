"""Reference models used to check the multiplier.

Nothing in here touches the adder models, the Karatsuba recursion or the
staged pipeline. Floats are decoded to exact dyadic rationals (an integer
times a power of two), multiplied with Python's own big ints and re-encoded
by a direct floor computation.
"""

from __future__ import annotations

FLAG_NONE, FLAG_ZERO, FLAG_INF, FLAG_NAN, FLAG_DENORM = 0, 1, 2, 3, 4
FLAG_LABELS = {FLAG_NONE: "-", FLAG_ZERO: "ZERO", FLAG_INF: "INF", FLAG_NAN: "NAN", FLAG_DENORM: "DENORM"}


def int_product(a: int, b: int) -> int:
    return a * b


def decode(bits: int, exp_width: int, frac_width: int, bias: int):
    """Return ``(sign, kind, mant, exp2)`` with value ``mant * 2**exp2`` for finite kinds."""
    sign = bits >> (exp_width + frac_width)
    e = (bits >> frac_width) & ((1 << exp_width) - 1)
    frac = bits & ((1 << frac_width) - 1)
    if e == (1 << exp_width) - 1:
        return sign, ("nan" if frac else "inf"), 0, 0
    if e == 0:
        if frac == 0:
            return sign, "zero", 0, 0
        return sign, "finite", frac, 1 - bias - frac_width
    return sign, "finite", (1 << frac_width) + frac, e - bias - frac_width


def _floor_shift(x: int, k: int) -> int:
    """floor(x * 2**k) for x >= 0."""
    return x << k if k >= 0 else x >> -k


def encode_toward_zero(sign: int, mant: int, exp2: int, exp_width: int, frac_width: int, bias: int) -> int:
    """Encode ``(-1)**sign * mant * 2**exp2``, truncating, with overflow to infinity."""
    emax = (1 << exp_width) - 1
    head = sign << (exp_width + frac_width)
    if mant == 0:
        return head
    top = mant.bit_length() - 1 + exp2  # floor(log2(value))
    biased = top + bias
    if biased >= emax:
        return head | (emax << frac_width)
    if biased >= 1:
        frac = _floor_shift(mant, frac_width - top + exp2) - (1 << frac_width)
        return head | (biased << frac_width) | frac
    # subnormal grid: multiples of 2**(1 - bias - frac_width)
    return head | _floor_shift(mant, exp2 + bias - 1 + frac_width)


def classify_bits(bits: int, exp_width: int, frac_width: int) -> int:
    e = (bits >> frac_width) & ((1 << exp_width) - 1)
    frac = bits & ((1 << frac_width) - 1)
    if e == 0:
        return FLAG_DENORM if frac else FLAG_ZERO
    if e == (1 << exp_width) - 1:
        return FLAG_NAN if frac else FLAG_INF
    return FLAG_NONE


def fp_multiply_ref(a: int, b: int, exp_width: int, frac_width: int, bias: int) -> tuple[int, int]:
    """Truncating float multiply on raw bit patterns. Returns ``(bits, flag_code)``."""
    sa, ka, ma, xa = decode(a, exp_width, frac_width, bias)
    sb, kb, mb, xb = decode(b, exp_width, frac_width, bias)
    sign = sa ^ sb
    emax = (1 << exp_width) - 1
    head = sign << (exp_width + frac_width)
    if ka == "nan" or kb == "nan" or (ka == "inf" and kb == "zero") or (ka == "zero" and kb == "inf"):
        out = head | (emax << frac_width) | (1 << (frac_width - 1))
    elif ka == "inf" or kb == "inf":
        out = head | (emax << frac_width)
    else:
        out = encode_toward_zero(sign, ma * mb, xa + xb, exp_width, frac_width, bias)
    return out, classify_bits(out, exp_width, frac_width)
