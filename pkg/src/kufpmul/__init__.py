"""Bit-exact model of a floating-point multiplier whose significand multiply
is a Karatsuba recursion over Urdhva-Tiryagbhyam leaf multipliers."""

from .bitvec import UBits, WidthError
from .costmodel import CostReport, analyze, compare_schoolbook, urdhva_adder_count
from .fpmul import (
    DOUBLE,
    SINGLE,
    FpFlags,
    FpFormat,
    FpResult,
    PackedFloat,
    UnpackedFloat,
    custom_format,
    fp_multiply,
    multiply_hex,
)
from .karatsuba import karatsuba_mul, leaf_schedule
from .urdhva import urdhva_4x4_fig5, urdhva_n

__version__ = "0.1.0"

__all__ = [
    "DOUBLE",
    "SINGLE",
    "CostReport",
    "FpFlags",
    "FpFormat",
    "FpResult",
    "PackedFloat",
    "UBits",
    "UnpackedFloat",
    "WidthError",
    "analyze",
    "compare_schoolbook",
    "custom_format",
    "fp_multiply",
    "karatsuba_mul",
    "leaf_schedule",
    "multiply_hex",
    "urdhva_4x4_fig5",
    "urdhva_adder_count",
    "urdhva_n",
]
