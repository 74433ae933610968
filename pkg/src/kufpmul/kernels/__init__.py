"""Batch kernels for the leaf multiplier, the Karatsuba core and the FP pipeline.

Two interchangeable backends compute bit-identical results:

* ``numba``: compiled per-element loops (default when numba imports);
* ``numpy``: vectorized whole-batch array code.

Set ``KUFPMUL_NO_NUMBA=1`` to force the numpy path. Functions also take an
explicit ``backend=`` argument, which the tests and the benchmark use to run
both side by side.
"""

from __future__ import annotations

import os

import numpy as np

from ..karatsuba import DEFAULT_THRESHOLD
from . import _numpy
from .plan import MAX_KERNEL_WIDTH, FlatPlan, flat_plan

ENV_FLAG = "KUFPMUL_NO_NUMBA"

try:
    from . import _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    HAVE_NUMBA = False


def _env_disables_numba() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not _env_disables_numba() else "numpy"


def available_backends() -> list[str]:
    return ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]


def _impl(backend: str | None):
    name = backend or default_backend()
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        return _numba
    if name == "numpy":
        return _numpy
    raise ValueError(f"unknown backend {name!r}")


def _u64(x) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(x, dtype=np.uint64))


def urdhva_batch(a, b, n: int, backend: str | None = None) -> np.ndarray:
    """n x n column-sum products of two uint64 arrays (n <= 8)."""
    if not 1 <= n <= 8:
        raise ValueError(f"leaf width must be 1..8, got {n}")
    a, b = _u64(a), _u64(b)
    return _impl(backend).urdhva_batch(a, b, n)


def karatsuba_batch(a, b, width: int, threshold: int = DEFAULT_THRESHOLD,
                    backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact products of width-bit operands as ``(hi, lo)`` uint64 halves."""
    plan = flat_plan(width, threshold)
    a, b = _u64(a), _u64(b)
    if width < 64 and ((a >> np.uint64(width)).any() or (b >> np.uint64(width)).any()):
        raise ValueError(f"operands exceed {width} bits")
    return _impl(backend).karatsuba_batch(a, b, plan.splits, plan.children, plan.widths)


def join128(hi: np.ndarray, lo: np.ndarray) -> list[int]:
    return [(int(h) << 64) | int(l) for h, l in zip(hi.tolist(), lo.tolist())]


def fp_multiply_batch(a, b, fmt, threshold: int = DEFAULT_THRESHOLD,
                      backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Multiply packed bit patterns elementwise. Returns ``(bits, flag_codes)``.

    Flag codes: 0 none, 1 zero, 2 infinity, 3 NaN, 4 denormal.
    """
    if fmt.width > 64 or fmt.sig_width > MAX_KERNEL_WIDTH:
        raise ValueError(f"batch kernels need formats of at most 64 bits, got {fmt}")
    plan = flat_plan(fmt.sig_width, threshold)
    a, b = _u64(a), _u64(b)
    return _impl(backend).fp_multiply_batch(
        a, b, fmt.exp_width, fmt.frac_width, fmt.bias, plan.splits, plan.children, plan.widths
    )


__all__ = [
    "ENV_FLAG",
    "HAVE_NUMBA",
    "FlatPlan",
    "MAX_KERNEL_WIDTH",
    "available_backends",
    "default_backend",
    "flat_plan",
    "fp_multiply_batch",
    "join128",
    "karatsuba_batch",
    "urdhva_batch",
]
