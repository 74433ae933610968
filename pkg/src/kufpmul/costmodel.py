"""Tool-independent operation counts for the Karatsuba-Urdhva multiplier.

Counts are structural: how many leaf multiplies, how many word-level adds,
how deep the recursion goes. No delay, area or frequency numbers are modeled.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field

from .bitvec import WidthError
from .karatsuba import ADDS_PER_NODE, build_plan, check_threshold, iter_preorder
from .urdhva import MAX_LEAF_WIDTH


@dataclass(frozen=True)
class CostReport:
    width: int
    threshold: int
    leaf_multiplies: int
    leaf_width_histogram: dict[int, int] = field(default_factory=dict)
    word_adds: int = 0
    recursion_depth: int = 0
    leaf_adders: int = 0

    FIELDS = ("width", "threshold", "leaf_multiplies", "word_adds", "recursion_depth", "leaf_adders", "leaf_widths")

    def row(self) -> dict[str, object]:
        hist = " ".join(f"{w}x{c}" for w, c in sorted(self.leaf_width_histogram.items()))
        return {
            "width": self.width,
            "threshold": self.threshold,
            "leaf_multiplies": self.leaf_multiplies,
            "word_adds": self.word_adds,
            "recursion_depth": self.recursion_depth,
            "leaf_adders": self.leaf_adders,
            "leaf_widths": hist,
        }

    def text(self) -> str:
        return "\n".join(f"{k}: {v}" for k, v in self.row().items())


def urdhva_adder_count(n: int) -> int:
    """Adders in an n x n Urdhva cascade: one per output column 1 .. 2n-2."""
    if not 2 <= n <= MAX_LEAF_WIDTH:
        raise WidthError(f"urdhva adder count defined for 2..{MAX_LEAF_WIDTH}, got {n}")
    return 2 * n - 2


def analyze(width: int, threshold: int = 8) -> CostReport:
    """Walk the recursion shape without multiplying anything."""
    check_threshold(threshold)
    nodes = list(iter_preorder(build_plan(width, threshold)))
    leaves = [p for p in nodes if p.is_leaf]
    internal = len(nodes) - len(leaves)
    hist = Counter(p.width for p in leaves)
    return CostReport(
        width=width,
        threshold=threshold,
        leaf_multiplies=len(leaves),
        leaf_width_histogram=dict(sorted(hist.items())),
        word_adds=internal * ADDS_PER_NODE,
        recursion_depth=max(p.depth for p in nodes),
        leaf_adders=sum(2 * p.width - 2 for p in leaves),
    )


@dataclass(frozen=True)
class SchoolbookComparison:
    width: int
    threshold: int
    karatsuba_leaves: int
    schoolbook_leaves: int
    karatsuba_adds: int
    schoolbook_adds: int

    @property
    def add_overhead(self) -> int:
        return self.karatsuba_adds - self.schoolbook_adds

    @property
    def leaf_ratio(self) -> float:
        return self.karatsuba_leaves / self.schoolbook_leaves

    def text(self) -> str:
        return (
            f"width={self.width} threshold={self.threshold} "
            f"karatsuba_leaves={self.karatsuba_leaves} schoolbook_leaves={self.schoolbook_leaves} "
            f"ratio={self.leaf_ratio:.4f} add_overhead={self.add_overhead:+d}"
        )


def compare_schoolbook(width: int, threshold: int = 8) -> SchoolbookComparison:
    """Karatsuba against the plain ceil(w/t)^2 grid of leaf multiplies.

    Schoolbook adds are the ``k*k - 1`` word adds that accumulate its partial
    products.
    """
    if width < threshold:
        raise WidthError(f"width {width} below threshold {threshold}")
    rep = analyze(width, threshold)
    k = math.ceil(width / threshold)
    return SchoolbookComparison(width, threshold, rep.leaf_multiplies, k * k, rep.word_adds, k * k - 1)


def reports_csv(reports: list[CostReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CostReport.FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()
