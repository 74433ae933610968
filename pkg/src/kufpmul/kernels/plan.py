"""Flatten a Karatsuba recursion tree into arrays the batch kernels can walk.

Nodes are numbered in preorder, so a parent always precedes its children:
a forward sweep pushes operands down, a reverse sweep pulls products up.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..karatsuba import DEFAULT_THRESHOLD, build_plan, iter_preorder

MAX_KERNEL_WIDTH = 64


@dataclass(frozen=True)
class FlatPlan:
    width: int
    threshold: int
    widths: np.ndarray  # int64, operand width per node
    splits: np.ndarray  # int64, split point m (0 at leaves)
    children: np.ndarray  # int64 (nodes, 3): hh, ll, mid; -1 at leaves

    @property
    def size(self) -> int:
        return len(self.widths)

    @property
    def leaf_count(self) -> int:
        return int((self.splits == 0).sum())


@lru_cache(maxsize=None)
def flat_plan(width: int, threshold: int = DEFAULT_THRESHOLD) -> FlatPlan:
    if not 1 <= width <= MAX_KERNEL_WIDTH:
        raise ValueError(f"batch kernels handle widths 1..{MAX_KERNEL_WIDTH}, got {width}")
    nodes = list(iter_preorder(build_plan(width, threshold)))
    index = {id(n): i for i, n in enumerate(nodes)}
    widths = np.array([n.width for n in nodes], dtype=np.int64)
    splits = np.zeros(len(nodes), dtype=np.int64)
    children = np.full((len(nodes), 3), -1, dtype=np.int64)
    for i, n in enumerate(nodes):
        if n.children:
            splits[i] = (n.width + 1) // 2
            children[i] = [index[id(c)] for c in n.children]
    for arr in (widths, splits, children):
        arr.setflags(write=False)
    return FlatPlan(width, threshold, widths, splits, children)
