"""Dimension-checked matrix, mask, and block-partition types.

A matrix is stored already permuted so that the structurally missing block
occupies the bottom-right corner: the first ``m1`` rows and first ``m2``
columns are the observable strips, and the ``(p1 - m1) x (p2 - m2)`` block
at position (2,2) is never observed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, NonFiniteObservation, StructuredBlockViolation


class BlockId(Enum):
    B11 = "11"
    B12 = "12"
    B21 = "21"
    B22 = "22"


@dataclass(frozen=True)
class BlockPartition:
    """Row/column partition: ``m1`` of ``p1`` rows and ``m2`` of ``p2`` columns are observable."""

    p1: int
    p2: int
    m1: int
    m2: int

    def __post_init__(self):
        if not (1 <= self.m1 <= self.p1):
            raise DimensionMismatch(f"need 1 <= m1 <= p1, got m1={self.m1}, p1={self.p1}")
        if not (1 <= self.m2 <= self.p2):
            raise DimensionMismatch(f"need 1 <= m2 <= p2, got m2={self.m2}, p2={self.p2}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.p1, self.p2)

    @property
    def missing_block_shape(self) -> tuple[int, int]:
        return (self.p1 - self.m1, self.p2 - self.m2)

    def block_slices(self, block: BlockId) -> tuple[slice, slice]:
        rows = slice(0, self.m1) if block in (BlockId.B11, BlockId.B12) else slice(self.m1, self.p1)
        cols = slice(0, self.m2) if block in (BlockId.B11, BlockId.B21) else slice(self.m2, self.p2)
        return rows, cols


@dataclass(frozen=True)
class MaskedMatrix:
    """Observed values plus a binary mask, in permuted block layout.

    Entries with ``mask == 0`` carry no meaning; the (2,2) block is all-masked
    by construction. ``row_order``/``col_order`` optionally record the original
    (pre-permutation) index of each row/column for round-tripping file I/O.
    """

    values: np.ndarray
    mask: np.ndarray
    partition: BlockPartition
    row_order: np.ndarray | None = field(default=None, compare=False)
    col_order: np.ndarray | None = field(default=None, compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def new_masked_matrix(values, mask, partition: BlockPartition,
                      row_order=None, col_order=None) -> MaskedMatrix:
    """Validate and freeze a masked matrix in block layout.

    Rejects shape mismatches, any observed entry inside the (2,2) block, and
    non-finite observed values.
    """
    values = np.ascontiguousarray(values, dtype=float)
    mask = np.ascontiguousarray(mask)
    if values.ndim != 2 or mask.shape != values.shape:
        raise DimensionMismatch(
            f"values shape {values.shape} and mask shape {mask.shape} must match as 2-D grids")
    if values.shape != partition.shape:
        raise DimensionMismatch(
            f"grids have shape {values.shape} but partition says {partition.shape}")
    if not np.isin(mask, (0, 1)).all():
        raise DimensionMismatch("mask must be binary")
    mask = np.ascontiguousarray(mask, dtype=np.int8)
    if mask[partition.m1:, partition.m2:].any():
        raise StructuredBlockViolation(
            "mask marks entries inside the structurally missing (2,2) block as observed")
    observed = mask == 1
    if not np.isfinite(values[observed]).all():
        raise NonFiniteObservation("observed entries must be finite")
    values = values.copy()
    values.setflags(write=False)
    mask = mask.copy()
    mask.setflags(write=False)
    return MaskedMatrix(values, mask, partition, row_order, col_order)


def block_view(m: MaskedMatrix, block: BlockId) -> tuple[np.ndarray, np.ndarray]:
    """Return (values, mask) sub-grids for one of the four blocks."""
    rows, cols = m.partition.block_slices(block)
    return m.values[rows, cols], m.mask[rows, cols]
