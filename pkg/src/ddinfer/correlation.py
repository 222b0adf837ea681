"""Binary conditional distributions ``p[j|i]`` and their ``(x, y)`` coordinates.

The matrix ``[[p(1|1), p(2|1)], [p(1|2), p(2|2)]]`` (rows = inputs) is written
as ``U + x X + y Y`` with

    U = [[1, 1], [1, 1]] / 2
    X = [[1, -1], [1, -1]] / 2
    Y = [[1, -1], [-1, 1]] / 2

so ``(0, 0)`` is the uniform distribution, ``(0, 1)`` perfect discrimination
and ``(1, 0)`` the constant output 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import EmptyRow, OutOfDiamond, ValidationError

ROW_TOL = 1e-12
CLAMP_TOL = 1e-9

U_MAT = np.array([[1.0, 1.0], [1.0, 1.0]]) / 2
X_MAT = np.array([[1.0, -1.0], [1.0, -1.0]]) / 2
Y_MAT = np.array([[1.0, -1.0], [-1.0, 1.0]]) / 2


class XYPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Correlation:
    """``p(j|i)`` for two inputs and two outputs.

    ``n1`` and ``n2`` are the number of trials behind each row when the
    distribution comes from counts (``None`` for exact probabilities).
    """

    p11: float
    p21: float
    p12: float
    p22: float
    n1: float | None = field(default=None, compare=False)
    n2: float | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = (self.p11, self.p21, self.p12, self.p22)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("probabilities must be finite")
        if min(vals) < -ROW_TOL or max(vals) > 1 + ROW_TOL:
            raise ValidationError(f"probabilities outside [0, 1]: {vals}")
        if abs(self.p11 + self.p21 - 1) > ROW_TOL or abs(self.p12 + self.p22 - 1) > ROW_TOL:
            raise ValidationError(f"rows must sum to 1: {vals}")

    def matrix(self) -> np.ndarray:
        return np.array([[self.p11, self.p21], [self.p12, self.p22]])

    def standard_errors(self) -> tuple[float, float] | None:
        """Binomial standard errors of ``(x, y)``; equal for both coordinates."""
        if self.n1 is None or self.n2 is None:
            return None
        var = self.p11 * (1 - self.p11) / self.n1 + self.p12 * (1 - self.p12) / self.n2
        se = math.sqrt(var)
        return se, se


def to_xy(p: Correlation) -> XYPoint:
    m = p.matrix()
    return XYPoint(float(np.sum(X_MAT * m)), float(np.sum(Y_MAT * m)))


def in_diamond(x: float, y: float, tol: float = 0.0) -> bool:
    return abs(x + y) <= 1 + tol and abs(x - y) <= 1 + tol


def clamp_to_diamond(x: float, y: float, tol: float = CLAMP_TOL) -> XYPoint:
    """Pull points within ``tol`` of the diamond back onto it; reject the rest."""
    if not in_diamond(x, y, tol):
        raise OutOfDiamond(f"({x}, {y}) lies outside |x+y| <= 1, |x-y| <= 1")
    u = min(max(x + y, -1.0), 1.0)
    w = min(max(x - y, -1.0), 1.0)
    return XYPoint((u + w) / 2, (u - w) / 2)


def from_xy(pt) -> Correlation:
    x, y = clamp_to_diamond(*pt)
    m = U_MAT + x * X_MAT + y * Y_MAT
    m = np.clip(m, 0.0, 1.0)
    return Correlation(m[0, 0], 1 - m[0, 0], m[1, 0], 1 - m[1, 0])


def symmetrize(pt) -> XYPoint:
    """Fold into the positive quadrant (relabelling inputs and/or outputs)."""
    return XYPoint(abs(pt[0]), abs(pt[1]))


def from_counts(n11, n21, n12, n22) -> Correlation:
    """Row-normalized frequencies; no smoothing."""
    counts = (n11, n21, n12, n22)
    if any(c < 0 for c in counts):
        raise ValidationError(f"counts must be non-negative: {counts}")
    r1, r2 = n11 + n21, n12 + n22
    if r1 <= 0 or r2 <= 0:
        raise EmptyRow(f"each input needs at least one trial: {counts}")
    p11, p12 = n11 / r1, n12 / r2
    return Correlation(p11, 1 - p11, p12, 1 - p12, n1=r1, n2=r2)


def relabel(p: Correlation, swap_inputs: bool = False, swap_outputs: bool = False) -> Correlation:
    m = p.matrix()
    if swap_inputs:
        m = m[::-1, :]
    if swap_outputs:
        m = m[:, ::-1]
    return Correlation(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
