"""Qubit states and channels in Bloch form.

A qubit channel acts on Bloch vectors as ``v -> A v + b``.  Dihedrally
covariant channels are reduced, up to input/output (anti-)unitaries, to four
numbers ``(d1, d2, d3, c3)``: the semi-axes of the image ellipsoid and the
length of its translation along the third axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotCompletelyPositive, OutOfRange, ValidationError

STATE_TOL = 1e-12
CP_TOL = 1e-9
NULL_TOL = 1e-9

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)


def bloch_vector(v, tol: float = STATE_TOL) -> np.ndarray:
    """Validate and return ``v`` as a length-3 float array inside the Bloch ball."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValidationError(f"Bloch vector must be 3 finite reals, got {v!r}")
    if np.linalg.norm(v) > 1 + tol:
        raise ValidationError(f"Bloch vector {v} lies outside the unit ball")
    return v


def density_matrix(v) -> np.ndarray:
    """``(I + v . sigma) / 2``."""
    v = np.asarray(v, dtype=float)
    return 0.5 * (IDENTITY2 + np.einsum("k,kij->ij", v, PAULI))


@dataclass(frozen=True, eq=False)
class QubitChannel:
    """Affine Bloch map ``v -> A v + b``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.shape != (3, 3) or b.shape != (3,):
            raise ValidationError("channel needs a 3x3 matrix A and a 3-vector b")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValidationError("channel entries must be finite")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def __repr__(self):
        return f"QubitChannel(A={self.A.tolist()}, b={self.b.tolist()})"


@dataclass(frozen=True)
class CanonicalChannel:
    """Normal form ``(d1, d2, d3, c3)`` of a dihedrally covariant channel.

    ``0 <= d1 <= d2`` and ``d3, c3 >= 0``.  Complete positivity is not
    enforced here; use :func:`is_completely_positive`.
    """

    d1: float
    d2: float
    d3: float
    c3: float

    def __post_init__(self):
        vals = (self.d1, self.d2, self.d3, self.c3)
        for name, val in zip(("d1", "d2", "d3", "c3"), vals):
            if not math.isfinite(val):
                raise ValidationError(f"{name} must be finite")
            if val < -STATE_TOL or val > 1 + STATE_TOL:
                raise OutOfRange(f"{name}={val} outside [0, 1]")
            object.__setattr__(self, name, float(min(max(val, 0.0), 1.0)))
        if self.d1 > self.d2 + STATE_TOL:
            raise ValidationError(f"normal form needs d1 <= d2, got {self.d1} > {self.d2}")

    @property
    def params(self) -> tuple[float, float, float]:
        """The three parameters that determine the compatible set."""
        return self.d2, self.d3, self.c3

    def to_qubit_channel(self) -> QubitChannel:
        return QubitChannel(np.diag([self.d1, self.d2, self.d3]), [0.0, 0.0, self.c3])


IDENTITY = CanonicalChannel(1.0, 1.0, 1.0, 0.0)
DEPOLARIZER = CanonicalChannel(0.0, 0.0, 0.0, 0.0)


def as_qubit_channel(ch) -> QubitChannel:
    if isinstance(ch, CanonicalChannel):
        return ch.to_qubit_channel()
    if isinstance(ch, QubitChannel):
        return ch
    raise TypeError(f"expected a channel, got {type(ch).__name__}")


def channel_action(ch, M: np.ndarray) -> np.ndarray:
    """Apply the channel to an arbitrary 2x2 operator (linear extension)."""
    ch = as_qubit_channel(ch)
    M = np.asarray(M, dtype=complex)
    alpha0 = np.trace(M) / 2
    alpha = np.array([np.trace(P @ M) / 2 for P in PAULI])
    # C(I) = I + b.sigma, C(sigma_k) = sum_l A_lk sigma_l
    out_vec = alpha0 * ch.b + ch.A @ alpha
    return alpha0 * IDENTITY2 + np.einsum("k,kij->ij", out_vec, PAULI)


def choi(ch) -> np.ndarray:
    """4x4 Choi operator ``2 sum_ij |i><j| (x) C(|i><j|)``, input factor first.

    The factor 2 makes the trace equal to 4 and the partial trace over the
    output equal to ``2 I``; for a canonical channel this is the explicit
    matrix with diagonal ``1 +- c3 +- d3``.
    """
    R = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2), dtype=complex)
            E[i, j] = 1.0
            R += 2 * np.kron(E, channel_action(ch, E))
    return R


def cp_margins(ch: CanonicalChannel) -> tuple[float, float]:
    """Left-hand sides of the two closed-form CP inequalities (both must be <= 1)."""
    d1, d2, d3, c3 = ch.d1, ch.d2, ch.d3, ch.c3
    first = d3 + math.hypot(d1 - d2, c3)
    second = -d3 + math.hypot(d1 + d2, c3)
    return first, second


def is_completely_positive(ch, tol: float = CP_TOL) -> bool:
    """Closed-form test for canonical channels, Choi spectrum otherwise."""
    if isinstance(ch, CanonicalChannel):
        return max(cp_margins(ch)) <= 1 + tol
    return choi_min_eigenvalue(ch) >= -tol


def choi_min_eigenvalue(ch) -> float:
    return float(np.linalg.eigvalsh(choi(ch)).min())


def d1_feasible_interval(d2: float, d3: float, c3: float) -> tuple[float, float] | None:
    """Values of d1 completing ``(d2, d3, c3)`` to a CP channel in normal form.

    Returns ``(lo, hi)`` or ``None`` when no completion exists.
    """
    if min(d2, d3, c3) < 0:
        raise ValidationError("d2, d3, c3 must be non-negative")
    s2 = (1 - d3) ** 2 - c3**2
    t2 = (1 + d3) ** 2 - c3**2
    if s2 < 0 or d3 > 1:
        return None
    lo = max(0.0, d2 - math.sqrt(s2))
    hi = min(d2, math.sqrt(t2) - d2)
    if lo > hi:
        return None
    return lo, hi


def cp_completable(d2: float, d3: float, c3: float) -> bool:
    return d1_feasible_interval(d2, d3, c3) is not None


def apply(ch, v) -> np.ndarray:
    """Image ``A v + b`` of a Bloch vector."""
    ch = as_qubit_channel(ch)
    v = bloch_vector(v)
    return ch.A @ v + ch.b


class Canonicalization(NamedTuple):
    channel: CanonicalChannel
    U: np.ndarray
    V: np.ndarray
    residual: float

    @property
    def degenerate(self) -> bool:
        """True when the choice of third axis was arbitrary (no translation, equal axes)."""
        ch = self.channel
        return ch.c3 <= NULL_TOL and max(ch.d1, ch.d2, ch.d3) - min(ch.d1, ch.d2, ch.d3) <= NULL_TOL


def _align_clusters(s, V, U, b, null_tol):
    # Inside a block of equal singular values the SVD basis is arbitrary;
    # rotate it so the translation has a single component there.
    n = len(s)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(s[stop] - s[start]) <= null_tol:
            stop += 1
        idx = list(range(start, stop))
        if len(idx) > 1:
            cg = V[:, idx].T @ b
            norm = np.linalg.norm(cg)
            if norm > null_tol:
                basis = np.column_stack([cg / norm, np.eye(len(idx))])
                Q, _ = np.linalg.qr(basis)
                Q = Q[:, : len(idx)]
                if Q[:, 0] @ cg < 0:
                    Q[:, 0] = -Q[:, 0]
                V[:, idx] = V[:, idx] @ Q
                U[:, idx] = U[:, idx] @ Q
        start = stop
    return V, U


def canonicalize(ch: QubitChannel, null_tol: float = NULL_TOL, c3_mode: str = "zero") -> Canonicalization:
    """Reduce a channel to its dihedral normal form.

    Finds orthogonal ``U, V`` with ``V.T @ A @ U`` diagonal, moves the axis
    carrying the largest component of ``V.T @ b`` to third place and sorts the
    other two so ``d2 >= d1``.  The transverse components ``c1, c2`` are
    dropped and their norm returned as ``residual``.  With
    ``c3_mode="norm"`` the translation length ``|b|`` is kept instead of the
    third component.
    """
    if c3_mode not in ("zero", "norm"):
        raise ValidationError(f"unknown c3_mode {c3_mode!r}")
    ch = as_qubit_channel(ch)
    W, s, Xt = np.linalg.svd(ch.A)
    V, U = W.copy(), Xt.T.copy()
    V, U = _align_clusters(s, V, U, ch.b, null_tol)
    c = V.T @ ch.b

    if np.linalg.norm(c) <= null_tol:
        third = int(np.argmax(s))
    else:
        third = int(np.argmax(np.abs(c)))
    rest = sorted((i for i in range(3) if i != third), key=lambda i: s[i])
    order = rest + [third]
    V, U, s, c = V[:, order], U[:, order], s[order], c[order]
    if c[2] < 0:
        V[:, 2] = -V[:, 2]
        U[:, 2] = -U[:, 2]
        c[2] = -c[2]

    residual = float(math.hypot(c[0], c[1]))
    c3 = float(np.linalg.norm(ch.b)) if c3_mode == "norm" else float(c[2])
    canon = CanonicalChannel(float(s[0]), float(s[1]), float(s[2]), min(c3, 1.0))
    return Canonicalization(canon, U, V, residual)


def amplitude_damping(gamma: float) -> CanonicalChannel:
    if not 0 <= gamma <= 1:
        raise OutOfRange(f"damping parameter {gamma} outside [0, 1]")
    r = math.sqrt(1 - gamma)
    return CanonicalChannel(r, r, 1 - gamma, gamma)


def pauli_channel(p) -> CanonicalChannel:
    """Canonical form of ``rho -> sum_k p_k sigma_k rho sigma_k`` (``p`` over I, X, Y, Z)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (4,) or np.any(p < -STATE_TOL) or abs(p.sum() - 1) > 1e-9:
        raise OutOfRange(f"Pauli weights must be 4 probabilities summing to 1, got {p}")
    p0, p1, p2, p3 = p
    A = np.diag([p0 + p1 - p2 - p3, p0 - p1 + p2 - p3, p0 - p1 - p2 + p3])
    return canonicalize(QubitChannel(A, np.zeros(3))).channel


def require_cp(ch, tol: float = CP_TOL):
    if not is_completely_positive(ch, tol):
        raise NotCompletelyPositive(f"{ch!r} is not completely positive")
