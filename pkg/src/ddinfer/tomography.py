"""Pauli-eigenstate experiment: simulation and linear-inversion tomography.

Probe ``k`` prepares the eigenstates of ``sigma_k`` (``i = 1`` for +1,
``i = 2`` for -1); measurement ``l`` projects onto the eigenstates of
``sigma_l`` (``j = 1`` for +1).  Each ``(k, l)`` pair gives one binary
correlation whose ``(x, y)`` coordinates are ``(b_l, A_lk)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .correlation import Correlation, from_counts
from .errors import MissingPair, ValidationError
from .qubit_model import Canonicalization, QubitChannel, as_qubit_channel, canonicalize, require_cp

AXES = (1, 2, 3)
PAIRS = tuple((k, l) for k in AXES for l in AXES)


@dataclass(frozen=True)
class ExperimentRecord:
    """Counts ``(n11, n21, n12, n22)`` per (probe axis, measurement axis).

    ``shots == 0`` marks the infinite-shot mode where the entries are exact
    probabilities.
    """

    counts: dict
    shots: int | None = None
    seed: int | None = None
    source: str = "simulated"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for key, row in self.counts.items():
            if len(row) != 4 or any(c < 0 for c in row):
                raise ValidationError(f"bad counts for pair {key}: {row}")
            if key[0] not in AXES or key[1] not in AXES:
                raise ValidationError(f"axes must be in 1..3, got {key}")

    @property
    def exact(self) -> bool:
        return self.shots == 0

    def correlation(self, k: int, l: int) -> Correlation:
        try:
            row = self.counts[(k, l)]
        except KeyError:
            raise MissingPair(f"no data for probe axis {k}, measurement axis {l}") from None
        p = from_counts(*row)
        if self.exact:
            return Correlation(p.p11, p.p21, p.p12, p.p22)
        return p

    def correlations(self) -> dict:
        return {key: self.correlation(*key) for key in sorted(self.counts)}


def born_probabilities(ch, k: int, l: int) -> tuple[float, float]:
    """``(p(1|1), p(1|2))`` for probe axis ``k`` and measurement axis ``l``."""
    ch = as_qubit_channel(ch)
    a, b = ch.A[l - 1, k - 1], ch.b[l - 1]
    p1 = min(max((1 + a + b) / 2, 0.0), 1.0)
    p2 = min(max((1 - a + b) / 2, 0.0), 1.0)
    return p1, p2


def _binomial(shots, p, seed, k, l, i):
    # one independent counter-based stream per setting, so the draw does
    # not depend on evaluation order
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, k, l, i])))
    u = 1.0 - gen.random()
    return int(binom.ppf(u, shots, p))


def simulate_experiment(ch, shots: int, seed: int = 0) -> ExperimentRecord:
    if shots < 0:
        raise ValidationError("shots must be >= 0")
    if seed < 0:
        raise ValidationError("seed must be >= 0")
    require_cp(as_qubit_channel(ch))
    counts = {}
    for k, l in PAIRS:
        p1, p2 = born_probabilities(ch, k, l)
        if shots == 0:
            counts[(k, l)] = (p1, 1 - p1, p2, 1 - p2)
        else:
            n1 = _binomial(shots, p1, seed, k, l, 1)
            n2 = _binomial(shots, p2, seed, k, l, 2)
            counts[(k, l)] = (n1, shots - n1, n2, shots - n2)
    return ExperimentRecord(counts, shots=shots, seed=seed, source="simulated")


def linear_inversion(rec: ExperimentRecord) -> QubitChannel:
    """``A_lk = p(1|1) - p(1|2)``; ``b_l`` averaged over the three probe axes."""
    A = np.zeros((3, 3))
    b_terms = np.zeros((3, 3))
    for k, l in PAIRS:
        p = rec.correlation(k, l)
        A[l - 1, k - 1] = p.p11 - p.p12
        b_terms[l - 1, k - 1] = p.p11 + p.p12 - 1
    return QubitChannel(A, b_terms.mean(axis=1))


def tomographic_reconstruction(rec: ExperimentRecord, c3_mode: str = "zero") -> Canonicalization:
    """Canonical form of the linearly inverted channel, with the dropped transverse residual."""
    return canonicalize(linear_inversion(rec), c3_mode=c3_mode)
