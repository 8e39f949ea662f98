"""Optimal diagonal purification of a qubit target by a d-level auxiliary.

The optimal channel sorts the joint diagonal so the target's ``|0>`` block
holds the ``d`` largest entries. Compared with the unsorted joint spectrum,
the last ``m`` entries of block 1 are exchanged with the first ``m`` entries
of block 2 (the "crossings").
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from purelab.errors import DomainError, ValidationError
from purelab.spectra import (
    SUM_TOL,
    JointSpectrum,
    QubitSpectrum,
    Spectrum,
    joint_spectrum,
)

BRUTE_FORCE_MAX_LEN = 10
MIXER_PERMUTATION = (0, 3, 1, 2)


@dataclass(frozen=True)
class CrossingDecomposition:
    m: int
    delta1: float
    delta2: float
    delta3: float
    alpha_out: float

    def __post_init__(self):
        if self.m < 0:
            raise ValidationError(f"negative crossing count {self.m}")
        if abs(self.delta1 + self.delta2 + self.delta3 - 1.0) > SUM_TOL:
            raise ValidationError("crossing block sums do not add to 1")
        if not (0.5 - SUM_TOL <= self.alpha_out <= 1.0 + SUM_TOL):
            raise ValidationError(f"alpha_out {self.alpha_out!r} outside [0.5, 1]")


def _merge_top(joint: JointSpectrum) -> int:
    """Number of block-2 entries among the d largest joint entries.

    Merges the two sorted blocks, preferring block 1 on ties.
    """
    b1, b2 = joint.block1, joint.block2
    i = j = 0
    for _ in range(joint.d):
        if b1[i] >= b2[j]:
            i += 1
        else:
            j += 1
    return j


def crossing_count(t: QubitSpectrum, a: Spectrum) -> int:
    return _merge_top(joint_spectrum(t, a))


def optimal_purify(t: QubitSpectrum, a: Spectrum) -> CrossingDecomposition:
    beta = a.values
    d = beta.size
    joint = joint_spectrum(t, a)
    m = _merge_top(joint)
    alpha_out = math.fsum(np.concatenate([joint.block1[: d - m], joint.block2[:m]]))
    # m <= d/2 whenever ties favour block 1, so the three groups are disjoint.
    delta1 = math.fsum(beta[:m])
    delta2 = math.fsum(beta[m : d - m])
    delta3 = math.fsum(beta[d - m :])
    return CrossingDecomposition(m, delta1, delta2, delta3, alpha_out)


def brute_force_optimal(t: QubitSpectrum, a: Spectrum, method: str = "auto") -> float:
    """Best target ``|0>`` population over every reordering of the joint spectrum.

    ``method="permutations"`` walks all ``(2d)!`` orderings. ``"subsets"``
    walks the ``C(2d, d)`` choices of which entries land in block 1; the
    objective depends on nothing else, so the two give the same maximum.
    ``"auto"`` uses full permutations up to ``2d = 6``.
    """
    values = joint_spectrum(t, a).values.tolist()
    n = len(values)
    if n > BRUTE_FORCE_MAX_LEN:
        raise DomainError(f"brute force limited to 2d <= {BRUTE_FORCE_MAX_LEN}, got {n}")
    d = n // 2
    if method == "auto":
        method = "permutations" if n <= 6 else "subsets"
    if method == "permutations":
        candidates = (p[:d] for p in itertools.permutations(values))
    elif method == "subsets":
        candidates = itertools.combinations(values, d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return max(math.fsum(c) for c in candidates)


def mixer_channel(t: QubitSpectrum, b: QubitSpectrum) -> float:
    """Target population under ``{ab, a'b', ab', a'b}`` with primes as complements."""
    return math.fsum([t.alpha * b.alpha, t.minor * b.minor])


def sort_permutation(joint: JointSpectrum) -> np.ndarray:
    return np.argsort(-joint.values, kind="stable")


def apply_permutation(joint: JointSpectrum, perm) -> tuple[np.ndarray, float]:
    """Reorder so entry ``k`` becomes ``joint.values[perm[k]]``."""
    perm = np.asarray(perm, dtype=int).reshape(-1)
    n = len(joint)
    if perm.size != n or sorted(perm.tolist()) != list(range(n)):
        raise ValidationError(f"not a permutation of {n} indices: {perm.tolist()}")
    new = joint.values[perm]
    return new, math.fsum(new[: joint.d])
