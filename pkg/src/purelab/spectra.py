"""Value types for diagonal states and polarization arithmetic.

Polarizations are plain floats. A pure state (smallest eigenvalue exactly
zero) has polarization ``math.inf``, which compares above every finite value.
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from purelab.errors import DomainError, ValidationError

SUM_TOL = 1e-12

Polarization = float


def _as_probabilities(values, what="spectrum") -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValidationError(f"{what} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} has non-finite entries")
    if np.any(arr < 0):
        raise ValidationError(f"{what} has negative entries: {arr.min()!r}")
    total = math.fsum(arr)
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"{what} sums to {total!r}, not 1")
    if total != 1.0:
        arr = arr / total
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a density operator, sorted non-increasing."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_probabilities(self.values)
        if np.any(np.diff(arr) > 0):
            raise ValidationError("spectrum is not sorted non-increasing")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def d(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"Spectrum({self.values.tolist()!r})"

    @classmethod
    def uniform(cls, d: int) -> Spectrum:
        return cls(np.full(d, 1.0 / d))


@dataclass(frozen=True)
class QubitSpectrum:
    """Sorted qubit spectrum ``{alpha, 1 - alpha}``.

    ``minor`` is the smaller eigenvalue. It defaults to ``1 - alpha`` but may
    be given explicitly so that nearly pure states keep full relative
    precision in their small eigenvalue.
    """

    alpha: float
    minor: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (0.5 <= alpha <= 1.0):
            raise ValidationError(f"alpha must lie in [0.5, 1], got {alpha!r}")
        minor = 1.0 - alpha if self.minor is None else float(self.minor)
        if minor < 0 or minor > alpha or abs(alpha + minor - 1.0) > SUM_TOL:
            raise ValidationError(f"inconsistent qubit spectrum ({alpha!r}, {minor!r})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "minor", minor)

    @classmethod
    def from_probabilities(cls, p0: float, p1: float) -> QubitSpectrum:
        """Build from an unsorted pair of diagonal probabilities."""
        hi, lo = (p0, p1) if p0 >= p1 else (p1, p0)
        total = hi + lo
        if abs(total - 1.0) > SUM_TOL or lo < 0:
            raise ValidationError(f"not a qubit distribution: ({p0!r}, {p1!r})")
        return cls(hi / total, lo / total)

    def as_spectrum(self) -> Spectrum:
        return Spectrum([self.alpha, self.minor])


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Diagonal of a qubit target tensored with a d-level auxiliary.

    The first ``d`` entries (block 1) belong to the target's ``|0>`` and the
    last ``d`` (block 2) to its ``|1>``. Each block is non-increasing but the
    whole vector generally is not.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_probabilities(self.values, "joint spectrum")
        if arr.size % 2:
            raise ValidationError("joint spectrum must have even length")
        d = arr.size // 2
        if np.any(np.diff(arr[:d]) > 0) or np.any(np.diff(arr[d:]) > 0):
            raise ValidationError("joint spectrum blocks must be non-increasing")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def d(self) -> int:
        return self.values.size // 2

    @property
    def block1(self) -> np.ndarray:
        return self.values[: self.d]

    @property
    def block2(self) -> np.ndarray:
        return self.values[self.d :]

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"JointSpectrum({self.values.tolist()!r})"


def _half_log_ratio(big: float, small: float) -> Polarization:
    if small == 0.0:
        return math.inf
    return 0.5 * math.log(big / small)


def qubit_from_polarization(epsilon: Polarization) -> QubitSpectrum:
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon < 0:
        raise DomainError(f"polarization must be finite and >= 0, got {epsilon!r}")
    # e^eps / (e^eps + e^-eps) without overflow
    alpha = 1.0 / (1.0 + math.exp(-2.0 * epsilon))
    minor = 1.0 / (1.0 + math.exp(2.0 * epsilon))
    return QubitSpectrum(alpha, minor)


def polarization_of_qubit(q: QubitSpectrum) -> Polarization:
    return _half_log_ratio(q.alpha, q.minor)


def generalized_polarization(s: Spectrum) -> Polarization:
    """Half the log ratio of the largest to the smallest eigenvalue."""
    return _half_log_ratio(float(s.values[0]), float(s.values[-1]))


def joint_spectrum(t: QubitSpectrum, a: Spectrum) -> JointSpectrum:
    beta = a.values
    return JointSpectrum(np.concatenate([t.alpha * beta, t.minor * beta]))


def sort_descending(values) -> Spectrum:
    """Stable non-increasing reordering; ties keep their input order."""
    arr = _as_probabilities(values)
    order = np.argsort(-arr, kind="stable")
    return Spectrum(arr[order])


def product_diagonal(qubits) -> np.ndarray:
    """Kronecker product of qubit diagonals ``(alpha, minor)``, first factor leftmost."""
    diag = np.ones(1)
    for q in qubits:
        diag = np.kron(diag, [q.alpha, q.minor])
    return diag


def thermal_spectrum(epsilon: Polarization, k: int) -> Spectrum:
    """Sorted spectrum of ``k`` independent qubits at polarization ``epsilon``."""
    return sort_descending(product_diagonal([qubit_from_polarization(epsilon)] * k))
