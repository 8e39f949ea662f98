"""Open-system purification with a single reset qubit.

States are n-qubit diagonals of length ``2**n`` in the basis with ``Q_n``
as the leftmost (most significant) factor and the reset qubit ``Q_1`` as the
rightmost. Sorting and resetting both keep the state diagonal, so nothing
here ever builds a full matrix.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from purelab.errors import DomainError, NonConvergenceError, ValidationError
from purelab.spectra import (
    SUM_TOL,
    Polarization,
    QubitSpectrum,
    polarization_of_qubit,
    product_diagonal,
    qubit_from_polarization,
)

log = logging.getLogger(__name__)

MAX_QUBITS = 12
DEFAULT_DELTA = 1e-8
DEFAULT_MAX_ITERATIONS = 1_000_000


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    eps_n: Polarization
    step_distance: float


@dataclass(frozen=True, eq=False)
class HbacState:
    n: int
    diag: np.ndarray
    eps0: Polarization
    iterations: int = 0
    trajectory: tuple[TrajectoryPoint, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"need at least one qubit, got n={self.n}")
        arr = np.array(self.diag, dtype=float).reshape(-1)
        if arr.size != 2**self.n:
            raise ValidationError(f"diagonal has {arr.size} entries, expected {2**self.n}")
        if np.any(arr < 0):
            raise ValidationError("diagonal has negative entries")
        total = math.fsum(arr)
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"diagonal sums to {total!r}")
        arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "diag", arr)

    @classmethod
    def thermal(cls, n: int, eps0: Polarization) -> HbacState:
        """Every qubit at the reset polarization."""
        return cls(n, product_diagonal([qubit_from_polarization(eps0)] * n), eps0)


def trace_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * math.fsum(np.abs(np.asarray(p) - np.asarray(q)))


def qubit_marginal(s: HbacState, j: int) -> QubitSpectrum:
    if not 1 <= j <= s.n:
        raise DomainError(f"qubit index {j} outside 1..{s.n}")
    axis = s.n - j
    probs = s.diag.reshape((2,) * s.n).sum(axis=tuple(k for k in range(s.n) if k != axis))
    return QubitSpectrum.from_probabilities(float(probs[0]), float(probs[1]))


def target_polarization(s: HbacState, j: int) -> Polarization:
    return polarization_of_qubit(qubit_marginal(s, j))


def reset_q1(s: HbacState) -> HbacState:
    """Rethermalize ``Q_1`` to ``eps0``, discarding its correlations with the rest."""
    bath = qubit_from_polarization(s.eps0)
    rest = s.diag.reshape(-1, 2).sum(axis=1)
    return replace(s, diag=np.kron(rest, [bath.alpha, bath.minor]))


def sort_step(s: HbacState) -> HbacState:
    return replace(s, diag=np.sort(s.diag, kind="stable")[::-1].copy())


def hbac_limit(n: int, eps0: Polarization) -> Polarization:
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    return 2 ** (n - 2) * eps0


def _split_top(diag: np.ndarray) -> np.ndarray:
    half = diag.size // 2
    return np.array([math.fsum(diag[:half]), math.fsum(diag[half:])])


def _validate_args(n: int, eps0: Polarization, delta: float) -> None:
    if not 2 <= n <= MAX_QUBITS:
        raise DomainError(f"n must lie in 2..{MAX_QUBITS}, got {n}")
    if not math.isfinite(eps0) or eps0 < 0:
        raise DomainError(f"eps0 must be finite and >= 0, got {eps0!r}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta!r}")


@functools.lru_cache(maxsize=None)
def _purify(n: int, eps0: float, delta: float, max_iterations: int) -> HbacState:
    # Memoized: the routine is deterministic, so re-purifying an auxiliary of
    # the same size always lands on the same state.
    if n == 2:
        # Swap the pair if needed so Q_2 gets the better qubit, then reset Q_1.
        base = reset_q1(sort_step(HbacState.thermal(2, eps0)))
        point = TrajectoryPoint(0, target_polarization(base, 2), 0.0)
        return replace(base, trajectory=(point,))

    aux = _purify(n - 1, eps0, delta, max_iterations)
    state = HbacState.thermal(n, eps0)
    trajectory = []
    for it in range(1, max_iterations + 1):
        compressed = sort_step(state)
        new_diag = np.kron(_split_top(compressed.diag), aux.diag)
        dist = trace_distance(new_diag, state.diag)
        state = replace(state, diag=new_diag, iterations=it)
        trajectory.append(TrajectoryPoint(it, target_polarization(state, n), dist))
        if dist < delta:
            log.debug("n=%d converged after %d iterations", n, it)
            return replace(state, trajectory=tuple(trajectory))
    raise NonConvergenceError(
        f"n={n}, eps0={eps0} did not converge to delta={delta} in {max_iterations} iterations",
        trajectory,
    )


def recursive_purify(
    n: int,
    eps0: Polarization,
    delta: float = DEFAULT_DELTA,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> HbacState:
    """Recursively purify ``Q_n`` with ``Q_1..Q_{n-1}`` as auxiliary.

    Each outer iteration sorts the joint diagonal, keeps the ``Q_n`` marginal
    and pairs it with a freshly purified ``(n-1)``-qubit auxiliary. The loop
    stops once successive states are within ``delta`` in trace distance.
    ``trajectory`` on the result holds ``eps_n`` after every iteration.
    """
    _validate_args(n, eps0, delta)
    if max_iterations < 1:
        raise DomainError("max_iterations must be >= 1")
    return _purify(n, float(eps0), float(delta), int(max_iterations))
