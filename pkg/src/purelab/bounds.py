"""Closed-form purity bounds for unitary purification of a qubit target."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from purelab.errors import DomainError
from purelab.purify import optimal_purify
from purelab.spectra import (
    Polarization,
    QubitSpectrum,
    Spectrum,
    generalized_polarization,
    polarization_of_qubit,
)

CHECK_TOL = 1e-9
IDENTITY_TOL = 1e-12


class Branch(str, enum.Enum):
    TARGET_DOMINATES = "target_dominates"
    AUXILIARY_DOMINATES = "auxiliary_dominates"


@dataclass(frozen=True)
class BoundReport:
    bound_alpha: float
    bound_polarization: Polarization
    tight: bool
    binding_branch: Branch


def theorem1_bound(t: QubitSpectrum, a: QubitSpectrum) -> BoundReport:
    """Two-qubit bound ``max(alpha, beta)``; always reached by identity or swap."""
    if t.alpha >= a.alpha:
        return BoundReport(t.alpha, polarization_of_qubit(t), True, Branch.TARGET_DOMINATES)
    return BoundReport(a.alpha, polarization_of_qubit(a), True, Branch.AUXILIARY_DOMINATES)


def auxiliary_threshold(a: Spectrum) -> QubitSpectrum:
    """The qubit spectrum ``{b1/(b1+bd), bd/(b1+bd)}`` that the auxiliary can imprint."""
    b1, bd = float(a.values[0]), float(a.values[-1])
    total = b1 + bd
    return QubitSpectrum(b1 / total, bd / total)


def theorem2_bound(t: QubitSpectrum, a: Spectrum) -> BoundReport:
    """General bound ``max(alpha, b1/(b1+bd))`` for a d-level auxiliary.

    When the target already reaches the auxiliary threshold the sort leaves
    it untouched and the bound is met. Below the threshold the optimal
    channel falls short except when the crossings use up the whole
    auxiliary (``delta2 == 0``, e.g. any qubit auxiliary, where the swap
    reaches the threshold exactly); ``tight`` reports which case holds.
    """
    thr = auxiliary_threshold(a)
    eps_t = polarization_of_qubit(t)
    eps_a = generalized_polarization(a)
    bound_pol = max(eps_t, eps_a)
    if t.alpha >= thr.alpha:
        return BoundReport(t.alpha, bound_pol, True, Branch.TARGET_DOMINATES)
    reached = abs(optimal_purify(t, a).alpha_out - thr.alpha) <= IDENTITY_TOL
    return BoundReport(thr.alpha, bound_pol, reached, Branch.AUXILIARY_DOMINATES)


def distillation_bounds(n: int, eps: Polarization) -> list[Polarization]:
    """Closed-system bounds ``(j - 1) * eps`` for qubits ``j = 2..n``."""
    if n < 2:
        raise DomainError(f"need n >= 2 qubits, got {n}")
    if not math.isfinite(eps) or eps < 0:
        raise DomainError(f"polarization must be finite and >= 0, got {eps!r}")
    return [(j - 1) * eps for j in range(2, n + 1)]


def check_no_go(alpha_out: float, report: BoundReport) -> bool:
    return alpha_out <= report.bound_alpha + CHECK_TOL
