"""Randomized checks of the purification theorems, shared by the CLI suites."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from purelab.bounds import CHECK_TOL, theorem1_bound, theorem2_bound
from purelab.denseop import (
    DensityOperator,
    apply_purification,
    eigenvalues_sorted,
    permutation_weights,
    random_unitary,
)
from purelab.purify import brute_force_optimal, optimal_purify
from purelab.spectra import QubitSpectrum, Spectrum, joint_spectrum, sort_descending

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: int
    total: int
    worst: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        return f"{self.name}: {self.passed}/{self.total} {status} (worst={self.worst:.3g})"


def random_sorted_spectrum(d: int, rng: np.random.Generator) -> Spectrum:
    """Uniform draw from the probability simplex, sorted down."""
    return sort_descending(rng.dirichlet(np.ones(d)))


def random_qubit(rng: np.random.Generator) -> QubitSpectrum:
    return QubitSpectrum(rng.uniform(0.5, 1.0))


def alpha_grid(points: int = 21) -> list[float]:
    return np.linspace(0.5, 1.0, points).tolist()


def check_theorem1(samples: int, rng: np.random.Generator) -> CheckResult:
    passed, worst = 0, 0.0
    for _ in range(samples):
        t, b = random_qubit(rng), random_qubit(rng)
        out = optimal_purify(t, b.as_spectrum()).alpha_out
        err = abs(out - theorem1_bound(t, b).bound_alpha)
        worst = max(worst, err)
        passed += err <= IDENTITY_TOL
    return CheckResult("theorem1-exact", passed, samples, worst)


def check_theorem2(dims, samples: int, rng: np.random.Generator) -> CheckResult:
    """Soundness of the general bound plus the tight/non-tight dichotomy."""
    passed = total = 0
    worst = 0.0
    for d in dims:
        for _ in range(samples):
            t, a = random_qubit(rng), random_sorted_spectrum(d, rng)
            out = optimal_purify(t, a).alpha_out
            rep = theorem2_bound(t, a)
            excess = out - rep.bound_alpha
            worst = max(worst, excess)
            if rep.tight:
                good = abs(excess) <= IDENTITY_TOL
            else:
                good = out < rep.bound_alpha
            passed += good
            total += 1
    return CheckResult("theorem2-bound", passed, total, worst)


def check_oracle(d: int, spectra: int, rng: np.random.Generator, alphas=None) -> CheckResult:
    alphas = alpha_grid() if alphas is None else alphas
    passed = total = 0
    worst = 0.0
    for _ in range(spectra):
        a = random_sorted_spectrum(d, rng)
        for alpha in alphas:
            t = QubitSpectrum(alpha)
            dec = optimal_purify(t, a)
            err = max(
                abs(dec.alpha_out - brute_force_optimal(t, a)),
                abs(dec.alpha_out - (alpha * dec.delta2 + dec.delta1)),
            )
            worst = max(worst, err)
            passed += err <= IDENTITY_TOL
            total += 1
    return CheckResult(f"oracle-d{d}", passed, total, worst)


def check_dense_lemma(d: int, samples: int, rng: np.random.Generator) -> CheckResult:
    """Haar channels on diagonal inputs never beat the sort."""
    passed, worst = 0, -np.inf
    for _ in range(samples):
        t, a = random_qubit(rng), random_sorted_spectrum(d, rng)
        joint = DensityOperator.diag(joint_spectrum(t, a).values)
        u = random_unitary(2 * d, rng)
        out = eigenvalues_sorted(apply_purification(joint, u, 2, d)).values[0]
        excess = out - optimal_purify(t, a).alpha_out
        worst = max(worst, excess)
        w = permutation_weights(u, 2, d).weights
        predicted = float(w @ joint_spectrum(t, a).values)
        target = apply_purification(joint, u, 2, d).entries[0, 0].real
        passed += excess <= CHECK_TOL and abs(predicted - target) <= 1e-10
    return CheckResult(f"dense-lemma-d{d}", passed, samples, float(worst))
