import math

import numpy as np
import pytest

from purelab.errors import DomainError, NonConvergenceError, ValidationError
from purelab.hbac import (
    HbacState,
    hbac_limit,
    qubit_marginal,
    recursive_purify,
    reset_q1,
    sort_step,
    target_polarization,
    trace_distance,
)
from purelab.purify import optimal_purify
from purelab.spectra import (
    QubitSpectrum,
    Spectrum,
    polarization_of_qubit,
    product_diagonal,
    qubit_from_polarization,
    sort_descending,
)

ALPHA0 = 0.75
EPS_ALPHA0 = 0.5 * math.log(3)


def state(diag, eps0=EPS_ALPHA0):
    diag = np.asarray(diag, dtype=float)
    return HbacState(int(math.log2(diag.size)), diag, eps0)


def test_reset_fixed_point_and_example():
    s = HbacState.thermal(3, 0.3)
    np.testing.assert_allclose(reset_q1(s).diag, s.diag, atol=1e-12)

    out = reset_q1(state([0.42, 0.18, 0.28, 0.12]))
    np.testing.assert_allclose(out.diag, [0.45, 0.15, 0.30, 0.10], atol=1e-15)
    q1, q2 = qubit_marginal(out, 1), qubit_marginal(out, 2)
    assert (q1.alpha, q2.alpha) == pytest.approx((0.75, 0.6), abs=1e-15)

    mixed = reset_q1(state([0.42, 0.18, 0.28, 0.12], eps0=0.0))
    assert qubit_marginal(mixed, 1).alpha == pytest.approx(0.5, abs=1e-15)


def test_reset_idempotent(rng):
    for n in (2, 3, 5):
        s = HbacState(n, rng.dirichlet(np.ones(2**n)), 0.2)
        once = reset_q1(s)
        np.testing.assert_allclose(reset_q1(once).diag, once.diag, atol=1e-12)
        assert math.fsum(once.diag) == pytest.approx(1, abs=1e-12)


def test_sort_step_examples():
    s = state([0.42, 0.28, 0.18, 0.12])
    np.testing.assert_array_equal(sort_step(s).diag, s.diag)
    out = sort_step(state([0.42, 0.18, 0.28, 0.12]))
    np.testing.assert_allclose(out.diag, [0.42, 0.28, 0.18, 0.12], atol=1e-15)
    assert qubit_marginal(out, 2).alpha == pytest.approx(
        optimal_purify(QubitSpectrum(0.6), Spectrum([0.7, 0.3])).alpha_out, abs=1e-15
    )
    flat = state([0.25] * 4)
    np.testing.assert_array_equal(sort_step(flat).diag, flat.diag)


def test_sort_never_decreases_target(rng):
    for n in (2, 3):
        for _ in range(100):
            qubits = [QubitSpectrum(x) for x in rng.uniform(0.5, 1, n)]
            s = HbacState(n, product_diagonal(qubits), 0.1)
            before = target_polarization(s, n)
            after = target_polarization(sort_step(s), n)
            assert after >= before - 1e-12
            # the target is the leftmost factor, the rest is its auxiliary
            aux = sort_descending(product_diagonal(qubits[1:]))
            expected = optimal_purify(qubits[0], aux).alpha_out
            assert qubit_marginal(sort_step(s), n).alpha == pytest.approx(expected, abs=1e-12)


def test_closed_system_sort_is_idempotent(rng):
    s = HbacState(4, rng.dirichlet(np.ones(16)), 0.1)
    once = sort_step(s)
    assert trace_distance(sort_step(once).diag, once.diag) == 0.0


def test_target_polarization_examples():
    qs = [qubit_from_polarization(e) for e in (0.3, 0.1, 0.2)]  # Q3, Q2, Q1
    s = HbacState(3, product_diagonal(qs), 0.2)
    for j, e in zip((3, 2, 1), (0.3, 0.1, 0.2)):
        assert target_polarization(s, j) == pytest.approx(e, abs=1e-12)
    sorted_pair = sort_step(HbacState.thermal(2, 0.25))
    assert target_polarization(sorted_pair, 2) == pytest.approx(0.25, abs=1e-12)
    flat = HbacState(3, np.full(8, 1 / 8), 0.2)
    assert all(target_polarization(flat, j) == 0.0 for j in (1, 2, 3))
    with pytest.raises(DomainError):
        target_polarization(flat, 4)


def test_pure_marginal_is_infinite():
    s = HbacState(2, [0.5, 0.5, 0.0, 0.0], 0.1)
    assert target_polarization(s, 2) == math.inf


def test_hbac_limit():
    assert hbac_limit(2, 0.3) == 0.3
    assert hbac_limit(3, 0.2) == pytest.approx(0.4)
    assert hbac_limit(5, 0.1) == pytest.approx(0.8)
    with pytest.raises(DomainError):
        hbac_limit(1, 0.1)


def test_recursive_purify_base_case():
    s = recursive_purify(2, 0.37)
    assert target_polarization(s, 2) == pytest.approx(0.37, abs=1e-12)
    assert target_polarization(s, 1) == pytest.approx(0.37, abs=1e-12)


def _scalar_oracle(aux_diag, alpha0, delta):
    """Direct iteration of the target population with a fixed auxiliary."""
    aux = sorted(aux_diag.tolist(), reverse=True)
    d = len(aux)
    alpha, out = alpha0, []
    prev = None
    while True:
        joint = sorted([alpha * b for b in aux] + [(1 - alpha) * b for b in aux], reverse=True)
        alpha = math.fsum(joint[:d])
        out.append(alpha)
        if prev is not None and abs(alpha - prev) < delta:
            return out
        prev = alpha


def test_recursive_purify_three_qubits_matches_scalar_oracle():
    eps0, delta = 0.2, 1e-6
    s = recursive_purify(3, eps0, delta)
    eps = [p.eps_n for p in s.trajectory]
    assert 0.39 < eps[-1] <= 0.4
    assert eps[-1] == pytest.approx(0.4, abs=1e-4)
    assert all(b >= a for a, b in zip(eps, eps[1:]))
    assert max(eps) <= hbac_limit(3, eps0) + 1e-9
    p0 = qubit_from_polarization(eps0)
    oracle = _scalar_oracle(product_diagonal([p0, p0]), p0.alpha, 1e-13)
    oracle_eps = [polarization_of_qubit(QubitSpectrum(a)) for a in oracle]
    np.testing.assert_allclose(eps, oracle_eps[: len(eps)], atol=1e-12)


def test_recursive_purify_zero_polarization():
    s = recursive_purify(3, 0.0, 1e-6)
    np.testing.assert_allclose(s.diag, np.full(8, 1 / 8), atol=1e-15)
    assert target_polarization(s, 3) == 0.0


@pytest.mark.parametrize("n, eps0", [(4, 0.1), (5, 0.05), (6, 0.02)])
def test_recursive_purify_ceiling_and_monotone(n, eps0):
    s = recursive_purify(n, eps0, 1e-7)
    eps = [p.eps_n for p in s.trajectory]
    limit = hbac_limit(n, eps0)
    assert max(eps) <= limit + 1e-9
    assert all(b >= a for a, b in zip(eps, eps[1:]))
    assert eps[-1] > 0.95 * limit
    steps = [p.step_distance for p in s.trajectory]
    assert steps[-1] < 1e-7
    tail = steps[len(steps) // 2 :]
    assert all(b <= a for a, b in zip(tail, tail[1:]))


def test_recursive_purify_nonconvergence_carries_trajectory():
    with pytest.raises(NonConvergenceError) as info:
        recursive_purify(4, 0.1, 1e-12, max_iterations=3)
    assert len(info.value.trajectory) == 3


def test_recursive_purify_argument_checks():
    with pytest.raises(DomainError):
        recursive_purify(1, 0.1)
    with pytest.raises(DomainError):
        recursive_purify(3, -0.1)
    with pytest.raises(DomainError):
        recursive_purify(3, 0.1, delta=0.0)


def test_state_validation():
    with pytest.raises(ValidationError):
        HbacState(2, [0.5, 0.5], 0.1)
    with pytest.raises(ValidationError):
        HbacState(1, [1.2, -0.2], 0.1)
