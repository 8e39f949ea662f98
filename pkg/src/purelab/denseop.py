"""Dense complex operators for simulating arbitrary purification unitaries.

Joint operators always put the target as the leftmost tensor factor, so the
basis index ``i < d`` is ``|0>_T |i>_A`` and ``i >= d`` is ``|1>_T |i-d>_A``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from purelab.errors import DomainError, ValidationError
from purelab.spectra import Spectrum

OP_TOL = 1e-10
PSD_HARD_TOL = 1e-8
WEIGHT_TOL = 1e-9


def _square(entries, what) -> np.ndarray:
    arr = np.array(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"{what} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class DensityOperator:
    entries: np.ndarray

    def __post_init__(self):
        arr = _square(self.entries, "density operator")
        if np.max(np.abs(arr - arr.conj().T)) > OP_TOL:
            raise ValidationError("density operator is not Hermitian")
        arr = 0.5 * (arr + arr.conj().T)
        tr = np.trace(arr).real
        if abs(tr - 1.0) > OP_TOL:
            raise ValidationError(f"density operator has trace {tr!r}")
        lo = np.linalg.eigvalsh(arr)[0]
        if lo < -OP_TOL:
            raise ValidationError(f"density operator has eigenvalue {lo!r} < 0")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def diag(cls, probabilities) -> DensityOperator:
        return cls(np.diag(np.asarray(probabilities, dtype=complex)))


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    entries: np.ndarray

    def __post_init__(self):
        arr = _square(self.entries, "unitary")
        err = np.max(np.abs(arr @ arr.conj().T - np.eye(arr.shape[0])))
        if err > OP_TOL:
            raise ValidationError(f"matrix is not unitary (max deviation {err:.3g})")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> UnitaryOperator:
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def from_permutation(cls, perm) -> UnitaryOperator:
        """Permutation matrix sending basis state ``perm[k]`` to ``k``.

        Applied to a diagonal operator with diagonal ``v`` the result has
        diagonal ``v[perm]``, matching :func:`purelab.purify.apply_permutation`.
        """
        perm = np.asarray(perm, dtype=int)
        n = perm.size
        if sorted(perm.tolist()) != list(range(n)):
            raise ValidationError(f"not a permutation: {perm.tolist()}")
        mat = np.zeros((n, n), dtype=complex)
        mat[np.arange(n), perm] = 1.0
        return cls(mat)


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Target-block weights ``w_z = sum_{i<d} |u_{i,z}|^2`` of a unitary."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size % 2:
            raise ValidationError("weight vector must have even length")
        if np.any(w < -WEIGHT_TOL) or np.any(w > 1 + WEIGHT_TOL):
            raise ValidationError("weights must lie in [0, 1]")
        if abs(w.sum() - w.size // 2) > WEIGHT_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, expected {w.size // 2}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.weights.size // 2


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    return DensityOperator(np.kron(a.entries, b.entries))


def _check_dims(dim: int, dim_t: int, dim_a: int) -> None:
    if dim_t < 1 or dim_a < 1 or dim != dim_t * dim_a:
        raise DomainError(f"operator of dim {dim} does not factor as {dim_t} x {dim_a}")


def _trace_aux(mat: np.ndarray, dim_t: int, dim_a: int) -> np.ndarray:
    return np.einsum("...iaja->...ij", mat.reshape(mat.shape[:-2] + (dim_t, dim_a, dim_t, dim_a)))


def partial_trace_aux(rho: DensityOperator, dim_t: int, dim_a: int) -> DensityOperator:
    """Trace out the rightmost (auxiliary) factor."""
    _check_dims(rho.dim, dim_t, dim_a)
    return DensityOperator(_trace_aux(rho.entries, dim_t, dim_a))


def apply_purification(
    rho_joint: DensityOperator, u: UnitaryOperator, dim_t: int, dim_a: int
) -> DensityOperator:
    """Reduced target state ``Tr_A(U rho U^dagger)``."""
    _check_dims(rho_joint.dim, dim_t, dim_a)
    if u.dim != rho_joint.dim:
        raise DomainError(f"unitary dim {u.dim} != state dim {rho_joint.dim}")
    out = u.entries @ rho_joint.entries @ u.entries.conj().T
    return DensityOperator(_trace_aux(out, dim_t, dim_a))


def purified_target_batch(rho_joint: np.ndarray, unitaries: np.ndarray, dim_t: int, dim_a: int) -> np.ndarray:
    """Vectorized :func:`apply_purification` over a stack of unitaries.

    Takes and returns raw arrays; the caller is responsible for validation.
    """
    out = unitaries @ rho_joint @ np.conj(np.swapaxes(unitaries, -1, -2))
    return _trace_aux(out, dim_t, dim_a)


def _complex_ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)


def random_density(d: int, rng: np.random.Generator) -> DensityOperator:
    """Hilbert-Schmidt random density matrix ``G G^dagger / tr(G G^dagger)``."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    g = _complex_ginibre(d, rng)
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    q, r = np.linalg.qr(_complex_ginibre(dim, rng))
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    return UnitaryOperator(q)


def permutation_weights(u: UnitaryOperator, dim_t: int, dim_a: int) -> WeightVector:
    if dim_t != 2:
        raise DomainError("permutation weights are defined for a qubit target only")
    _check_dims(u.dim, dim_t, dim_a)
    mag = np.abs(u.entries[:dim_a, :]) ** 2
    return WeightVector(mag.sum(axis=0))


def eigenvalues_sorted(rho: DensityOperator) -> Spectrum:
    """Eigenvalues clamped to ``[0, 1]``, sorted non-increasing, summing to 1."""
    vals = np.linalg.eigvalsh(rho.entries)[::-1]
    if vals[-1] < -PSD_HARD_TOL:
        raise ValidationError(f"operator is not PSD: eigenvalue {vals[-1]!r}")
    vals = np.clip(vals, 0.0, 1.0)
    return Spectrum(vals / vals.sum())


def sort_unitary(rho_joint: DensityOperator) -> UnitaryOperator:
    """Unitary mapping ``rho_joint`` to its diagonal with eigenvalues sorted down.

    This is the optimal purification channel for whatever target/auxiliary
    split is applied afterwards.
    """
    vals, vecs = np.linalg.eigh(rho_joint.entries)
    order = np.argsort(-vals, kind="stable")
    return UnitaryOperator(vecs[:, order].conj().T)
