"""Dataset generators for the purification experiments, plus CSV/JSONL/manifest writers."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from purelab import __version__
from purelab.bounds import CHECK_TOL, distillation_bounds
from purelab.denseop import (
    DensityOperator,
    UnitaryOperator,
    eigenvalues_sorted,
    purified_target_batch,
    random_density,
    random_unitary,
    sort_unitary,
    tensor,
)
from purelab.errors import BoundViolationError, DomainError, ValidationError
from purelab.hbac import (
    HbacState,
    hbac_limit,
    recursive_purify,
    sort_step,
    target_polarization,
    trace_distance,
)
from purelab.purify import mixer_channel
from purelab.spectra import QubitSpectrum, generalized_polarization

log = logging.getLogger(__name__)

REJECT_MIN_EIGENVALUE = 1e-12
GAP_TOL = 1e-12
CHANNELS = ("haar", "identity", "optimal")

_DENSITY_STREAM = 0
_UNITARY_STREAM = 1


@dataclass(frozen=True)
class Fig1bRecord:
    density_id: int
    unitary_id: int
    eps_target_in: float
    eps_aux_in: float
    eps_out: float
    x: float
    y: float

    def __post_init__(self):
        for name in ("eps_target_in", "eps_aux_in", "eps_out", "x", "y"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} is not finite")
        if not 0.0 <= self.x <= 1.0:
            raise ValidationError(f"x={self.x!r} outside [0, 1]")


@dataclass(frozen=True)
class MixerGridRecord:
    alpha: float
    beta: float
    alpha_out: float
    gap: float

    def __post_init__(self):
        if self.gap > GAP_TOL:
            raise ValidationError(f"mixer gap {self.gap!r} above min(alpha, beta)")


@dataclass(frozen=True)
class HbacRunRecord:
    n: int
    eps0: float
    delta: float
    iteration: int
    eps_n: float
    limit: float
    distance_to_limit: float

    def __post_init__(self):
        if self.eps_n > self.limit + CHECK_TOL:
            raise ValidationError(f"eps_n={self.eps_n!r} above limit {self.limit!r}")


@dataclass(frozen=True)
class DistillationRecord:
    j: int
    achieved: float
    bound: float

    def __post_init__(self):
        if self.achieved > self.bound + GAP_TOL:
            raise ValidationError(f"qubit {self.j} reached {self.achieved!r} > {self.bound!r}")


@dataclass
class Dataset(Sequence):
    """Records of one experiment run plus the metadata that goes in its manifest."""

    records: list
    meta: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, i):
        return self.records[i]

    def __len__(self):
        return len(self.records)


# -- Monte Carlo over random states and unitaries --------------------------------


def sample_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator for one sample, fixed by ``(seed, stream, index)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def _draw_nondegenerate(d: int, rng: np.random.Generator) -> tuple[DensityOperator, int]:
    rejected = 0
    while True:
        rho = random_density(d, rng)
        if eigenvalues_sorted(rho).values[-1] >= REJECT_MIN_EIGENVALUE:
            return rho, rejected
        rejected += 1


def sample_pair(d: int, seed: int, index: int) -> tuple[DensityOperator, DensityOperator, int]:
    """Independent random target qubit and ``d``-level auxiliary for one density index."""
    rng = sample_rng(seed, _DENSITY_STREAM, index)
    rho_t, rej_t = _draw_nondegenerate(2, rng)
    rho_a, rej_a = _draw_nondegenerate(d, rng)
    return rho_t, rho_a, rej_t + rej_a


def _target_polarizations(targets: np.ndarray) -> np.ndarray:
    vals = np.clip(np.linalg.eigvalsh(targets), 0.0, None)
    with np.errstate(divide="ignore"):
        return 0.5 * np.log(vals[..., 1] / vals[..., 0])


def _fig1b_density(d, seed, index, unitaries, channel):
    rho_t, rho_a, rejected = sample_pair(d, seed, index)
    eps_t = generalized_polarization(eigenvalues_sorted(rho_t))
    eps_a = generalized_polarization(eigenvalues_sorted(rho_a))
    joint = tensor(rho_t, rho_a)
    if channel == "haar":
        stack = unitaries
    elif channel == "identity":
        stack = np.eye(2 * d, dtype=complex)[None]
    else:
        stack = sort_unitary(joint).entries[None]
    eps_out = _target_polarizations(purified_target_batch(joint.entries, stack, 2, d))
    hi = max(eps_t, eps_a)
    x = min(eps_t, eps_a) / hi
    records = []
    for k, e in enumerate(eps_out.tolist()):
        rec = Fig1bRecord(index, k, eps_t, eps_a, e, x, e / hi)
        if rec.y > 1.0 + CHECK_TOL:
            raise BoundViolationError(f"output polarization exceeds the input maximum: {rec}", rec)
        records.append(rec)
    return records, rejected


def default_threads() -> int:
    env = os.environ.get("PURELAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_fig1b(
    d: int = 5,
    n_densities: int = 100,
    n_unitaries: int = 100,
    seed: int = 0,
    channel: str = "haar",
    threads: int = 1,
) -> Dataset:
    """Random purification scatter: every density pair against every unitary.

    ``channel="haar"`` uses ``n_unitaries`` shared Haar unitaries. The
    ``"identity"`` and ``"optimal"`` (eigenbasis sort) channels are
    deterministic, so they emit one record per density with ``unitary_id`` 0.
    Raises :class:`BoundViolationError` on any ``y > 1 + 1e-9``.
    """
    if d < 2:
        raise DomainError(f"auxiliary dimension must be >= 2, got {d}")
    if n_densities < 1 or n_unitaries < 1:
        raise DomainError("sample counts must be >= 1")
    if channel not in CHANNELS:
        raise DomainError(f"unknown channel {channel!r}; expected one of {CHANNELS}")

    unitaries = None
    if channel == "haar":
        unitaries = np.stack(
            [random_unitary(2 * d, sample_rng(seed, _UNITARY_STREAM, k)).entries for k in range(n_unitaries)]
        )

    def work(i):
        return _fig1b_density(d, seed, i, unitaries, channel)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, range(n_densities)))
    else:
        chunks = [work(i) for i in range(n_densities)]

    records = [r for recs, _ in chunks for r in recs]
    records.sort(key=lambda r: (r.density_id, r.unitary_id))
    rejected = sum(rej for _, rej in chunks)
    if rejected:
        log.info("redrew %d near-pure random states", rejected)
    meta = {
        "d": d,
        "n_densities": n_densities,
        "n_unitaries": n_unitaries if channel == "haar" else 1,
        "channel": channel,
        "density_measure": "Hilbert-Schmidt (G G^dagger / tr)",
        "unitary_measure": "Haar (QR of complex Ginibre, phase-fixed)",
        "target_aux_sampling": "independent",
        "reject_min_eigenvalue": REJECT_MIN_EIGENVALUE,
        "rejected_samples": rejected,
        "max_y": max(r.y for r in records),
    }
    return Dataset(records, meta)


# -- two-qubit mixer lower-bound counterexample ----------------------------------


def run_mixer_grid(steps: int = 101) -> Dataset:
    if steps < 2:
        raise DomainError(f"grid needs at least 2 steps, got {steps}")
    grid = np.linspace(0.5, 1.0, steps)
    records = []
    for a in grid.tolist():
        t = QubitSpectrum(a)
        for b in grid.tolist():
            out = mixer_channel(t, QubitSpectrum(b))
            records.append(MixerGridRecord(a, b, out, out - min(a, b)))
    return Dataset(records, {"steps": steps, "max_gap": max(r.gap for r in records)})


# -- open and closed system distillation -----------------------------------------


def run_hbac(n: int, eps0: float, delta: float = 1e-8, seed: int | None = None, max_iterations: int = 1_000_000) -> Dataset:
    """Trajectory of ``eps_n`` under recursive purification. ``seed`` is unused."""
    state = recursive_purify(n, eps0, delta, max_iterations)
    limit = hbac_limit(n, eps0)
    records = [
        HbacRunRecord(n, eps0, delta, p.iteration, p.eps_n, limit, limit - p.eps_n)
        for p in state.trajectory
    ]
    for prev, cur in zip(records, records[1:]):
        if cur.eps_n < prev.eps_n:
            raise ValidationError(f"eps_n decreased at iteration {cur.iteration}")
    meta = {
        "n": n,
        "eps0": eps0,
        "delta": delta,
        "iterations": state.iterations,
        "limit": limit,
        "final_eps_n": records[-1].eps_n,
        "distance_to_limit": records[-1].distance_to_limit,
    }
    return Dataset(records, meta)


def run_closed_distillation(n: int, eps: float) -> Dataset:
    """Single sort of ``j`` thermal qubits for each ``j``, read off ``Q_j``."""
    if not 2 <= n <= 6:
        raise DomainError(f"n must lie in 2..6, got {n}")
    bounds = distillation_bounds(n, eps)
    records = []
    fixed_point_distance = 0.0
    for j, bound in zip(range(2, n + 1), bounds):
        once = sort_step(HbacState.thermal(j, eps))
        twice = sort_step(once)
        fixed_point_distance = max(fixed_point_distance, trace_distance(once.diag, twice.diag))
        achieved = target_polarization(once, j)
        if achieved > bound + GAP_TOL:
            raise BoundViolationError(f"qubit {j} distilled to {achieved!r} > bound {bound!r}")
        records.append(DistillationRecord(j, achieved, bound))
    return Dataset(records, {"n": n, "eps": eps, "fixed_point_distance": fixed_point_distance})


# -- serialization ---------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(records, path) -> None:
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    names = [f.name for f in dataclasses.fields(records[0])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(names)
        for r in records:
            writer.writerow([_fmt(getattr(r, n)) for n in names])


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(dataclasses.asdict(r)))
            fh.write("\n")


def write_dataset(records, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        write_csv(records, path)
    elif fmt == "jsonl":
        write_jsonl(records, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_manifest(path, command: str, config: dict, seed, dataset: Dataset) -> dict:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "record_count": len(dataset),
        "library_version": __version__,
        **{k: v for k, v in dataset.meta.items() if k in ("max_y", "max_gap")},
        "meta": dataset.meta,
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
