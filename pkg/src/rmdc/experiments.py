"""Monte Carlo protocols: one-shot measurement doping and repeated-measurement
dephasing, with reproducible seeded streams and jackknife error bars.

Every sample owns an independent child stream spawned from the master seed
by its sample index, so results are bit-identical for any worker count and
resumable per cell.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import clifford, states
from .states import Bipartition, MixedState, PureState, ThetaBasis

MAX_RESAMPLES = 1000
RESAMPLE_ALARM_RATE = 1e-3


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    k: int
    theta: float
    samples: int
    master_seed: int
    protocol: str = "one_shot"  # or "dephasing"
    qubits_a: tuple[int, ...] | None = None  # default: first n//2 qubits
    measured_qubit_policy: str = "fixed"  # or "uniform_random"
    measured_qubit: int = 0
    outcome_policy: str = "born"  # or "forced_first"
    pure_cap: int = states.PURE_QUBIT_CAP
    mixed_cap: int = states.MIXED_QUBIT_CAP

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.samples < 2:
            raise ValueError("variance estimation needs at least two samples")
        if self.protocol not in ("one_shot", "dephasing"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.measured_qubit_policy not in ("fixed", "uniform_random"):
            raise ValueError(f"unknown policy {self.measured_qubit_policy!r}")
        if self.outcome_policy not in ("born", "forced_first"):
            raise ValueError(f"unknown outcome policy {self.outcome_policy!r}")
        cap = self.pure_cap if self.protocol == "one_shot" else self.mixed_cap
        if self.n > cap:
            raise states.ResourceCapError(
                f"n={self.n} exceeds the {self.protocol} cap of {cap} qubits"
            )

    def bipartition(self) -> Bipartition:
        if self.qubits_a is None:
            return Bipartition.balanced(self.n)
        return Bipartition(self.n, tuple(self.qubits_a))

    def canonical_dict(self) -> dict:
        d = asdict(self)
        d["qubits_a"] = list(self.bipartition().qubits_a)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class EstimateRecord:
    mean: float
    variance: float            # unbiased sample variance
    std_error_mean: float
    std_error_variance: float  # delete-1 jackknife
    samples: int
    config_hash: str
    master_seed: int
    resample_count: int = 0
    resample_alarm: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def _sample_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def _pick_qubit(config: ProtocolConfig, rng: np.random.Generator) -> int:
    if config.measured_qubit_policy == "fixed":
        return config.measured_qubit
    return int(rng.integers(0, config.n))


def run_rmdc_sample(config: ProtocolConfig, rng: np.random.Generator) -> tuple[float, int]:
    """One draw of the one-shot protocol: k+1 uniform Clifford layers with k
    interleaved single-qubit measurements; returns (purity, resample count).

    A forced outcome can hit an (essentially) measure-zero branch; the whole
    circuit is then redrawn, which conditions on realizable outcome records.
    """
    part = config.bipartition()
    resamples = 0
    while True:
        try:
            psi = PureState.zero(config.n, cap=config.pure_cap)
            for _layer in range(config.k):
                tab = clifford.sample_uniform_clifford(config.n, rng)
                states.apply_gates_statevector(
                    psi.amplitudes, clifford.tableau_to_gates(tab)
                )
                basis = ThetaBasis(config.theta, _pick_qubit(config, rng))
                if config.outcome_policy == "born":
                    psi, _ = states.born_sample_measure(psi, basis, rng)
                else:
                    psi = states.forced_measure(psi, basis, outcome=1)
            tab = clifford.sample_uniform_clifford(config.n, rng)
            states.apply_gates_statevector(psi.amplitudes, clifford.tableau_to_gates(tab))
            return states.purity_subsystem(psi, part), resamples
        except states.MeasureZeroBranch:
            resamples += 1
            if resamples >= MAX_RESAMPLES:
                raise


def run_dephasing_sample(config: ProtocolConfig, rng: np.random.Generator) -> float:
    """One draw of the repeated-measurement protocol on a density matrix."""
    part = config.bipartition()
    rho = MixedState.zero(config.n, cap=config.mixed_cap)
    for _layer in range(config.k):
        tab = clifford.sample_uniform_clifford(config.n, rng)
        states.apply_gates_density(rho.matrix, clifford.tableau_to_gates(tab))
        states.dephase_qubit(rho, ThetaBasis(config.theta, _pick_qubit(config, rng)))
    tab = clifford.sample_uniform_clifford(config.n, rng)
    states.apply_gates_density(rho.matrix, clifford.tableau_to_gates(tab))
    return states.purity_subsystem(rho, part)


def _run_block(args: tuple) -> tuple[np.ndarray, int]:
    """Worker entry: samples [start, stop) of the given config."""
    config_dict, start, stop = args
    config = ProtocolConfig(**{**config_dict, "qubits_a": tuple(config_dict["qubits_a"])})
    out = np.empty(stop - start)
    resamples = 0
    for i in range(start, stop):
        rng = _sample_rng(config.master_seed, i)
        if config.protocol == "one_shot":
            out[i - start], extra = run_rmdc_sample(config, rng)
            resamples += extra
        else:
            out[i - start] = run_dephasing_sample(config, rng)
    return out, resamples


def default_workers() -> int:
    env = os.environ.get("RMDC_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def sample_purities(config: ProtocolConfig, workers: int | None = None) -> tuple[np.ndarray, int]:
    """All sample purities in index order, plus the total resample count."""
    workers = default_workers() if workers is None else max(1, workers)
    cd = config.canonical_dict()
    if workers == 1:
        values, resamples = _run_block((cd, 0, config.samples))
        return values, resamples
    import multiprocessing

    edges = np.linspace(0, config.samples, workers + 1, dtype=int)
    blocks = [(cd, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if a < b]
    with multiprocessing.Pool(processes=len(blocks)) as pool:
        results = pool.map(_run_block, blocks)
    values = np.concatenate([r[0] for r in results])
    return values, sum(r[1] for r in results)


def jackknife_variance_se(values: np.ndarray) -> float:
    """Delete-1 jackknife standard error of the unbiased sample variance."""
    m = len(values)
    if m < 3:
        return 0.0
    s1, s2 = values.sum(), (values**2).sum()
    loo_var = ((s2 - values**2) - (s1 - values) ** 2 / (m - 1)) / (m - 2)
    return float(math.sqrt((m - 1) / m * ((loo_var - loo_var.mean()) ** 2).sum()))


def estimate(config: ProtocolConfig, workers: int | None = None) -> EstimateRecord:
    """Mean and unbiased variance of the purity over independent samples.

    Deterministic for a given config: per-sample streams are derived from
    the master seed by sample index, and the reduction is in index order.
    """
    values, resamples = sample_purities(config, workers)
    m = len(values)
    mean = float(values.mean())
    variance = float(values.var(ddof=1))
    rate = resamples / m
    return EstimateRecord(
        mean=mean,
        variance=variance,
        std_error_mean=float(math.sqrt(variance / m)),
        std_error_variance=jackknife_variance_se(values),
        samples=m,
        config_hash=config.config_hash(),
        master_seed=config.master_seed,
        resample_count=resamples,
        resample_alarm=rate > RESAMPLE_ALARM_RATE,
    )


@dataclass
class SweepCell:
    config: ProtocolConfig
    record: EstimateRecord | None
    error: str | None = None


def cell_seed(master_seed: int, cell_index: int) -> int:
    """Per-cell master seed; stable under re-running a larger or smaller grid."""
    ss = np.random.SeedSequence([master_seed, cell_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sweep(configs: list[ProtocolConfig], workers: int | None = None) -> list[SweepCell]:
    """Estimate every cell; failures are recorded and the run continues."""
    out = []
    for config in configs:
        try:
            out.append(SweepCell(config, estimate(config, workers)))
        except Exception as exc:  # per-cell isolation is the contract
            out.append(SweepCell(config, None, error=f"{type(exc).__name__}: {exc}"))
    return out
