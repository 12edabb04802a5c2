"""Monte-Carlo harness for the de-clipping experiments and demo scenarios.

Every trial draws its signal from its own seed,
``SeedSequence(seed, spawn_key=(experiment_tag, K, M, trial))`` (``M = 0`` for
experiments that do not fix ``M`` per cell), so no trial depends on grid order
or on which other cells are run.  Outcomes are always judged on the full
time-domain signal.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .algorithms import Rel1Params, TpccParams, declip_rel1cc, declip_tpcc, top_harmonics, tp_score
from .convex import SolverParams, declip_bp, declip_bpcc
from .result import DeclipResult, DeclipStatus
from .signals import (
    ClippedObservation,
    Signal,
    SynthSpec,
    UnachievableClipLevel,
    achievable_m_values,
    clip,
    clip_level_for_m,
    recovery_error,
    synth_sparse_signal,
)
from .transforms import SupportSet, dft

log = logging.getLogger(__name__)

ALGORITHMS = ("BP", "BPCC", "ReL1CC", "TPCC")
CSV_HEADER = ("algorithm", "K", "M", "success", "trials", "mean_error", "seed")

_EXPERIMENT_TAGS = {"mmin": 1, "probk": 2, "phase": 3, "support": 4}
_MAX_REDRAWS = 1000


def run_algorithm(name: str, obs: ClippedObservation, rel1: Rel1Params = Rel1Params(),
                  tpcc: TpccParams = TpccParams(), solver: SolverParams = SolverParams()) -> DeclipResult:
    if name == "BP":
        return declip_bp(obs, solver)
    if name == "BPCC":
        return declip_bpcc(obs, solver)
    if name == "ReL1CC":
        return declip_rel1cc(obs, rel1)
    if name == "TPCC":
        return declip_tpcc(obs, tpcc)
    raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")


@dataclass(frozen=True)
class TrialConfig:
    n_len: int = 128
    k_values: tuple = (2, 4, 6, 8, 10)
    m_values: tuple = ()
    trials: int = 100
    seed: int = 0
    algorithms: tuple = ALGORITHMS
    recovery_tol: float = 1e-3
    amp_low: float = 0.5
    amp_high: float = 1.5
    rel1: Rel1Params = field(default_factory=Rel1Params)
    tpcc: TpccParams = field(default_factory=TpccParams)
    solver: SolverParams = field(default_factory=SolverParams)
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(k % 2 or k < 2 for k in self.k_values):
            raise ValueError("k_values must be even integers >= 2")
        if any(not 1 <= m <= self.n_len for m in self.m_values):
            raise ValueError(f"m_values must lie in 1..{self.n_len}")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))

    def config_hash(self) -> str:
        payload = asdict(self)
        payload.pop("workers")
        blob = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class TableRow:
    algorithm: str
    k: int
    m: float
    success: int
    trials: int
    mean: float
    std: float
    seed: int


@dataclass
class ExperimentTable:
    """Rows of per-cell results plus run metadata.

    For success-rate experiments ``m`` is the fixed number of reliable
    samples and ``mean`` the mean recovery error.  For the M_min experiment
    ``m`` is the mean M_min, ``success`` the number of recoverable trials and
    ``mean``/``std`` refer to the M_min values.
    """

    experiment: str
    rows: list
    metadata: dict

    def rate(self, algorithm: str, k: int, m: Optional[int] = None) -> float:
        row = self.row(algorithm, k, m)
        return row.success / row.trials

    def row(self, algorithm: str, k: int, m: Optional[int] = None) -> TableRow:
        for r in self.rows:
            if r.algorithm == algorithm and r.k == k and (m is None or r.m == m):
                return r
        raise KeyError((algorithm, k, m))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}={self.metadata[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            m = f"{r.m:.6g}" if isinstance(r.m, float) else str(r.m)
            writer.writerow([r.algorithm, r.k, m, r.success, r.trials, f"{r.mean:.6e}", r.seed])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def trial_rng(seed: int, experiment: str, k: int, m: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(_EXPERIMENT_TAGS[experiment], k, m, trial))
    return np.random.Generator(np.random.PCG64(ss))


def draw_signal(rng: np.random.Generator, n_len: int, k: int, amp_low=0.5, amp_high=1.5) -> tuple[Signal, SupportSet]:
    seed = int(rng.integers(0, 2**63 - 1))
    x, alpha = synth_sparse_signal(SynthSpec(n_len, k, seed, amp_low, amp_high))
    return x, SupportSet(tuple(alpha.support()), n_len)


def draw_clipped(rng, config: TrialConfig, k: int, m: int) -> tuple[Signal, ClippedObservation, int]:
    """Draw signals until one can be clipped to exactly ``m`` reliable samples."""
    for redraws in range(_MAX_REDRAWS):
        x, _ = draw_signal(rng, config.n_len, k, config.amp_low, config.amp_high)
        try:
            level = clip_level_for_m(x, m)
        except UnachievableClipLevel:
            continue
        return x, clip(x, -level, level), redraws
    raise RuntimeError(f"could not reach M={m} after {_MAX_REDRAWS} draws")


def _succeeded(x: Signal, res: DeclipResult, tol: float) -> tuple[bool, float]:
    err = recovery_error(x, res.x_hat)
    if res.status is DeclipStatus.SUPPORT_EXHAUSTED:
        return False, err
    return err <= tol, err


def find_m_min(x: Signal, algo: str, config: TrialConfig = TrialConfig()) -> Optional[int]:
    """Smallest M such that ``algo`` recovers ``x`` at M and at every achievable M' > M.

    Achievable M values from ``N - 2`` downwards are scanned under symmetric
    clipping; the scan stops at the first failure.  Returns ``None`` when the
    very first (mildest) level already fails.
    """
    n_len = x.n_len
    ladder = achievable_m_values(x)
    ladder = ladder[(ladder >= 1) & (ladder <= n_len - 2)][::-1]
    m_min = None
    for m in ladder:
        level = clip_level_for_m(x, int(m))
        obs = clip(x, -level, level)
        res = run_algorithm(algo, obs, config.rel1, config.tpcc, config.solver)
        ok, _ = _succeeded(x, res, config.recovery_tol)
        if not ok:
            break
        m_min = int(m)
    return m_min


def _parallel_map(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers == 0:
        workers = resolve_workers()
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def resolve_workers() -> int:
    env = os.environ.get("DECLIP_THREADS", "0")
    try:
        n = int(env)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _metadata(config: TrialConfig, experiment: str, extra: Optional[dict] = None) -> dict:
    meta = {
        "experiment": experiment,
        "seed": config.seed,
        "config_hash": config.config_hash(),
        "n_len": config.n_len,
        "rng": "numpy PCG64 via SeedSequence(seed, spawn_key=(tag, K, M, trial))",
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        meta.update(extra)
    return meta


def _mmin_task(args):
    config, k, trial = args
    rng = trial_rng(config.seed, "mmin", k, 0, trial)
    x, _ = draw_signal(rng, config.n_len, k, config.amp_low, config.amp_high)
    return {algo: find_m_min(x, algo, config) for algo in config.algorithms}


def run_mmin_experiment(config: TrialConfig) -> ExperimentTable:
    """Mean M_min per (algorithm, K); non-recoverable trials count as M_min = N."""
    tasks = [(config, k, t) for k in config.k_values for t in range(config.trials)]
    outcomes = _parallel_map(_mmin_task, tasks, config.workers)
    rows = []
    for algo in config.algorithms:
        for k in config.k_values:
            vals = [o[algo] for (c, kk, t), o in zip(tasks, outcomes) if kk == k]
            recoverable = sum(v is not None for v in vals)
            m_arr = np.array([config.n_len if v is None else v for v in vals], dtype=float)
            rows.append(TableRow(algo, k, float(m_arr.mean()), recoverable, len(vals),
                                 float(m_arr.mean()), float(m_arr.std()), config.seed))
    return ExperimentTable("mmin", rows, _metadata(config, "mmin", {"unrecoverable_counts_as": config.n_len}))


def _rate_task(args):
    config, experiment, k, m, trial, algorithms = args
    rng = trial_rng(config.seed, experiment, k, m, trial)
    x, obs, redraws = draw_clipped(rng, config, k, m)
    out = {}
    for algo in algorithms:
        res = run_algorithm(algo, obs, config.rel1, config.tpcc, config.solver)
        out[algo] = _succeeded(x, res, config.recovery_tol)
    return out, redraws


def _rate_table(config: TrialConfig, experiment: str, algorithms) -> ExperimentTable:
    if not config.m_values:
        raise ValueError(f"{experiment} needs at least one M value")
    tasks = [(config, experiment, k, m, t, tuple(algorithms))
             for k in config.k_values for m in config.m_values for t in range(config.trials)]
    outcomes = _parallel_map(_rate_task, tasks, config.workers)
    rows = []
    total_redraws = sum(r for _, r in outcomes)
    for algo in algorithms:
        for k in config.k_values:
            for m in config.m_values:
                cell = [o[algo] for task, (o, _) in zip(tasks, outcomes) if task[2] == k and task[3] == m]
                succ = sum(ok for ok, _ in cell)
                errs = np.array([e for _, e in cell])
                rows.append(TableRow(algo, k, m, int(succ), len(cell), float(errs.mean()),
                                     float(errs.std()), config.seed))
    meta = _metadata(config, experiment, {"redraws_for_unachievable_m": total_redraws})
    return ExperimentTable(experiment, rows, meta)


def run_prob_vs_k(config: TrialConfig) -> ExperimentTable:
    """Success rate of ReL1CC and TPCC at fixed M (70 unless configured) across K."""
    if not config.m_values:
        config = replace(config, m_values=(70,))
    algos = [a for a in config.algorithms if a in ("ReL1CC", "TPCC")] or ["ReL1CC", "TPCC"]
    return _rate_table(config, "probk", algos)


def run_tpcc_phase(config: TrialConfig) -> ExperimentTable:
    """TPCC success rate over the (K, M) grid."""
    return _rate_table(config, "phase", ["TPCC"])


def support_match_rates(n_len: int = 128, k: int = 10, m: int = 40, trials: int = 100,
                        seed: int = 0) -> tuple[float, float]:
    """Fraction of trials whose top-K/2 bins of |DFT(x_c)|, resp. the
    zero-padded TP score, equal the true support."""
    config = TrialConfig(n_len=n_len, k_values=(k,), m_values=(m,), trials=trials, seed=seed)
    hits_clipped = hits_zero = 0
    for t in range(trials):
        rng = trial_rng(seed, "support", k, m, t)
        x, obs, _ = draw_clipped(rng, config, k, m)
        truth = SupportSet(tuple(dft(x).support()), n_len)
        hits_clipped += top_harmonics(dft(obs.x_c), k) == truth
        hits_zero += top_harmonics(tp_score(obs.y, obs.omega_nc, n_len), k) == truth
    return hits_clipped / trials, hits_zero / trials


# Demo scenarios -------------------------------------------------------------

FIG2_SEED = 2012


@dataclass
class DemoBundle:
    name: str
    signals: dict
    spectra: dict
    summary: dict

    def to_csv(self) -> str:
        """Columns: n followed by every signal, 17 significant digits."""
        names = list(self.signals)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n"] + names)
        n_len = len(next(iter(self.signals.values())))
        for i in range(n_len):
            writer.writerow([i] + [f"{self.signals[nm][i]:.17g}" for nm in names])
        return buf.getvalue()


def _tone_demo(name: str, x: Signal, levels, algos) -> DemoBundle:
    signals = {"x": x.samples}
    spectra = {"x": dft(x).coeffs}
    summary = {}
    for level in levels:
        obs = clip(x, -level, level)
        signals[f"x_c@{level:g}"] = obs.x_c
        for algo in algos:
            res = run_algorithm(algo, obs)
            key = f"{algo}@{level:g}"
            signals[key] = res.x_hat.samples
            err = recovery_error(x, res.x_hat)
            summary[key] = {"M": obs.m, "error": err, "recovered": err <= 1e-3, "status": res.status.value}
    return DemoBundle(name, signals, spectra, summary)


def demo_fig1(levels=(0.75, 0.72), n_len: int = 128) -> DemoBundle:
    """sin(2 pi n/N + pi/4) clipped at +-0.75 and +-0.72, restored by BP, BPCC, ReL1CC."""
    n = np.arange(n_len)
    x = Signal(np.sin(2 * np.pi * n / n_len + np.pi / 4))
    return _tone_demo("fig1", x, levels, ("BP", "BPCC", "ReL1CC"))


def demo_twotone(levels=(0.7, 0.2), n_len: int = 128) -> DemoBundle:
    """sin(2 pi n/N) + 0.25 sin(6 pi n/N) restored by TPCC."""
    n = np.arange(n_len)
    x = Signal(np.sin(2 * np.pi * n / n_len) + 0.25 * np.sin(2 * np.pi * 3 * n / n_len))
    return _tone_demo("twotone", x, levels, ("TPCC",))


def demo_fig2(seed: int = FIG2_SEED, ratio: float = 0.2, n_len: int = 128, k: int = 10) -> DemoBundle:
    """K=10 signal clipped at ``ratio * max|x|``; do the top-5 bins of DFT(x_c) hit the support?"""
    x, alpha = synth_sparse_signal(SynthSpec(n_len, k, seed))
    level = ratio * float(np.abs(x.samples).max())
    obs = clip(x, -level, level)
    h = dft(obs.x_c)
    truth = SupportSet(tuple(alpha.support()), n_len)
    found = top_harmonics(h, k)
    summary = {
        "seed": seed,
        "M": obs.m,
        "clip_level": level,
        "true_bins": [i for i in truth.indices if i <= n_len // 2],
        "top_bins": [i for i in found.indices if i <= n_len // 2],
        "support_match": found == truth,
    }
    return DemoBundle("fig2", {"x": x.samples, "x_c": obs.x_c},
                      {"x": alpha.coeffs, "x_c": h.coeffs}, summary)
