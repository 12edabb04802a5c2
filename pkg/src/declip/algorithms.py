"""Reweighted l1 with clipping constraints (ReL1CC) and Trivial Pursuit with
clipping constraints (TPCC)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .convex import L1Problem, SolverParams, SolverStatus, finalize_convex, solve_weighted_l1
from .result import DeclipResult, DeclipStatus
from .signals import ClippedObservation, Spectrum
from .transforms import SupportSet, dft, idft, least_squares_on_support


@dataclass(frozen=True)
class Rel1Params:
    ell_max: int = 10
    # Well below typical |alpha| (about 3 to 8 at N = 128); larger values blunt the reweighting at small M.
    eps: float = 1e-3
    delta: float = 1e-6
    solver: SolverParams = field(default_factory=SolverParams)

    def __post_init__(self):
        if self.ell_max < 1:
            raise ValueError("ell_max must be >= 1")
        if self.eps <= 0 or self.delta <= 0:
            raise ValueError("eps and delta must be positive")


@dataclass(frozen=True)
class TpccParams:
    """``max_support=None`` means the number of reliable samples ``M``."""

    eps_residual: float = 1e-6
    max_support: Optional[int] = None

    def __post_init__(self):
        if self.eps_residual <= 0:
            raise ValueError("eps_residual must be positive")


def declip_rel1cc(obs: ClippedObservation, params: Rel1Params = Rel1Params()) -> DeclipResult:
    """Iteratively reweighted BPCC.

    Starts from unit weights, re-solves with ``w_i = 1 / (|alpha_i| + eps)``
    and stops after ``ell_max`` solves or once successive solutions differ by
    less than ``delta`` in l2 norm.
    """
    n_len = obs.n_len
    weights = np.ones(n_len)
    weight_history, residuals, statuses = [], [], []
    prev: Optional[np.ndarray] = None
    alpha: Optional[Spectrum] = None
    status = DeclipStatus.MAX_ITERS
    ell = 1
    while True:
        weight_history.append(weights)
        problem = L1Problem.from_observation(obs, weights, inequalities_enabled=True)
        res = solve_weighted_l1(problem, params.solver)
        statuses.append(res.status)
        alpha = res.alpha
        residuals.append(res.feas_residual)
        if res.status is SolverStatus.INFEASIBLE:
            status = DeclipStatus.SOLVER_FAILURE
            break
        weights = 1.0 / (np.abs(alpha.coeffs) + params.eps)
        ell += 1
        if prev is not None and np.linalg.norm(alpha.coeffs - prev) < params.delta:
            status = DeclipStatus.CONVERGED
            break
        if ell >= params.ell_max + 1:
            break
        prev = alpha.coeffs

    x_hat, alpha_hat = finalize_convex(obs, alpha)
    return DeclipResult(
        x_hat=x_hat,
        alpha_hat=alpha_hat,
        support=SupportSet.from_bins(alpha_hat.support(), n_len),
        iterations=len(statuses),
        final_residual=residuals[-1],
        status=status,
        residual_history=tuple(residuals),
        weight_history=tuple(weight_history),
        solver_status=tuple(statuses),
    )


def declip_tpcc(obs: ClippedObservation, params: TpccParams = TpccParams()) -> DeclipResult:
    """Greedy support growth driven by the DFT of the clipped signal.

    The match step ``h = DFT(x_c)`` runs once.  Each iteration adds the
    largest remaining bin in ``0..N/2`` (and its mirror) to the support,
    zeroes it in ``h``, and refits the reliable samples by least squares on
    the support.  The clipping bounds are not used as constraints here; the
    clipped values only enter through ``h``.
    """
    n_len = obs.n_len
    half = n_len // 2
    max_support = obs.m if params.max_support is None else params.max_support
    h = np.abs(dft(obs.x_c).coeffs[: half + 1]).copy()
    selected = np.zeros(half + 1, dtype=bool)
    y = obs.y
    support = SupportSet((), n_len)
    alpha = Spectrum(np.zeros(n_len, dtype=complex))
    residual = float(np.linalg.norm(y))
    residuals = []
    status = DeclipStatus.CONVERGED

    while residual > params.eps_residual:
        if selected.all():
            status = DeclipStatus.SUPPORT_EXHAUSTED
            break
        # argmax returns the first maximum, i.e. ties go to the smallest bin.
        k = int(np.argmax(np.where(selected, -np.inf, h)))
        candidate = support.with_bin(k)
        if len(candidate) > max_support:
            status = DeclipStatus.SUPPORT_EXHAUSTED
            break
        selected[k] = True
        h[k] = 0.0
        support = candidate
        alpha = least_squares_on_support(y, obs.omega_nc, support)
        residual = float(np.linalg.norm(y - idft(alpha).samples[obs.omega_nc]))
        residuals.append(residual)

    return DeclipResult(
        x_hat=idft(alpha),
        alpha_hat=alpha,
        support=support,
        iterations=len(residuals),
        final_residual=residual,
        status=status,
        residual_history=tuple(residuals),
    )


def tp_score(y, omega_nc, n_len: int) -> np.ndarray:
    """Plain Trivial Pursuit score ``|(Phi Psi)^H y|`` = ``|DFT(zero-padded y)|``."""
    padded = np.zeros(n_len)
    padded[np.asarray(omega_nc, dtype=int)] = y
    return np.abs(dft(padded).coeffs)


def top_harmonics(h, count: int) -> SupportSet:
    """Conjugate-closed support of the ``count // 2`` largest bins of ``|h|`` in ``0..N/2``."""
    coeffs = h.coeffs if isinstance(h, Spectrum) else np.asarray(h)
    n_len = coeffs.size
    if count % 2:
        raise ValueError("count must be even")
    if count > n_len:
        raise ValueError(f"count={count} exceeds N={n_len}")
    mag = np.abs(coeffs[: n_len // 2 + 1])
    # Stable sort on -mag keeps the smallest index first among ties.
    order = np.argsort(-mag, kind="stable")[: count // 2]
    return SupportSet.from_bins(order, n_len)
