"""Weighted complex-l1 minimization over Hermitian spectra (BP and BPCC).

The spectrum is parametrized by its real and imaginary parts on bins
``0..N/2`` so that ``Psi alpha`` is real by construction.  Each modulus
``|alpha_k|`` becomes a second-order-cone epigraph variable, giving an SOCP
that is handed to Clarabel (interior point).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.sparse as sp

from .result import DeclipResult, DeclipStatus
from .signals import ClippedObservation, Signal, Spectrum
from .transforms import (
    SupportSet,
    column_norm_weights,
    dft,
    idft,
    real_parameter_layout,
    real_synthesis_matrix,
    spectrum_from_real,
)


class SolverStatus(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERS = "MaxIters"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SolverParams:
    tol_feas: float = 1e-8
    tol_gap: float = 1e-8
    max_iters: int = 50000

    def __post_init__(self):
        if self.tol_feas <= 0 or self.tol_gap <= 0 or self.max_iters <= 0:
            raise ValueError("solver tolerances and max_iters must be positive")


@dataclass(frozen=True)
class L1Problem:
    """min sum_k w_k |alpha_k|  s.t.  Psi alpha = y on omega_nc,
    Psi alpha >= c_upper on omega_u, Psi alpha <= c_lower on omega_l."""

    n_len: int
    weights: np.ndarray
    omega_nc: np.ndarray
    y: np.ndarray
    omega_u: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    c_upper: float = np.inf
    omega_l: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    c_lower: float = -np.inf
    inequalities_enabled: bool = True

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.n_len,):
            raise ValueError(f"weights must have length {self.n_len}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)
        for name in ("omega_nc", "omega_u", "omega_l"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=int))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.y.shape != self.omega_nc.shape:
            raise ValueError("y must have one value per index in omega_nc")
        sets = [set(self.omega_nc.tolist()), set(self.omega_u.tolist()), set(self.omega_l.tolist())]
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise ValueError("index sets must be disjoint")

    @classmethod
    def from_observation(cls, obs: ClippedObservation, weights, inequalities_enabled: bool = True):
        return cls(
            n_len=obs.n_len,
            weights=weights,
            omega_nc=obs.omega_nc,
            y=obs.y,
            omega_u=obs.omega_u,
            c_upper=obs.c_upper,
            omega_l=obs.omega_l,
            c_lower=obs.c_lower,
            inequalities_enabled=inequalities_enabled,
        )

    def feasibility_residual(self, alpha: Spectrum) -> float:
        """Largest absolute constraint violation of ``alpha``."""
        x = idft(alpha).samples
        viol = [0.0]
        if self.omega_nc.size:
            viol.append(np.abs(x[self.omega_nc] - self.y).max())
        if self.inequalities_enabled:
            if self.omega_u.size:
                viol.append(np.max(self.c_upper - x[self.omega_u]))
            if self.omega_l.size:
                viol.append(np.max(x[self.omega_l] - self.c_lower))
        return float(max(viol))

    def objective(self, alpha: Spectrum) -> float:
        return float(np.sum(self.weights * np.abs(alpha.coeffs)))


@dataclass(frozen=True)
class SolverResult:
    alpha: Spectrum
    status: SolverStatus
    feas_residual: float
    objective: float
    iterations: int = 0


def _clarabel_data(p: L1Problem):
    n_len = p.n_len
    basis = real_synthesis_matrix(n_len)
    re_bins, im_bins = real_parameter_layout(n_len)
    n_z, n_t = n_len, re_bins.size
    n_var = n_z + n_t

    paired = np.zeros(n_t, dtype=bool)
    paired[im_bins] = True
    bin_weight = p.weights[re_bins].copy()
    bin_weight[paired] += p.weights[(n_len - re_bins[paired]) % n_len]
    q = np.concatenate([np.zeros(n_z), bin_weight])

    blocks, rhs, cones = [], [], []

    def dense_rows(rows):
        return sp.hstack([sp.csr_matrix(rows), sp.csr_matrix((rows.shape[0], n_t))])

    if p.omega_nc.size:
        blocks.append(dense_rows(basis[p.omega_nc]))
        rhs.append(p.y)
        cones.append(clarabel.ZeroConeT(p.omega_nc.size))

    # Nonnegative block: clipping inequalities, then |Re alpha_k| <= t_k for unpaired bins.
    nonneg_rows, nonneg_rhs = [], []
    if p.inequalities_enabled and p.omega_u.size:
        nonneg_rows.append(dense_rows(-basis[p.omega_u]))
        nonneg_rhs.append(np.full(p.omega_u.size, -p.c_upper))
    if p.inequalities_enabled and p.omega_l.size:
        nonneg_rows.append(dense_rows(basis[p.omega_l]))
        nonneg_rhs.append(np.full(p.omega_l.size, p.c_lower))
    single = np.flatnonzero(~paired)
    if single.size:
        r = np.repeat(np.arange(2 * single.size), 2)
        c = np.ravel(np.column_stack([np.repeat(single, 2), n_z + np.repeat(single, 2)]))
        v = np.tile([1.0, -1.0, -1.0, -1.0], single.size)
        nonneg_rows.append(sp.csr_matrix((v, (r, c)), shape=(2 * single.size, n_var)))
        nonneg_rhs.append(np.zeros(2 * single.size))
    if nonneg_rows:
        block = sp.vstack(nonneg_rows)
        blocks.append(block)
        rhs.append(np.concatenate(nonneg_rhs))
        cones.append(clarabel.NonnegativeConeT(block.shape[0]))

    # One 3-dim cone per paired bin: (t_k, Re alpha_k, Im alpha_k).
    pair_bins = np.flatnonzero(paired)
    n_pairs = pair_bins.size
    if n_pairs:
        im_col = re_bins.size + np.searchsorted(im_bins, pair_bins)
        r = np.arange(3 * n_pairs)
        c = np.ravel(np.column_stack([n_z + pair_bins, pair_bins, im_col]))
        blocks.append(sp.csr_matrix((-np.ones(3 * n_pairs), (r, c)), shape=(3 * n_pairs, n_var)))
        rhs.append(np.zeros(3 * n_pairs))
        cones.extend(clarabel.SecondOrderConeT(3) for _ in range(n_pairs))

    a_mat = sp.vstack(blocks).tocsc()
    return sp.csc_matrix((n_var, n_var)), q, a_mat, np.concatenate(rhs), cones


_CLARABEL_OK = {"Solved", "AlmostSolved"}
_CLARABEL_INFEASIBLE = {"PrimalInfeasible", "AlmostPrimalInfeasible"}


def map_clarabel_status(status: str, feas_residual: float, params: SolverParams) -> SolverStatus:
    if status in _CLARABEL_INFEASIBLE:
        return SolverStatus.INFEASIBLE
    if status in _CLARABEL_OK and feas_residual <= params.tol_feas:
        return SolverStatus.OPTIMAL
    return SolverStatus.MAX_ITERS


def solve_weighted_l1(p: L1Problem, params: SolverParams = SolverParams()) -> SolverResult:
    """Solve the weighted-l1 SOCP described by ``p``."""
    p_mat, q, a_mat, b, cones = _clarabel_data(p)
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = int(params.max_iters)
    # Clarabel's criteria are scaled; ask for a margin below the absolute contract.
    settings.tol_feas = params.tol_feas * 1e-2
    settings.tol_gap_abs = params.tol_gap * 1e-2
    settings.tol_gap_rel = params.tol_gap
    solution = clarabel.DefaultSolver(p_mat, q, a_mat, b, cones, settings).solve()
    status = str(solution.status)
    z = np.asarray(solution.x[: p.n_len])
    if not np.all(np.isfinite(z)):
        z = np.zeros(p.n_len)
    alpha = spectrum_from_real(z, p.n_len)
    feas = p.feasibility_residual(alpha)
    return SolverResult(
        alpha=alpha,
        status=map_clarabel_status(status, feas, params),
        feas_residual=feas,
        objective=p.objective(alpha),
        iterations=int(solution.iterations),
    )


def finalize_convex(obs: ClippedObservation, alpha: Spectrum) -> tuple[Signal, Spectrum]:
    """Overwrite the reliable samples with ``y`` and re-derive the spectrum.

    Removes solver noise on samples that are known exactly.
    """
    x_hat = np.array(idft(alpha).samples)
    x_hat[obs.omega_nc] = obs.y
    signal = Signal(x_hat)
    return signal, dft(signal)


def _declip_l1(obs: ClippedObservation, inequalities: bool, params: SolverParams) -> DeclipResult:
    problem = L1Problem.from_observation(obs, column_norm_weights(obs.omega_nc, obs.n_len), inequalities)
    res = solve_weighted_l1(problem, params)
    x_hat, alpha_hat = finalize_convex(obs, res.alpha)
    status = DeclipStatus.CONVERGED if res.status is SolverStatus.OPTIMAL else DeclipStatus.SOLVER_FAILURE
    return DeclipResult(
        x_hat=x_hat,
        alpha_hat=alpha_hat,
        support=SupportSet.from_bins(alpha_hat.support(), obs.n_len),
        iterations=1,
        final_residual=res.feas_residual,
        status=status,
        solver_status=(res.status,),
    )


def declip_bp(obs: ClippedObservation, params: SolverParams = SolverParams()) -> DeclipResult:
    """Basis pursuit using only the reliable samples."""
    return _declip_l1(obs, False, params)


def declip_bpcc(obs: ClippedObservation, params: SolverParams = SolverParams()) -> DeclipResult:
    """Basis pursuit with the clipping inequalities added."""
    return _declip_l1(obs, True, params)
