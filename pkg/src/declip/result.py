from __future__ import annotations

import enum
from dataclasses import dataclass


from .signals import Signal, Spectrum
from .transforms import SupportSet


class DeclipStatus(enum.Enum):
    CONVERGED = "Converged"
    SUPPORT_EXHAUSTED = "SupportExhausted"
    MAX_ITERS = "MaxIters"
    SOLVER_FAILURE = "SolverFailure"


@dataclass(frozen=True)
class DeclipResult:
    """Output of a de-clipping routine.

    ``residual_history`` holds ``||y - Phi x_hat||`` after every iteration and
    ``weight_history`` the weights used by each reweighted solve (empty for
    methods without weights).
    """

    x_hat: Signal
    alpha_hat: Spectrum
    support: SupportSet
    iterations: int
    final_residual: float
    status: DeclipStatus
    residual_history: tuple = ()
    weight_history: tuple = ()
    solver_status: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status is DeclipStatus.CONVERGED or self.status is DeclipStatus.MAX_ITERS

    def diagnostics(self) -> dict:
        return {
            "status": self.status.value,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "support": list(self.support.indices),
            "residual_history": [float(r) for r in self.residual_history],
            "solver_status": [s.value for s in self.solver_status],
        }
