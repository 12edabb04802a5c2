"""Restoration of clipped, frequency-sparse signals."""
from .algorithms import Rel1Params, TpccParams, declip_rel1cc, declip_tpcc, top_harmonics, tp_score
from .convex import L1Problem, SolverParams, SolverResult, SolverStatus, declip_bp, declip_bpcc, solve_weighted_l1
from .result import DeclipResult, DeclipStatus
from .signals import (
    ClippedObservation,
    Signal,
    Spectrum,
    SynthSpec,
    UnachievableClipLevel,
    achievable_m_values,
    clip,
    clip_level_for_m,
    is_recovered,
    read_signal_csv,
    recovery_error,
    synth_sparse_signal,
    write_signal_csv,
)
from .transforms import (
    NotHermitian,
    SupportSet,
    column_norm_weights,
    dft,
    idft,
    least_squares_on_support,
    restricted_synthesis,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
