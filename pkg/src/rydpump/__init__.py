"""rydpump: dissipative Rydberg-pumping entanglement simulator.

Builds the two-atom Bell scheme (9 levels) and the two-qutrit scheme
(20 levels), assembles their Lindblad master equations, propagates or
solves for steady states, and evaluates fidelity, CHSH correlation and
negativity.
"""

from .linalg import (
    BipartiteDims,
    dagger,
    hermitian_eigvals,
    hermiticity_defect,
    kron,
    partial_transpose,
    trace_norm,
)
from .models import (
    ModelParams,
    Preset,
    SchemeVariant,
    SystemModel,
    angular_mhz,
    build_bell_model,
    build_model,
    build_qutrit_model,
    caption_params,
    decay_rate_khz,
    figure_preset,
    params_from_config,
    params_to_caption,
)
from .dynamics import (
    ConvergenceError,
    Liouvillian,
    NonUniqueSteadyStateError,
    Trajectory,
    build_liouvillian,
    evolve,
    steady_state,
    unvec,
    vec,
)
from .measures import (
    chsh_correlation,
    chsh_operator,
    fidelity,
    negativity,
    populations,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteDims", "dagger", "hermitian_eigvals", "hermiticity_defect",
    "kron", "partial_transpose", "trace_norm",
    "ModelParams", "Preset", "SchemeVariant", "SystemModel", "angular_mhz",
    "build_bell_model", "build_model", "build_qutrit_model", "caption_params",
    "decay_rate_khz", "figure_preset", "params_from_config", "params_to_caption",
    "ConvergenceError", "Liouvillian", "NonUniqueSteadyStateError", "Trajectory",
    "build_liouvillian", "evolve", "steady_state", "unvec", "vec",
    "chsh_correlation", "chsh_operator", "fidelity", "negativity", "populations",
    "__version__",
]
