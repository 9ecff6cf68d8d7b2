"""Mean-field double-well condensate dynamics under decoherence."""

from ._duetdyn import (
    GuardError,
    IoError,
    InitialState,
    LindbladPreset,
    LindbladSpec,
    ModelParams,
    TimeGrid,
    __version__,
    density_from_initial,
    detect_critical_c,
    evolve,
    evolve_gpe,
    figure_curve,
    hamiltonian,
    rhs,
    run_sweep_json,
    steady_state,
    window_mean_z,
)

__all__ = [
    "GuardError",
    "IoError",
    "InitialState",
    "LindbladPreset",
    "LindbladSpec",
    "ModelParams",
    "TimeGrid",
    "__version__",
    "density_from_initial",
    "detect_critical_c",
    "evolve",
    "evolve_gpe",
    "figure_curve",
    "hamiltonian",
    "rhs",
    "run_sweep_json",
    "steady_state",
    "window_mean_z",
]
