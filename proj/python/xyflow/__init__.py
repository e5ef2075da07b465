"""XY model under heat-kernel dynamics on the circle."""

from ._xyflow import (
    ConfigError,
    ExpansionCoeffs,
    KernelEval,
    __version__,
    canonical_config,
    closed_form_window,
    conditional_density,
    config_hash,
    dynamical_energy,
    expansion,
    find_maximizers,
    initial_energy,
    kernel,
    log_kernel,
    oracle_density,
    restricted_energy,
    run,
    run_chain,
    sample_steps,
    transition_window,
    tv_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
