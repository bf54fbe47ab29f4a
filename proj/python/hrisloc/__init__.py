"""Joint user and hybrid-RIS localization toolkit."""

from ._core import (
    HrislocError,
    __version__,
    channel_params,
    compute_bounds,
    default_scenario_json,
    estimate,
    override_keys,
    rho_sweep,
    steering,
    sweep_power_csv,
    synthesize,
)

__all__ = [
    "HrislocError",
    "__version__",
    "channel_params",
    "compute_bounds",
    "default_scenario_json",
    "estimate",
    "override_keys",
    "rho_sweep",
    "steering",
    "sweep_power_csv",
    "synthesize",
]
