"""Model-free rate control and quadrotor attitude simulation."""

from ._mfcflight import (
    AxisControllerState,
    UltraLocalConfig,
    controller_config,
    controller_presets,
    estimate_f,
    fault_presets,
    ip_step,
    ipd_step,
    mix,
    run_campaign,
    run_scenario,
    telemetry_columns,
    vehicle_presets,
)

__all__ = [
    "AxisControllerState",
    "UltraLocalConfig",
    "controller_config",
    "controller_presets",
    "estimate_f",
    "fault_presets",
    "ip_step",
    "ipd_step",
    "mix",
    "run_campaign",
    "run_scenario",
    "telemetry_columns",
    "vehicle_presets",
]
