"""RIS placement planner."""

from ._risplace import (
    Error,
    Scenario,
    average_wsr,
    beamform,
    channels,
    coverage,
    load_scenario,
    noise_power_dbm,
    parse_scenario,
    pathloss_direct,
    pathloss_ris_leg,
    place,
    sample_users,
    segment_blocked,
    steering_vector,
)

__all__ = [
    "Error",
    "Scenario",
    "average_wsr",
    "beamform",
    "channels",
    "coverage",
    "load_scenario",
    "noise_power_dbm",
    "parse_scenario",
    "pathloss_direct",
    "pathloss_ris_leg",
    "place",
    "sample_users",
    "segment_blocked",
    "steering_vector",
]
