"""Bohmian trajectories of Dirac wave packets at a Klein step."""

__version__ = "0.1.0"

from .dispersion import (DomainError, PhysicalParams, group_velocity, omega_bar,
                         omega_cap, s_map)
from .spinor import CurrentVector, SpacetimePoint, Spinor
from .free_modes import FreeMode, FrequencySign, eval_free_mode
from .step_modes import (NoKleinRegime, OutsideKleinWindow, StepMode,
                         closed_form_trajectory, current_step_mode, eval_step_mode,
                         make_step_mode, velocity_step_mode)
from .quadrature import QuadratureNotConverged, QuadratureRule, gauss_legendre
from .packets import (AmplitudeProfile, Packet, PacketKind, WindowTooSmall,
                      eval_packet, gaussian_amplitude, packet_current)
from .norms import norm_at_time
from .bohmian import (IntegratorConfig, InvalidStart, Trajectory, TrajectoryStatus,
                      batch_trajectories, integrate_trajectory, pick_starts)
from .diagnostics import (LocalizationReport, ZeroNorm, localization_sweep,
                          probability_in_interval, rt_budget)

__all__ = [
    "__version__",
    "DomainError", "PhysicalParams", "group_velocity", "omega_bar", "omega_cap", "s_map",
    "CurrentVector", "SpacetimePoint", "Spinor",
    "FreeMode", "FrequencySign", "eval_free_mode",
    "NoKleinRegime", "OutsideKleinWindow", "StepMode", "closed_form_trajectory",
    "current_step_mode", "eval_step_mode", "make_step_mode", "velocity_step_mode",
    "QuadratureNotConverged", "QuadratureRule", "gauss_legendre",
    "AmplitudeProfile", "Packet", "PacketKind", "WindowTooSmall", "eval_packet",
    "gaussian_amplitude", "packet_current", "norm_at_time",
    "IntegratorConfig", "InvalidStart", "Trajectory", "TrajectoryStatus",
    "batch_trajectories", "integrate_trajectory", "pick_starts",
    "LocalizationReport", "ZeroNorm", "localization_sweep", "probability_in_interval",
    "rt_budget",
]
