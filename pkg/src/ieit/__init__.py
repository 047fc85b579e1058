"""Inverse electromagnetically induced transparency in a two-port optomechanical cavity."""
from .model import (
    HBAR,
    MirrorGeometry,
    ProbeDrive,
    RWAWarning,
    SystemParams,
    G_from_power,
    effective_kappa,
    g0_from_geometry,
    power_from_G,
)
from .response import (
    IEITPoint,
    ProbeResponse,
    absorption_fraction,
    find_absorption_zeros,
    ieit_conditions,
    probe_response,
    response_poles,
)
from .steady_state import (
    SteadyState,
    branch_stability,
    fix_operating_point,
    operating_point,
    solve_steady_states,
)
from .timedomain import (
    QSwitchResult,
    Trajectory,
    fit_steady_amplitude,
    integrate_full,
    integrate_rwa,
    q_switch,
)

__version__ = "0.1.0"
