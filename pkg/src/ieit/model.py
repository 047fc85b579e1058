"""Parameter containers and the maps from lab quantities to model rates.

All rates and frequencies are angular (rad/s). ``kappa`` is the decay rate
through *each* end mirror; the intracavity amplitude decays at
``2*kappa + kappa0`` where ``kappa0`` is the internal loss.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

#: Reduced Planck constant (J s). The only dimensional constant in the package.
HBAR = 1.054571817e-34

#: Default resolved-sideband threshold, omega_m / kappa.
RWA_THRESHOLD = 10.0


class RWAWarning(UserWarning):
    """The parameters sit outside the resolved-sideband regime."""


@dataclass(frozen=True)
class SystemParams:
    """Rates and couplings of the driven cavity with a movable mirror.

    Exactly one of ``power`` (W), ``eps_c`` (pump amplitude, may be complex)
    or ``G`` (effective coupling) sets the pump. ``delta0`` is the bare detuning
    omega_0 - omega_c; ``None`` means it is left free and chosen so that the
    effective detuning sits on the red sideband.
    """

    omega_m: float
    gamma_m: float
    kappa: float
    g: float
    kappa0: float = 0.0
    delta0: Optional[float] = None
    omega_c: Optional[float] = None
    power: Optional[float] = None
    eps_c: Optional[complex] = None
    G: Optional[float] = None

    def __post_init__(self):
        for name in ("omega_m", "gamma_m", "kappa", "g", "kappa0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be > 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.gamma_m < 0:
            raise ValueError("gamma_m must be >= 0")
        if self.kappa0 < 0:
            raise ValueError("kappa0 must be >= 0")
        pumps = [p for p in ("power", "eps_c", "G") if getattr(self, p) is not None]
        if len(pumps) != 1:
            raise ValueError(
                f"exactly one of power, eps_c, G must be given (got {pumps or 'none'})"
            )
        if self.power is not None and self.power < 0:
            raise ValueError("power must be >= 0")
        if self.omega_c is not None and self.omega_c <= 0:
            raise ValueError("omega_c must be > 0")

    @property
    def pump_kind(self) -> str:
        for p in ("power", "eps_c", "G"):
            if getattr(self, p) is not None:
                return p
        raise AssertionError("unreachable")

    @property
    def cavity_decay(self) -> float:
        """Amplitude decay rate of the intracavity field, 2*kappa + kappa0."""
        return 2.0 * self.kappa + self.kappa0

    @property
    def frequency_pull(self) -> float:
        """Shift of the effective detuning per intracavity photon.

        Eliminating the mechanical amplitude from the mean-field fixed point
        gives ``Delta = delta0 - beta*|c_s|**2``.
        """
        return 2.0 * self.g**2 * self.omega_m / (self.gamma_m**2 / 4.0 + self.omega_m**2)


@dataclass(frozen=True)
class MirrorGeometry:
    """Membrane-in-the-middle geometry (SI units)."""

    transmission: float
    k: float
    q0: float
    omega0: float
    L: float
    mass: float

    def __post_init__(self):
        if not 0.0 < self.transmission < 1.0:
            raise ValueError("transmission must lie in (0, 1)")
        if self.L <= 0 or self.mass <= 0:
            raise ValueError("L and mass must be > 0")


@dataclass(frozen=True)
class ProbeDrive:
    """Two probe amplitudes and the probe detuning x = omega_p - omega_c - omega_m.

    ``x`` may be a scalar or an array; responses broadcast over it.
    """

    eps_L: complex
    eps_R: complex
    x: float | np.ndarray = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.eps_L) and np.isfinite(self.eps_R)):
            raise ValueError("probe amplitudes must be finite")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("probe detuning must be finite")

    @property
    def total(self) -> complex:
        return complex(self.eps_L) + complex(self.eps_R)

    @property
    def input_norm(self) -> float:
        return abs(self.eps_L) ** 2 + abs(self.eps_R) ** 2


def g0_from_geometry(geom: MirrorGeometry) -> float:
    """Frequency pull per unit displacement of a partially transmitting mirror."""
    s = math.sin(2.0 * geom.k * geom.q0)
    c = math.cos(2.0 * geom.k * geom.q0)
    denom = 1.0 / (1.0 - geom.transmission) - c * c
    if denom <= 0:
        raise ValueError(f"geometry gives non-positive denominator {denom!r}")
    return s / math.sqrt(denom) * (-geom.omega0 / (geom.L / 2.0))


def g_from_g0(g0: float, mass: float, omega_m: float) -> float:
    """Single-photon coupling: g0 times the zero-point displacement."""
    return g0 * math.sqrt(HBAR / (2.0 * mass * omega_m))


def pump_amplitude(params: SystemParams) -> complex:
    """Pump amplitude eps_c from the power (or as given)."""
    if params.eps_c is not None:
        return complex(params.eps_c)
    if params.power is not None:
        if params.omega_c is None:
            raise ValueError("omega_c is required to convert power to eps_c")
        return complex(math.sqrt(2.0 * params.kappa * params.power / (HBAR * params.omega_c)))
    raise ValueError("pump is given as G; eps_c is not defined without an operating point")


def G_from_power(params: SystemParams) -> float:
    """Effective coupling G = g|c_s| for a red-sideband pump of the given power."""
    if params.power is None:
        raise ValueError("pump must be specified as power")
    if params.omega_c is None:
        raise ValueError("omega_c is required")
    kc = params.cavity_decay
    return params.g * math.sqrt(
        2.0 * params.kappa * params.power / (HBAR * params.omega_c * (kc**2 + params.omega_m**2))
    )


def power_from_G(params: SystemParams, G: float) -> float:
    """Pump power that yields coupling ``G`` on the red sideband."""
    if not math.isfinite(G) or G < 0:
        raise ValueError("G must be finite and >= 0")
    if params.omega_c is None:
        raise ValueError("omega_c is required")
    if G == 0:
        return 0.0
    if params.g == 0:
        raise ValueError("g = 0 cannot produce G > 0 at any power")
    kc = params.cavity_decay
    return (G / params.g) ** 2 * HBAR * params.omega_c * (kc**2 + params.omega_m**2) / (
        2.0 * params.kappa
    )


def effective_kappa(params: SystemParams) -> float:
    """kappa - kappa0/2, the rate entering the perfect-absorption conditions."""
    if params.kappa0 >= 2.0 * params.kappa:
        raise ValueError("kappa0 must be < 2*kappa")
    return params.kappa - params.kappa0 / 2.0


def check_resolved_sideband(params: SystemParams, threshold: float = RWA_THRESHOLD) -> bool:
    """Warn (not raise) when omega_m <= threshold*kappa."""
    ok = params.omega_m > threshold * params.kappa
    if not ok:
        warnings.warn(
            f"omega_m/kappa = {params.omega_m / params.kappa:.3g} <= {threshold:g}; "
            "rotating-wave results may be inaccurate",
            RWAWarning,
            stacklevel=2,
        )
    return ok
