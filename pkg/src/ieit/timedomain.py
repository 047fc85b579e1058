"""Time-domain integration of the mean fluctuation amplitudes.

Two equation sets are integrated with fixed-step RK4: the rotating-wave
form, which is the independent check of the frequency-domain response, and
the form that keeps the counter-rotating ``exp(+-2 i omega_m t)`` terms. The
Q-switch scenario drives the system to steady oscillation, then at
``t_switch`` turns both probes off and raises the mirror decay rate.

Port outputs follow ``out_alpha(t) = 2 kappa dc(t) - eps_alpha exp(-i x t)``.
Photon flux through a port is ``|out_alpha|^2 / (2 kappa)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from . import _kernels
from .model import ProbeDrive, SystemParams, check_resolved_sideband
from .steady_state import SteadyState

RWA_DT_FACTOR = 0.01
FULL_DT_FACTOR = 0.005
MAX_RECORDS = 200_000


class IntegrationError(RuntimeError):
    """The integration produced non-finite values."""


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    db: np.ndarray
    dc: np.ndarray
    out_L: np.ndarray
    out_R: np.ndarray

    @property
    def quanta(self) -> np.ndarray:
        """Fluctuation quanta |db|^2 + |dc|^2."""
        return np.abs(self.db) ** 2 + np.abs(self.dc) ** 2


@dataclass(frozen=True)
class QSwitchResult:
    t_switch: float
    kappa_after: float
    emitted_quanta: float
    stored_before: float
    mech_dissipated: float
    internal_dissipated: float
    remaining: float
    trajectory: Trajectory

    @property
    def budget_error(self) -> float:
        """Relative mismatch of stored vs. (emitted + dissipated + remaining)."""
        total = self.emitted_quanta + self.mech_dissipated + self.internal_dissipated + self.remaining
        return abs(total - self.stored_before) / self.stored_before


class SteadyFit(NamedTuple):
    plus: complex
    minus: complex
    offset: complex


def _span(t_span) -> Tuple[float, float]:
    if np.ndim(t_span) == 0:
        t0, t1 = 0.0, float(t_span)
    else:
        t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    return t0, t1


def _steps(t0, t1, dt, cap):
    if dt is None:
        dt = cap
    if dt <= 0 or dt > cap * (1 + 1e-12):
        raise ValueError(f"dt = {dt:.3g} exceeds the stability/accuracy cap {cap:.3g}")
    n = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    return n, (t1 - t0) / n


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise IntegrationError("integration produced non-finite values")


def _scalar_x(drive: ProbeDrive) -> float:
    if np.ndim(drive.x) != 0:
        raise ValueError("time-domain runs need a scalar probe detuning")
    return float(drive.x)


def rwa_dt_cap(params: SystemParams, op: SteadyState, x: float) -> float:
    rate = max(params.kappa, params.cavity_decay, params.gamma_m / 2.0, abs(op.G), abs(x))
    return RWA_DT_FACTOR / rate


def full_dt_cap(params: SystemParams, op: SteadyState, x: float) -> float:
    wd = x + params.omega_m - op.Delta
    rate = max(
        params.omega_m + abs(op.Delta),
        abs(wd),
        params.cavity_decay,
        params.gamma_m / 2.0,
        abs(op.G),
    )
    return FULL_DT_FACTOR / rate


def linearized_growth_rate(params: SystemParams, op: SteadyState) -> float:
    """Largest real part of the drift eigenvalues with counter-rotating terms kept.

    Positive means the linearized fluctuations grow without bound, so no
    steady oscillation exists for the full equations.
    """
    gc = params.g * op.c_s
    wm, D, hg, kc = params.omega_m, op.Delta, params.gamma_m / 2.0, params.cavity_decay
    # (b, b*, c, c*) in the frame rotating at the pump frequency
    A = np.array(
        [
            [-1j * wm - hg, 0, -1j * np.conj(gc), -1j * gc],
            [0, 1j * wm - hg, 1j * np.conj(gc), 1j * gc],
            [-1j * gc, -1j * gc, -kc - 1j * D, 0],
            [1j * np.conj(gc), 1j * np.conj(gc), 0, -kc + 1j * D],
        ]
    )
    return float(np.linalg.eigvals(A).real.max())


def _outputs(kappa, t, dc, drive, w):
    ph = np.exp(-1j * w * t)
    return 2.0 * kappa * dc - drive.eps_L * ph, 2.0 * kappa * dc - drive.eps_R * ph


def integrate_rwa(params: SystemParams, op: SteadyState, drive: ProbeDrive, t_span,
                  dt: Optional[float] = None, y0: Tuple[complex, complex] = (0j, 0j),
                  stride: int = 1, warn: bool = True) -> Trajectory:
    """Integrate the rotating-wave fluctuation equations from ``y0 = (db, dc)``."""
    if warn:
        check_resolved_sideband(params)
    x = _scalar_x(drive)
    t0, t1 = _span(t_span)
    n, dt = _steps(t0, t1, dt, rwa_dt_cap(params, op, x))
    gc = params.g * op.c_s
    db, dc = _kernels.rk4_rwa(
        complex(y0[0]), complex(y0[1]),
        complex(-1j * np.conj(gc)), complex(-1j * gc),
        params.gamma_m / 2.0, params.cavity_decay,
        complex(drive.total), x, t0, dt, n, int(stride),
    )
    _finite(db, dc)
    t = t0 + dt * stride * np.arange(db.size)
    out_L, out_R = _outputs(params.kappa, t, dc, drive, x)
    return Trajectory(t, db, dc, out_L, out_R)


def integrate_full(params: SystemParams, op: SteadyState, drive: ProbeDrive, t_span,
                   dt: Optional[float] = None, y0: Tuple[complex, complex] = (0j, 0j),
                   stride: Optional[int] = None) -> Trajectory:
    """Integrate the linearized equations with counter-rotating terms kept.

    The drive enters at ``x + omega_m - Delta`` in the frame rotating at the
    effective detuning, which is ``x`` on the red sideband. ``stride`` thins
    the record; by default it keeps at most ``MAX_RECORDS`` samples while
    still sampling the fastest oscillation several times per period.
    """
    x = _scalar_x(drive)
    t0, t1 = _span(t_span)
    n, dt = _steps(t0, t1, dt, full_dt_cap(params, op, x))
    if stride is None:
        stride = min(100, max(1, n // MAX_RECORDS))
    w1 = op.Delta - params.omega_m
    w2 = op.Delta + params.omega_m
    wd = x + params.omega_m - op.Delta
    db, dc = _kernels.rk4_full(
        complex(y0[0]), complex(y0[1]), complex(params.g * op.c_s),
        params.gamma_m / 2.0, params.cavity_decay, complex(drive.total),
        w1, w2, wd, t0, dt, n, int(stride),
    )
    _finite(db, dc)
    t = t0 + dt * stride * np.arange(db.size)
    out_L, out_R = _outputs(params.kappa, t, dc, drive, wd)
    return Trajectory(t, db, dc, out_L, out_R)


def fit_steady_amplitude(t: np.ndarray, z: np.ndarray, x: float, tail: float = 0.2) -> SteadyFit:
    """Least-squares projection of the last ``tail`` of ``z(t)`` on
    ``{exp(-i x t), exp(+i x t), 1}``.

    When the window spans less than one period of ``x`` the three functions
    are nearly collinear, so only ``exp(-i x t)`` is fitted and the other two
    coefficients are reported as zero.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(z)
    start = t[-1] - tail * (t[-1] - t[0])
    sel = t >= start
    ts, zs = t[sel], z[sel]
    if abs(x) * (ts[-1] - ts[0]) < 2.0 * math.pi:
        basis = np.exp(-1j * x * ts)[:, None]
        coef, *_ = np.linalg.lstsq(basis, zs, rcond=None)
        return SteadyFit(complex(coef[0]), 0j, 0j)
    basis = np.column_stack([np.exp(-1j * x * ts), np.exp(1j * x * ts), np.ones_like(ts)])
    coef, *_ = np.linalg.lstsq(basis, zs, rcond=None)
    return SteadyFit(complex(coef[0]), complex(coef[1]), complex(coef[2]))


def dissipation_rate(params: SystemParams, traj: Trajectory, kappa: Optional[float] = None):
    """Loss rate of fluctuation quanta, gamma_m |db|^2 + 2 kappa_c |dc|^2."""
    k = params.kappa if kappa is None else kappa
    decay = 2.0 * k + params.kappa0
    return params.gamma_m * np.abs(traj.db) ** 2 + 2.0 * decay * np.abs(traj.dc) ** 2


def q_switch(params: SystemParams, op: SteadyState, drive: ProbeDrive, t_switch: float,
             kappa_factor: float, t_after: Optional[float] = None,
             dt: Optional[float] = None) -> QSwitchResult:
    """Drive to steady oscillation, then switch the probes off and scale kappa.

    ``t_after`` defaults to ``10/kappa`` which is never shorter than the
    required ``10/(kappa*kappa_factor)``. Emitted quanta are the time integral
    of the photon flux through both ports after the switch.
    """
    k = params.kappa
    if t_switch < 10.0 / k * (1 - 1e-12):
        raise ValueError("t_switch must be >= 10/kappa to reach steady oscillation")
    if kappa_factor < 1.0:
        raise ValueError("kappa_factor must be >= 1")
    t_min = 10.0 / (k * kappa_factor)
    if t_after is None:
        t_after = 10.0 / k
    if t_after < t_min * (1 - 1e-12):
        raise ValueError(f"t_after must be >= 10/(kappa*kappa_factor) = {t_min:.3g}")

    before = integrate_rwa(params, op, drive, (0.0, t_switch), dt=dt, warn=False)
    after_params = replace(params, kappa=k * kappa_factor)
    off = replace(drive, eps_L=0j, eps_R=0j)
    after = integrate_rwa(
        after_params, op, off, (t_switch, t_switch + t_after), dt=dt,
        y0=(before.db[-1], before.dc[-1]), warn=False,
    )

    k_after = k * kappa_factor
    flux = (np.abs(after.out_L) ** 2 + np.abs(after.out_R) ** 2) / (2.0 * k_after)
    emitted = simpson(flux, x=after.t)
    mech = simpson(params.gamma_m * np.abs(after.db) ** 2, x=after.t)
    internal = simpson(2.0 * params.kappa0 * np.abs(after.dc) ** 2, x=after.t)

    traj = Trajectory(
        np.concatenate([before.t, after.t[1:]]),
        np.concatenate([before.db, after.db[1:]]),
        np.concatenate([before.dc, after.dc[1:]]),
        np.concatenate([before.out_L, after.out_L[1:]]),
        np.concatenate([before.out_R, after.out_R[1:]]),
    )
    return QSwitchResult(
        t_switch=float(t_switch),
        kappa_after=float(k_after),
        emitted_quanta=float(emitted),
        stored_before=float(before.quanta[-1]),
        mech_dissipated=float(mech),
        internal_dissipated=float(internal),
        remaining=float(after.quanta[-1]),
        trajectory=traj,
    )
