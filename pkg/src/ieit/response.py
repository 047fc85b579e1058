"""Linearized probe response on the red sideband.

For probes at detuning ``x`` the fluctuation amplitudes oscillating as
``exp(-i x t)`` are

    dc_+ = (eps_L + eps_R) (gamma_m/2 - i x) / Den
    db_+ = -i g c_s^* (eps_L + eps_R) / Den
    Den  = (kappa_c - i x)(gamma_m/2 - i x) + G^2

and each port emits ``2 kappa dc_+ - eps_alpha``. Writing the ratio form over
a common denominator keeps ``gamma_m = 0`` finite away from the single
singular point.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .model import ProbeDrive, SystemParams, check_resolved_sideband, effective_kappa
from .steady_state import SteadyState

DEFAULT_SPAN = 10.0
DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class ProbeResponse:
    x: np.ndarray | float
    dc_plus: np.ndarray | complex
    db_plus: np.ndarray | complex
    out_L_plus: np.ndarray | complex
    out_R_plus: np.ndarray | complex
    out_L_minus: np.ndarray | complex
    out_R_minus: np.ndarray | complex
    cavity_norm: np.ndarray | float
    mech_norm: np.ndarray | float
    out_norm_L: np.ndarray | float
    out_norm_R: np.ndarray | float
    phi_plus_norm: np.ndarray | float
    phi_minus_norm: np.ndarray | float


@dataclass(frozen=True)
class IEITPoint:
    x_minus: float
    x_plus: float
    gamma_m_required: float
    kappa_eff: float
    exists: bool


def detuning_grid(kappa: float, x_min: float = -DEFAULT_SPAN, x_max: float = DEFAULT_SPAN,
                  points: int = DEFAULT_POINTS) -> np.ndarray:
    """Inclusive linear grid of probe detunings given in units of ``kappa``."""
    if points < 2 or not x_min < x_max:
        raise ValueError("need points >= 2 and x_min < x_max")
    return kappa * np.linspace(x_min, x_max, points)


def _check_sideband(params: SystemParams, op: SteadyState) -> None:
    check_resolved_sideband(params)
    if abs(op.Delta - params.omega_m) / params.omega_m > 1e-6:
        warnings.warn(
            f"operating point has Delta/omega_m = {op.Delta / params.omega_m:.6g}; "
            "the probe response assumes Delta = omega_m",
            stacklevel=3,
        )


def _amplitudes(params: SystemParams, op: SteadyState, total: complex, x):
    hg = params.gamma_m / 2.0
    mech = hg - 1j * x
    den = (params.cavity_decay - 1j * x) * mech + abs(op.G) ** 2
    if np.any(den == 0):
        raise ZeroDivisionError("response is singular (gamma_m = 0, x = 0, G = 0)")
    dc = total * mech / den
    db = -1j * params.g * np.conj(op.c_s) * total / den
    return dc, db


def probe_response(params: SystemParams, op: SteadyState, drive: ProbeDrive,
                   warn: bool = True) -> ProbeResponse:
    """Intracavity amplitudes, port outputs and normalized observables.

    Broadcasts over ``drive.x``. Normal modes are formed after rotating the
    mechanical amplitude by the phase of ``g c_s^*`` so that the coupling is
    ``-i|G|``.
    """
    if warn:
        _check_sideband(params, op)
    x = np.asarray(drive.x, dtype=float)
    eL, eR = complex(drive.eps_L), complex(drive.eps_R)
    dc, db = _amplitudes(params, op, eL + eR, x)

    two_k = 2.0 * params.kappa
    out_L = two_k * dc - eL
    out_R = two_k * dc - eR

    n_in = abs(eL) ** 2 + abs(eR) ** 2
    gcs = params.g * np.conj(op.c_s)
    phase = gcs / abs(gcs) if gcs != 0 else 1.0
    db_gauge = db * np.conj(phase)
    phi_p = (db_gauge + dc) / math.sqrt(2.0)
    phi_m = (db_gauge - dc) / math.sqrt(2.0)

    k2 = 4.0 * params.kappa**2
    with np.errstate(divide="ignore", invalid="ignore"):
        cav = k2 * np.abs(dc) ** 2 / n_in if n_in else np.full(x.shape, np.nan)
        mech = k2 * np.abs(db) ** 2 / n_in if n_in else np.full(x.shape, np.nan)
        pp = k2 * np.abs(phi_p) ** 2 / n_in if n_in else np.full(x.shape, np.nan)
        pm = k2 * np.abs(phi_m) ** 2 / n_in if n_in else np.full(x.shape, np.nan)
        nL = np.abs(out_L) ** 2 / abs(eL) ** 2 if eL else np.full(x.shape, np.nan)
        nR = np.abs(out_R) ** 2 / abs(eL) ** 2 if eL else np.full(x.shape, np.nan)

    def _s(a):
        return a[()] if isinstance(a, np.ndarray) and a.ndim == 0 else a

    zero = np.zeros_like(dc)
    return ProbeResponse(
        x=_s(x),
        dc_plus=_s(dc),
        db_plus=_s(db),
        out_L_plus=_s(out_L),
        out_R_plus=_s(out_R),
        out_L_minus=_s(zero),
        out_R_minus=_s(zero.copy()),
        cavity_norm=_s(cav),
        mech_norm=_s(mech),
        out_norm_L=_s(nL),
        out_norm_R=_s(nR),
        phi_plus_norm=_s(pp),
        phi_minus_norm=_s(pm),
    )


def ieit_conditions(params: SystemParams, op: SteadyState) -> IEITPoint:
    """Mechanical damping and probe detunings at which both outputs vanish.

    Assumes equal probes (``eps_R = eps_L``); that part is on the caller.
    """
    k_eff = effective_kappa(params)
    G = abs(op.G)
    gap = G * G - 4.0 * k_eff * k_eff
    if gap < 0:
        return IEITPoint(math.nan, math.nan, 4.0 * k_eff, k_eff, False)
    r = math.sqrt(gap)
    return IEITPoint(-r, r, 4.0 * k_eff, k_eff, True)


def output_field(params: SystemParams, op: SteadyState, drive: ProbeDrive, x, port: str = "L"):
    """Complex output of one port at detuning(s) ``x``; no warnings, no normalization."""
    dc, _ = _amplitudes(params, op, drive.total, np.asarray(x, dtype=float))
    eps = drive.eps_L if port == "L" else drive.eps_R
    return 2.0 * params.kappa * dc - complex(eps)


def find_absorption_zeros(params: SystemParams, op: SteadyState, drive: ProbeDrive,
                          x_range: Tuple[float, float], points: int = 4001,
                          atol: float = 1e-8) -> List[float]:
    """All detunings in ``x_range`` where the left output vanishes.

    Sign changes of the real and of the imaginary part are bracketed on a
    grid and refined by bisection; a refined point is kept only when the
    whole complex output is below ``atol*|eps_L|`` there. This also catches
    double zeros, where one of the two parts touches zero without crossing.
    """
    lo, hi = map(float, x_range)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError("x_range must be finite with x_min < x_max")
    scale = abs(drive.eps_L)
    if scale == 0:
        raise ValueError("eps_L must be nonzero")

    def f(x):
        return output_field(params, op, drive, x, "L")

    grid = np.linspace(lo, hi, points)
    vals = f(grid)
    candidates = []
    for part in (np.real, np.imag):
        v = part(vals)
        exact = np.flatnonzero(v == 0.0)
        candidates.extend(grid[exact])
        crossing = np.flatnonzero(v[:-1] * v[1:] < 0)
        for i in crossing:
            candidates.append(
                brentq(lambda s: float(part(f(s))), grid[i], grid[i + 1],
                       xtol=1e-15 * max(1.0, abs(grid[i])), rtol=4 * np.finfo(float).eps,
                       maxiter=500)
            )

    zeros: List[float] = []
    tol = 1e-9 * params.kappa
    for c in sorted(candidates):
        if abs(f(c)) > atol * scale:
            continue
        if zeros and abs(c - zeros[-1]) <= tol:
            continue
        zeros.append(float(c))
    return zeros


def absorption_fraction(params: SystemParams, op: SteadyState, drive: ProbeDrive):
    """Fraction of incoming probe power that does not leave either port."""
    n_in = drive.input_norm
    if n_in == 0:
        raise ValueError("total probe input is zero")
    x = np.asarray(drive.x, dtype=float)
    outL = output_field(params, op, drive, x, "L")
    outR = output_field(params, op, drive, x, "R")
    a = 1.0 - (np.abs(outL) ** 2 + np.abs(outR) ** 2) / n_in
    return a[()] if a.ndim == 0 else a


def response_poles(params: SystemParams, op: SteadyState) -> np.ndarray:
    """Complex detunings where the response denominator vanishes, sorted by real part."""
    kc, hg, G = params.cavity_decay, params.gamma_m / 2.0, abs(op.G)
    # Den(x) = -x^2 - i(kc + hg) x + kc*hg + G^2
    roots = np.roots([-1.0, -1j * (kc + hg), kc * hg + G * G])
    return roots[np.argsort(roots.real)]
