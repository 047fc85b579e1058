"""Classical operating point of the pumped cavity.

With the probes off, the mean fields obey

    b_s = -i g |c_s|^2 / (gamma_m/2 + i omega_m)
    c_s = eps_c / (kappa_c + i Delta),   Delta = delta0 + g (b_s + b_s^*)

Eliminating ``b_s`` gives ``Delta = delta0 - beta u`` with ``u = |c_s|^2`` and
``beta = 2 g^2 omega_m / (gamma_m^2/4 + omega_m^2)``, so ``u`` solves the cubic

    u (kappa_c^2 + (delta0 - beta u)^2) = eps_c^2 .

In the scaled variable ``W = beta u / kappa_c`` this is the monic cubic
``W^3 - 2 D W^2 + (1 + D^2) W - P = 0`` with ``D = delta0 / kappa_c`` and
``P = beta eps_c^2 / kappa_c^3``, which is what gets solved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np

from .model import SystemParams, pump_amplitude

# Relative separation below which two roots are one double root.
FOLD_RTOL = 1e-9


@dataclass(frozen=True)
class SteadyState:
    c_s: complex
    b_s: complex
    Delta: float
    G: float
    stable: bool
    delta0: float
    eps_c: complex

    @property
    def u(self) -> float:
        """Intracavity pump photon number |c_s|^2."""
        return abs(self.c_s) ** 2


def drift_matrix(params: SystemParams, state: SteadyState) -> np.ndarray:
    """Rotating-wave drift matrix acting on (delta b, delta c)."""
    gc = params.g * state.c_s
    return np.array(
        [
            [-params.gamma_m / 2.0, -1j * np.conj(gc)],
            [-1j * gc, -params.cavity_decay],
        ]
    )


def drift_is_stable(params: SystemParams, state: SteadyState) -> bool:
    return bool(np.all(np.linalg.eigvals(drift_matrix(params, state)).real < 0))


def _cubic_real_roots(D: float, P: float) -> List[float]:
    """Real roots of W^3 - 2 D W^2 + (1 + D^2) W - P, ascending, with multiplicity."""
    a, b, c = -2.0 * D, 1.0 + D * D, -P
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    half_q = q / 2.0
    third_p = p / 3.0
    disc = half_q * half_q + third_p**3
    scale = max(half_q * half_q, abs(third_p) ** 3, np.finfo(float).tiny)

    if abs(disc) <= 1e-12 * scale:
        # double root (or triple at the cusp)
        r = np.cbrt(-half_q)
        roots = [2.0 * r + shift, -r + shift, -r + shift]
    elif disc > 0:
        s = math.sqrt(disc)
        A = -math.copysign(np.cbrt(abs(half_q) + s), half_q)
        t = A - third_p / A if A != 0.0 else 0.0
        roots = [t + shift]
    else:
        m = 2.0 * math.sqrt(-third_p)
        arg = 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)
        phi = math.acos(min(1.0, max(-1.0, arg)))
        roots = [m * math.cos(phi / 3.0 - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]

    polished = []
    for w in roots:
        for _ in range(2):
            f = ((w + a) * w + b) * w + c
            fp = (3.0 * w + 2.0 * a) * w + b
            if abs(fp) <= 1e-6 * b:
                break  # no Newton step at a fold
            w -= f / fp
        polished.append(w)
    return sorted(polished)


def branch_stability(roots: Sequence[float]) -> List[bool]:
    """Stability of each root of the steady-state cubic.

    ``roots`` are all real roots counted with multiplicity. For a cubic with
    positive leading coefficient the residual slope at a root has the sign of
    the product of its distances to the other roots, so the middle of three
    roots is unstable and a double root (zero slope) is marginal, hence
    reported unstable.
    """
    roots = list(roots)
    if not roots:
        return []
    scale = max(abs(r) for r in roots) or 1.0
    flags = []
    for i, r in enumerate(roots):
        prod = 1.0
        for j, s in enumerate(roots):
            if i == j:
                continue
            d = r - s
            if abs(d) <= FOLD_RTOL * scale:
                d = 0.0
            prod *= d
        flags.append(prod > 0)
    return flags


def _state(params: SystemParams, u: float, Delta: float, eps: complex, delta0: float,
           branch_ok: bool) -> SteadyState:
    c_s = eps / complex(params.cavity_decay, Delta)
    b_s = -1j * params.g * u / complex(params.gamma_m / 2.0, params.omega_m)
    st = SteadyState(
        c_s=complex(c_s),
        b_s=complex(b_s),
        Delta=float(Delta),
        G=params.g * math.sqrt(u),
        stable=branch_ok,
        delta0=float(delta0),
        eps_c=complex(eps),
    )
    if branch_ok and not drift_is_stable(params, st):
        st = replace(st, stable=False)
    return st


def solve_steady_states(params: SystemParams) -> List[SteadyState]:
    """All self-consistent operating points, ordered by ascending |c_s|^2."""
    if params.delta0 is None:
        raise ValueError("delta0 must be given; use fix_operating_point for a free detuning")
    eps = pump_amplitude(params)
    e2 = abs(eps) ** 2
    kc = params.cavity_decay
    beta = params.frequency_pull
    d0 = float(params.delta0)

    if e2 == 0.0:
        return [_state(params, 0.0, d0, eps, d0, True)]
    if beta == 0.0:
        u = e2 / (kc * kc + d0 * d0)
        return [_state(params, u, d0, eps, d0, True)]

    D = d0 / kc
    P = beta * e2 / kc**3
    W = _cubic_real_roots(D, P)
    flags = branch_stability(W)

    out = []
    seen: List[float] = []
    scale = max(abs(w) for w in W)
    for w, ok in zip(W, flags):
        if any(abs(w - s) <= FOLD_RTOL * scale for s in seen):
            continue
        seen.append(w)
        u = w * kc / beta
        out.append(_state(params, u, kc * (D - w), eps, d0, ok))
    return out


def _slope_positive(params: SystemParams, u: float, delta0: float) -> bool:
    kc = params.cavity_decay
    beta = params.frequency_pull
    D, W = delta0 / kc, beta * u / kc
    return 3.0 * W * W - 4.0 * D * W + 1.0 + D * D > FOLD_RTOL * (1.0 + D * D)


def fix_operating_point(params: SystemParams) -> SteadyState:
    """Operating point with the effective detuning locked to omega_m.

    The bare detuning that makes this self-consistent is computed and stored
    in ``delta0``; any ``params.delta0`` is ignored.
    """
    kc, wm = params.cavity_decay, params.omega_m
    if params.G is not None:
        if params.g == 0.0:
            if params.G != 0.0:
                raise ValueError("g = 0 with G > 0 would need an infinite intracavity field")
            u = 0.0
        else:
            amp = params.G / params.g
            if amp < 0:
                raise ValueError("G and g must have the same sign")
            u = amp * amp
        eps = math.sqrt(u * (kc * kc + wm * wm))
    else:
        eps = pump_amplitude(params)
        u = abs(eps) ** 2 / (kc * kc + wm * wm)
    delta0 = wm + params.frequency_pull * u
    return _state(params, u, wm, eps, delta0, _slope_positive(params, u, delta0))


def operating_point(params: SystemParams) -> SteadyState:
    """The operating point the rest of the package works at.

    A free ``delta0`` gives the red-sideband point. A coupling ``G`` with a
    fixed ``delta0`` is unique. A power or amplitude pump with fixed
    ``delta0`` takes the lowest stable branch of the cubic.
    """
    if params.delta0 is None:
        return fix_operating_point(params)
    if params.G is not None:
        if params.g == 0.0 and params.G != 0.0:
            raise ValueError("g = 0 with G > 0 would need an infinite intracavity field")
        u = 0.0 if params.G == 0.0 else (params.G / params.g) ** 2
        Delta = params.delta0 - params.frequency_pull * u
        eps = math.sqrt(u * (params.cavity_decay**2 + Delta * Delta))
        return _state(params, u, Delta, eps, params.delta0,
                      _slope_positive(params, u, params.delta0))
    states = solve_steady_states(params)
    for st in states:
        if st.stable:
            return st
    return states[0]


def fixed_point_residual(params: SystemParams, state: SteadyState) -> float:
    """Largest relative residual of the two mean-field fixed-point equations.

    Uses ``b_s`` directly (not the eliminated form) to rebuild the detuning.
    """
    u = abs(state.c_s) ** 2
    b_expect = -1j * params.g * u / complex(params.gamma_m / 2.0, params.omega_m)
    Delta = state.delta0 + params.g * 2.0 * state.b_s.real
    c_expect = state.eps_c / complex(params.cavity_decay, Delta)
    rb = abs(state.b_s - b_expect) / max(abs(b_expect), np.finfo(float).tiny)
    rc = abs(state.c_s - c_expect) / max(abs(c_expect), np.finfo(float).tiny)
    if b_expect == 0 and state.b_s == 0:
        rb = 0.0
    if c_expect == 0 and state.c_s == 0:
        rc = 0.0
    return float(max(rb, rc))
