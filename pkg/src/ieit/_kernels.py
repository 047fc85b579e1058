"""Fixed-step RK4 inner loops for the fluctuation equations.

The loops are written in plain scalar Python so that the same source runs
either compiled by numba or interpreted. Set ``IEIT_DISABLE_NUMBA=1`` to
force the interpreted path (also used automatically when numba is missing).
"""
import cmath
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get("IEIT_DISABLE_NUMBA", "0").lower() not in (
    "1",
    "true",
    "yes",
)


def jit(fn):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


@jit
def rk4_rwa(b0, c0, kb, kc, half_gamma, decay, drive, x, t0, dt, n_steps, stride):
    # db/dt = kb*c - half_gamma*b
    # dc/dt = kc*b - decay*c + drive*exp(-i x t)
    n_rec = n_steps // stride + 1
    bs = np.empty(n_rec, dtype=np.complex128)
    cs = np.empty(n_rec, dtype=np.complex128)
    b = b0
    c = c0
    bs[0] = b
    cs[0] = c
    h2 = 0.5 * dt
    rot = cmath.exp(-1j * x * h2)
    f0 = drive * cmath.exp(-1j * x * t0)
    k = 1
    for i in range(n_steps):
        fh = f0 * rot
        f1 = fh * rot
        k1b = kb * c - half_gamma * b
        k1c = kc * b - decay * c + f0
        bb = b + h2 * k1b
        cc = c + h2 * k1c
        k2b = kb * cc - half_gamma * bb
        k2c = kc * bb - decay * cc + fh
        bb = b + h2 * k2b
        cc = c + h2 * k2c
        k3b = kb * cc - half_gamma * bb
        k3c = kc * bb - decay * cc + fh
        bb = b + dt * k3b
        cc = c + dt * k3c
        k4b = kb * cc - half_gamma * bb
        k4c = kc * bb - decay * cc + f1
        b = b + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        c = c + dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        # re-anchor the drive phase to avoid drift from repeated products
        f0 = drive * cmath.exp(-1j * x * (t0 + (i + 1) * dt))
        if (i + 1) % stride == 0:
            bs[k] = b
            cs[k] = c
            k += 1
    return bs, cs


@jit
def full_rhs(b, c, e1, e2, ed, gcs, half_gamma, decay, drive):
    # e1 = exp(i w1 t), e2 = exp(i w2 t), ed = exp(-i wd t)
    db = -1j * (gcs.conjugate() * c * e1.conjugate() + gcs * c.conjugate() * e2) - half_gamma * b
    dc = -decay * c - 1j * gcs * (b * e1 + b.conjugate() * e2) + drive * ed
    return db, dc


@jit
def rk4_full(b0, c0, gcs, half_gamma, decay, drive, w1, w2, wd, t0, dt, n_steps, stride):
    # counter-rotating terms kept; w1 = Delta - omega_m, w2 = Delta + omega_m,
    # wd = drive frequency in the frame rotating at Delta
    n_rec = n_steps // stride + 1
    bs = np.empty(n_rec, dtype=np.complex128)
    cs = np.empty(n_rec, dtype=np.complex128)
    b = b0
    c = c0
    bs[0] = b
    cs[0] = c
    h2 = 0.5 * dt
    e1 = cmath.exp(1j * w1 * t0)
    e2 = cmath.exp(1j * w2 * t0)
    ed = cmath.exp(-1j * wd * t0)
    k = 1
    for i in range(n_steps):
        th = t0 + (i + 0.5) * dt
        t1 = t0 + (i + 1) * dt
        e1h = cmath.exp(1j * w1 * th)
        e2h = cmath.exp(1j * w2 * th)
        edh = cmath.exp(-1j * wd * th)
        e1n = cmath.exp(1j * w1 * t1)
        e2n = cmath.exp(1j * w2 * t1)
        edn = cmath.exp(-1j * wd * t1)
        k1b, k1c = full_rhs(b, c, e1, e2, ed, gcs, half_gamma, decay, drive)
        k2b, k2c = full_rhs(b + h2 * k1b, c + h2 * k1c, e1h, e2h, edh, gcs, half_gamma,
                            decay, drive)
        k3b, k3c = full_rhs(b + h2 * k2b, c + h2 * k2c, e1h, e2h, edh, gcs, half_gamma,
                            decay, drive)
        k4b, k4c = full_rhs(b + dt * k3b, c + dt * k3c, e1n, e2n, edn, gcs, half_gamma,
                            decay, drive)
        b = b + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        c = c + dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        e1 = e1n
        e2 = e2n
        ed = edn
        if (i + 1) % stride == 0:
            bs[k] = b
            cs[k] = c
            k += 1
    return bs, cs
