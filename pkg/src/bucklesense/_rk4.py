"""Compiled fixed-step RK4 kernels for the normalized elastica.

State is (theta, omega, eta, zeta) with omega = dtheta/dt, eta' = sin(theta)
and zeta' = 1 - cos(theta) written as 2 sin^2(theta/2) so that small
end-shortenings keep their relative precision.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def _rhs(kappa, th):
    s = math.sin(th)
    h = math.sin(0.5 * th)
    return -kappa * s - math.cos(th), s, 2.0 * h * h


@njit(cache=True)
def rk4_step(kappa, th, w, eta, zeta, h):
    a1, b1, c1 = _rhs(kappa, th)
    d1 = w
    th2 = th + 0.5 * h * d1
    w2 = w + 0.5 * h * a1
    a2, b2, c2 = _rhs(kappa, th2)
    d2 = w2
    th3 = th + 0.5 * h * d2
    w3 = w + 0.5 * h * a2
    a3, b3, c3 = _rhs(kappa, th3)
    d3 = w3
    th4 = th + h * d3
    w4 = w + h * a3
    a4, b4, c4 = _rhs(kappa, th4)
    d4 = w4
    k = h / 6.0
    return (
        th + k * (d1 + 2.0 * d2 + 2.0 * d3 + d4),
        w + k * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        eta + k * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        zeta + k * (c1 + 2.0 * c2 + 2.0 * c3 + c4),
    )


@njit(cache=True)
def shoot(kappa, slope0, h, t_cap):
    """March from t=0 until omega crosses zero upward.

    Returns (found, t_end, theta, omega, eta, zeta). The crossing is
    localized by bisecting the length of the last RK4 step.
    """
    th = 0.0
    w = slope0
    eta = 0.0
    zeta = 0.0
    t = 0.0
    n_max = int(t_cap / h) + 1
    for _ in range(n_max):
        th2, w2, eta2, zeta2 = rk4_step(kappa, th, w, eta, zeta, h)
        if w < 0.0 and w2 >= 0.0:
            lo = 0.0
            hi = h
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                wm = rk4_step(kappa, th, w, eta, zeta, mid)[1]
                if wm < 0.0:
                    lo = mid
                else:
                    hi = mid
            tau = lo if abs(rk4_step(kappa, th, w, eta, zeta, lo)[1]) < abs(
                rk4_step(kappa, th, w, eta, zeta, hi)[1]
            ) else hi
            th3, w3, eta3, zeta3 = rk4_step(kappa, th, w, eta, zeta, tau)
            return True, t + tau, th3, w3, eta3, zeta3
        th, w, eta, zeta = th2, w2, eta2, zeta2
        t += h
    return False, t, th, w, eta, zeta


@njit(cache=True)
def trajectory(kappa, slope0, h, n):
    """Uniform-step RK4 trajectory with n steps, shape (n+1, 4)."""
    out = np.empty((n + 1, 4))
    th = 0.0
    w = slope0
    eta = 0.0
    zeta = 0.0
    out[0, 0] = th
    out[0, 1] = w
    out[0, 2] = eta
    out[0, 3] = zeta
    for i in range(n):
        th, w, eta, zeta = rk4_step(kappa, th, w, eta, zeta, h)
        out[i + 1, 0] = th
        out[i + 1, 1] = w
        out[i + 1, 2] = eta
        out[i + 1, 3] = zeta
    return out
