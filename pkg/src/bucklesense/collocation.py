"""Chebyshev collocation solver for the normalized elastica.

Independent of the shooting path: the whole profile and the span t_end are
unknowns of one nonlinear system, solved by damped Newton with continuation
in kappa from the small-amplitude (linear) mode shape.

On tau = t / t_end in [0, 1] the problem reads

    theta_tautau + T^2 (kappa sin theta + cos theta) = 0
    theta(0) = 0,  theta_tau(1) = 0,  integral_0^1 sin theta dtau = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .errors import NoBuckledSolutionError


def cheb(n):
    """Chebyshev-Gauss-Lobatto nodes on [-1, 1] and the differentiation matrix."""
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    return x, d


def clenshaw_curtis_weights(n):
    """Quadrature weights on the Chebyshev-Lobatto nodes of [-1, 1]."""
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    interior = theta[1:-1]
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * interior) / (4 * k * k - 1)
        v -= np.cos(n * interior) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * interior) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    return w


@dataclass(frozen=True, eq=False)
class CollocationSolution:
    kappa: float
    t_end: float
    tau: np.ndarray
    theta: np.ndarray
    slope0: float

    def theta_at_tau(self, tau):
        return BarycentricInterpolator(self.tau, self.theta)(tau)


class _System:
    def __init__(self, n):
        x, d = cheb(n)
        # tau = (1 - x) / 2 runs 0 -> 1 as the node index increases
        self.tau = (1.0 - x) / 2.0
        self.d1 = -2.0 * d
        self.d2 = self.d1 @ self.d1
        self.w = clenshaw_curtis_weights(n) / 2.0
        self.n = n

    def residual(self, z, kappa):
        n = self.n
        th, T = z[:-1], z[-1]
        r = np.empty(n + 2)
        r[0] = th[0]
        r[1:n] = (self.d2 @ th)[1:n] + T * T * (kappa * np.sin(th[1:n]) + np.cos(th[1:n]))
        r[n] = (self.d1 @ th)[n]
        r[n + 1] = self.w @ np.sin(th)
        return r

    def jacobian(self, z, kappa):
        n = self.n
        th, T = z[:-1], z[-1]
        j = np.zeros((n + 2, n + 2))
        j[0, 0] = 1.0
        j[1:n, : n + 1] = self.d2[1:n]
        idx = np.arange(1, n)
        j[idx, idx] += T * T * (kappa * np.cos(th[1:n]) - np.sin(th[1:n]))
        j[1:n, n + 1] = 2.0 * T * (kappa * np.sin(th[1:n]) + np.cos(th[1:n]))
        j[n, : n + 1] = self.d1[n]
        j[n + 1, : n + 1] = self.w * np.cos(th)
        return j

    def newton(self, z, kappa, step_tol=1e-10, max_iter=60):
        """Damped Newton; converged when a full step falls below ``step_tol``.

        The floor is set by round-off in D2 (condition number ~1e8 at n=64);
        the final full step is still applied.
        """
        r = self.residual(z, kappa)
        for _ in range(max_iter):
            norm = np.linalg.norm(r)
            step = np.linalg.solve(self.jacobian(z, kappa), -r)
            if np.max(np.abs(step)) < step_tol:
                return z + step, True
            lam = 1.0
            while True:
                z_new = z + lam * step
                r_new = self.residual(z_new, kappa)
                if np.linalg.norm(r_new) < (1.0 - 1e-4 * lam) * norm or lam < 1e-4:
                    break
                lam *= 0.5
            z, r = z_new, r_new
        return z, False


def _linear_guess(sys_, kappa):
    mu = 4.493409457909064
    omega = math.sqrt(kappa)
    T = mu / omega
    a = mu / kappa
    t = sys_.tau * T
    th = a * np.sin(omega * t) + (np.cos(omega * t) - 1.0) / kappa
    return np.concatenate([th, [T]])


def solve_collocation(kappa, n=64, kappa_start=2000.0, n_continuation=40):
    """Solve the normalized elastica for ``kappa`` by spectral collocation."""
    sys_ = _System(n)
    k0 = max(kappa_start, kappa)
    path = np.geomspace(k0, kappa, n_continuation) if kappa < k0 else [kappa]
    z = _linear_guess(sys_, path[0])
    for k in path:
        z, ok = sys_.newton(z, k)
        if not ok:
            raise NoBuckledSolutionError(f"collocation Newton failed at kappa={k}")
    th, T = z[:-1], z[-1]
    slope0 = float((sys_.d1 @ th)[0] / T)
    return CollocationSolution(float(kappa), float(T), sys_.tau, th, slope0)
