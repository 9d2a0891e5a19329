"""Textbook uniform-grid stencils, written independently of the package.

These are the reference forms the non-uniform schemes must reduce to when
every cell has the same width h. Interior nodes only; boundary values stay
fixed.
"""

import numpy as np


def lax_wendroff_two_step(u, dt, h, flux):
    u = np.asarray(u, dtype=np.float64)
    f = flux(u)
    star = 0.5 * (u[:-1] + u[1:]) - (dt / (2.0 * h)) * (f[1:] - f[:-1])
    fstar = flux(star)
    out = u.copy()
    out[1:-1] = u[1:-1] - (dt / h) * (fstar[1:] - fstar[:-1])
    return out


def maccormack(u, dt, h, flux):
    u = np.asarray(u, dtype=np.float64)
    f = flux(u)
    star = u[:-1] - (dt / h) * (f[1:] - f[:-1])
    fstar = flux(star)
    # corrector at interior node i uses star[i] and star[i-1]
    dstar = star[1:] - (dt / h) * (fstar[1:] - fstar[:-1])
    out = u.copy()
    out[1:-1] = 0.5 * (u[1:-1] + dstar)
    return out


def forward_time_centered_space(u, dt, h, flux):
    u = np.asarray(u, dtype=np.float64)
    f = flux(u)
    out = u.copy()
    out[1:-1] = u[1:-1] - (dt / (2.0 * h)) * (f[2:] - f[:-2])
    return out
