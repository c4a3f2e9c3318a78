"""Gauss-Legendre panel quadrature with node-doubling refinement.

Integrands are smooth and at most mildly oscillatory at desk scale, so
plain tensor GL panels refined by doubling the node count until successive
results agree are accurate and, importantly, reproducible: node layouts are
functions of the requested counts only.
"""

from __future__ import annotations

import functools

import numpy as np


class QuadratureError(RuntimeError):
    pass


@functools.lru_cache(maxsize=256)
def gl_nodes(n, lo, hi):
    """Gauss-Legendre nodes and weights on [lo, hi] (cached, deterministic)."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return mid + half * x, half * w


def integrate_1d(f, lo, hi, n=32, tol=None, max_doublings=6):
    """Integrate a callable on [lo, hi]; vectorized over node arrays.

    With tol set, doubles the node count until the result moves by less
    than tol (relative to max(1, |result|)) and returns (value, n_used).
    """
    x, w = gl_nodes(n, float(lo), float(hi))
    val = np.sum(w * f(x))
    if tol is None:
        return val, n
    for _ in range(max_doublings):
        n *= 2
        x, w = gl_nodes(n, float(lo), float(hi))
        new = np.sum(w * f(x))
        if abs(new - val) <= tol * max(1.0, abs(new)):
            return new, n
        val = new
    raise QuadratureError(f"1d quadrature did not settle below {tol} by n={n}")


def integrate_2d(f, box, n=24, tol=None, max_doublings=5):
    """Tensor GL integration of f(X, Y) over box = ((x0,x1),(y0,y1)).

    f must accept meshgrid arrays.  Returns (value, n_used_per_axis).
    """
    (x0, x1), (y0, y1) = box

    def once(m):
        x, wx = gl_nodes(m, float(x0), float(x1))
        y, wy = gl_nodes(m, float(y0), float(y1))
        gx, gy = np.meshgrid(x, y, indexing="ij")
        vals = f(gx, gy)
        return np.einsum("i,j,ij->", wx, wy, vals)

    val = once(n)
    if tol is None:
        return val, n
    for _ in range(max_doublings):
        n *= 2
        new = once(n)
        if abs(new - val) <= tol * max(1.0, abs(new)):
            return new, n
        val = new
    raise QuadratureError(f"2d quadrature did not settle below {tol} by n={n}")


def oscillatory_cubic_phase(x, t, n=96, r_max=None):
    """(1/2pi) * integral of exp(i x tau + i t tau^3) over the real line.

    Evaluated on the rotated ray tau = r e^{i pi/6} (for t > 0), where the
    cubic phase decays as exp(-t r^3); the real-line integral equals
    2 Re of the rotated half-line integral.  For t < 0 the substitution
    tau -> -tau maps to the (x, t) -> (-x, -t) case.
    """
    if t == 0:
        raise ValueError("cubic coefficient t must be nonzero")
    if t < 0:
        return oscillatory_cubic_phase(-x, -t, n=n, r_max=r_max)
    if r_max is None:
        # exp(-t r^3) below 1e-18, plus slack for the e^{|x| r / 2} factor
        r_max = (45.0 / t) ** (1.0 / 3.0) + max(0.0, -x) * 0.75 + 3.0
    rot = np.exp(1j * np.pi / 6)

    def integrand(r):
        tau = r * rot
        return np.exp(1j * x * tau - t * r ** 3)

    val, _ = integrate_1d(integrand, 0.0, r_max, n=n, tol=1e-12, max_doublings=5)
    return (2.0 * (rot * val).real) / (2.0 * np.pi)
