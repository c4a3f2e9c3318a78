"""Airy functions Ai, Bi and their derivatives for real arguments.

Three regimes:

* |x| <= 8.25: the two Maclaurin series, summed in fixed-point big-integer
  arithmetic (256 fractional bits) with the input taken as an exact rational.
  This sidesteps the catastrophic cancellation that makes double-precision
  series summation lose ~12 digits for Ai near +8.
* x > 8.25: the standard monotone asymptotic expansions in zeta = (2/3)x^1.5
  (no cancellation: the Ai series alternates, the Bi series is positive).
* x < -8.25: Taylor propagation of the Airy ODE w'' = x w from the series
  value at -8, stepping leftwards.  The oscillatory regime is numerically
  stable, so fixed 25-term Taylor steps of length 1/2 keep ~1e-15 accuracy.

Bi overflows double precision near x = 104; this is reported explicitly.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

_BITS = 256
_SCALE = 1 << _BITS

# seeds: Ai(0), Ai'(0), Bi(0), Bi'(0) to 85 digits (classical constants,
# equal to 3^(-2/3)/Gamma(2/3), -3^(-1/3)/Gamma(1/3), and sqrt(3) multiples)
_AI0 = Fraction(
    "0.3550280538878172392600631860041831763979791741991772405833265103008100424501267129572")
_AIP0 = Fraction(
    "-0.2588194037928067984051835601892039634790911383549345822100018138561027726767902806542")
_BI0 = Fraction(
    "0.6149266274460007351509223690936135535947281886485965050408787530142965193055206405294")
_BIP0 = Fraction(
    "0.448288357353826357914823710398828390866226799212262061082808778372330755009780647185")

_AI0_FIX = int(_AI0 * _SCALE)
_AIP0_FIX = int(_AIP0 * _SCALE)
_BI0_FIX = int(_BI0 * _SCALE)
_BIP0_FIX = int(_BIP0 * _SCALE)

_SERIES_CUT = 8.25
_BI_OVERFLOW = 103.0


class AiryOverflowError(OverflowError):
    pass


def _fixed_series(xf: Fraction):
    """(f, g, f', g') of the two Airy basis series at xf, as fixed-point ints.

    f = sum c_k z^(3k), g = sum d_k z^(3k+1) with f'' = z f, g'' = z g,
    f(0)=1, g'(0)=1.  All four sums share the z^3 multiplier recurrences.
    """
    num = xf.numerator
    den = xf.denominator
    n3 = num ** 3
    d3 = den ** 3

    def times_z3(t, divisor):
        return (t * n3) // (d3 * divisor)

    z_fix = (num * _SCALE) // den

    f_term = _SCALE                      # c_0 z^0
    g_term = z_fix                       # d_0 z^1
    fp_term = (z_fix * z_fix) // (2 * _SCALE)  # 3 c_1 z^2 = z^2/2
    gp_term = _SCALE                     # (3*0+1) d_0 z^0

    f_sum, g_sum, fp_sum, gp_sum = f_term, g_term, fp_term, gp_term
    k = 1
    while True:
        f_term = times_z3(f_term, (3 * k) * (3 * k - 1))
        g_term = times_z3(g_term, (3 * k) * (3 * k + 1))
        gp_term = times_z3(gp_term, (3 * k) * (3 * k - 2))
        if k > 1:
            fp_term = times_z3(fp_term, (3 * k - 3) * (3 * k - 1))
        f_sum += f_term
        g_sum += g_term
        gp_sum += gp_term
        if k > 1:
            fp_sum += fp_term
        if (abs(f_term) < 8 and abs(g_term) < 8
                and abs(fp_term) < 8 and abs(gp_term) < 8):
            break
        k += 1
        if k > 400:  # unreachable for |x| <= 9; guards against misuse
            raise ValueError("Airy series did not converge")
    return f_sum, g_sum, fp_sum, gp_sum


def _series_quad(x: float):
    """(Ai, Ai', Bi, Bi') at x via exact-rational series summation."""
    xf = Fraction(x)
    f, g, fp, gp = _fixed_series(xf)
    ai = (_AI0_FIX * f + _AIP0_FIX * g) >> _BITS
    aip = (_AI0_FIX * fp + _AIP0_FIX * gp) >> _BITS
    bi = (_BI0_FIX * f + _BIP0_FIX * g) >> _BITS
    bip = (_BI0_FIX * fp + _BIP0_FIX * gp) >> _BITS
    s = float(_SCALE)
    return ai / s, aip / s, bi / s, bip / s


def _asym_sums(zeta: float, alternate: bool):
    """(sum u_k zeta^-k, sum v_k zeta^-k), signs alternating if requested.

    Terms are added while they shrink; the expansion is truncated at its
    smallest term, which bounds the error for these asymptotic series.
    """
    u = 1.0
    su = 1.0
    sv = 1.0
    k = 1
    prev = abs(u)
    while k < 60:
        u = u * (6 * k - 5) * (6 * k - 1) / (72.0 * k)
        term = u / zeta ** k
        if abs(term) >= prev:
            break
        prev = abs(term)
        sgn = -1.0 if (alternate and k % 2 == 1) else 1.0
        su += sgn * term
        sv += sgn * term * (6 * k + 1) / (1 - 6 * k)
        k += 1
    return su, sv


def _monotone_quad(x: float):
    """Asymptotic (Ai, Ai', Bi, Bi') for large positive x."""
    zeta = (2.0 / 3.0) * x ** 1.5
    su_a, sv_a = _asym_sums(zeta, alternate=True)
    su_b, sv_b = _asym_sums(zeta, alternate=False)
    root = math.sqrt(math.pi)
    q = x ** 0.25
    ai = math.exp(-zeta) / (2.0 * root * q) * su_a
    aip = -q * math.exp(-zeta) / (2.0 * root) * sv_a
    if x > _BI_OVERFLOW:
        bi = bip = math.inf
    else:
        bi = math.exp(zeta) / (root * q) * su_b
        bip = q * math.exp(zeta) / root * sv_b
    return ai, aip, bi, bip


_TAYLOR_TERMS = 25
_TAYLOR_STEP = 0.5


@functools.lru_cache(maxsize=4096)
def _oscillatory_quad(x: float):
    """(Ai, Ai', Bi, Bi') for x < -8.25 by Taylor-stepping w'' = x w.

    Starting data comes from the exact series at -8; the oscillatory
    direction has no exponential dichotomy, so the propagation is stable.
    """
    x0 = -8.0
    ai, aip, bi, bip = _series_quad(x0)
    target = x

    def step(w, wp, x0, h):
        # Taylor coefficients: (n+2)(n+1) a_{n+2} = x0 a_n + a_{n-1}
        a = [w, wp]
        for n in range(_TAYLOR_TERMS - 2):
            prev = a[n - 1] if n >= 1 else 0.0
            a.append((x0 * a[n] + prev) / ((n + 2) * (n + 1)))
        val = 0.0
        dval = 0.0
        for n in range(len(a) - 1, -1, -1):
            val = val * h + a[n]
        for n in range(len(a) - 1, 0, -1):
            dval = dval * h + n * a[n]
        return val, dval

    pos = x0
    while pos > target + 1e-15:
        h = -min(_TAYLOR_STEP, pos - target)
        ai, aip = step(ai, aip, pos, h)
        bi, bip = step(bi, bip, pos, h)
        pos += h
    return ai, aip, bi, bip


@functools.lru_cache(maxsize=65536)
def _airy_quad(x: float):
    if x != x:
        raise ValueError("Airy argument is NaN")
    if abs(x) <= _SERIES_CUT:
        return _series_quad(x)
    if x > 0:
        return _monotone_quad(x)
    return _oscillatory_quad(round(x, 14))


_KIND_INDEX = {"Ai": 0, "AiPrime": 1, "Bi": 2, "BiPrime": 3}


def airy(kind: str, x) -> float:
    """Airy value for kind in {Ai, AiPrime, Bi, BiPrime} at real x.

    Accuracy: ~1e-15 relative in the series region, better than 1e-10
    relative for 8 < |x| <= 30.  Bi and BiPrime overflow doubles near
    x = 104 and raise AiryOverflowError there.
    """
    if kind not in _KIND_INDEX:
        raise ValueError(f"unknown Airy kind {kind!r}")
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError(f"Airy argument must be finite, got {x!r}")
    if kind in ("Bi", "BiPrime") and xf > _BI_OVERFLOW:
        raise AiryOverflowError(f"Bi overflows double precision at x = {xf}")
    return _airy_quad(xf)[_KIND_INDEX[kind]]


def airy_all(x):
    """(Ai, Ai', Bi, Bi') at x; Bi entries are +inf past the overflow cut."""
    return _airy_quad(float(x))


def wronskian(x) -> float:
    """Ai(x) Bi'(x) - Ai'(x) Bi(x); identically 1/pi for the true functions."""
    ai, aip, bi, bip = _airy_quad(float(x))
    return ai * bip - aip * bi
