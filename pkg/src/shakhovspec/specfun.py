"""Plasma dispersion function, Faddeeva function and derivative sequences.

The plasma dispersion function used throughout is the Gaussian-weighted
Cauchy integral

    Z(zeta) = (2*pi)^{-1/2} * integral e^{-v^2/2}/(v - zeta) dv,

a different analytic function on each half-plane.  Both half-plane
restrictions extend to entire functions Z+ (from Im zeta > 0) and Z-
(from Im zeta < 0); the `Branch` enum selects which one is meant.
Everything is evaluated through the Faddeeva function w(z), for which
scipy ships a mature double-precision kernel:

    Z+(zeta) = i*sqrt(pi/2) * w(zeta/sqrt(2)),
    Z-(zeta) = conj(Z+(conj(zeta))).
"""
from __future__ import annotations

import enum

import numpy as np
from scipy.special import wofz

SQRT_PI_OVER_2 = np.sqrt(np.pi / 2.0)


class Branch(enum.Enum):
    """Half-plane branch of the plasma dispersion function."""

    UPPER = 1   # analytic continuation of Z from Im zeta > 0 (Z+)
    LOWER = -1  # analytic continuation of Z from Im zeta < 0 (Z-)


def faddeeva_w(zeta):
    """Faddeeva function w(zeta) = e^{-zeta^2} (1 - erf(-i*zeta)).

    Accepts scalars or arrays.  Where the underlying kernel overflows
    (deep lower half-plane), the entry is replaced by the asymptotic
    value i/(sqrt(pi)*zeta) so no Inf/NaN escapes.
    """
    zeta = np.asarray(zeta, dtype=complex)
    out = wofz(zeta)
    bad = ~np.isfinite(out.real) | ~np.isfinite(out.imag)
    if np.any(bad):
        zb = np.where(bad, zeta, 1.0)
        out = np.where(bad, 1j / (np.sqrt(np.pi) * zb) * (1.0 + 0.5 / zb**2), out)
    if out.ndim == 0:
        return complex(out)
    return out


def _z_upper(zeta):
    """Z+ for scalar/array zeta, with overflow guard for the continued region."""
    zeta = np.asarray(zeta, dtype=complex)
    out = 1j * SQRT_PI_OVER_2 * wofz(zeta / np.sqrt(2.0))
    bad = ~np.isfinite(out.real) | ~np.isfinite(out.imag)
    if np.any(bad):
        # wofz only overflows via its reflection term 2 e^{-z^2}; the power
        # series part stays finite, so return the asymptotic value instead.
        zb = np.where(bad, zeta, 2.0)
        asym = -1.0 / zb - 1.0 / zb**3 - 3.0 / zb**5 - 15.0 / zb**7
        out = np.where(bad, asym, out)
    return out


def plasma_z(zeta, branch: Branch = Branch.UPPER):
    """Evaluate Z on the requested branch; total on C, no NaN/Inf escapes.

    On the real axis the branch's one-sided limit is returned (the
    principal value is intentionally not implemented).
    """
    zeta = np.asarray(zeta, dtype=complex)
    if branch is Branch.UPPER:
        out = _z_upper(zeta)
    else:
        out = np.conj(_z_upper(np.conj(zeta)))
    if out.ndim == 0:
        return complex(out)
    return out


def plasma_z_natural(zeta):
    """Z on the natural branch of each point: Z+ for Im zeta >= 0, else Z-.

    This is the piecewise-defined function appearing in the spectral
    function; both half-planes are their own analytic worlds.
    """
    zeta = np.asarray(zeta, dtype=complex)
    upper = zeta.imag >= 0.0
    out = np.where(upper, _z_upper(zeta), np.conj(_z_upper(np.conj(zeta))))
    if out.ndim == 0:
        return complex(out)
    return out


def z_derivative_seq(zeta, branch: Branch = Branch.UPPER, n: int = 1):
    """Return [Z, Z', ..., Z^(n)] from the exact recurrence.

    Uses Z' = -zeta*Z - 1 and Z^(k+1) = -zeta*Z^(k) - k*Z^(k-1); no
    numerical differentiation anywhere.  Only low orders are supported.
    """
    if n < 0 or n > 8:
        raise ValueError("derivative order must be in 0..8")
    z0 = plasma_z(zeta, branch)
    seq = [z0]
    if n >= 1:
        seq.append(-zeta * z0 - 1.0)
    for k in range(1, n):
        seq.append(-zeta * seq[k] - k * seq[k - 1])
    return seq


def z_derivative_seq_stable(zeta: complex, n: int) -> np.ndarray:
    """Natural-branch [Z, Z', ..., Z^(n)] accurate for all |zeta|.

    The upward recurrence loses relative accuracy on high orders once
    |zeta| is large (the true sequence is the minimal solution), so past
    |zeta| = 12 each derivative is summed from its termwise-differentiated
    asymptotic series at optimal truncation.  Used by the resolvent-matrix
    assembly; `z_derivative_seq` above stays the plain recurrence.
    """
    zeta = complex(zeta)
    if abs(zeta) < 12.0:
        z0 = plasma_z_natural(zeta)
        seq = [z0, -zeta * z0 - 1.0]
        for k in range(1, n):
            seq.append(-zeta * seq[k] - k * seq[k - 1])
        return np.array(seq[: n + 1])
    if zeta.imag < 0:
        return np.conj(z_derivative_seq_stable(np.conj(zeta), n))
    out = np.empty(n + 1, dtype=complex)
    inv2 = 1.0 / (zeta * zeta)
    for k in range(n + 1):
        # term_m = -(2m-1)!! * (-1)^k (2m+1)(2m+2)...(2m+k) * zeta^{-(2m+1+k)}
        term = -1.0 + 0.0j
        for j in range(1, k + 1):
            term *= -j
        term *= zeta ** (-(1 + k))
        total = 0.0 + 0.0j
        prev = np.inf
        for m in range(200):
            mag = abs(term)
            if not np.isfinite(mag) or mag >= prev:
                break
            total += term
            prev = mag
            ratio = (2 * m + 1)
            for j in range(1, k + 1):
                ratio *= (2 * m + 2 + j) / (2 * m + j)
            term *= ratio * inv2
        out[k] = total
    return out


def hermite_he(n: int, x):
    """Probabilists' Hermite polynomial He_n via the standard recurrence."""
    x = np.asarray(x)
    h0 = np.ones_like(x)
    if n == 0:
        return h0
    h1 = x.copy() if hasattr(x, "copy") else x
    for k in range(1, n):
        h0, h1 = h1, x * h1 - k * h0
    return h1
