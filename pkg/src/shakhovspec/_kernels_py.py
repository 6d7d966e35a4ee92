"""Pure-numpy compute core: batched factor evaluation on the resolvent path.

This module mirrors the compiled extension `_kernels` (same public
functions, same math) and is what gets imported when the extension is
missing.  The hot object is the pair of spectral-function factors

    shear(lam)   = det(D_r G_S - I) restricted to one transverse block,
    diffac(lam)  = det(D_r G_S - I) restricted to the longitudinal block,

with G_S = N(zeta)/(i*kappa) assembled from the plasma-function
derivative sequence.  Assembling N from Hermite-expansion coefficients
times d^k Z keeps every entry free of cancellation, so this route is
uniformly stable in kappa, unlike the expanded zeta-polynomials, which
lose ~kappa^-6 digits as kappa -> 0.
"""
from __future__ import annotations

import numpy as np
from scipy.special import wofz

SQRT_PI_OVER_2 = np.sqrt(np.pi / 2.0)
_SQ6 = np.sqrt(6.0)
_SQ10 = np.sqrt(10.0)
_SQ15 = np.sqrt(15.0)
R_SWITCH = 12.0  # |zeta| above which the derivative sequence is summed from series

BACKEND_NAME = "python"


def _z_upper_vec(zeta):
    out = 1j * SQRT_PI_OVER_2 * wofz(zeta / np.sqrt(2.0))
    bad = ~np.isfinite(out.real) | ~np.isfinite(out.imag)
    if np.any(bad):
        zb = np.where(bad, zeta, 2.0)
        out = np.where(bad, -1.0 / zb - 1.0 / zb**3 - 3.0 / zb**5 - 15.0 / zb**7, out)
    return out


def _dz_upward(zeta, nmax):
    """Derivative table by upward recurrence; rows k=0..nmax."""
    flip = zeta.imag < 0
    zz = np.where(flip, np.conj(zeta), zeta)
    z0 = _z_upper_vec(zz)
    out = np.empty((nmax + 1,) + zeta.shape, dtype=complex)
    out[0] = z0
    if nmax >= 1:
        out[1] = -zz * z0 - 1.0
    for k in range(1, nmax):
        out[k + 1] = -zz * out[k] - k * out[k - 1]
    if np.any(flip):
        out = np.where(flip, np.conj(out), out)
    return out


def _dz_series(zeta, nmax):
    """Termwise-differentiated asymptotic series; valid for |zeta| >= R_SWITCH."""
    flip = zeta.imag < 0
    zz = np.where(flip, np.conj(zeta), zeta)
    out = np.zeros((nmax + 1,) + zeta.shape, dtype=complex)
    inv2 = 1.0 / (zz * zz)
    for k in range(nmax + 1):
        # m=0 term of d^k/dzeta^k (-1/zeta) = -(-1)^k k! zeta^{-(1+k)}
        fact = 1.0
        for j in range(1, k + 1):
            fact *= j
        sign = -1.0 if k % 2 else 1.0
        term = -sign * fact * zz ** (-(1 + k))
        total = np.zeros_like(zz)
        prev = np.full(zz.shape, np.inf)
        active = np.ones(zz.shape, dtype=bool)
        for m in range(200):
            mag = np.abs(term)
            active &= np.isfinite(mag) & (mag < prev)
            if not active.any():
                break
            total = np.where(active, total + term, total)
            prev = mag
            ratio = float(2 * m + 1)
            for j in range(1, k + 1):
                ratio *= (2 * m + 2 + j) / (2 * m + j)
            term = term * (ratio * inv2)
            if np.all(~active | (mag < 1e-18 * np.abs(total) + 1e-300)):
                break
        out[k] = total
    if np.any(flip):
        out = np.where(flip, np.conj(out), out)
    return out


def dz_table(zeta, nmax):
    """Stable natural-branch derivative table, shape (nmax+1, ...)."""
    zeta = np.asarray(zeta, dtype=complex)
    big = np.abs(zeta) >= R_SWITCH
    out = np.empty((nmax + 1,) + zeta.shape, dtype=complex)
    if np.any(~big):
        out[:, ~big] = _dz_upward(zeta[~big], nmax)
    if np.any(big):
        out[:, big] = _dz_series(zeta[big], nmax)
    return out


def _n_entries(d):
    """Nonzero N(zeta) entries from a derivative table d[k]."""
    n00 = d[0]
    n03 = -d[1]
    n04 = d[2] / _SQ6
    n07 = -d[3] / _SQ10
    n33 = d[2] + d[0]
    n34 = -(d[3] + 2.0 * d[1]) / _SQ6
    n37 = (d[4] + 3.0 * d[2]) / _SQ10
    n44 = (d[4] + 4.0 * d[2]) / 6.0 + d[0]
    n47 = -(d[5] + 6.0 * d[3] + 10.0 * d[1]) / (2.0 * _SQ15)
    n77 = (d[6] + 9.0 * d[4] + 22.0 * d[2]) / 10.0 + d[0]
    n11 = d[0]
    n15 = d[2] / _SQ10
    n55 = (d[4] + 4.0 * d[2]) / 10.0 + d[0]
    return n00, n03, n04, n07, n33, n34, n37, n44, n47, n77, n11, n15, n55


def _det4(a):
    """Determinant of a stacked symmetric 4x4 given as dict of entries."""
    # rows/cols: 0,1,2,3 = longitudinal coordinates (e0, e1, e4, e5)
    return np.linalg.det(a)


def factor_fields(zeta, kappa, r, derivs=False):
    """Batched (shear, diffac) factor values at points zeta.

    zeta must already encode the branch through its imaginary part
    (natural branch: Im zeta > 0 above the essential line).  With
    derivs=True also returns d/dzeta of both factors.

    Returns (shear, diffac) or (shear, diffac, dshear, ddiffac).
    """
    zeta = np.asarray(zeta, dtype=complex)
    shape = zeta.shape
    flat = zeta.ravel()
    nmax = 7 if derivs else 6
    d = dz_table(flat, nmax)
    ik_inv = 1.0 / (1j * kappa)

    n00, n03, n04, n07, n33, n34, n37, n44, n47, n77, n11, n15, n55 = _n_entries(d)

    # transverse 2x2 block of K = D_r N/(i kappa) - I  (rows weighted 1, r)
    k11 = n11 * ik_inv - 1.0
    k15 = n15 * ik_inv
    k51 = r * n15 * ik_inv
    k55 = r * n55 * ik_inv - 1.0
    shear = k11 * k55 - k15 * k51

    # longitudinal 4x4 block (rows weighted 1, 1, 1, r)
    npts = flat.size
    K = np.empty((npts, 4, 4), dtype=complex)
    K[:, 0, 0] = n00 * ik_inv - 1.0
    K[:, 0, 1] = n03 * ik_inv
    K[:, 0, 2] = n04 * ik_inv
    K[:, 0, 3] = n07 * ik_inv
    K[:, 1, 0] = n03 * ik_inv
    K[:, 1, 1] = n33 * ik_inv - 1.0
    K[:, 1, 2] = n34 * ik_inv
    K[:, 1, 3] = n37 * ik_inv
    K[:, 2, 0] = n04 * ik_inv
    K[:, 2, 1] = n34 * ik_inv
    K[:, 2, 2] = n44 * ik_inv - 1.0
    K[:, 2, 3] = n47 * ik_inv
    K[:, 3, 0] = r * n07 * ik_inv
    K[:, 3, 1] = r * n37 * ik_inv
    K[:, 3, 2] = r * n47 * ik_inv
    K[:, 3, 3] = r * n77 * ik_inv - 1.0
    diffac = np.linalg.det(K)

    if not derivs:
        return shear.reshape(shape), diffac.reshape(shape)

    dp = d[1:]  # derivative table shifted one order: entries of dN/dzeta
    (m00, m03, m04, m07, m33, m34, m37, m44, m47, m77,
     m11, m15, m55) = _n_entries(dp)

    dk11 = m11 * ik_inv
    dk15 = m15 * ik_inv
    dk51 = r * m15 * ik_inv
    dk55 = r * m55 * ik_inv
    dshear = dk11 * k55 + k11 * dk55 - dk15 * k51 - k15 * dk51

    dK = np.empty_like(K)
    dK[:, 0, 0] = m00 * ik_inv
    dK[:, 0, 1] = m03 * ik_inv
    dK[:, 0, 2] = m04 * ik_inv
    dK[:, 0, 3] = m07 * ik_inv
    dK[:, 1, 0] = m03 * ik_inv
    dK[:, 1, 1] = m33 * ik_inv
    dK[:, 1, 2] = m34 * ik_inv
    dK[:, 1, 3] = m37 * ik_inv
    dK[:, 2, 0] = m04 * ik_inv
    dK[:, 2, 1] = m34 * ik_inv
    dK[:, 2, 2] = m44 * ik_inv
    dK[:, 2, 3] = m47 * ik_inv
    dK[:, 3, 0] = r * m07 * ik_inv
    dK[:, 3, 1] = r * m37 * ik_inv
    dK[:, 3, 2] = r * m47 * ik_inv
    dK[:, 3, 3] = r * m77 * ik_inv
    ddiffac = np.zeros(npts, dtype=complex)
    work = K.copy()
    for i in range(4):
        work[:, i, :] = dK[:, i, :]
        ddiffac += np.linalg.det(work)
        work[:, i, :] = K[:, i, :]

    return (shear.reshape(shape), diffac.reshape(shape),
            dshear.reshape(shape), ddiffac.reshape(shape))


def resolvent_entries(zeta, kappa):
    """Full 8x8 N(zeta)/(i*kappa) matrices, shape (..., 8, 8)."""
    zeta = np.asarray(zeta, dtype=complex)
    flat = zeta.ravel()
    d = dz_table(flat, 6)
    n00, n03, n04, n07, n33, n34, n37, n44, n47, n77, n11, n15, n55 = _n_entries(d)
    G = np.zeros(flat.shape + (8, 8), dtype=complex)
    pairs = {
        (0, 0): n00, (0, 3): n03, (0, 4): n04, (0, 7): n07,
        (3, 3): n33, (3, 4): n34, (3, 7): n37,
        (4, 4): n44, (4, 7): n47, (7, 7): n77,
        (1, 1): n11, (1, 5): n15, (5, 5): n55,
        (2, 2): n11, (2, 6): n15, (6, 6): n55,
    }
    for (i, j), v in pairs.items():
        G[..., i, j] = v
        if i != j:
            G[..., j, i] = v
    G /= (1j * kappa)
    return G.reshape(zeta.shape + (8, 8))
