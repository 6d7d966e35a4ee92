# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled compute core: batched factor evaluation on the resolvent path.

Mirrors `_kernels_py` exactly (same entry assembly, same series/recurrence
crossover at |zeta| = 12); kept in lockstep by tests.  One wofz call plus a
few hundred flops per point, no temporaries.
"""
import numpy as np

cimport numpy as cnp
from scipy.special.cython_special cimport wofz

cnp.import_array()

BACKEND_NAME = "cython"
R_SWITCH = 12.0

cdef double SQRT_PI_OVER_2 = 0.7071067811865476 * 1.7724538509055159  # sqrt(pi/2)
cdef double INV_SQRT2 = 0.7071067811865476
cdef double SQ6 = 2.449489742783178
cdef double SQ10 = 3.1622776601683795
cdef double TWO_SQ15 = 7.745966692414834


cdef inline double complex _z_upper(double complex zeta) noexcept:
    cdef double complex w = wofz(zeta * INV_SQRT2)
    cdef double complex out = 1j * SQRT_PI_OVER_2 * w
    if out.real != out.real or out.imag != out.imag or abs(out) == float("inf"):
        # overflow guard: asymptotic value of the continued branch
        out = -1.0 / zeta - 1.0 / zeta ** 3 - 3.0 / zeta ** 5 - 15.0 / zeta ** 7
    return out


cdef void _dz_scalar(double complex zeta, int nmax, double complex * d) noexcept:
    """Stable natural-branch derivative sequence d[0..nmax] at one point."""
    cdef bint flip = zeta.imag < 0
    cdef double complex zz = zeta.conjugate() if flip else zeta
    cdef double complex z0, term, total, inv2, ratio
    cdef double mag, prev
    cdef int k, m, j
    cdef double fact
    if abs(zz) < R_SWITCH:
        z0 = _z_upper(zz)
        d[0] = z0
        if nmax >= 1:
            d[1] = -zz * z0 - 1.0
        for k in range(1, nmax):
            d[k + 1] = -zz * d[k] - k * d[k - 1]
    else:
        inv2 = 1.0 / (zz * zz)
        for k in range(nmax + 1):
            # m=0 term of d^k/dzeta^k (-1/zeta) = -(-1)^k k! zeta^{-(1+k)}
            fact = 1.0
            for j in range(1, k + 1):
                fact *= j
            if k % 2:
                fact = -fact
            term = -fact * zz ** (-(1 + k))
            total = 0.0
            prev = 1e308
            for m in range(200):
                mag = abs(term)
                if mag != mag or mag >= prev:
                    break
                total = total + term
                prev = mag
                ratio = 2.0 * m + 1.0
                for j in range(1, k + 1):
                    ratio = ratio * (2.0 * m + 2.0 + j) / (2.0 * m + j)
                term = term * ratio * inv2
                if mag < 1e-18 * abs(total) + 1e-300:
                    break
            d[k] = total
    if flip:
        for k in range(nmax + 1):
            d[k] = d[k].conjugate()


cdef inline double complex _det3(double complex a00, double complex a01, double complex a02,
                                 double complex a10, double complex a11, double complex a12,
                                 double complex a20, double complex a21, double complex a22) noexcept:
    return (a00 * (a11 * a22 - a12 * a21)
            - a01 * (a10 * a22 - a12 * a20)
            + a02 * (a10 * a21 - a11 * a20))


cdef double complex _det4(double complex[4][4] a) noexcept:
    return (a[0][0] * _det3(a[1][1], a[1][2], a[1][3], a[2][1], a[2][2], a[2][3], a[3][1], a[3][2], a[3][3])
            - a[0][1] * _det3(a[1][0], a[1][2], a[1][3], a[2][0], a[2][2], a[2][3], a[3][0], a[3][2], a[3][3])
            + a[0][2] * _det3(a[1][0], a[1][1], a[1][3], a[2][0], a[2][1], a[2][3], a[3][0], a[3][1], a[3][3])
            - a[0][3] * _det3(a[1][0], a[1][1], a[1][2], a[2][0], a[2][1], a[2][2], a[3][0], a[3][1], a[3][2]))


cdef void _fill_K(double complex * n, double r, double complex ik_inv,
                  double complex[4][4] K, bint deriv) noexcept:
    """Longitudinal block of D_r N/(i kappa) - I from entry buffer n[0..12].

    Entry buffer layout: n00,n03,n04,n07,n33,n34,n37,n44,n47,n77,n11,n15,n55.
    With deriv=True fills the zeta-derivative block (no identity shift).
    """
    cdef double complex one = 0.0 if deriv else 1.0
    K[0][0] = n[0] * ik_inv - one
    K[0][1] = n[1] * ik_inv
    K[0][2] = n[2] * ik_inv
    K[0][3] = n[3] * ik_inv
    K[1][0] = n[1] * ik_inv
    K[1][1] = n[4] * ik_inv - one
    K[1][2] = n[5] * ik_inv
    K[1][3] = n[6] * ik_inv
    K[2][0] = n[2] * ik_inv
    K[2][1] = n[5] * ik_inv
    K[2][2] = n[7] * ik_inv - one
    K[2][3] = n[8] * ik_inv
    K[3][0] = r * n[3] * ik_inv
    K[3][1] = r * n[6] * ik_inv
    K[3][2] = r * n[8] * ik_inv
    K[3][3] = r * n[9] * ik_inv - one


cdef void _entries(double complex * d, double complex * n) noexcept:
    n[0] = d[0]                                            # n00
    n[1] = -d[1]                                           # n03
    n[2] = d[2] / SQ6                                      # n04
    n[3] = -d[3] / SQ10                                    # n07
    n[4] = d[2] + d[0]                                     # n33
    n[5] = -(d[3] + 2.0 * d[1]) / SQ6                      # n34
    n[6] = (d[4] + 3.0 * d[2]) / SQ10                      # n37
    n[7] = (d[4] + 4.0 * d[2]) / 6.0 + d[0]                # n44
    n[8] = -(d[5] + 6.0 * d[3] + 10.0 * d[1]) / TWO_SQ15   # n47
    n[9] = (d[6] + 9.0 * d[4] + 22.0 * d[2]) / 10.0 + d[0] # n77
    n[10] = d[0]                                           # n11
    n[11] = d[2] / SQ10                                    # n15
    n[12] = (d[4] + 4.0 * d[2]) / 10.0 + d[0]              # n55


def factor_fields(zeta, double kappa, double r, bint derivs=False):
    """Batched (shear, diffac[, dshear, ddiffac]) on the resolvent path."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zf = \
        np.ascontiguousarray(np.asarray(zeta, dtype=np.complex128).ravel())
    cdef Py_ssize_t npts = zf.shape[0]
    shape = np.asarray(zeta).shape
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] sh = np.empty(npts, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] da = np.empty(npts, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] dsh
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] dda
    cdef double complex d[9]
    cdef double complex nb[13]
    cdef double complex mb[13]
    cdef double complex K[4][4]
    cdef double complex dK[4][4]
    cdef double complex W[4][4]
    cdef double complex ik_inv = 1.0 / (1j * kappa)
    cdef double complex k11, k15, k51, k55, dk11, dk15, dk51, dk55, acc
    cdef Py_ssize_t p
    cdef int i, j, nmax
    nmax = 7 if derivs else 6
    if derivs:
        dsh = np.empty(npts, dtype=np.complex128)
        dda = np.empty(npts, dtype=np.complex128)
    for p in range(npts):
        _dz_scalar(zf[p], nmax, d)
        _entries(d, nb)
        k11 = nb[10] * ik_inv - 1.0
        k15 = nb[11] * ik_inv
        k51 = r * nb[11] * ik_inv
        k55 = r * nb[12] * ik_inv - 1.0
        sh[p] = k11 * k55 - k15 * k51
        _fill_K(nb, r, ik_inv, K, False)
        da[p] = _det4(K)
        if derivs:
            _entries(&d[1], mb)
            dk11 = mb[10] * ik_inv
            dk15 = mb[11] * ik_inv
            dk51 = r * mb[11] * ik_inv
            dk55 = r * mb[12] * ik_inv
            dsh[p] = dk11 * k55 + k11 * dk55 - dk15 * k51 - k15 * dk51
            _fill_K(mb, r, ik_inv, dK, True)
            acc = 0.0
            for i in range(4):
                for j in range(4):
                    W[i][j] = K[i][j]
            for i in range(4):
                for j in range(4):
                    W[i][j] = dK[i][j]
                acc = acc + _det4(W)
                for j in range(4):
                    W[i][j] = K[i][j]
            dda[p] = acc
    if derivs:
        return (sh.reshape(shape), da.reshape(shape),
                dsh.reshape(shape), dda.reshape(shape))
    return sh.reshape(shape), da.reshape(shape)


def dz_table(zeta, int nmax):
    """Stable natural-branch derivative table, shape (nmax+1, ...)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zf = \
        np.ascontiguousarray(np.asarray(zeta, dtype=np.complex128).ravel())
    cdef Py_ssize_t npts = zf.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = \
        np.empty((nmax + 1, npts), dtype=np.complex128)
    cdef double complex d[9]
    cdef Py_ssize_t p
    cdef int k
    if nmax > 8:
        raise ValueError("nmax must be <= 8")
    for p in range(npts):
        _dz_scalar(zf[p], nmax, d)
        for k in range(nmax + 1):
            out[k, p] = d[k]
    return out.reshape((nmax + 1,) + np.asarray(zeta).shape)
