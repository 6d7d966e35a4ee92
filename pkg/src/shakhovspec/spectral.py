"""Spectral function of the linearized two-relaxation-time kinetic model.

The discrete eigenvalues at wave number k are exactly the zeros of

    Sigma(lam) = det(D_r G_S(z) - I),   z = -tau*lam - 1,

which factors as Sigma = shear^2 * diffac.  Three equivalent evaluation
routes are provided and cross-validated:

* the explicit zeta-polynomial factorization (``sigma_factors`` with
  method="poly"): six coefficient polynomials in zeta = i(tau*lam+1)/kappa
  combined with Z(zeta) and Z(zeta)^2;
* block determinants of D_r G_S - I with G_S assembled from the
  plasma-function derivative sequence (method="resolvent"); this route is
  stable uniformly in kappa, while the expanded polynomials cancel
  catastrophically (~kappa^-6) for small kappa;
* the full 8x8 determinant built entrywise from the explicit matrix
  N(zeta) (``sigma_det``).

The default method="auto" uses the polynomial path with a running
condition estimate and switches to the block determinants whenever the
estimated cancellation noise exceeds 1e-11 relative.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EssentialLineError
from .specfun import Branch, plasma_z

ESSENTIAL_TOL = 1e-9  # points closer than this to Re lam = -1/tau are rejected

_SQ6 = np.sqrt(6.0)
_SQ10 = np.sqrt(10.0)
_SQ15 = np.sqrt(15.0)

# index groups of the 8 moment coordinates (1, v1, v2, v3, e4, e5, e6, e7)
IDX_LONGITUDINAL = (0, 3, 4, 7)
IDX_TRANSVERSE_Y = (1, 5)
IDX_TRANSVERSE_Z = (2, 6)


@dataclass(frozen=True)
class ModelParams:
    """Non-dimensional relaxation time and Prandtl number; r = 1 - Pr."""

    tau: float
    prandtl: float
    r: float = field(init=False)

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        object.__setattr__(self, "r", 1.0 - self.prandtl)

    @property
    def tau_slow(self) -> float:
        return self.tau / (1.0 - self.r)

    @property
    def essential_re(self) -> float:
        return -1.0 / self.tau


@dataclass(frozen=True)
class WaveContext:
    """Wave number magnitude and the combination kappa = tau*k."""

    k: float
    kappa: float

    @classmethod
    def from_k(cls, params: ModelParams, k: float) -> "WaveContext":
        if k <= 0:
            raise ValueError("k must be positive; the k = 0 spectrum is analytic")
        return cls(k=k, kappa=params.tau * k)


@dataclass(frozen=True)
class SpectralPoint:
    """Candidate eigenvalue with its changed coordinates and branch."""

    lam: complex
    zeta: complex
    z: complex
    branch: Branch

    @classmethod
    def from_lambda(cls, lam: complex, params: ModelParams,
                    wave: WaveContext) -> "SpectralPoint":
        lam = complex(lam)
        dist = lam.real - params.essential_re
        if abs(dist) < ESSENTIAL_TOL:
            raise EssentialLineError(
                f"lambda {lam} within {ESSENTIAL_TOL} of the essential line "
                f"Re = {params.essential_re}")
        zeta = 1j * (params.tau * lam + 1.0) / wave.kappa
        z = -params.tau * lam - 1.0
        branch = Branch.UPPER if dist > 0 else Branch.LOWER
        return cls(lam=lam, zeta=zeta, z=z, branch=branch)


@dataclass(frozen=True)
class PolynomialSet:
    """Ascending coefficient arrays of the six factor polynomials in zeta."""

    kappa: float
    r: float
    coeffs: tuple  # six complex ndarrays, degrees (3, 4, 0, 5, 6, 4)

    def eval_with_bound(self, zeta):
        """Horner values of all six polynomials plus |coef|-Horner bounds."""
        vals, bounds = [], []
        azeta = np.abs(zeta)
        for c in self.coeffs:
            acc = np.zeros_like(np.asarray(zeta, dtype=complex))
            bnd = np.zeros_like(azeta)
            for ck in c[::-1]:
                acc = acc * zeta + ck
                bnd = bnd * azeta + abs(ck)
            vals.append(acc)
            bounds.append(bnd)
        return vals, bounds


@dataclass(frozen=True)
class ResolventMatrix:
    """G_S = N(zeta)/(i*kappa) with the moment-weight matrix D_r."""

    g: np.ndarray        # 8x8 complex, symmetric
    d_r: np.ndarray      # diag(1,1,1,1,1,r,r,r)
    zeta: complex
    kappa: float

    @property
    def n(self) -> np.ndarray:
        return self.g * (1j * self.kappa)

    def kernel_matrix(self) -> np.ndarray:
        """K = D_r G_S - I whose null space holds the eigenvector data."""
        return self.d_r[:, None] * self.g - np.eye(8)


def coefficient_polynomials(params: ModelParams, wave: WaveContext) -> PolynomialSet:
    """Exact coefficient arrays of the six printed polynomials in zeta."""
    if wave.kappa <= 0:
        raise ValueError("kappa must be positive")
    kap, r = wave.kappa, params.r
    i = 1j
    s0 = np.array([10 * kap**2, -i * kap * r, r, i * kap * r], dtype=complex)
    s1 = np.array([i * kap * (10 + 9 * r), -r, -2 * i * kap * r, r, i * kap * r],
                  dtype=complex)
    s2 = np.array([-8.0 * r], dtype=complex)
    s3 = np.array([
        30 * kap**4 + 30 * kap**2 + r * (30 * kap**2 + 18),
        i * (25 * kap**3 - 5 * kap + r * (30 * kap**3 + 46 * kap)),
        10 * kap**2 - r * (43 * kap**2 + 3),
        i * (5 * kap**3 - r * (15 * kap**3 + 9 * kap)),
        9 * r * kap**2,
        3 * i * r * kap**3], dtype=complex)
    s4 = i * np.array([
        55 * kap**3 + 25 * kap + 16 * r * kap,
        -i * r * (23 * kap**2 + 33),
        20 * kap**3 - 5 * kap + r * (39 * kap**3 + 79 * kap),
        i * (-10 * kap**2 + r * (64 * kap**2 + 3)),
        5 * kap**3 - 9 * r * (2 * kap**3 + kap),
        -9 * i * r * kap**2,
        3 * r * kap**3], dtype=complex)
    s5 = np.array([
        -20 * kap**2,
        20 * i * kap * (1 + r),
        -4 * (5 * kap**2 + r * (5 * kap**2 - 3)),
        24 * i * r * kap,
        -12 * r * kap**2], dtype=complex)
    return PolynomialSet(kappa=kap, r=r, coeffs=(s0, s1, s2, s3, s4, s5))


def _factors_poly(point: SpectralPoint, polys: PolynomialSet):
    """Factor pair from the printed polynomials, with a noise estimate."""
    z = plasma_z(point.zeta, point.branch)
    vals, bounds = polys.eval_with_bound(point.zeta)
    az, az2 = abs(z), abs(z) ** 2
    b_shear = vals[0] + vals[1] * z + vals[2] * z * z
    b_diff = vals[3] + vals[4] * z + vals[5] * z * z
    shear = b_shear / (10 * polys.kappa**2)
    diffac = b_diff / (30 * polys.kappa**4)
    cond_shear = (bounds[0] + bounds[1] * az + bounds[2] * az2) / max(abs(b_shear), 1e-300)
    cond_diff = (bounds[3] + bounds[4] * az + bounds[5] * az2) / max(abs(b_diff), 1e-300)
    noise = 1e-16 * max(cond_shear, cond_diff)
    return shear, diffac, noise


def _factors_resolvent(point: SpectralPoint, params: ModelParams, wave: WaveContext):
    sh, da = kernels.factor_fields(np.array([point.zeta]), wave.kappa, params.r)
    return complex(sh[0]), complex(da[0])


def sigma_factors(point: SpectralPoint, params: ModelParams, wave: WaveContext,
                  method: str = "auto"):
    """Return (Sigma_shear, Sigma_diffac) at the point.

    method: "poly" (printed polynomials), "resolvent" (stable block
    determinants) or "auto" (poly unless its cancellation noise estimate
    exceeds 1e-11).
    """
    _check_point(point, params)
    if method == "resolvent":
        return _factors_resolvent(point, params, wave)
    polys = coefficient_polynomials(params, wave)
    shear, diffac, noise = _factors_poly(point, polys)
    if method == "poly":
        return shear, diffac
    if noise > 1e-11:
        return _factors_resolvent(point, params, wave)
    return shear, diffac


def sigma(point: SpectralPoint, params: ModelParams, wave: WaveContext,
          method: str = "auto") -> complex:
    """Spectral function Sigma = shear^2 * diffac; zeros = discrete spectrum."""
    shear, diffac = sigma_factors(point, params, wave, method)
    return shear * shear * diffac


def sigma_prime(point: SpectralPoint, params: ModelParams, wave: WaveContext,
                method: str = "auto") -> complex:
    """Analytic d Sigma / d lambda (chain rule through zeta; no differencing)."""
    _check_point(point, params)
    dzeta_dlam = 1j * params.tau / wave.kappa
    use_poly = method == "poly"
    if method == "auto":
        polys = coefficient_polynomials(params, wave)
        _, _, noise = _factors_poly(point, polys)
        use_poly = noise <= 1e-11
    if use_poly:
        polys = coefficient_polynomials(params, wave)
        z = plasma_z(point.zeta, point.branch)
        zp = -point.zeta * z - 1.0
        vals, _ = polys.eval_with_bound(point.zeta)
        dvals = [np.polynomial.polynomial.polyval(point.zeta,
                                                  np.polynomial.polynomial.polyder(c))
                 if len(c) > 1 else 0.0 for c in polys.coeffs]
        shear = (vals[0] + vals[1] * z + vals[2] * z * z) / (10 * polys.kappa**2)
        diffac = (vals[3] + vals[4] * z + vals[5] * z * z) / (30 * polys.kappa**4)
        dshear = (dvals[0] + dvals[1] * z + vals[1] * zp
                  + dvals[2] * z * z + 2 * vals[2] * z * zp) / (10 * polys.kappa**2)
        ddiff = (dvals[3] + dvals[4] * z + vals[4] * zp
                 + dvals[5] * z * z + 2 * vals[5] * z * zp) / (30 * polys.kappa**4)
    else:
        sh, da, dsh, dda = kernels.factor_fields(np.array([point.zeta]),
                                                 wave.kappa, params.r, derivs=True)
        shear, diffac, dshear, ddiff = (complex(sh[0]), complex(da[0]),
                                        complex(dsh[0]), complex(dda[0]))
    dsigma_dzeta = 2.0 * shear * dshear * diffac + shear * shear * ddiff
    return complex(dsigma_dzeta * dzeta_dlam)


def factor_value_and_derivative(point: SpectralPoint, params: ModelParams,
                                wave: WaveContext, factor: str):
    """(f, df/dlambda) of one factor on the stable path; Newton workhorse."""
    _check_point(point, params)
    sh, da, dsh, dda = kernels.factor_fields(np.array([point.zeta]),
                                             wave.kappa, params.r, derivs=True)
    dzeta_dlam = 1j * params.tau / wave.kappa
    if factor == "shear":
        return complex(sh[0]), complex(dsh[0] * dzeta_dlam)
    return complex(da[0]), complex(dda[0] * dzeta_dlam)


def _n_matrix_printed(zeta: complex, z: complex) -> np.ndarray:
    """The explicit matrix N(zeta), transcribed entry by entry."""
    Z = z
    t = zeta
    N = np.zeros((8, 8), dtype=complex)
    N[0, 0] = N[1, 1] = N[2, 2] = Z
    N[0, 3] = N[3, 0] = t * Z + 1.0
    N[3, 3] = t + t * t * Z
    a = (t + (t * t - 1.0) * Z)
    N[0, 4] = N[4, 0] = a / _SQ6
    N[0, 7] = N[7, 0] = ((t * t - 2.0) + t * (t * t - 3.0) * Z) / _SQ10
    N[1, 5] = N[5, 1] = a / _SQ10
    N[2, 6] = N[6, 2] = a / _SQ10
    N[3, 4] = N[4, 3] = (t * t + (t * t - 1.0) * t * Z) / _SQ6
    N[3, 7] = N[7, 3] = ((t * t - 2.0) * t + (t * t - 3.0) * t * t * Z) / _SQ10
    N[4, 4] = t * (t * t - 1.0) / 6.0 + (t**4 - 2.0 * t * t + 5.0) * Z / 6.0
    b = ((t**4 - 3.0 * t * t + 6.0) + t * (t**4 - 4.0 * t * t + 7.0) * Z) / (2.0 * _SQ15)
    N[4, 7] = N[7, 4] = b
    N[5, 5] = N[6, 6] = t * (t * t - 1.0) / 10.0 + (t**4 - 2.0 * t * t + 9.0) * Z / 10.0
    N[7, 7] = (t**4 - 5.0 * t * t + 10.0) * t / 10.0 + (t**4 - 6.0 * t * t + 13.0) * t * t * Z / 10.0
    return N


def sigma_det(point: SpectralPoint, params: ModelParams, wave: WaveContext) -> complex:
    """Sigma via det(D_r N(zeta) - i*kappa*I)/(i*kappa)^8 on the explicit N."""
    _check_point(point, params)
    z = plasma_z(point.zeta, point.branch)
    N = _n_matrix_printed(point.zeta, z)
    d_r = np.array([1, 1, 1, 1, 1, params.r, params.r, params.r], dtype=complex)
    ik = 1j * wave.kappa
    det = np.linalg.det(d_r[:, None] * N - ik * np.eye(8))
    return complex(det / ik**8)


def resolvent_matrix(point: SpectralPoint, params: ModelParams,
                     wave: WaveContext) -> ResolventMatrix:
    """G_S = N(zeta)/(i*kappa), assembled on the stable derivative route."""
    _check_point(point, params)
    g = kernels.resolvent_entries(np.array([point.zeta]), wave.kappa)[0]
    d_r = np.array([1, 1, 1, 1, 1, params.r, params.r, params.r], dtype=float)
    return ResolventMatrix(g=g, d_r=d_r, zeta=point.zeta, kappa=wave.kappa)


def _check_point(point: SpectralPoint, params: ModelParams) -> None:
    if abs(point.lam.real - params.essential_re) < ESSENTIAL_TOL:
        raise EssentialLineError(
            f"lambda {point.lam} lies on the essential line Re = {params.essential_re}")


def sigma_k0_limit(lam: complex, params: ModelParams) -> complex:
    """Closed-form kappa -> 0 limit of Sigma (the degenerate-cluster form)."""
    lt = params.tau * lam
    return (lt**5 * (lt + 1.0 - params.r) ** 3) / (lt + 1.0) ** 8
