"""Eigenvectors at the discrete eigenvalues and the hydrodynamic closure.

Each discrete eigenvalue lambda_n carries kernel vectors alpha_n of
K = D_r G_S - I (evaluated at the root); the moment-space dynamics on the
span of the eigenvector lifts closes exactly as

    h_t = A Lambda A^+ h,

with A the 8 x m matrix of kernel vectors, Lambda the eigenvalue diagonal
and A^+ the Moore-Penrose pseudo-inverse.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EmptyKernel
from .rootfind import Factor, RootRecord, find_roots
from .spectral import (ModelParams, ResolventMatrix, SpectralPoint, WaveContext,
                       resolvent_matrix)

KERNEL_SV_TOL = 1e-6
PINV_RTOL = 1e-10


@dataclass(frozen=True)
class ClosureSystem:
    """Eigenvalue diagonal, eigenvector matrix and moment-space generator."""

    modes: tuple          # (label, lambda) per column of A
    a: np.ndarray         # 8 x m kernel-vector columns
    lam: np.ndarray       # m eigenvalues (diagonal of Lambda)
    generator: np.ndarray  # 8 x 8, equals A Lambda A^+
    kernel_dims: dict     # label -> measured kernel dimension
    rank_deficient: bool = False


def eigenvector_alpha(root: RootRecord, params: ModelParams, wave: WaveContext,
                      sv_tol: float = KERNEL_SV_TOL):
    """All kernel vectors of D_r G_S - I at a refined root.

    Returns (vectors, singular_values); vectors is a list of unit 8-vectors
    spanning the measured kernel (singular values <= sv_tol).
    """
    point = SpectralPoint.from_lambda(root.lam, params, wave)
    res = resolvent_matrix(point, params, wave)
    kmat = res.kernel_matrix()
    _, s, vh = np.linalg.svd(kmat)
    vecs = [np.conj(vh[i]) for i in range(8) if s[i] <= sv_tol]
    if not vecs:
        raise EmptyKernel(
            f"no singular value of D_r G_S - I below {sv_tol} at {root.lam} "
            f"(smallest: {s[-1]:.3e}); root not converged?")
    return vecs, s


def _label_roots(roots: list[RootRecord]) -> list[tuple[str, RootRecord]]:
    """Heuristic labels at a fixed k: by factor, realness and |Im| ordering."""
    out = []
    shear = sorted([r for r in roots if r.factor is Factor.SHEAR],
                   key=lambda r: -r.lam.real)
    for idx, rec in enumerate(shear):
        out.append((f"shear{idx + 1}", rec))
    diff = sorted([r for r in roots if r.factor is Factor.DIFF_AC
                   and abs(r.lam.imag) < 1e-8 * (1 + abs(r.lam))],
                  key=lambda r: -r.lam.real)
    for idx, rec in enumerate(diff):
        out.append((f"diff{idx + 1}", rec))
    cplx = [r for r in roots if r.factor is Factor.DIFF_AC
            and abs(r.lam.imag) >= 1e-8 * (1 + abs(r.lam))]
    pairs = sorted([r for r in cplx if r.lam.imag > 0], key=lambda r: -abs(r.lam.imag))
    for idx, rec in enumerate(pairs):
        out.append((f"ac{idx + 1}", rec))
        partner = min((r for r in cplx if r.lam.imag < 0),
                      key=lambda r: abs(r.lam - np.conj(rec.lam)))
        out.append((f"ac{idx + 1}*", partner))
    return out


def hydrodynamic_generator(k: float, params: ModelParams,
                           roots: list[RootRecord] | None = None,
                           sv_tol: float = KERNEL_SV_TOL) -> ClosureSystem:
    """Assemble the moment-space closure from the mode set at wave number k.

    Shear roots contribute as many columns as their measured kernel
    dimension (the two transverse directions in the generic case).
    """
    wave = WaveContext.from_k(params, k)
    if roots is None:
        roots = find_roots(params, k, include_ghost=False)
    cols, lams, modes = [], [], []
    kernel_dims = {}
    for label, rec in _label_roots(roots):
        vecs, _ = eigenvector_alpha(rec, params, wave, sv_tol)
        kernel_dims[label] = len(vecs)
        for v in vecs:
            cols.append(v)
            lams.append(rec.lam)
            modes.append((label, rec.lam))
    a = np.array(cols).T
    lam = np.array(lams)
    a_pinv = np.linalg.pinv(a, rcond=PINV_RTOL)
    generator = a @ np.diag(lam) @ a_pinv
    rank = np.linalg.matrix_rank(a, tol=PINV_RTOL * np.linalg.norm(a, 2))
    deficient = rank < a.shape[1]
    if deficient:
        warnings.warn(f"eigenvector matrix rank {rank} < {a.shape[1]} columns",
                      RuntimeWarning, stacklevel=2)
    return ClosureSystem(modes=tuple(modes), a=a, lam=lam, generator=generator,
                         kernel_dims=kernel_dims, rank_deficient=deficient)
