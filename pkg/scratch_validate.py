"""Scratch validation of core formulas before package build. Not part of deliverable."""
import numpy as np
from scipy.special import wofz
from scipy.integrate import quad

SQ6 = np.sqrt(6.0)
SQ10 = np.sqrt(10.0)
SQ15 = np.sqrt(15.0)


def plasma_z_upper(zeta):
    return 1j * np.sqrt(np.pi / 2) * wofz(zeta / np.sqrt(2))


def plasma_z(zeta):
    """Natural branch: upper for Im>=0, lower (conjugate) for Im<0."""
    zeta = np.asarray(zeta, dtype=complex)
    out = np.where(zeta.imag >= 0, plasma_z_upper(zeta),
                   np.conj(plasma_z_upper(np.conj(zeta))))
    return out


def z_quad(zeta):
    """Adaptive quadrature oracle for Z (natural branch)."""
    f_re = lambda v: (np.exp(-v * v / 2) / (v - zeta)).real
    f_im = lambda v: (np.exp(-v * v / 2) / (v - zeta)).imag
    re, _ = quad(f_re, -np.inf, np.inf, limit=400)
    im, _ = quad(f_im, -np.inf, np.inf, limit=400)
    return (re + 1j * im) / np.sqrt(2 * np.pi)


def dz_seq_up(zeta, n):
    """Upward recurrence d^{k}Z, k=0..n."""
    out = [plasma_z(zeta)]
    out.append(-zeta * out[0] - 1.0)
    for k in range(1, n):
        out.append(-zeta * out[k] - k * out[k - 1])
    return np.array(out[:n + 1])


def dz_seq_series(zeta, n):
    """Termwise-differentiated asymptotic series, natural branch, |zeta| large."""
    if zeta.imag < 0:
        return np.conj(dz_seq_series(np.conj(zeta), n))
    out = np.zeros(n + 1, dtype=complex)
    for k in range(n + 1):
        s = 0.0 + 0.0j
        term_prev = np.inf
        coef = 1.0  # (2m-1)!!
        for m in range(0, 60):
            if m > 0:
                coef *= (2 * m - 1)
            # d^k/dz^k z^{-(2m+1)} = (-1)^k (2m+1)(2m+2)...(2m+k) z^{-(2m+1+k)}
            fall = 1.0
            for j in range(1, k + 1):
                fall *= (2 * m + j)
            term = -coef * (-1) ** k * fall * zeta ** (-(2 * m + 1 + k))
            if abs(term) > term_prev:
                break
            s += term
            term_prev = abs(term)
        out[k] = s
    return out


def dz_seq(zeta, n):
    if abs(zeta) >= 8.0:
        return dz_seq_series(zeta, n)
    return dz_seq_up(zeta, n)


# entry -> list of (hermite order k, coefficient); N_entry = sum c * (-1)^k d^k Z
N_TABLE = {
    (0, 0): [(0, 1.0)], (1, 1): [(0, 1.0)], (2, 2): [(0, 1.0)],
    (3, 3): [(2, 1.0), (0, 1.0)],
    (0, 3): [(1, 1.0)],
    (0, 4): [(2, 1 / SQ6)],
    (0, 7): [(3, 1 / SQ10)],
    (1, 5): [(2, 1 / SQ10)],
    (2, 6): [(2, 1 / SQ10)],
    (3, 4): [(3, 1 / SQ6), (1, 2 / SQ6)],
    (3, 7): [(4, 1 / SQ10), (2, 3 / SQ10)],
    (4, 4): [(4, 1 / 6), (2, 4 / 6), (0, 1.0)],
    (4, 7): [(5, 1 / (2 * SQ15)), (3, 6 / (2 * SQ15)), (1, 10 / (2 * SQ15))],
    (5, 5): [(4, 0.1), (2, 0.4), (0, 1.0)],
    (6, 6): [(4, 0.1), (2, 0.4), (0, 1.0)],
    (7, 7): [(6, 0.1), (4, 0.9), (2, 2.2), (0, 1.0)],
}


def n_matrix(zeta):
    d = dz_seq(zeta, 6)
    N = np.zeros((8, 8), dtype=complex)
    for (i, j), terms in N_TABLE.items():
        v = sum(c * (-1) ** k * d[k] for k, c in terms)
        N[i, j] = v
        N[j, i] = v
    return N


def n_matrix_printed(zeta):
    """Direct transcription of the printed explicit matrix."""
    Z = plasma_z(zeta)
    z = zeta
    N11 = np.array([
        [Z, 0, 0, z * Z + 1],
        [0, Z, 0, 0],
        [0, 0, Z, 0],
        [z * Z + 1, 0, 0, z + z**2 * Z]], dtype=complex)
    a = (z + (z**2 - 1) * Z)
    N12 = np.array([
        [a / SQ6, 0, 0, ((z**2 - 2) + z * (z**2 - 3) * Z) / SQ10],
        [0, a / SQ10, 0, 0],
        [0, 0, a / SQ10, 0],
        [(z**2 + (z**2 - 1) * z * Z) / SQ6, 0, 0,
         ((z**2 - 2) * z + (z**2 - 3) * z**2 * Z) / SQ10]], dtype=complex)
    n221 = z * (z**2 - 1) / 6 + (z**4 - 2 * z**2 + 5) * Z / 6
    n222 = z * (z**2 - 1) / 10 + (z**4 - 2 * z**2 + 9) * Z / 10
    n224 = (z**4 - 5 * z**2 + 10) * z / 10 + (z**4 - 6 * z**2 + 13) * z**2 * Z / 10
    b = (z**4 - 3 * z**2 + 6) / (2 * SQ15) + z * (z**4 - 4 * z**2 + 7) * Z / (2 * SQ15)
    N22 = np.array([
        [n221, 0, 0, b],
        [0, n222, 0, 0],
        [0, 0, n222, 0],
        [b, 0, 0, n224]], dtype=complex)
    N = np.zeros((8, 8), dtype=complex)
    N[:4, :4] = N11
    N[:4, 4:] = N12
    N[4:, :4] = N12.T
    N[4:, 4:] = N22
    return N


def m_of_w(w):
    M = np.zeros((8, 8))
    M[0, 0] = M[1, 1] = M[2, 2] = 1
    M[0, 3] = M[3, 0] = w
    M[3, 3] = w * w
    M[0, 4] = M[4, 0] = (w**2 - 1) / SQ6
    M[0, 7] = M[7, 0] = w * (w**2 - 3) / SQ10
    M[1, 5] = M[5, 1] = (w**2 - 1) / SQ10
    M[2, 6] = M[6, 2] = (w**2 - 1) / SQ10
    M[3, 4] = M[4, 3] = w * (w**2 - 1) / SQ6
    M[3, 7] = M[7, 3] = w**2 * (w**2 - 3) / SQ10
    M[4, 4] = (w**4 - 2 * w**2 + 5) / 6
    M[4, 7] = M[7, 4] = w * (w**4 - 4 * w**2 + 7) / (2 * SQ15)
    M[5, 5] = M[6, 6] = (w**4 - 2 * w**2 + 9) / 10
    M[7, 7] = w**2 * (w**4 - 6 * w**2 + 13) / 10
    return M


def n_quad(zeta):
    N = np.zeros((8, 8), dtype=complex)
    for i in range(8):
        for j in range(i, 8):
            fre = lambda w: (m_of_w(w)[i, j] * np.exp(-w * w / 2) / (w - zeta)).real
            fim = lambda w: (m_of_w(w)[i, j] * np.exp(-w * w / 2) / (w - zeta)).imag
            re, _ = quad(fre, -14, 14, limit=300)
            im, _ = quad(fim, -14, 14, limit=300)
            N[i, j] = N[j, i] = (re + 1j * im) / np.sqrt(2 * np.pi)
    return N


D8 = lambda r: np.diag([1, 1, 1, 1, 1, r, r, r]).astype(complex)
IDX_L = [0, 3, 4, 7]
IDX_T1 = [1, 5]
IDX_T2 = [2, 6]


def factors_resolvent(lam, tau, r, k):
    kappa = tau * k
    zeta = 1j * (tau * lam + 1) / kappa
    G = n_matrix(zeta) / (1j * kappa)
    K = D8(r) @ G - np.eye(8)
    sh = np.linalg.det(K[np.ix_(IDX_T1, IDX_T1)])
    da = np.linalg.det(K[np.ix_(IDX_L, IDX_L)])
    return sh, da


def coef_polys(kappa, r):
    i = 1j
    s0 = np.array([10 * kappa**2, -i * kappa * r, r, i * kappa * r], dtype=complex)
    s1 = np.array([10 * i * kappa + 9 * i * kappa * r, -r, -2 * i * kappa * r, r, i * kappa * r], dtype=complex)
    s2 = np.array([-8 * r], dtype=complex)
    s3 = np.array([30 * kappa**4 + 30 * kappa**2 + r * (30 * kappa**2 + 18),
                   i * (25 * kappa**3 - 5 * kappa + r * (30 * kappa**3 + 46 * kappa)),
                   10 * kappa**2 - r * (43 * kappa**2 + 3),
                   i * (5 * kappa**3 - r * (15 * kappa**3 + 9 * kappa)),
                   9 * r * kappa**2,
                   3 * i * r * kappa**3], dtype=complex)
    s4 = i * np.array([55 * kappa**3 + 25 * kappa + 16 * r * kappa,
                       -i * r * (23 * kappa**2 + 33),
                       20 * kappa**3 - 5 * kappa + r * (39 * kappa**3 + 79 * kappa),
                       -10 * i * kappa**2 + i * r * (64 * kappa**2 + 3),
                       5 * kappa**3 - 9 * r * (2 * kappa**3 + kappa),
                       -9 * i * r * kappa**2,
                       3 * r * kappa**3], dtype=complex)
    s5 = np.array([-20 * kappa**2,
                   20 * i * kappa * (1 + r),
                   -4 * (5 * kappa**2 + r * (5 * kappa**2 - 3)),
                   24 * i * r * kappa,
                   -12 * r * kappa**2], dtype=complex)
    return s0, s1, s2, s3, s4, s5


def factors_poly(lam, tau, r, k):
    kappa = tau * k
    zeta = 1j * (tau * lam + 1) / kappa
    Z = plasma_z(zeta)
    s = coef_polys(kappa, r)
    vals = [np.polyval(c[::-1], zeta) for c in s]
    sh = (vals[0] + vals[1] * Z + vals[2] * Z * Z) / (10 * kappa**2)
    da = (vals[3] + vals[4] * Z + vals[5] * Z * Z) / (30 * kappa**4)
    return sh, da


def sigma_det8(lam, tau, r, k):
    kappa = tau * k
    zeta = 1j * (tau * lam + 1) / kappa
    N = n_matrix_printed(zeta)
    return np.linalg.det(D8(r) @ N - 1j * kappa * np.eye(8)) / (1j * kappa) ** 8


rng = np.random.default_rng(0)

print("=== d^kZ series vs upward at |zeta|=8..9 (crossover consistency)")
for zr in [8.2 + 0.5j, -8.5 + 2j, 9j, 8.0 + 0.001j]:
    a = dz_seq_up(zr, 6)
    b = dz_seq_series(zr, 6)
    print(zr, np.max(np.abs(a - b) / np.abs(b)))

print("=== N assembly vs printed matrix (moderate zeta)")
for zeta in [0.3 + 0.7j, -1.2 + 0.4j, 2.0 - 1.5j, 5.0 + 0.01j]:
    A, B = n_matrix(zeta), n_matrix_printed(zeta)
    print(zeta, np.max(np.abs(A - B)))

print("=== N assembly vs quadrature")
for zeta in [0.4 + 0.9j, -1.0 - 0.6j, 3.0 + 2.0j]:
    A, Q = n_matrix(zeta), n_quad(zeta)
    print(zeta, np.max(np.abs(A - Q)), np.max(np.abs(Q)))

print("=== factor identities: poly vs resolvent vs det8, moderate kappa")
for _ in range(6):
    tau = rng.uniform(0.3, 1.5)
    k = rng.uniform(0.2, 3.0)
    r = rng.uniform(-0.5, 0.95)
    lam = complex(rng.uniform(-1 / tau + 0.05, -0.02), rng.uniform(-3, 3))
    sh1, da1 = factors_poly(lam, tau, r, k)
    sh2, da2 = factors_resolvent(lam, tau, r, k)
    s8 = sigma_det8(lam, tau, r, k)
    print(f"tau={tau:.3f} k={k:.3f} r={r:.3f}: d_sh={abs(sh1-sh2)/abs(sh2):.2e} "
          f"d_da={abs(da1-da2)/abs(da2):.2e} d_sig={abs(sh1**2*da1-s8)/abs(s8):.2e}")

print("=== kappa->0 spec example: k=1e-4 tau=0.5 r=0.6 lam=-0.3")
sh, da = factors_resolvent(-0.3, 0.5, 0.6, 1e-4)
print("sigma resolvent:", sh * sh * da, " expected approx -4.354e-6")
shp, dap = factors_poly(-0.3, 0.5, 0.6, 1e-4)
print("sigma poly (expected garbage):", shp * shp * dap)

print("=== roots at k=1e-3, tau=0.5, Pr=0.4 via Newton on resolvent factors")


def newton(f, x0, tol=1e-13, itmax=60):
    x = x0
    h = 1e-7
    for _ in range(itmax):
        fx = f(x)
        # numeric derivative adequate for scratch
        fp = (f(x + h) - f(x - h)) / (2 * h)
        step = fx / fp
        x = x - step
        if abs(step) < tol * max(1.0, abs(x)):
            break
    return x


tau, r, k = 0.5, 0.6, 1e-3
fsh = lambda lam: factors_resolvent(lam, tau, r, k)[0]
fda = lambda lam: factors_resolvent(lam, tau, r, k)[1]
sh1_root = newton(fsh, -1e-6)
sh2_root = newton(fsh, -0.8)
d1_root = newton(fda, -1e-6)
d2_root = newton(fda, -0.8)
ac_root = newton(fda, 1j * np.sqrt(5 / 3) * k)
print("shear1:", sh1_root)
print("shear2:", sh2_root, " (expect near -0.8)")
print("diff1 :", d1_root)
print("diff2 :", d2_root, " shift vs -0.8:", d2_root + 0.8, " predict l2*k^2 =",
      (81 * r - 56) * tau / (15 * (1 - r) * r) * k**2)
print("ac1   :", ac_root, " |Im|/k =", abs(ac_root.imag) / k, " vs sqrt(5/3)=", np.sqrt(5 / 3))
print("dist of ac from 0:", abs(ac_root))
