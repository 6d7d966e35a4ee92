"""Scratch validation round 2: winding counts, branch events, Galerkin sectors."""
import numpy as np
from scipy.special import wofz
import scipy.linalg as sla

SQ6, SQ10, SQ15 = np.sqrt(6.0), np.sqrt(10.0), np.sqrt(15.0)
R_SWITCH = 12.0


def plasma_z_upper(zeta):
    return 1j * np.sqrt(np.pi / 2) * wofz(zeta / np.sqrt(2))


def dz_seq_up(zeta, n):
    z0 = plasma_z_upper(zeta) if zeta.imag >= 0 else np.conj(plasma_z_upper(np.conj(zeta)))
    out = [z0, -zeta * z0 - 1.0]
    for k in range(1, n):
        out.append(-zeta * out[k] - k * out[k - 1])
    return np.array(out[:n + 1])


def dz_seq_series(zeta, n):
    if zeta.imag < 0:
        return np.conj(dz_seq_series(np.conj(zeta), n))
    out = np.zeros(n + 1, dtype=complex)
    izeta2 = 1.0 / (zeta * zeta)
    for k in range(n + 1):
        # term_m = -(2m-1)!! (2m+1)...(2m+k) zeta^{-(2m+1+k)}
        term = -1.0
        for j in range(1, k + 1):
            term *= j
        term *= zeta ** (-(1 + k))
        s = 0.0 + 0.0j
        prev = np.inf
        m = 0
        while m < 200:
            a = abs(term)
            if not np.isfinite(a) or a >= prev:
                break
            s += term
            prev = a
            # ratio to next term: (2m+1) * (2m+2+k)/(2m+2) ... careful:
            # t_{m+1}/t_m = (2m+1) * (2m+1+k+2)(...)/ ((2m+1)(...)) -> compute directly
            ratio = (2 * m + 1) * (2 * m + 2 + k) / (2 * m + 2) * (2 * m + 2) / 1.0
            # simpler: recompute factor: (2m+1)!! step = *(2m+1); falling step:
            # (2(m+1)+1)...(2(m+1)+k) / ((2m+1)...(2m+k)) = (2m+2+k)...? do exact:
            num = 1.0
            for j in range(1, k + 1):
                num *= (2 * (m + 1) + j)
            den = 1.0
            for j in range(1, k + 1):
                den *= (2 * m + j)
            term = term * (2 * m + 1) * (num / den) * izeta2
            m += 1
        out[k] = s
    return out


def dz_seq(zeta, n):
    return dz_seq_series(zeta, n) if abs(zeta) >= R_SWITCH else dz_seq_up(zeta, n)


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
IDX_L = [0, 3, 4, 7]
IDX_T = [1, 5]


def factors(lam, tau, r, k):
    """(shear, diffac) via stable block determinants."""
    kappa = tau * k
    zeta = 1j * (tau * lam + 1) / kappa
    d = dz_seq(zeta, 6)
    N = np.zeros((8, 8), dtype=complex)
    for (i, j), terms in N_TABLE.items():
        v = sum(c * (-1) ** kk * d[kk] for kk, c in terms)
        N[i, j] = N[j, i] = v
    G = N / (1j * kappa)
    D = np.array([1, 1, 1, 1, 1, r, r, r])
    K = D[:, None] * G - np.eye(8)
    a, b, c_, dd = K[1, 1], K[1, 5], K[5, 1], K[5, 5]
    sh = a * dd - b * c_
    da = np.linalg.det(K[np.ix_(IDX_L, IDX_L)])
    return sh, da


def winding(f, re0, re1, im0, im1, n0=64):
    """Adaptive winding number of f along rectangle boundary."""
    corners = [re0 + 1j * im0, re1 + 1j * im0, re1 + 1j * im1, re0 + 1j * im1, re0 + 1j * im0]
    pts = []
    for a, b in zip(corners[:-1], corners[1:]):
        t = np.linspace(0, 1, n0, endpoint=False)
        pts.extend(a + (b - a) * t)
    pts.append(corners[0])
    pts = np.array(pts)
    vals = np.array([f(p) for p in pts])
    for _ in range(24):
        args = np.angle(vals)
        d = np.diff(args)
        d = (d + np.pi) % (2 * np.pi) - np.pi
        bad = np.abs(d) >= np.pi / 2
        if not bad.any():
            return int(round(d.sum() / (2 * np.pi))), len(pts)
        mids = (pts[:-1][bad] + pts[1:][bad]) / 2
        mvals = np.array([f(p) for p in mids])
        idx = np.nonzero(bad)[0]
        pts = np.insert(pts, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mvals)
    raise RuntimeError("refinement failed")


tau, r = 0.5, 0.6
print("=== winding counts k=1e-3 full strip-ish rect (both clusters)")
k = 1e-3
csh, nsh = winding(lambda lam: factors(lam, tau, r, k)[0], -1.9, -1e-8, -3, 3)
cda, nda = winding(lambda lam: factors(lam, tau, r, k)[1], -1.9, -1e-8, -3, 3)
print("shear count:", csh, "pts", nsh, " diffac count:", cda, "pts", nda)

print("=== counts at k=20 (=10/tau): expect 0")
k = 20.0
csh, _ = winding(lambda lam: factors(lam, tau, r, k)[0], -2 + 1e-5, -1e-5, -12, 12)
cda, _ = winding(lambda lam: factors(lam, tau, r, k)[1], -2 + 1e-5, -1e-5, -12, 12)
print("shear:", csh, " diffac:", cda)

print("=== real diffac roots vs k (merge hunt, Pr=0.4)")


def real_diffac_roots(k):
    grid = np.linspace(-1.999, -1e-4, 4000)
    vals = np.array([factors(l, tau, r, k)[1].real for l in grid])
    sign = np.sign(vals)
    roots = []
    for i in np.nonzero(np.diff(sign) != 0)[0]:
        a, b = grid[i], grid[i + 1]
        fa = factors(a, tau, r, k)[1].real
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = factors(m, tau, r, k)[1].real
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return roots


for k in [0.4, 0.55, 0.6, 0.62, 0.65, 0.7]:
    print(f"k={k}: real diffac roots {['%.6f' % x for x in real_diffac_roots(k)]}")

print("=== Pr=0.6 (r=0.4): diff2 absorbed before merge")
r = 0.4
for k in [0.4, 0.5, 0.6, 0.7]:
    print(f"k={k}: real diffac roots {['%.6f' % x for x in real_diffac_roots(k)]}")

print("=== ghost modes Pr=1.5 (r=-0.5), region below essential line")
r = -0.5
for k in [0.4, 0.5, 0.8, 1.2]:
    csh, _ = winding(lambda lam: factors(lam, tau, r, k)[0], -2.999, -2.0 - 1e-6, -1, 1)
    cda, _ = winding(lambda lam: factors(lam, tau, r, k)[1], -2.999, -2.0 - 1e-6, -1, 1)
    print(f"k={k}: ghost shear count {csh}, ghost diffac count {cda}")

print("=== Galerkin sectors: k=0 exact spectrum, then kappa=0.3 vs root set")


def galerkin_matrix(tau, r, k, N, group):
    """group in {'L','Y','Z'}; returns dense matrix on 3 sectors x N Hermite modes."""
    # sector list and e-vector coefficient columns
    if group == "L":
        # e0, e1, e4, e5 with weights 1,1,1,r
        cols = []
        # coefficients as (sector_index, n, coeff)
        e0 = [(0, 0, 1.0)]
        e1 = [(0, 1, 1.0)]
        e4 = [(0, 2, 1 / np.sqrt(3)), (1, 0, 1 / np.sqrt(3)), (2, 0, 1 / np.sqrt(3))]
        e5 = [(0, 3, np.sqrt(6) / SQ10), (1, 1, np.sqrt(2) / SQ10), (2, 1, np.sqrt(2) / SQ10)]
        evecs = [(e0, 1.0), (e1, 1.0), (e4, 1.0), (e5, r)]
    else:
        # Y: e2, e6 ; sectors {(1,0),(3,0),(1,2)}
        e2 = [(0, 0, 1.0)]
        e6 = [(1, 0, np.sqrt(6) / SQ10), (0, 2, np.sqrt(2) / SQ10), (2, 0, np.sqrt(2) / SQ10)]
        evecs = [(e2, 1.0), (e6, r)]
    dim = 3 * N
    A = np.zeros((dim, dim), dtype=complex)
    # transport: -i k w1, tridiagonal sqrt(n+1) within each sector
    for s in range(3):
        off = s * N
        for n in range(N - 1):
            c = np.sqrt(n + 1.0)
            A[off + n, off + n + 1] += -1j * k * c
            A[off + n + 1, off + n] += -1j * k * c
    A -= np.eye(dim) / tau
    for terms, d in evecs:
        v = np.zeros(dim)
        for s, n, c in terms:
            v[s * N + n] = c
        A += (d / tau) * np.outer(v, v)
    return A


N = 40
A = galerkin_matrix(0.5, 0.6, 0.0, N, "L")
ev = sla.eigvals(A)
uniq = sorted(set(np.round(ev.real, 9)))
print("k=0 L-group eigenvalues (unique):", uniq[:5], "...")
A = galerkin_matrix(0.5, 0.6, 0.0, N, "Y")
ev = sla.eigvals(A)
print("k=0 Y-group eigenvalues (unique):", sorted(set(np.round(ev.real, 9)))[:5])

r, tau = 0.6, 0.5
k = 0.6  # kappa = 0.3
for N in [100, 200]:
    AL = galerkin_matrix(tau, r, k, N, "L")
    ev = sla.eigvals(AL)
    iso = ev[np.abs(ev.real + 1 / tau) > 0.2]
    iso = iso[np.argsort(-iso.real)]
    print(f"N={N} L-group isolated:", np.round(iso, 8))
    AY = galerkin_matrix(tau, r, k, N, "Y")
    ev = sla.eigvals(AY)
    iso = ev[np.abs(ev.real + 1 / tau) > 0.2]
    iso = iso[np.argsort(-iso.real)]
    print(f"N={N} Y-group isolated:", np.round(iso, 8))

# compare with Newton roots on factors at k=0.6
def newton(f, x0):
    x = x0
    for _ in range(80):
        h = 1e-7 * max(1.0, abs(x))
        fp = (f(x + h) - f(x - h)) / (2 * h)
        if fp == 0:
            break
        step = f(x) / fp
        x -= step
        if abs(step) < 1e-13 * max(1.0, abs(x)):
            break
    return x


print("factor roots at k=0.6 (for comparison):")
print(" shear:", newton(lambda l: factors(l, tau, r, k)[0], -0.14), newton(lambda l: factors(l, tau, r, k)[0], -0.75))
print(" diffac real:", real_diffac_roots(0.6))
print(" diffac ac1:", newton(lambda l: factors(l, tau, r, k)[1], -0.2 + 0.8j))
