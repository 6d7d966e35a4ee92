"""Argument-principle root location for the spectral-function factors.

Roots are always hunted per factor (shear / diffac), never on the full
Sigma: that keeps shear zeros simple for Newton.  Counting uses the
winding number of the factor along rectangle boundaries with adaptive
sampling (every printed segment turns the argument by less than pi/2),
localization uses recursive quadrisection, refinement damped Newton with
the analytic factor derivative.
"""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BoundaryZero, Diverged, NonConvergent
from .spectral import ModelParams, SpectralPoint, WaveContext, factor_value_and_derivative

MAX_SEGMENTS = 2**20
_MIN_MOD_RATIO = 1e-12  # boundary |f| below this times the boundary scale => jitter


class Factor(enum.Enum):
    SHEAR = "shear"
    DIFF_AC = "diffac"


@dataclass(frozen=True)
class SearchRect:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("degenerate rectangle")

    @property
    def diam(self) -> float:
        return float(np.hypot(self.re_max - self.re_min, self.im_max - self.im_min))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    def contains(self, lam: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= lam.real <= self.re_max + pad
                and self.im_min - pad <= lam.imag <= self.im_max + pad)

    def scaled(self, factor: float) -> "SearchRect":
        c = self.center
        hw = 0.5 * (self.re_max - self.re_min) * factor
        hh = 0.5 * (self.im_max - self.im_min) * factor
        return SearchRect(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def split4(self, cx: float | None = None, cy: float | None = None):
        cx = 0.5 * (self.re_min + self.re_max) if cx is None else cx
        cy = 0.5 * (self.im_min + self.im_max) if cy is None else cy
        return (SearchRect(self.re_min, cx, self.im_min, cy),
                SearchRect(cx, self.re_max, self.im_min, cy),
                SearchRect(self.re_min, cx, cy, self.im_max),
                SearchRect(cx, self.re_max, cy, self.im_max))


@dataclass(frozen=True)
class RootRecord:
    """A refined zero of one spectral-function factor."""

    lam: complex
    factor: Factor
    multiplicity_in_sigma: int
    residual: float
    factor_multiplicity: int = 1


def _factor_on_points(lams: np.ndarray, factor: Factor, params: ModelParams,
                      wave: WaveContext) -> np.ndarray:
    zetas = 1j * (params.tau * lams + 1.0) / wave.kappa
    sh, da = kernels.factor_fields(zetas, wave.kappa, params.r)
    return sh if factor is Factor.SHEAR else da


def _factor_and_logderiv(lams: np.ndarray, factor: Factor, params: ModelParams,
                         wave: WaveContext):
    """(f, |f'/f| in lambda units) for contour resolution control."""
    zetas = 1j * (params.tau * lams + 1.0) / wave.kappa
    sh, da, dsh, dda = kernels.factor_fields(zetas, wave.kappa, params.r, derivs=True)
    f, df = (sh, dsh) if factor is Factor.SHEAR else (da, dda)
    scale = params.tau / wave.kappa  # |dzeta/dlambda|
    rate = np.abs(df) / np.maximum(np.abs(f), 1e-300) * scale
    return f, rate


def _boundary(rect: SearchRect, n0: int) -> np.ndarray:
    corners = [complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
               complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max),
               complex(rect.re_min, rect.im_min)]
    lengths = np.array([abs(b - a) for a, b in zip(corners[:-1], corners[1:])])
    per = lengths.sum()
    pts = []
    for (a, b), ln in zip(zip(corners[:-1], corners[1:]), lengths):
        n = max(8, int(round(4 * n0 * ln / per)))
        t = np.arange(n) / n
        pts.append(a + (b - a) * t)
    pts.append(np.array([corners[0]]))
    return np.concatenate(pts)


def _jittered(rect: SearchRect, attempt: int) -> SearchRect:
    """Deterministic pseudo-random jitter seeded from the rectangle itself."""
    key = f"{rect.re_min!r}:{rect.re_max!r}:{rect.im_min!r}:{rect.im_max!r}:{attempt}"
    h = hashlib.sha256(key.encode()).digest()
    u = np.frombuffer(h[:16], dtype=np.uint32).astype(float) / 2**32 - 0.5
    eps = 1e-6 * rect.diam
    return SearchRect(rect.re_min + eps * u[0], rect.re_max + eps * u[1],
                      rect.im_min + eps * u[2], rect.im_max + eps * u[3])


def count_zeros(rect: SearchRect, factor: Factor, params: ModelParams,
                wave: WaveContext, n0: int = 32) -> int:
    """Number of factor zeros in rect, counted with multiplicity."""
    for attempt in range(5):
        try:
            return _winding(rect, factor, params, wave, n0)
        except BoundaryZero:
            rect = _jittered(rect, attempt)
    raise BoundaryZero(f"could not clear the boundary of {rect} after 5 jitters")


def _winding(rect: SearchRect, factor: Factor, params: ModelParams,
             wave: WaveContext, n0: int) -> int:
    pts = _boundary(rect, n0)
    vals, rates = _factor_and_logderiv(pts, factor, params, wave)
    scale = np.median(np.abs(vals))
    for _ in range(64):
        if np.min(np.abs(vals)) < _MIN_MOD_RATIO * scale:
            raise BoundaryZero("factor vanishes on the contour")
        d = np.angle(vals[1:]) - np.angle(vals[:-1])
        d = (d + np.pi) % (2 * np.pi) - np.pi
        # A segment is trusted only if (a) the printed argument turns by
        # < pi/2, (b) the modulus moves by < 4x and (c) the log-derivative
        # bound max|f'/f| * seglen stays below pi/2.  (c) is what rules out
        # hidden 2pi turns across symmetric spikes that (a)+(b) cannot see.
        mod = np.abs(vals)
        ratio = mod[1:] / np.maximum(mod[:-1], 1e-300)
        seglen = np.abs(pts[1:] - pts[:-1])
        turn_bound = np.maximum(rates[1:], rates[:-1]) * seglen
        bad = ((np.abs(d) >= np.pi / 2) | (ratio > 4.0) | (ratio < 0.25)
               | (turn_bound >= np.pi / 2))
        if not bad.any():
            total = d.sum() / (2 * np.pi)
            n = int(round(total))
            if abs(total - n) > 0.25:
                raise NonConvergent(f"non-integer winding {total:.3f} on {rect}")
            return n
        if len(pts) + bad.sum() > MAX_SEGMENTS:
            raise NonConvergent("adaptive boundary refinement exceeded budget")
        mids = 0.5 * (pts[:-1][bad] + pts[1:][bad])
        mvals, mrates = _factor_and_logderiv(mids, factor, params, wave)
        idx = np.nonzero(bad)[0] + 1
        pts = np.insert(pts, idx, mids)
        vals = np.insert(vals, idx, mvals)
        rates = np.insert(rates, idx, mrates)
    raise NonConvergent("winding refinement did not settle")


def localize_roots(rect: SearchRect, factor: Factor, params: ModelParams,
                   wave: WaveContext, diam_tol: float = 1e-8,
                   seed_diam: float = 0.05):
    """Quadrisect until each region holds one zero (or is diameter-tol small).

    Single-zero regions are shrunk further to `seed_diam` so their centers
    are usable Newton seeds.  Returns a list of (rect, multiplicity) pairs.
    """
    total = count_zeros(rect, factor, params, wave)
    return _localize(rect, total, factor, params, wave, diam_tol, seed_diam)


def _localize(rect, count, factor, params, wave, diam_tol, seed_diam=0.05):
    if count == 0:
        return []
    if rect.diam <= diam_tol or (count == 1 and rect.diam <= seed_diam):
        return [(rect, count)]
    for attempt in range(6):
        # shift the split point on retries in case a zero sits on the cut
        fx = 0.5 + (0.011 * attempt)
        cx = rect.re_min + fx * (rect.re_max - rect.re_min)
        cy = rect.im_min + fx * (rect.im_max - rect.im_min)
        quads = rect.split4(cx, cy)
        try:
            counts = [count_zeros(q, factor, params, wave) for q in quads]
        except (BoundaryZero, NonConvergent):
            continue
        if sum(counts) == count:
            out = []
            for q, c in zip(quads, counts):
                out.extend(_localize(q, c, factor, params, wave, diam_tol, seed_diam))
            return out
        if attempt >= 2:
            # the parent count itself may have been spoiled by a boundary
            # jitter; trust a fresh, finer count instead
            recount = count_zeros(rect, factor, params, wave, n0=64)
            if sum(counts) == recount:
                out = []
                for q, c in zip(quads, counts):
                    out.extend(_localize(q, c, factor, params, wave, diam_tol, seed_diam))
                return out
    raise NonConvergent(f"children counts never matched parent ({count}) on {rect}")


def refine_root(seed: complex, factor: Factor, params: ModelParams,
                wave: WaveContext, rect: SearchRect | None = None,
                factor_multiplicity: int = 1) -> RootRecord:
    """Damped Newton on the factor from a localized seed."""
    fac_name = "shear" if factor is Factor.SHEAR else "diffac"

    def f_df(lam):
        pt = SpectralPoint.from_lambda(lam, params, wave)
        return factor_value_and_derivative(pt, params, wave, fac_name)

    x = complex(seed)
    f, df = f_df(x)
    ftol = 1e-12 * max(1.0, abs(f))
    last_step = np.inf
    # iterate all the way to the stall/noise floor: near tight clusters |f|
    # can sit below ftol in a whole neighborhood of the root, so the
    # tolerance alone does not pin the location
    for _ in range(50):
        if df == 0:
            break
        step = f / df
        xn = x - step
        fn, dfn = f_df(xn)
        halvings = 0
        while abs(fn) > abs(f) and halvings < 15:
            step *= 0.5
            xn = x - step
            fn, dfn = f_df(xn)
            halvings += 1
        if halvings == 15 and abs(fn) >= abs(f):
            break  # stalled at the evaluation noise floor
        x, f, df = xn, fn, dfn
        last_step = abs(step)
        if rect is not None and not rect.scaled(2.0).contains(x):
            raise Diverged(f"Newton left the doubled rectangle at {x}")
        if last_step < 1e-17 * max(1.0, abs(x)):
            break
    # success = tolerance reached, or the update stalled at a displacement
    # that pins the location anyway (|f| is then evaluation noise)
    if abs(f) > ftol and last_step > 1e-9 * max(1.0, abs(x)):
        raise Diverged(f"no convergence from {seed}: |f| = {abs(f):.3e} > {ftol:.3e}")
    mult = factor_multiplicity * (2 if factor is Factor.SHEAR else 1)
    return RootRecord(lam=x, factor=factor, multiplicity_in_sigma=mult,
                      residual=abs(f), factor_multiplicity=factor_multiplicity)


def strip_rect(params: ModelParams, k: float) -> SearchRect:
    """Default search region covering the strip between essential line and 0.

    Slightly asymmetric in Im so that no quadrisection cut can coincide
    with the real axis, where the diffusion/shear roots live.
    """
    tau = params.tau
    kappa = tau * k
    delta_left = 1e-6 / tau
    # right edge sits on the positive side: there are no zeros with
    # Re > 0, and at small k the slow cluster would otherwise hug the edge
    re_max = min(1e-3, max(1e-4, 0.05 * k))
    height = max(10.0, 5.0 * kappa / tau)
    return SearchRect(-1.0 / tau + delta_left, re_max,
                      -height, height * 1.00567)


def ghost_rect(params: ModelParams, k: float) -> SearchRect:
    """Search region below the essential line; only meaningful for r < 0."""
    tau = params.tau
    kappa = tau * k
    delta = 1e-6 / tau
    height = max(10.0, 5.0 * kappa / tau)
    return SearchRect((params.r - 1.0) / tau - delta, -1.0 / tau - delta,
                      -height, height * 1.00567)


def find_roots(params: ModelParams, k: float, include_ghost: bool | None = None,
               diam_tol: float = 1e-8) -> list[RootRecord]:
    """All factor roots at wave number k (strip, plus ghost region for r < 0)."""
    wave = WaveContext.from_k(params, k)
    rects = [strip_rect(params, k)]
    if include_ghost is None:
        include_ghost = params.r < 0
    if include_ghost:
        rects.append(ghost_rect(params, k))
    out: list[RootRecord] = []
    for rect in rects:
        for factor in (Factor.SHEAR, Factor.DIFF_AC):
            boxes = localize_roots(rect, factor, params, wave, diam_tol)
            recs = [_refine_box(b, m, factor, params, wave, diam_tol)
                    for b, m in boxes]
            # two seeds collapsing onto one root means a basin hop: re-refine
            # the offender from a much tighter box
            for i in range(len(recs)):
                if any(abs(recs[i].lam - recs[j].lam) < 1e-7 * (1.0 + abs(recs[i].lam))
                       for j in range(i)):
                    box, mult = boxes[i]
                    recs[i] = _refine_box(box, mult, factor, params, wave,
                                          diam_tol, force_tight=True)
            out.extend(recs)
    out.sort(key=lambda rec: (rec.lam.real, rec.lam.imag, rec.factor.value))
    return out


def _refine_box(box: SearchRect, mult: int, factor: Factor, params: ModelParams,
                wave: WaveContext, diam_tol: float,
                force_tight: bool = False) -> RootRecord:
    if not force_tight:
        try:
            return refine_root(box.center, factor, params, wave,
                               rect=box.scaled(4.0), factor_multiplicity=mult)
        except Diverged:
            pass
    tight = _localize(box, mult, factor, params, wave, diam_tol,
                      seed_diam=max(diam_tol, box.diam / 256.0))
    if len(tight) != 1:
        raise Diverged(f"could not tighten {box} around a single zero")
    tbox, tmult = tight[0]
    return refine_root(tbox.center, factor, params, wave,
                       rect=tbox.scaled(8.0), factor_multiplicity=tmult)
