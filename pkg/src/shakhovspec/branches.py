"""Mode families: seeding, continuation in k, merge/absorption events.

Six branches exist at small wave number: the slow family (one shear, one
diffusion, one conjugate acoustic pair) emanating from 0 and the fast
family (one shear, one diffusion) emanating from -(1-r)/tau.  Depending
on the Prandtl number the two diffusion branches either collide and spawn
a second acoustic pair (second sound) or the fast one is absorbed by the
essential line first.  Every branch eventually terminates: either it is
absorbed or it merges; the largest k at which a branch exists is its
critical wave number.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParams, Diverged, NoMerge, StallDetected
from .rootfind import (Factor, SearchRect, count_zeros, localize_roots,
                       refine_root)
from .spectral import ModelParams, WaveContext


class ModeLabel(enum.Enum):
    SHEAR1 = "shear1"
    DIFF1 = "diff1"
    AC1 = "ac1"
    AC1_CONJ = "ac1*"
    SHEAR2 = "shear2"
    DIFF2 = "diff2"
    AC2 = "ac2"
    AC2_CONJ = "ac2*"


REAL_LABELS = {ModeLabel.SHEAR1, ModeLabel.SHEAR2, ModeLabel.DIFF1, ModeLabel.DIFF2}
MODES_1 = [ModeLabel.SHEAR1, ModeLabel.DIFF1, ModeLabel.AC1, ModeLabel.AC1_CONJ,
           ModeLabel.SHEAR2, ModeLabel.DIFF2]
MODES_2 = [ModeLabel.SHEAR1, ModeLabel.AC1, ModeLabel.AC1_CONJ,
           ModeLabel.SHEAR2, ModeLabel.AC2, ModeLabel.AC2_CONJ]


def factor_of(label: ModeLabel) -> Factor:
    if label in (ModeLabel.SHEAR1, ModeLabel.SHEAR2):
        return Factor.SHEAR
    return Factor.DIFF_AC


@dataclass(frozen=True)
class SeedExpansion:
    """Leading expansion coefficients of lambda(k) at k = 0."""

    lambda0: float
    lambda1: complex
    lambda2: float | None  # closed form for the fast diffusion mode, else fitted


@dataclass(frozen=True)
class BranchSample:
    k: float
    lam: complex
    residual: float


@dataclass(frozen=True)
class BranchEvent:
    kind: str          # "birth" | "merge" | "absorbed"
    k: float
    partner: str | None = None


@dataclass
class Branch:
    label: ModeLabel
    samples: list[BranchSample] = field(default_factory=list)
    events: list[BranchEvent] = field(default_factory=list)

    @property
    def k_last(self) -> float:
        return self.samples[-1].k

    @property
    def lam_last(self) -> complex:
        return self.samples[-1].lam

    def lam_at(self, k: float) -> complex:
        """Linear interpolation/extrapolation from the recorded samples."""
        ks = np.array([s.k for s in self.samples])
        if len(ks) == 1:
            return self.samples[0].lam
        i = min(max(int(np.searchsorted(ks, k)), 1), len(ks) - 1)
        a, b = self.samples[i - 1], self.samples[i]
        t = (k - a.k) / (b.k - a.k)
        return a.lam + t * (b.lam - a.lam)


def lambda2_fast(params: ModelParams) -> float:
    """Closed-form curvature of the fast diffusion branch at k = 0."""
    r = params.r
    if r >= 1.0 or r == 0.0:
        raise DegenerateParams("fast-family curvature undefined at r in {0, >=1}")
    return (81.0 * r - 56.0) * params.tau / (15.0 * (1.0 - r) * r)


def seed_modes(params: ModelParams, k_seed: float):
    """Starting roots and expansions of all six branches at a small k.

    Returns a list of (label, SeedExpansion, refined lambda(k_seed)).
    """
    r, tau = params.r, params.tau
    if r >= 1.0:
        raise DegenerateParams("r >= 1: slow relaxation time undefined")
    if r == 0.0:
        raise DegenerateParams("r = 0: fast family degenerates onto the essential line")
    if not 0.0 < k_seed <= 0.01 / tau:
        raise ValueError("k_seed must be in (0, 0.01/tau]")
    wave = WaveContext.from_k(params, k_seed)

    slow_speed = np.sqrt(5.0 / 3.0)
    w = 4.0 * slow_speed * k_seed
    slow_rect = SearchRect(-w, w * 0.1317, -w, w * 1.0089)
    lam0_fast = (r - 1.0) / tau
    l2f = lambda2_fast(params)
    wf = max(8.0 * abs(l2f) * k_seed**2, 1e-4 * k_seed)
    wf = min(wf, abs(r) / (4.0 * tau), (1.0 - r) / (4.0 * tau))
    fast_rect = SearchRect(lam0_fast - wf, lam0_fast + wf, -wf, wf * 1.0089)

    out = []
    shear_slow = _only_root(slow_rect, Factor.SHEAR, params, wave)
    out.append((ModeLabel.SHEAR1,
                SeedExpansion(0.0, 0.0, _fit_l2(shear_slow, 0.0, k_seed)),
                shear_slow))
    diffac_slow = _cluster_roots(slow_rect, Factor.DIFF_AC, params, wave, 3)
    real = [z for z in diffac_slow if abs(z.imag) < 1e-9 * (1 + abs(z))]
    cplx = sorted([z for z in diffac_slow if z.imag >= 1e-9 * (1 + abs(z))],
                  key=lambda z: -z.imag)
    if len(real) != 1 or len(cplx) != 1:
        raise Diverged(f"unexpected slow diffac cluster {diffac_slow}")
    out.append((ModeLabel.DIFF1,
                SeedExpansion(0.0, 0.0, _fit_l2(real[0], 0.0, k_seed)), real[0]))
    ac = cplx[0]
    out.append((ModeLabel.AC1,
                SeedExpansion(0.0, 1j * slow_speed,
                              _fit_l2(ac, 1j * slow_speed * k_seed, k_seed)), ac))
    out.append((ModeLabel.AC1_CONJ,
                SeedExpansion(0.0, -1j * slow_speed,
                              _fit_l2(np.conj(ac), -1j * slow_speed * k_seed, k_seed)),
                complex(np.conj(ac))))
    shear_fast = _only_root(fast_rect, Factor.SHEAR, params, wave)
    out.append((ModeLabel.SHEAR2,
                SeedExpansion(lam0_fast, 0.0, _fit_l2(shear_fast, lam0_fast, k_seed)),
                shear_fast))
    diff_fast = _only_root(fast_rect, Factor.DIFF_AC, params, wave)
    out.append((ModeLabel.DIFF2, SeedExpansion(lam0_fast, 0.0, l2f), diff_fast))
    return out


def _fit_l2(lam: complex, lower_order: complex, k: float) -> float:
    return float((lam - lower_order).real / k**2)


def _only_root(rect, factor, params, wave) -> complex:
    boxes = localize_roots(rect, factor, params, wave)
    if len(boxes) != 1:
        raise Diverged(f"expected one {factor} root in {rect}, found {len(boxes)}")
    box, mult = boxes[0]
    return refine_root(box.center, factor, params, wave, rect=box.scaled(4.0),
                       factor_multiplicity=mult).lam


def _cluster_roots(rect, factor, params, wave, expected) -> list[complex]:
    boxes = localize_roots(rect, factor, params, wave)
    if sum(m for _, m in boxes) != expected:
        raise Diverged(f"expected {expected} {factor} roots in {rect}")
    return [refine_root(b.center, factor, params, wave, rect=b.scaled(4.0),
                        factor_multiplicity=m).lam for b, m in boxes]


@dataclass
class StepControl:
    h0: float
    h_max: float
    h_min: float = 1e-9
    grow: float = 1.5

    @classmethod
    def default(cls, params: ModelParams) -> "StepControl":
        return cls(h0=1e-3 / params.tau, h_max=0.05 / params.tau)


def _refine_at(lam_guess: complex, label: ModeLabel, params: ModelParams,
               k: float, trust: float, side: float):
    """One corrector step: Newton at wave number k from the predicted value.

    `side` (+1 strip, -1 ghost region) pins which side of the essential
    line the branch lives on; the corrector must not cross it.
    """
    essential = params.essential_re
    guard = 1e-7 / params.tau
    # clamp the prediction and trust box to the branch's half-plane
    re_g = lam_guess.real
    if side > 0:
        re_g = max(re_g, essential + 2 * guard)
    else:
        re_g = min(re_g, essential - 2 * guard)
    lam_guess = complex(re_g, lam_guess.imag)
    re_lo, re_hi = re_g - trust, re_g + trust
    if side > 0:
        re_lo = max(re_lo, essential + guard)
    else:
        re_hi = min(re_hi, essential - guard)
    if re_lo >= re_hi:
        raise Diverged("trust region collapsed against the essential line")
    wave = WaveContext.from_k(params, k)
    rect = SearchRect(re_lo, re_hi, lam_guess.imag - trust, lam_guess.imag + trust)
    rec = refine_root(lam_guess, factor_of(label), params, wave, rect=rect)
    lam = rec.lam
    if (lam.real - essential) * side <= 0:
        raise Diverged(f"corrector crossed the essential line to {lam}")
    if label in REAL_LABELS:
        if abs(lam.imag) > 1e-8 * (1.0 + abs(lam.real)):
            raise Diverged(f"real branch {label} produced complex root {lam}")
        lam = complex(lam.real, 0.0)
    return lam, rec.residual


def trace_branch(label: ModeLabel, params: ModelParams, k_start: float,
                 lam_start: complex, k_max: float,
                 step: StepControl | None = None,
                 on_stall: str = "raise",
                 history: list[BranchSample] | None = None) -> Branch:
    """Predictor-corrector continuation of one branch up to k_max.

    The branch ends at k_max, at absorption into the essential line, or --
    for the real diffusion modes -- when the corrector loses the real root
    (merge candidate; resolved by `detect_merge`).  on_stall: "raise"
    (StallDetected) or "truncate" (return the recorded part, marked).
    """
    step = step or StepControl.default(params)
    br = Branch(label=label)
    if history:
        br.samples.extend(history)
    br.samples.append(BranchSample(k_start, lam_start, 0.0))
    essential = params.essential_re
    absorb_tol = 1e-6 / params.tau
    side = 1.0 if br.lam_last.real > essential else -1.0
    h = step.h0
    while br.k_last < k_max:
        if abs(br.lam_last.real - essential) < absorb_tol:
            if _absorption_confirmed(br, params):
                br.events.append(BranchEvent("absorbed", br.k_last))
                return br
        h = min(h, k_max - br.k_last)
        k_try = br.k_last + h
        pred = _predict(br, k_try)
        # trust scales with both the predicted motion and an O(1/tau) root
        # speed floor, so halving h always shrinks the acceptance region
        # slower than the actual motion near steep stretches
        trust = max(4.0 * abs(pred - br.lam_last), 2.0 * h / params.tau, 1e-9)
        try:
            lam, resid = _refine_at(pred, label, params, k_try, trust, side)
            jump_scale = max(abs(br.lam_last - pred), 1e-12)
            if abs(lam - pred) > 8.0 * max(jump_scale, trust / 4.0):
                raise Diverged("corrector jumped too far")
        except Exception:
            h *= 0.5
            if h < step.h_min:
                if abs(br.lam_last.real - essential) < 100 * absorb_tol \
                        and _absorption_confirmed(br, params):
                    br.events.append(BranchEvent("absorbed", br.k_last))
                    return br
                if on_stall == "truncate":
                    br.events.append(BranchEvent("stall", br.k_last))
                    return br
                raise StallDetected(
                    f"{label} stalled at k = {br.k_last:.8g}, lam = {br.lam_last:.8g}")
            continue
        br.samples.append(BranchSample(k_try, lam, resid))
        h = min(h * step.grow, step.h_max)
    return br


def _predict(br: Branch, k_next: float) -> complex:
    s = br.samples
    if len(s) < 2:
        return s[-1].lam
    a, b = s[-2], s[-1]
    return b.lam + (b.lam - a.lam) * (k_next - b.k) / (b.k - a.k)


def _absorption_confirmed(br: Branch, params: ModelParams) -> bool:
    """Absorption = root hugging the line AND the local count dropping."""
    lam = br.lam_last
    d = abs(lam.real - params.essential_re)
    k_probe = br.k_last * 1.05 + 1e-4 / params.tau
    wave = WaveContext.from_k(params, k_probe)
    w = max(20.0 * d, 1e-4)
    side = 1.0 if lam.real > params.essential_re else -1.0
    rect = SearchRect(params.essential_re + side * 1e-7 / params.tau - (w if side < 0 else 0),
                      params.essential_re + side * 1e-7 / params.tau + (w if side > 0 else 0),
                      lam.imag - w, lam.imag + w * 1.0089)
    try:
        return count_zeros(rect, factor_of(br.label), params, wave) == 0
    except Exception:
        return True


@dataclass(frozen=True)
class MergeReport:
    k_star: float
    bracket: tuple[float, float]
    lam_star: complex
    born: tuple[ModeLabel, ModeLabel] = (ModeLabel.AC2, ModeLabel.AC2_CONJ)


def detect_merge(branch_a: Branch, branch_b: Branch, params: ModelParams,
                 bracket_tol: float = 1e-6) -> MergeReport:
    """Locate the saddle-node collision of two real branches on one factor.

    Bisection on "the factor still has two real zeros near the approach
    point"; the factor is real on the real axis, so the predicate counts
    sign changes on an adaptive real grid.
    """
    if factor_of(branch_a.label) is not factor_of(branch_b.label):
        raise NoMerge("branches live on different factors")
    if branch_a.label not in REAL_LABELS or branch_b.label not in REAL_LABELS:
        raise NoMerge("merge detection applies to real branches")
    if any(e.kind == "absorbed" for e in branch_a.events + branch_b.events):
        raise NoMerge("a branch was absorbed before any approach")
    k_lo = min(branch_a.k_last, branch_b.k_last)
    gap_lo = abs(branch_a.lam_at(k_lo).real - branch_b.lam_at(k_lo).real)
    span = abs(branch_a.samples[0].lam.real - branch_b.samples[0].lam.real)
    if gap_lo > 0.5 * span:
        raise NoMerge("branches never approach each other")
    factor = factor_of(branch_a.label)
    x_mid = 0.5 * (branch_a.lam_at(k_lo).real + branch_b.lam_at(k_lo).real)
    width = max(4.0 * gap_lo, 1e-4)

    def has_real_pair(k: float) -> bool:
        return _real_zero_count(x_mid, width, factor, params, k) >= 2

    if not has_real_pair(k_lo):
        raise NoMerge(f"no real pair at the approach point k = {k_lo}")
    k_hi = k_lo
    for _ in range(60):
        k_hi = k_hi + max(0.01 * k_hi, 1e-4 / params.tau)
        if not has_real_pair(k_hi):
            break
    else:
        raise NoMerge("real pair persisted; no collision detected")
    lo, hi = k_lo, k_hi
    while hi - lo > bracket_tol:
        mid = 0.5 * (lo + hi)
        if has_real_pair(mid):
            lo = mid
        else:
            hi = mid
    k_star = 0.5 * (lo + hi)
    # tangency point from the pre-merge side: midpoint of the two real roots
    lam_star = complex(_real_pair_midpoint(x_mid, width, factor, params, lo), 0.0)
    return MergeReport(k_star=k_star, bracket=(lo, hi), lam_star=lam_star)


def _real_zero_count(x_mid: float, width: float, factor: Factor,
                     params: ModelParams, k: float, n: int = 801) -> int:
    from .rootfind import _factor_on_points
    wave = WaveContext.from_k(params, k)
    lo = max(x_mid - width, params.essential_re + 1e-5 / params.tau)
    hi = min(x_mid + width, -1e-9)
    xs = np.linspace(lo, hi, n)
    vals = _factor_on_points(xs.astype(complex), factor, params, wave).real
    return int((np.sign(vals[1:]) != np.sign(vals[:-1])).sum())


def _real_pair_midpoint(x_mid: float, width: float, factor: Factor,
                        params: ModelParams, k: float, n: int = 2001) -> float:
    from .rootfind import _factor_on_points
    wave = WaveContext.from_k(params, k)
    lo = max(x_mid - width, params.essential_re + 1e-5 / params.tau)
    hi = min(x_mid + width, -1e-9)
    xs = np.linspace(lo, hi, n)
    vals = _factor_on_points(xs.astype(complex), factor, params, wave).real
    idx = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
    if len(idx) < 2:
        return x_mid
    return float(0.5 * (xs[idx[0]] + xs[idx[-1] + 1]))


def _newborn_pair(x_star: float, width_hint: float, factor: Factor,
                  params: ModelParams, wave: WaveContext) -> complex:
    """The Im>0 member of the complex pair born just after the collision."""
    for scale in (max(width_hint, 0.02), 0.08, 0.3):
        lo = max(x_star - scale, params.essential_re + 1e-5 / params.tau)
        hi = min(x_star + scale, -1e-9)
        rect = SearchRect(lo, hi, 1e-10, scale)
        try:
            boxes = localize_roots(rect, factor, params, wave)
        except Exception:
            continue
        if len(boxes) == 1:
            box, mult = boxes[0]
            return refine_root(box.center, factor, params, wave,
                               rect=box.scaled(4.0)).lam
    raise NoMerge(f"newborn pair not found near {x_star}")


def trace_all(params: ModelParams, k_max: float, k_seed: float | None = None,
              step: StepControl | None = None) -> list[Branch]:
    """Trace all branches from seeds, resolving diffusion merges into Ac2."""
    k_seed = k_seed if k_seed is not None else 1e-3 / params.tau
    seeds = seed_modes(params, k_seed)
    branches: dict[ModeLabel, Branch] = {}
    for label, _exp, lam in seeds:
        branches[label] = trace_branch(label, params, k_seed, lam, k_max, step,
                                       on_stall="truncate")
    d1, d2 = branches[ModeLabel.DIFF1], branches[ModeLabel.DIFF2]
    stalled = [b for b in (d1, d2) if any(e.kind == "stall" for e in b.events)]
    if stalled:
        report = detect_merge(d1, d2, params)
        for b, partner in ((d1, ModeLabel.DIFF2), (d2, ModeLabel.DIFF1)):
            b.events[:] = [e for e in b.events if e.kind != "stall"]
            b.samples[:] = [s for s in b.samples if s.k <= report.k_star]
            b.events.append(BranchEvent("merge", report.k_star, partner.value))
        # seed the newborn pair with two samples so the predictor knows the
        # (steep, sqrt-like) initial velocity
        k_b1 = report.bracket[1] + 1e-4 / params.tau
        k_b2 = k_b1 + 4e-4 / params.tau
        up1 = _newborn_pair(report.lam_star.real, 0.02, Factor.DIFF_AC, params,
                            WaveContext.from_k(params, k_b1))
        up2 = _newborn_pair(up1.real, max(0.02, 4 * abs(up1.imag)), Factor.DIFF_AC,
                            params, WaveContext.from_k(params, k_b2))
        for label, l1, l2 in ((ModeLabel.AC2, up1, up2),
                              (ModeLabel.AC2_CONJ, np.conj(up1), np.conj(up2))):
            b = trace_branch(label, params, k_b2, complex(l2), k_max, step,
                             history=[BranchSample(k_b1, complex(l1), 0.0)])
            b.events.insert(0, BranchEvent("birth", report.k_star))
            branches[label] = b
    return [branches[label] for label in
            (MODES_1 + [ModeLabel.AC2, ModeLabel.AC2_CONJ]) if label in branches]


def critical_wavenumber(label: ModeLabel, params: ModelParams,
                        k_max: float = None, bracket_tol: float = 1e-6,
                        branch: Branch | None = None) -> tuple[float, tuple[float, float]]:
    """Largest k at which the labeled mode exists, bisected to bracket_tol.

    For the diffusion modes that merge, the critical wave number is the
    collision wave number.
    """
    if k_max is None:
        k_max = 20.0 / params.tau
    if branch is None:
        branches = trace_all(params, k_max)
        by_label = {b.label: b for b in branches}
        if label not in by_label:
            raise Diverged(f"branch {label} does not exist for these parameters")
        branch = by_label[label]
    merge = [e for e in branch.events if e.kind == "merge"]
    if merge:
        k = merge[0].k
        return k, (k - bracket_tol, k + bracket_tol)
    absorbed = [e for e in branch.events if e.kind == "absorbed"]
    if not absorbed:
        raise Diverged(f"branch {label} still exists at k_max = {k_max}")
    lo = branch.k_last
    hi = min(lo * 1.3 + 0.3 / params.tau, k_max * 2.0)

    def exists(k: float) -> bool:
        lam_pred = branch.lam_at(min(k, branch.k_last))
        d = max(abs(lam_pred.real - params.essential_re) * 30.0, 2e-4 / params.tau)
        side = 1.0 if lam_pred.real > params.essential_re else -1.0
        lo_re = params.essential_re + (1e-8 / params.tau if side > 0 else -d)
        hi_re = params.essential_re + (d if side > 0 else -1e-8 / params.tau)
        rect = SearchRect(lo_re, hi_re, lam_pred.imag - d, lam_pred.imag + d * 1.0089)
        wave = WaveContext.from_k(params, k)
        return count_zeros(rect, factor_of(label), params, wave) > 0

    if not exists(lo):
        lo = branch.samples[max(0, len(branch.samples) - 3)].k
    while exists(hi):
        lo = hi
        hi *= 1.3
        if hi > 100.0 / params.tau:
            raise Diverged("mode refuses to disappear")
    while hi - lo > bracket_tol:
        mid = 0.5 * (lo + hi)
        if exists(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi)
