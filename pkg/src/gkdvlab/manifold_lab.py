"""Shooting experiments on the invariant sets around the solitary wave.

In the traveling frame the wave is a fixed point with exactly one growing
mode V+ (rate lambda_c) and one decaying mode V-. Orbits that stay in a
fixed H1 neighborhood of the wave family forward in time form a
codimension-one graph over the complementary coordinates: for each
perturbation W with zero growing-mode coefficient there is a unique shot
coordinate s* such that Q_c + W + s*V+ never leaves. On either side of s*
the orbit escapes with an opposite fate (amplitude collapse toward
dispersal vs amplitude growth), which makes s* computable by bisection on
the fate alone. The routines here locate such points forward (shoot_cs)
and backward (shoot_cu), combine both into a two-sided center shot,
measure exit times and growth rates against lambda_c, track excursions of
centered orbits, and check that the construction commutes with the exact
scaling symmetry between different wave speeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DEFAULT_DT, Stepper, evolve
from .errors import ConfigError, ContractError, ResolutionError
from .grid import Field, Grid, norm_h1
from .rng import DEFAULT_SEED, SplitMix64
from .spectral import SpectralFrame, project, random_xe_field, unstable_eigenpair
from .waves import WaveParams, default_grid, energy, momentum, rescale

__all__ = [
    "ShootResult",
    "ExitRecord",
    "CenterResult",
    "StabilityRecord",
    "RescaleCheck",
    "shoot_cs",
    "shoot_cu",
    "shoot_center",
    "exit_time",
    "instability_rate",
    "orbital_stability_run",
    "rescale_invariance_check",
    "DELTA_STAY",
    "TOL",
    "S_MAX",
]

DELTA_STAY = 0.1        # H1 distance to the wave family that counts as leaving
STAY_FACTOR = 15.0      # default stay horizon = 15 / lambda_c
TOL = 1e-10
S_MAX = 1e-2
PROBE_DT_BASE = 1e-3    # probe step at c = 1; scaled by c^{-3/2}
CHECK_EVERY = 20
MAX_EXPANSIONS = 8
CENTER_MAX_ROUNDS = 20
COMPONENT_TOL = 1e-8

# escape-fate thresholds, relative to the wave's peak amplitude
AMP_HIGH = 1.4
AMP_LOW = 0.75
DIST_CONFIRM = 0.35
AMP_CONFIRM = 0.05


@dataclass(frozen=True)
class ShootResult:
    """Accepted shot coordinate with the bisection certificate."""

    a_star: float
    bracket_width: float
    stay_time: float
    probes: int


@dataclass(frozen=True)
class ExitRecord:
    initial_offset: float
    exit_time: float
    exit_side: int


@dataclass(frozen=True)
class CenterResult:
    a_plus_star: float
    a_minus_star: float
    rounds: int
    probes: int
    stay_time: float


@dataclass(frozen=True)
class StabilityRecord:
    size: float
    a_plus_star: float
    a_minus_star: float
    excursion: float
    ratio: float
    energy_offset: float


@dataclass(frozen=True)
class RescaleCheck:
    c_source: float
    c_target: float
    a_star_source: float
    a_plus_mapped: float
    a_plus_reshot: float
    deviation: float
    profile_residual: float


@dataclass(frozen=True)
class _Outcome:
    verdict: int
    exit_time: float | None
    end_time: float
    exited: bool


class _ProbeRunner:
    """Evolves one initial state and reports whether and how it escapes.

    Distance to the wave family is tracked spectrally every CHECK_EVERY
    steps: a single weighted correlation against the profile gives the
    best-translate H1 distance to sub-grid accuracy (parabolic refinement
    of the correlation peak). Exit times are log-interpolated between
    checks, which is accurate because the distance grows exponentially.
    """

    def __init__(self, frame: SpectralFrame, dt: float, forward: bool = True):
        g = frame.grid
        p = frame.params
        self.dt = abs(float(dt))
        self.stepper = Stepper(p, g, self.dt if forward else -self.dt)
        n = g.n_points
        kap = g.wavenumbers
        gh = 1.0 + kap ** 2
        gh[n // 2] = 1.0
        gh *= g.spacing / n
        self._gh = gh
        qhat = np.fft.fft(frame.profile.values)
        self._qcorr = qhat * gh
        self.qq = float(np.sum(np.abs(qhat) ** 2 * gh))
        self.peak0 = float(np.max(np.abs(frame.profile.values)))
        self.guard = 10.0 * math.sqrt(self.qq)
        self.n = n

    def _measure(self, vh: np.ndarray) -> tuple[float, float]:
        uu = float(np.sum((vh.real ** 2 + vh.imag ** 2) * self._gh))
        if not math.isfinite(uu):
            return uu, math.inf
        corr = self.n * np.fft.ifft(self._qcorr * np.conj(vh)).real
        i0 = int(np.argmax(corr))
        c0 = corr[i0]
        cm = corr[i0 - 1]
        cp = corr[(i0 + 1) % self.n]
        denom = 2.0 * c0 - cp - cm
        peak = c0 + 0.125 * (cp - cm) ** 2 / denom if denom > 0.0 else c0
        d2 = max(uu + self.qq - 2.0 * peak, 0.0)
        return uu, math.sqrt(d2)

    def _fate(self, vh: np.ndarray, uu: float, d: float) -> int:
        if not math.isfinite(uu) or math.sqrt(uu) > self.guard:
            return -1
        amp = float(np.max(np.abs(np.fft.ifft(vh).real)))
        if amp > AMP_HIGH * self.peak0:
            return -1
        if amp < AMP_LOW * self.peak0:
            return 1
        if d >= DIST_CONFIRM and abs(amp - self.peak0) > AMP_CONFIRM * self.peak0:
            return 1 if amp < self.peak0 else -1
        return 0

    def _cross_time(self, t0: float, d0: float, t1: float, d1: float) -> float:
        if d0 >= DELTA_STAY:
            return t0
        if d0 <= 0.0 or d1 <= d0 or not math.isfinite(d1):
            return t1
        frac = (math.log(DELTA_STAY) - math.log(d0)) / (math.log(d1) - math.log(d0))
        return t0 + min(max(frac, 0.0), 1.0) * (t1 - t0)

    def run(self, u0_vals: np.ndarray, t_cap: float, classify: bool = True) -> _Outcome:
        vh = np.fft.fft(u0_vals)
        t = 0.0
        uu, d = self._measure(vh)
        exited = d >= DELTA_STAY
        t_exit = 0.0 if exited else None
        verdict = 0
        with np.errstate(over="ignore", invalid="ignore"):
            if exited and classify:
                verdict = self._fate(vh, uu, d)
            while verdict == 0 and t < t_cap - 1e-12:
                if exited and not classify:
                    break
                block = min(CHECK_EVERY, max(1, round((t_cap - t) / self.dt)))
                for _ in range(block):
                    vh = self.stepper.step(vh)
                t_new = t + block * self.dt
                uu, d_new = self._measure(vh)
                if not math.isfinite(uu):
                    if t_exit is None:
                        t_exit = t_new
                    return _Outcome(-1, t_exit, t_new, True)
                if not exited and d_new >= DELTA_STAY:
                    exited = True
                    t_exit = self._cross_time(t, d, t_new, d_new)
                if exited and classify:
                    verdict = self._fate(vh, uu, d_new)
                t, d = t_new, d_new
            if exited and classify and verdict == 0:
                amp = float(np.max(np.abs(np.fft.ifft(vh).real)))
                if amp < self.peak0:
                    verdict = 1
                elif amp > self.peak0:
                    verdict = -1
        return _Outcome(verdict, t_exit, t, exited)


def _resolve_frame(p: WaveParams, frame: SpectralFrame | None,
                   n_points: int = 2048) -> SpectralFrame:
    if frame is None:
        return unstable_eigenpair(p, default_grid(p, n_points))
    if frame.params != p:
        raise ConfigError(
            f"frame was built for {frame.params}, experiment asks for {p}")
    if frame.shift != 0.0:
        raise ConfigError("experiments expect the frame centered at shift 0")
    return frame


def _check_component(frame: SpectralFrame, w: Field | None, side: str) -> None:
    if w is None:
        return
    if w.grid != frame.grid:
        raise ConfigError("perturbation grid does not match the frame")
    a_t, a_p, a_m, _ = project(frame, w)
    scale = max(1.0, norm_h1(w))
    if side == "cs" and abs(a_p) > COMPONENT_TOL * scale:
        raise ConfigError(
            f"perturbation carries a growing-mode component {a_p:.3e}; "
            "shoot_cs expects it deflated")
    if side == "cu" and abs(a_m) > COMPONENT_TOL * scale:
        raise ConfigError(
            f"perturbation carries a decaying-mode component {a_m:.3e}; "
            "shoot_cu expects it deflated")
    if side == "center":
        for name, val in (("kernel", a_t), ("growing", a_p), ("decaying", a_m)):
            if abs(val) > COMPONENT_TOL * scale:
                raise ConfigError(
                    f"center shot expects a deflated field; {name} "
                    f"component is {val:.3e}")


def _shoot(frame: SpectralFrame, w: Field | None, side: str, t_stay: float | None,
           tol: float, s_max: float, bracket: tuple[float, float] | None,
           dt: float | None, verify: bool) -> ShootResult:
    p = frame.params
    lam = frame.lambda_c
    if t_stay is None:
        t_stay = STAY_FACTOR / lam
    if not (tol > 0.0 and s_max > 0.0 and t_stay > 0.0):
        raise ConfigError("tol, s_max and t_stay must be positive")
    _check_component(frame, w, side)
    if dt is None:
        dt = PROBE_DT_BASE / p.c ** 1.5
    forward = side == "cs"
    vec = (frame.v_plus if forward else frame.v_minus).values
    base = frame.profile.values.copy()
    if w is not None:
        base = base + w.values
    t_cap = t_stay + STAY_FACTOR / lam
    runner = _ProbeRunner(frame, dt, forward=forward)
    n_probes = 0

    def probe(s: float) -> _Outcome:
        nonlocal n_probes
        n_probes += 1
        return runner.run(base + s * vec, t_cap)

    if bracket is None:
        lo, hi = -s_max, s_max
    else:
        lo, hi = float(bracket[0]), float(bracket[1])
        if not lo < hi:
            raise ConfigError("bracket must satisfy lo < hi")

    stay_hit = None
    out_lo = probe(lo)
    out_hi = probe(hi) if out_lo.verdict != 0 else None
    if out_lo.verdict == 0:
        stay_hit = lo
    elif out_hi.verdict == 0:
        stay_hit = hi
    else:
        v_lo, v_hi = out_lo.verdict, out_hi.verdict
        expansions = 0
        while v_lo == v_hi and stay_hit is None:
            if expansions >= MAX_EXPANSIONS or (hi - lo) > 8.0 * s_max:
                raise ResolutionError(
                    f"probes at s={lo:.4e} and s={hi:.4e} escape with the same "
                    "fate; no bracket (perturbation too large or s_max too small)")
            width = hi - lo
            cand = lo - 1.5 * width
            out = probe(cand)
            if out.verdict == 0:
                stay_hit = cand
                break
            if out.verdict != v_lo:
                hi, v_hi = lo, v_lo
                lo, v_lo = cand, out.verdict
                continue
            cand2 = hi + 1.5 * width
            out2 = probe(cand2)
            if out2.verdict == 0:
                stay_hit = cand2
                break
            if out2.verdict != v_hi:
                lo, v_lo = hi, v_hi
                hi, v_hi = cand2, out2.verdict
                continue
            lo, v_lo = cand, out.verdict
            hi, v_hi = cand2, out2.verdict
            expansions += 1
        while stay_hit is None and hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            out = probe(mid)
            if out.verdict == 0:
                stay_hit = mid
            elif out.verdict == v_lo:
                lo = mid
            else:
                hi = mid

    if stay_hit is not None:
        # an un-escaped probe certifies |s - s*| < delta_stay * e^{-lam * t_cap},
        # far below tol, so the reported width is the requested tolerance
        a_star = stay_hit
        width = min(hi - lo, tol)
    else:
        a_star = 0.5 * (lo + hi)
        width = hi - lo

    stay_time = math.nan
    if verify:
        vruns = _ProbeRunner(frame, 0.5 * dt, forward=forward)
        n_probes += 1
        out_v = vruns.run(base + a_star * vec, t_cap, classify=False)
        stay_time = out_v.exit_time if out_v.exited else out_v.end_time
        if stay_time < t_stay:
            raise ResolutionError(
                f"accepted shot leaves the neighborhood at t={stay_time:.3f} "
                f"before t_stay={t_stay:.3f}; tolerance too coarse for the "
                "stay criterion")
    return ShootResult(a_star=a_star, bracket_width=width,
                       stay_time=stay_time, probes=n_probes)


def shoot_cs(p: WaveParams, w: Field | None = None, t_stay: float | None = None,
             tol: float = TOL, frame: SpectralFrame | None = None,
             s_max: float = S_MAX, bracket: tuple[float, float] | None = None,
             dt: float | None = None, verify: bool = True) -> ShootResult:
    """Find the shot coordinate s* where Q_c + W + s V+ stays forward.

    Probes U(t) forward; on either side of s* the orbit escapes the
    DELTA_STAY neighborhood with an opposite fate, so s* is bisected to
    width tol. W must carry no V+ component. The accepted shot is re-run at
    half the probe step and must remain inside for at least t_stay.
    """
    frame = _resolve_frame(p, frame)
    return _shoot(frame, w, "cs", t_stay, tol, s_max, bracket, dt, verify)


def shoot_cu(p: WaveParams, w: Field | None = None, t_stay: float | None = None,
             tol: float = TOL, frame: SpectralFrame | None = None,
             s_max: float = S_MAX, bracket: tuple[float, float] | None = None,
             dt: float | None = None, verify: bool = True) -> ShootResult:
    """Backward-time mirror of shoot_cs along the decaying mode V-."""
    frame = _resolve_frame(p, frame)
    return _shoot(frame, w, "cu", t_stay, tol, s_max, bracket, dt, verify)


def shoot_center(p: WaveParams, ve: Field | None = None,
                 t_stay: float | None = None, tol: float = TOL,
                 frame: SpectralFrame | None = None, s_max: float = S_MAX,
                 dt: float | None = None) -> CenterResult:
    """Find (a+*, a-*) so that Q_c + a+*V+ + a-*V- + Ve stays both ways.

    Alternates the forward and backward one-coordinate shots, each seeded
    with a warm bracket around the previous value; the cross-dependence is
    quadratically small, so the alternation contracts in a few rounds. The
    accepted state is verified to remain inside the neighborhood over
    [-t_stay, t_stay].
    """
    frame = _resolve_frame(p, frame)
    g = frame.grid
    lam = frame.lambda_c
    if t_stay is None:
        t_stay = STAY_FACTOR / lam
    _check_component(frame, ve, "center")
    ve_vals = ve.values if ve is not None else np.zeros(g.n_points)
    vp = frame.v_plus.values
    vm = frame.v_minus.values
    if dt is None:
        dt = PROBE_DT_BASE / p.c ** 1.5

    a_p, a_m = 0.0, 0.0
    total_probes = 0
    rounds = 0
    converged = False
    move_p = move_m = math.inf
    while rounds < CENTER_MAX_ROUNDS:
        rounds += 1
        if rounds == 1:
            br_p = None
            br_m = None
        else:
            hw_p = max(1000.0 * tol, 8.0 * move_p)
            hw_m = max(1000.0 * tol, 8.0 * move_m)
            br_p = (a_p - hw_p, a_p + hw_p)
            br_m = (a_m - hw_m, a_m + hw_m)
        w_cs = Field(g, ve_vals + a_m * vm)
        res = _shoot(frame, w_cs, "cs", t_stay, tol, s_max, br_p, dt, verify=False)
        move_p = abs(res.a_star - a_p)
        a_p = res.a_star
        total_probes += res.probes
        w_cu = Field(g, ve_vals + a_p * vp)
        res = _shoot(frame, w_cu, "cu", t_stay, tol, s_max, br_m, dt, verify=False)
        move_m = abs(res.a_star - a_m)
        a_m = res.a_star
        total_probes += res.probes
        if move_p < tol and move_m < tol:
            converged = True
            break
    if not converged:
        raise ResolutionError(
            f"center alternation still moving {max(move_p, move_m):.3e} "
            f"after {CENTER_MAX_ROUNDS} rounds")

    u_vals = frame.profile.values + ve_vals + a_p * vp + a_m * vm
    stay_time = math.inf
    for forward in (True, False):
        runner = _ProbeRunner(frame, 0.5 * dt, forward=forward)
        total_probes += 1
        out = runner.run(u_vals, t_stay, classify=False)
        st = out.exit_time if out.exited else out.end_time
        stay_time = min(stay_time, st)
    if stay_time < t_stay:
        raise ResolutionError(
            f"centered orbit leaves the neighborhood at |t|={stay_time:.3f} "
            f"before t_stay={t_stay:.3f}")
    return CenterResult(a_plus_star=a_p, a_minus_star=a_m, rounds=rounds,
                        probes=total_probes, stay_time=stay_time)


def exit_time(p: WaveParams, offset: float, w: Field | None = None,
              frame: SpectralFrame | None = None, t_stay: float | None = None,
              tol: float = TOL, dt: float | None = None) -> ExitRecord | None:
    """First time the orbit shot off the stay set by `offset` escapes.

    The on-set coordinate is 0 for W = None (the wave is an exact fixed
    point of the discrete flow) and is found by shoot_cs otherwise. With
    offset = 0 the run must stay through t_stay and None is returned; a
    nonzero offset must escape before the capped horizon.
    """
    frame = _resolve_frame(p, frame)
    lam = frame.lambda_c
    if t_stay is None:
        t_stay = STAY_FACTOR / lam
    if dt is None:
        dt = DEFAULT_DT / p.c ** 1.5
    if not math.isfinite(offset):
        raise ConfigError(f"offset must be finite, got {offset!r}")
    vec = frame.v_plus
    if abs(offset) * norm_h1(vec) >= 0.5 * DELTA_STAY:
        raise ConfigError(f"offset {offset:.3e} starts outside the neighborhood")
    if w is None:
        a_base = 0.0
    else:
        a_base = shoot_cs(p, w, t_stay, tol, frame=frame).a_star
    base = frame.profile.values.copy()
    if w is not None:
        base = base + w.values
    u0 = base + (a_base + offset) * vec.values
    runner = _ProbeRunner(frame, dt, forward=True)
    if offset == 0.0:
        out = runner.run(u0, t_stay, classify=False)
        if out.exited:
            raise ContractError(
                f"on-set shot left the neighborhood at t={out.exit_time:.3f} "
                f"before t_stay={t_stay:.3f}")
        return None
    t_cap = t_stay + STAY_FACTOR / lam
    out = runner.run(u0, t_cap, classify=True)
    if not out.exited:
        raise ContractError(
            f"offset {offset:.3e} produced no exit by t={t_cap:.2f}; "
            "indistinguishable from the stay set at this resolution")
    if out.verdict == 0:
        raise ResolutionError(
            f"exit at t={out.exit_time:.3f} could not be classified")
    return ExitRecord(initial_offset=abs(offset), exit_time=out.exit_time,
                      exit_side=out.verdict)


def instability_rate(p: WaveParams, eps: float = 1e-4,
                     window: tuple[float, float] | None = None,
                     direction: str = "unstable",
                     frame: SpectralFrame | None = None,
                     dt: float | None = None) -> float:
    """Fitted exponential rate of the shot coordinate along V+ or V-.

    Evolves Q_c plus an eps-sized (H1) nudge along the mode (forward for
    the growing one, backward for the decaying one), extracts the mode
    coefficient at every sample, and fits
    the slope of log|a(t)| over the window (defaults to [1, 6]/lambda_c in
    |t|). If the orbit leaves the neighborhood inside the window, eps is
    shrunk threefold, up to three retries. The result is an independent
    PDE-side measurement of lambda_c.
    """
    if direction not in ("unstable", "stable"):
        raise ConfigError(f"direction must be 'unstable' or 'stable', got {direction!r}")
    frame = _resolve_frame(p, frame)
    g = frame.grid
    lam = frame.lambda_c
    if window is None:
        window = (1.0 / lam, 6.0 / lam)
    t0, t1 = float(window[0]), float(window[1])
    if not (0.0 <= t0 < t1 and math.isfinite(t1)):
        raise ConfigError(f"bad fit window {window!r}")
    if not (eps > 0.0 and math.isfinite(eps)):
        raise ConfigError(f"eps must be positive, got {eps!r}")
    c32 = p.c ** 1.5
    if dt is None:
        dt = DEFAULT_DT / c32
    sample = max(dt, 1e-2 / c32)
    forward = direction == "unstable"
    vec = frame.v_plus if forward else frame.v_minus
    # eps is the H1 size of the seed; the raw eigenfunction norm is a
    # byproduct of the pairing normalization and must not leak into it
    unit = vec.values / norm_h1(vec)
    sign = 1.0 if forward else -1.0

    for _ in range(4):
        u0 = Field(g, frame.profile.values + eps * unit)
        traj = evolve(u0, p, sign * (t1 + 2.0 * sample), dt, sample,
                      frame=frame, drift_budget=None)
        tt = np.abs(traj.times)
        series = traj.a_plus_series if forward else traj.a_minus_series
        sel = (tt >= t0) & (tt <= t1)
        vals = series[sel]
        dists = traj.dist_series[sel]
        ok = (np.count_nonzero(sel) >= 8
              and np.all(np.isfinite(vals))
              and np.all(np.abs(vals) > 0.0)
              and np.all(dists <= DELTA_STAY))
        if ok:
            slope = np.polyfit(tt[sel], np.log(np.abs(vals)), 1)[0]
            return float(slope)
        eps /= 3.0
    raise ResolutionError(
        "orbit left the neighborhood inside the fit window in every attempt")


def orbital_stability_run(p: WaveParams, sizes, t_horizon: float | None = None,
                          frame: SpectralFrame | None = None,
                          seed: int = DEFAULT_SEED, tol: float = 1e-8,
                          t_stay: float | None = None) -> list[StabilityRecord]:
    """Excursion of centered orbits as a function of perturbation size.

    One seeded unit direction in the deflated subspace is scaled to each
    size, centered with shoot_center, and evolved both ways to t_horizon;
    the record keeps the maximal distance from the wave family and the
    quadratic energy-momentum offset of the initial state.
    """
    frame = _resolve_frame(p, frame)
    g = frame.grid
    lam = frame.lambda_c
    if t_horizon is None:
        t_horizon = 6.0 / lam
    if not (t_horizon > 0.0 and math.isfinite(t_horizon)):
        raise ConfigError(f"t_horizon must be positive, got {t_horizon!r}")
    ve0 = random_xe_field(frame, SplitMix64(seed))
    q = frame.profile
    m_base = energy(q, p) + p.c * momentum(q)
    c32 = p.c ** 1.5
    dt_run = DEFAULT_DT / c32
    sample = 1e-2 / c32
    records = []
    for size in sizes:
        size = float(size)
        if not (size >= 0.0 and math.isfinite(size)):
            raise ConfigError(f"sizes must be finite and nonnegative, got {size!r}")
        if size == 0.0:
            a_p = a_m = 0.0
            u0 = q
        else:
            ve = Field(g, size * ve0.values)
            ctr = shoot_center(p, ve, t_stay, tol, frame=frame)
            a_p, a_m = ctr.a_plus_star, ctr.a_minus_star
            u0 = Field(g, q.values + ve.values
                       + a_p * frame.v_plus.values + a_m * frame.v_minus.values)
        m_off = energy(u0, p) + p.c * momentum(u0) - m_base
        exc = 0.0
        for t_end in (t_horizon, -t_horizon):
            traj = evolve(u0, p, t_end, dt_run, sample, frame=frame,
                          drift_budget=None)
            exc = max(exc, float(np.nanmax(traj.dist_series)))
        ratio = exc / size if size > 0.0 else math.nan
        records.append(StabilityRecord(size=size, a_plus_star=a_p,
                                       a_minus_star=a_m, excursion=exc,
                                       ratio=ratio, energy_offset=m_off))
    return records


def rescale_invariance_check(p: WaveParams, c2: float, w: Field | None = None,
                             eps: float = 1e-3,
                             frame: SpectralFrame | None = None,
                             frame2: SpectralFrame | None = None,
                             seed: int = DEFAULT_SEED, tol: float = TOL,
                             t_stay: float | None = None) -> RescaleCheck:
    """Check that shooting commutes with the exact scaling between speeds.

    A state placed on the stay set at speed c is rescaled onto the
    conjugate grid at speed c2 (a pure relabeling of values, so no
    interpolation error), decomposed in the target chart, and re-shot
    there; the re-shot coordinate must agree with the mapped one. The
    profile itself must map onto the target profile exactly.
    """
    frame = _resolve_frame(p, frame)
    ratio = c2 / p.c
    if not (0.25 <= ratio <= 4.0):
        raise ConfigError(f"c2/c must lie in [0.25, 4], got {ratio!r}")
    lam_scale = math.sqrt(ratio)
    g1 = frame.grid
    p2 = WaveParams(p.k, c2)
    if frame2 is None:
        g2 = Grid(g1.n_points, g1.half_length / lam_scale)
        frame2 = unstable_eigenpair(p2, g2)
    else:
        frame2 = _resolve_frame(p2, frame2)
    if w is None:
        w = Field(g1, eps * random_xe_field(frame, SplitMix64(seed)).values)

    res1 = shoot_cs(p, w, t_stay, tol, frame=frame)
    u1 = Field(g1, frame.profile.values + w.values
               + res1.a_star * frame.v_plus.values)
    u2 = rescale(u1, lam_scale, p.k, target=frame2.grid)
    rq = rescale(frame.profile, lam_scale, p.k, target=frame2.grid)
    profile_residual = float(np.max(np.abs(rq.values - frame2.profile.values)))

    dv = Field(frame2.grid, u2.values - frame2.profile.values)
    _, a_p2, _, _ = project(frame2, dv)
    w2 = Field(frame2.grid, dv.values - a_p2 * frame2.v_plus.values)
    hw = max(1000.0 * tol, 1e-7)
    res2 = shoot_cs(p2, w2, None, tol, frame=frame2,
                    bracket=(a_p2 - hw, a_p2 + hw))
    return RescaleCheck(c_source=p.c, c_target=c2, a_star_source=res1.a_star,
                        a_plus_mapped=a_p2, a_plus_reshot=res2.a_star,
                        deviation=abs(res2.a_star - a_p2),
                        profile_residual=profile_residual)
