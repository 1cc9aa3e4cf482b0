"""Time integration of the traveling-frame flow and its linearization.

Fourth-order exponential time differencing: the stiff dispersive part is a
diagonal phase in Fourier space and is integrated exactly (so backward runs
are exact inverses on that part); the nonlinearity is pseudospectral with
the 2/3 dealiasing rule. The phi coefficients are averages over a small
complex circle around each symbol value, which stays accurate down to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coords import Coords, distance_to_manifold, fit_modulation
from .errors import ChartError, ConfigError
from .grid import Field, Grid, inner_h1, norm_h1
from .spectral import SpectralFrame
from .waves import WaveParams, energy, momentum, soliton_profile

__all__ = [
    "Stepper",
    "Trajectory",
    "ConservationReport",
    "evolve",
    "evolve_linearized",
    "conservation_report",
    "BLOWUP_FACTOR",
    "DEFAULT_DT",
    "DEFAULT_SAMPLE",
]

BLOWUP_FACTOR = 10.0    # H1 guard relative to the wave being tracked
DEFAULT_DT = 5e-4
DEFAULT_SAMPLE = 1e-2


class Stepper:
    """ETDRK4 stepper in Fourier space over a fixed grid and step size.

    With `linearization` set to a profile field, the quadrature term is the
    linearized one (k Q^{k-1} u) instead of u^k, and the map is exactly
    linear in the state. States may be batched: shape (..., n_points), with
    transforms along the last axis.
    """

    CONTOUR_POINTS = 32
    CONTOUR_RADIUS = 1.0

    def __init__(self, p: WaveParams, g: Grid, dt: float,
                 linearization: Field | None = None):
        if not (math.isfinite(dt) and dt != 0.0):
            raise ConfigError(f"dt must be finite and nonzero, got {dt!r}")
        self.params = p
        self.grid = g
        self.dt = float(dt)
        kap = g.wavenumbers
        z = self.dt * 1j * (p.c * kap + kap ** 3)
        m = self.CONTOUR_POINTS
        r = self.CONTOUR_RADIUS * np.exp(2j * np.pi * (np.arange(m) + 0.5) / m)
        zr = z[:, None] + r[None, :]
        ez = np.exp(zr)
        self.e_full = np.exp(z)
        self.e_half = np.exp(0.5 * z)
        self.q_half = self.dt * np.mean((np.exp(0.5 * zr) - 1.0) / zr, axis=1)
        self.f1 = self.dt * np.mean(
            (-4.0 - zr + ez * (4.0 - 3.0 * zr + zr ** 2)) / zr ** 3, axis=1)
        self.f2 = self.dt * np.mean(
            (2.0 + zr + ez * (-2.0 + zr)) / zr ** 3, axis=1)
        self.f3 = self.dt * np.mean(
            (-4.0 - 3.0 * zr - zr ** 2 + ez * (4.0 - zr)) / zr ** 3, axis=1)
        n = g.n_points
        j = np.fft.fftfreq(n, d=1.0 / n)
        ik = 1j * kap.copy()
        ik[n // 2] = 0.0
        self._nl_mult = np.where(np.abs(j) <= n // 3, -ik, 0.0)
        self._gh = (1.0 + kap ** 2)
        self._gh[n // 2] = 1.0
        self._gh = self._gh * (g.spacing / n)
        if linearization is None:
            self._coeff = None
        else:
            if linearization.grid != g:
                raise ConfigError("linearization profile grid does not match")
            self._coeff = p.k * linearization.values ** (p.k - 1)

    def _nl(self, vh: np.ndarray) -> np.ndarray:
        u = np.fft.ifft(vh, axis=-1).real
        w = u ** self.params.k if self._coeff is None else self._coeff * u
        return self._nl_mult * np.fft.fft(w, axis=-1)

    def step(self, vh: np.ndarray) -> np.ndarray:
        nv = self._nl(vh)
        a = self.e_half * vh + self.q_half * nv
        na = self._nl(a)
        b = self.e_half * vh + self.q_half * na
        nb = self._nl(b)
        c = self.e_half * a + self.q_half * (2.0 * nb - nv)
        nc = self._nl(c)
        return (self.e_full * vh + self.f1 * nv
                + 2.0 * self.f2 * (na + nb) + self.f3 * nc)

    def h1_norm(self, vh: np.ndarray) -> float:
        return math.sqrt(float(np.sum(np.abs(vh) ** 2 * self._gh)))


@dataclass(eq=False)
class Trajectory:
    """Sampled run: times, per-sample coordinates (nan outside the chart),
    distances to the wave family, and the conserved functionals.

    For linearized runs the y column holds the kernel coefficient of the
    perturbation and dist holds its H1 norm; see evolve_linearized.
    """

    times: np.ndarray
    y_series: np.ndarray
    a_plus_series: np.ndarray
    a_minus_series: np.ndarray
    ve_h1_series: np.ndarray
    dist_series: np.ndarray
    energy_series: np.ndarray
    momentum_series: np.ndarray
    params: WaveParams
    dt: float
    drift_budget: float | None
    coords: list[Coords | None] | None = None
    states: list[Field] | None = None
    exit_reason: str | None = None
    exit_time: float | None = None


@dataclass(frozen=True)
class ConservationReport:
    max_energy_drift: float
    max_momentum_drift: float
    drift_budget: float | None
    within_budget: bool


def _plan(t_end: float, dt: float, sample_every: float) -> tuple[float, int, int]:
    if not (math.isfinite(t_end) and t_end != 0.0):
        raise ConfigError(f"t_end must be finite and nonzero, got {t_end!r}")
    if not (math.isfinite(dt) and dt > 0.0):
        raise ConfigError(f"dt must be positive, got {dt!r}")
    sign = 1.0 if t_end > 0 else -1.0
    steps_per_sample = max(1, round(abs(sample_every) / dt))
    n_samples = max(1, round(abs(t_end) / (steps_per_sample * dt)))
    return sign, steps_per_sample, n_samples


def evolve(u0: Field, p: WaveParams, t_end: float, dt: float = DEFAULT_DT,
           sample_every: float = DEFAULT_SAMPLE, frame: SpectralFrame | None = None,
           store_states: bool = False,
           drift_budget: float | None = 1e-8) -> Trajectory:
    """Integrate the traveling-frame flow; negative t_end runs backward.

    With a frame, bundle coordinates and the distance to the wave family are
    extracted at every sample; samples outside the chart get nan coordinates.
    The run truncates with an exit flag if the state exceeds the blow-up
    guard (BLOWUP_FACTOR times the H1 size of the tracked wave) or turns
    non-finite.
    """
    g = u0.grid
    sign, steps_per_sample, n_samples = _plan(t_end, dt, sample_every)
    stepper = Stepper(p, g, sign * dt)
    q_ref = soliton_profile(p, g)
    guard = BLOWUP_FACTOR * math.sqrt(inner_h1(q_ref, q_ref))

    times = [0.0]
    rows = {k: [] for k in ("y", "ap", "am", "veh", "dist", "E", "P")}
    coords_list: list[Coords | None] = []
    states: list[Field] | None = [] if store_states else None
    exit_reason = None
    exit_time = None

    def record(vh: np.ndarray) -> None:
        u = Field(g, np.fft.ifft(vh).real)
        rows["E"].append(energy(u, p))
        rows["P"].append(momentum(u))
        if frame is None:
            for k in ("y", "ap", "am", "veh", "dist"):
                rows[k].append(math.nan)
            coords_list.append(None)
        else:
            md = distance_to_manifold(u, frame)
            rows["dist"].append(md.value)
            try:
                co = fit_modulation(frame, u, md.argmin_y)
                rows["y"].append(co.y)
                rows["ap"].append(co.a_plus)
                rows["am"].append(co.a_minus)
                rows["veh"].append(norm_h1(co.v_e))
                coords_list.append(co)
            except ChartError:
                for k in ("y", "ap", "am", "veh"):
                    rows[k].append(math.nan)
                coords_list.append(None)
        if states is not None:
            states.append(u)

    vh = np.fft.fft(u0.values)
    record(vh)
    done = False
    with np.errstate(over="ignore", invalid="ignore"):
        for i_sample in range(1, n_samples + 1):
            for i_step in range(steps_per_sample):
                vh = stepper.step(vh)
                if not np.all(np.isfinite(vh)):
                    exit_reason = "nan"
                    exit_time = sign * dt * ((i_sample - 1) * steps_per_sample + i_step + 1)
                    done = True
                    break
                if stepper.h1_norm(vh) > guard:
                    exit_reason = "blowup"
                    exit_time = sign * dt * ((i_sample - 1) * steps_per_sample + i_step + 1)
                    done = True
                    break
            if done:
                break
            times.append(sign * dt * i_sample * steps_per_sample)
            record(vh)

    return Trajectory(
        times=np.array(times),
        y_series=np.array(rows["y"]),
        a_plus_series=np.array(rows["ap"]),
        a_minus_series=np.array(rows["am"]),
        ve_h1_series=np.array(rows["veh"]),
        dist_series=np.array(rows["dist"]),
        energy_series=np.array(rows["E"]),
        momentum_series=np.array(rows["P"]),
        params=p,
        dt=dt,
        drift_budget=drift_budget,
        coords=coords_list if frame is not None else None,
        states=states,
        exit_reason=exit_reason,
        exit_time=exit_time,
    )


def evolve_linearized(v0: Field, frame: SpectralFrame, t_end: float,
                      dt: float = DEFAULT_DT, sample_every: float = DEFAULT_SAMPLE,
                      store_states: bool = True) -> Trajectory:
    """Integrate the flow linearized around the frame's wave.

    The trajectory columns are repurposed for a perturbation: a_plus and
    a_minus are the eigen-coefficients from the frame projection, y holds
    the kernel coefficient, ve_h1 the remainder norm, and dist the full H1
    norm of the perturbation. Superposition holds to roundoff because the
    discrete map is linear. The relative blow-up guard is disabled (linear
    growth is the object of study); only non-finite values truncate.
    """
    from .spectral import project

    g = v0.grid
    if g != frame.grid:
        raise ConfigError("state grid does not match the frame")
    p = frame.params
    sign, steps_per_sample, n_samples = _plan(t_end, dt, sample_every)
    stepper = Stepper(p, g, sign * dt, linearization=frame.profile)

    times = [0.0]
    rows = {k: [] for k in ("y", "ap", "am", "veh", "dist", "E", "P")}
    states: list[Field] | None = [] if store_states else None
    exit_reason = None
    exit_time = None

    def record(vh: np.ndarray) -> None:
        v = Field(g, np.fft.ifft(vh).real)
        a_t, a_p, a_m, ve = project(frame, v)
        rows["y"].append(a_t)
        rows["ap"].append(a_p)
        rows["am"].append(a_m)
        rows["veh"].append(norm_h1(ve))
        rows["dist"].append(norm_h1(v))
        rows["E"].append(energy(v, p))
        rows["P"].append(momentum(v))
        if states is not None:
            states.append(v)

    vh = np.fft.fft(v0.values)
    record(vh)
    with np.errstate(over="ignore", invalid="ignore"):
        for i_sample in range(1, n_samples + 1):
            for i_step in range(steps_per_sample):
                vh = stepper.step(vh)
                if not np.all(np.isfinite(vh)):
                    exit_reason = "nan"
                    exit_time = sign * dt * ((i_sample - 1) * steps_per_sample + i_step + 1)
                    break
            if exit_reason is not None:
                break
            times.append(sign * dt * i_sample * steps_per_sample)
            record(vh)

    return Trajectory(
        times=np.array(times),
        y_series=np.array(rows["y"]),
        a_plus_series=np.array(rows["ap"]),
        a_minus_series=np.array(rows["am"]),
        ve_h1_series=np.array(rows["veh"]),
        dist_series=np.array(rows["dist"]),
        energy_series=np.array(rows["E"]),
        momentum_series=np.array(rows["P"]),
        params=p,
        dt=dt,
        drift_budget=None,
        coords=None,
        states=states,
        exit_reason=exit_reason,
        exit_time=exit_time,
    )


def conservation_report(traj: Trajectory) -> ConservationReport:
    """Relative drift of the conserved functionals over a run."""
    if len(traj.times) < 2:
        raise ConfigError("need at least two samples for a drift report")
    e = traj.energy_series
    p = traj.momentum_series
    de = float(np.max(np.abs(e - e[0])) / max(1.0, abs(e[0])))
    dp = float(np.max(np.abs(p - p[0])) / max(1.0, abs(p[0])))
    budget = traj.drift_budget
    ok = budget is None or (de < budget and dp < budget)
    return ConservationReport(de, dp, budget, bool(ok))
