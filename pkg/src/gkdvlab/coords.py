"""Bundle coordinates: the chart between states near the wave family and
(translation, growing, decaying, remainder) coordinates.

The gauge fixes the translation so the kernel-direction coefficient
vanishes; a state inside the chart then has unique coordinates, inverted
here by a scalar Newton iteration driven by fast cross-correlations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartError, ConfigError
from .grid import Field, Grid, inner_h1, norm_h1
from .spectral import SpectralFrame, translate_frame

__all__ = [
    "Coords",
    "ManifoldDistance",
    "ResidualSeries",
    "embed",
    "fit_modulation",
    "distance_to_manifold",
    "modulation_residual",
    "DELTA_CHART",
]

DELTA_CHART = 0.3        # chart radius in the H1 metric
NEWTON_MAX_ITER = 50
GAUGE_TOL = 1e-11        # residual tolerance on the kernel coefficient
DEGENERATE_DERIV = 1e-6  # below this the gauge equation has no usable slope


@dataclass(frozen=True, eq=False)
class Coords:
    """Bundle coordinates of a state near the wave family.

    v_e is expressed in the chart at translation y; it is not re-centered.
    """

    y: float
    a_plus: float
    a_minus: float
    v_e: Field


@dataclass(frozen=True)
class ManifoldDistance:
    """H1 distance to the translated-wave family and the minimizing shift."""

    value: float
    argmin_y: float


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    """Defect of the leading-order coordinate flow along a trajectory."""

    times: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray


def embed(frame: SpectralFrame, co: Coords) -> Field:
    """Assemble the state with the given coordinates:
    wave at shift y plus the three perturbation parts."""
    fr = translate_frame(frame, co.y - frame.shift)
    if co.v_e.grid != fr.grid:
        raise ConfigError("v_e grid does not match the frame")
    vals = (fr.profile.values + co.a_plus * fr.v_plus.values
            + co.a_minus * fr.v_minus.values + co.v_e.values)
    return Field(fr.grid, vals)


class _Correlator:
    """Evaluates y -> <f(. + y), U> and its y-derivative from one transform."""

    def __init__(self, fvals: np.ndarray, uhat_conj: np.ndarray, g: Grid):
        scale = g.spacing / g.n_points
        self.z = np.fft.fft(fvals) * uhat_conj * scale
        ik = 1j * g.wavenumbers.copy()
        ik[g.n_points // 2] = 0.0
        self.zd = self.z * ik

    def value(self, phase: np.ndarray) -> float:
        return float(np.dot(self.z, phase).real)

    def deriv(self, phase: np.ndarray) -> float:
        return float(np.dot(self.zd, phase).real)


def _require_base_frame(frame: SpectralFrame) -> None:
    if frame.shift != 0.0:
        raise ConfigError("pass the frame at shift 0; shifts are fit internally")


def fit_modulation(frame: SpectralFrame, u: Field, y_guess: float) -> Coords:
    """Invert the chart: find the shift with vanishing kernel coefficient.

    Capped Newton on the scalar gauge function; a coarse correlation
    re-guess kicks in halfway through the budget if the iteration stalls.
    """
    _require_base_frame(frame)
    g = u.grid
    if g != frame.grid:
        raise ConfigError("state grid does not match the frame")
    uhat = np.fft.fft(u.values)
    uhc = np.conj(uhat)
    c_qx = _Correlator(frame.dx_profile.values, uhc, g)
    c_lvp = _Correlator(frame.lv_plus.values, uhc, g)
    c_lvm = _Correlator(frame.lv_minus.values, uhc, g)

    def gauge(y: float) -> tuple[float, float, float, float]:
        phase = np.exp(1j * g.wavenumbers * y)
        ap = c_lvm.value(phase) - frame.lvm_dot_q
        am = c_lvp.value(phase) - frame.lvp_dot_q
        at = (c_qx.value(phase) - ap * frame.qx_dot_vp
              - am * frame.qx_dot_vm) / frame.qx_norm2
        dap = c_lvm.deriv(phase)
        dam = c_lvp.deriv(phase)
        dat = (c_qx.deriv(phase) - dap * frame.qx_dot_vp
               - dam * frame.qx_dot_vm) / frame.qx_norm2
        return at, dat, ap, am

    y = float(y_guess)
    converged = False
    ap = am = 0.0
    for it in range(NEWTON_MAX_ITER):
        at, dat, ap, am = gauge(y)
        if abs(at) < GAUGE_TOL:
            converged = True
            break
        if abs(dat) < DEGENERATE_DERIV:
            raise ChartError(
                f"gauge derivative {dat:.2e} is degenerate; state too far from the family")
        if it == NEWTON_MAX_ITER // 2:
            # stalled; re-center on the best correlation peak and keep going
            y = _coarse_argmax(u, frame)
            continue
        step = -at / dat
        y += max(min(step, 1.0), -1.0)
    if not converged:
        raise ChartError("gauge iteration did not converge; state outside the chart")

    fr = translate_frame(frame, y)
    ve_vals = (u.values - fr.profile.values
               - ap * fr.v_plus.values - am * fr.v_minus.values)
    v_e = Field(g, ve_vals)
    diff = Field(g, u.values - fr.profile.values)
    if math.sqrt(max(inner_h1(diff, diff), 0.0)) > DELTA_CHART:
        raise ChartError(
            f"state sits outside the chart radius {DELTA_CHART} around the family")
    return Coords(y=y, a_plus=ap, a_minus=am, v_e=v_e)


def _h1_weights(g: Grid) -> np.ndarray:
    gh = 1.0 + g.wavenumbers ** 2
    gh[g.n_points // 2] = 1.0  # matches the Nyquist choice of the derivative
    return gh


def _coarse_argmax(u: Field, frame: SpectralFrame) -> float:
    g = u.grid
    corr = np.fft.fft(frame.profile.values) * np.conj(np.fft.fft(u.values)) * _h1_weights(g)
    i0 = int(np.argmax(np.fft.ifft(corr).real))
    y = i0 * g.spacing
    if y >= g.half_length:
        y -= 2.0 * g.half_length
    return y


def distance_to_manifold(u: Field, frame: SpectralFrame) -> ManifoldDistance:
    """H1 distance to the translated-wave family and the minimizing shift.

    Coarse search by weighted cross-correlation over all grid shifts, then
    Newton refinement of the correlation peak. Far states (flat correlation)
    return the coarse answer, which for zero input is the norm of the wave.
    """
    _require_base_frame(frame)
    g = u.grid
    if g != frame.grid:
        raise ConfigError("state grid does not match the frame")
    gh = _h1_weights(g)
    qh = np.fft.fft(frame.profile.values)
    uh = np.fft.fft(u.values)
    scale = g.spacing / g.n_points
    qq = float(np.sum(np.abs(qh) ** 2 * gh)) * scale
    uu = float(np.sum(np.abs(uh) ** 2 * gh)) * scale
    z = qh * np.conj(uh) * gh * scale

    i0 = int(np.argmax(np.fft.ifft(qh * np.conj(uh) * gh).real))
    y = i0 * g.spacing
    if y >= g.half_length:
        y -= 2.0 * g.half_length

    ik = 1j * g.wavenumbers.copy()
    ik[g.n_points // 2] = 0.0
    zd = z * ik
    zdd = zd * ik
    for _ in range(40):
        phase = np.exp(1j * g.wavenumbers * y)
        d1v = float(np.dot(zd, phase).real)
        d2v = float(np.dot(zdd, phase).real)
        if abs(d2v) < 1e-14 * max(1.0, qq * uu):
            break  # flat correlation; keep the coarse shift
        step = -d1v / d2v
        step = max(min(step, 0.5), -0.5)
        y += step
        if abs(step) < 1e-13:
            break
    corr = float(np.dot(z, np.exp(1j * g.wavenumbers * y)).real)
    value = math.sqrt(max(uu + qq - 2.0 * corr, 0.0))
    return ManifoldDistance(value=value, argmin_y=y)


def modulation_residual(traj, frame: SpectralFrame) -> ResidualSeries:
    """Centered-difference defect of da/dt = +-lambda a along a trajectory.

    The residual is quadratic in the coordinate sizes when the trajectory
    stays in the chart; that scaling is what the callers test.
    """
    t = np.asarray(traj.times, dtype=float)
    ap = np.asarray(traj.a_plus_series, dtype=float)
    am = np.asarray(traj.a_minus_series, dtype=float)
    if len(t) < 3:
        raise ConfigError("need at least three samples to difference")
    ds = float(np.median(np.abs(np.diff(t))))
    if ds * frame.lambda_c > 0.05:
        raise ConfigError(
            f"sample spacing {ds:.3g} too coarse against rate {frame.lambda_c:.3g}")
    if not (np.all(np.isfinite(ap)) and np.all(np.isfinite(am))):
        raise ChartError("trajectory leaves the chart; coordinates are incomplete")
    dap = (ap[2:] - ap[:-2]) / (t[2:] - t[:-2])
    dam = (am[2:] - am[:-2]) / (t[2:] - t[:-2])
    r_plus = np.abs(dap - frame.lambda_c * ap[1:-1])
    r_minus = np.abs(dam + frame.lambda_c * am[1:-1])
    return ResidualSeries(times=t[1:-1].copy(), r_plus=r_plus, r_minus=r_minus)
