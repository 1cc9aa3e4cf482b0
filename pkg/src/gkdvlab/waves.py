"""Solitary-wave family, scaling action, and conserved functionals.

The traveling profile solves Q'' - c Q + Q^k = 0 and has the closed form
Q_c(x) = c^{1/(k-1)} Q(sqrt(c) x) with
Q(x) = ((k+1)/2 * sech^2((k-1)x/2))^{1/(k-1)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ResolutionError
from .grid import Field, Grid, spectral_derivative

__all__ = [
    "WaveParams",
    "soliton_profile",
    "dc_profile",
    "rescale",
    "energy",
    "momentum",
    "default_grid",
    "BOUNDARY_GUARD",
]

# Profile and eigenfunction tails must clear this relative level at the box
# edge, otherwise the periodic wrap contaminates the construction.
BOUNDARY_GUARD = 1e-12


@dataclass(frozen=True)
class WaveParams:
    """Exponent and speed of the wave family of u_t + (u_xx + u^k)_x = 0."""

    k: int
    c: float = 1.0

    def __post_init__(self) -> None:
        k = self.k
        if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or int(k) < 6:
            raise ConfigError(
                f"k must be an integer at least 6 (supercritical regime k > 5), got {self.k!r}")
        if not (isinstance(self.c, (int, float, np.floating)) and math.isfinite(self.c)
                and self.c > 0):
            raise ConfigError(f"wave speed c must be a positive real, got {self.c!r}")
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "c", float(self.c))


def default_grid(p: WaveParams, n_points: int = 2048) -> Grid:
    """Resolution policy for the default box.

    The half-length tracks the slowest decay rate in play (the eigenfunction
    tails, which fall off roughly like exp(-0.58 sqrt(c) |x|) for k = 7), so
    the boundary guard margin is uniform across speeds.
    """
    return Grid(n_points, float(round(50.0 / math.sqrt(p.c))))


def _shape(k: int, xi: np.ndarray) -> np.ndarray:
    """Base profile ((k+1)/2 sech^2((k-1) xi/2))^{1/(k-1)}, overflow-safe."""
    z = 0.5 * (k - 1) * np.abs(xi)
    ez = np.exp(-z)
    sech = 2.0 * ez / (1.0 + ez * ez)
    return (0.5 * (k + 1)) ** (1.0 / (k - 1)) * sech ** (2.0 / (k - 1))


def _check_boundary(vals: np.ndarray, g: Grid, what: str) -> None:
    peak = float(np.max(np.abs(vals)))
    edge = max(abs(float(vals[0])), abs(float(vals[-1])))
    if peak == 0.0 or edge >= BOUNDARY_GUARD * peak:
        rel = edge / peak if peak > 0 else math.inf
        raise ResolutionError(
            f"{what} does not decay at the box edge "
            f"(edge/peak = {rel:.2e} at L = {g.half_length}); enlarge half_length")


def soliton_profile(p: WaveParams, g: Grid, shift: float = 0.0) -> Field:
    """Traveling-wave profile at speed c, sampled as Q_c(x + shift)."""
    rc = math.sqrt(p.c)
    amp = p.c ** (1.0 / (p.k - 1))
    vals = amp * _shape(p.k, rc * (g.x + float(shift)))
    _check_boundary(vals, g, "profile")
    return Field(g, vals)


def dc_profile(p: WaveParams, g: Grid, shift: float = 0.0) -> Field:
    """Speed derivative of the profile family, by the differentiated closed form.

    Differencing in c loses digits near machine precision, so the chain rule
    is applied analytically; the finite-difference oracle lives in the tests.
    """
    k, c = p.k, p.c
    rc = math.sqrt(c)
    xs = g.x + float(shift)
    xi = rc * xs
    q = _shape(k, xi)
    dq = -np.tanh(0.5 * (k - 1) * xi) * q
    vals = (c ** ((2.0 - k) / (k - 1.0)) / (k - 1.0)) * q \
        + c ** (1.0 / (k - 1.0)) * dq * xs / (2.0 * rc)
    _check_boundary(vals, g, "speed-derivative profile")
    return Field(g, vals)


def _trig_eval(f: Field, pts: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of f at arbitrary points."""
    g = f.grid
    fh = np.fft.fft(f.values) / g.n_points
    out = np.empty(len(pts))
    chunk = 256
    for lo in range(0, len(pts), chunk):
        th = (pts[lo:lo + chunk, None] + g.half_length) * g.wavenumbers[None, :]
        out[lo:lo + chunk] = (np.exp(1j * th) @ fh).real
    return out


def rescale(f: Field, lam: float, k: int = 7, target: Grid | None = None) -> Field:
    """Scaling action (T^lam f)(x) = lam^{2/(k-1)} f(lam x).

    The output is sampled on `target` (default: the grid of f) by evaluating
    the trigonometric interpolant of f at the scaled nodes. Points whose
    scaled argument lands outside the box are set to zero, which is exact to
    the decay floor for fields that pass the boundary guard. When the target
    box is exactly the source box shrunk by lam, the nodes coincide and the
    result is a pure resampling with no interpolation error.
    """
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0):
        raise ConfigError(f"scaling factor must be a positive real, got {lam!r}")
    g = f.grid
    if target is None:
        target = g
    pref = lam ** (2.0 / (k - 1))
    conjugate = (target.n_points == g.n_points
                 and abs(lam * target.half_length - g.half_length)
                 <= 4.0 * np.finfo(float).eps * g.half_length)
    if conjugate:
        return Field(target, pref * f.values)
    pts = lam * target.x
    inside = np.abs(pts) <= g.half_length
    vals = np.zeros(target.n_points)
    vals[inside] = _trig_eval(f, pts[inside])
    vals *= pref
    peak = float(np.max(np.abs(vals)))
    edge = max(abs(float(vals[0])), abs(float(vals[-1])))
    if peak > 0.0 and edge > 1e-9 * peak:
        raise ResolutionError(
            f"rescaled field does not decay at the box edge (edge/peak = {edge / peak:.2e}); "
            "the scaled argument leaves the decayed region")
    return Field(target, vals)


def energy(f: Field, p: WaveParams) -> float:
    """Conserved energy: integral of half the squared slope minus
    u^{k+1}/(k+1)."""
    fx = spectral_derivative(f, 1)
    dens = 0.5 * fx.values ** 2 - f.values ** (p.k + 1) / (p.k + 1)
    return float(f.grid.spacing * dens.sum())


def momentum(f: Field) -> float:
    """Conserved momentum: half the squared L2 norm."""
    return float(0.5 * f.grid.spacing * np.dot(f.values, f.values))
