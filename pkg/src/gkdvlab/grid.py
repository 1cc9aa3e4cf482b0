"""Periodic collocation grid, spectral differentiation, and inner products.

Everything downstream works on real fields sampled on a uniform grid over
[-L, L) with periodic wrap. Smooth fields that decay below roundoff inside
the box are represented to spectral accuracy, so the box stands in for the
whole line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "Grid",
    "Field",
    "spectral_derivative",
    "inner_l2",
    "inner_h1",
    "norm_l2",
    "norm_h1",
    "translate",
    "reflect",
]


def _power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with n_points samples.

    Wavenumbers are stored in transform order, pi*j/L with
    j = 0, 1, ..., n/2-1, -n/2, ..., -1.
    """

    n_points: int
    half_length: float
    x: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = int(self.n_points)
        L = float(self.half_length)
        if n != self.n_points or not _power_of_two(n) or n < 128:
            raise ConfigError(
                f"n_points must be a power of two at least 128, got {self.n_points!r}")
        if not (math.isfinite(L) and L > 0.0):
            raise ConfigError(f"half_length must be positive, got {self.half_length!r}")
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "half_length", L)
        x = -L + (2.0 * L / n) * np.arange(n)
        kap = (np.pi / L) * np.fft.fftfreq(n, d=1.0 / n)
        x.setflags(write=False)
        kap.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "wavenumbers", kap)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n_points


@dataclass(frozen=True, eq=False)
class Field:
    """Real function sampled on a Grid. Values are copied and made read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ConfigError(
                f"field has shape {vals.shape}, grid wants ({self.grid.n_points},)")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _require_same_grid(f: Field, g: Field) -> Grid:
    if f.grid != g.grid:
        raise ConfigError("fields live on different grids")
    return f.grid


def spectral_derivative(f: Field, order: int) -> Field:
    """Fourier collocation derivative of order 1, 2, or 3.

    Odd orders zero the Nyquist mode, the standard symmetric choice for
    real signals. Exact for band-limited inputs.
    """
    if order not in (1, 2, 3):
        raise ConfigError(f"derivative order must be 1, 2, or 3, got {order!r}")
    g = f.grid
    mult = (1j * g.wavenumbers) ** order
    if order % 2 == 1:
        mult[g.n_points // 2] = 0.0
    return Field(g, np.fft.ifft(mult * np.fft.fft(f.values)).real)


def inner_l2(f: Field, g: Field) -> float:
    """Rectangle-rule quadrature of the product, spectrally accurate for
    smooth periodic integrands."""
    grid = _require_same_grid(f, g)
    return float(grid.spacing * np.dot(f.values, g.values))


def inner_h1(f: Field, g: Field) -> float:
    """First-order Sobolev pairing: product plus product of derivatives."""
    return inner_l2(f, g) + inner_l2(spectral_derivative(f, 1), spectral_derivative(g, 1))


def norm_l2(f: Field) -> float:
    return math.sqrt(max(inner_l2(f, f), 0.0))


def norm_h1(f: Field) -> float:
    return math.sqrt(max(inner_h1(f, f), 0.0))


def translate(f: Field, delta: float) -> Field:
    """Band-limited translation: samples of x -> f(x + delta)."""
    g = f.grid
    phase = np.exp(1j * g.wavenumbers * float(delta))
    return Field(g, np.fft.ifft(np.fft.fft(f.values) * phase).real)


def reflect(f: Field) -> Field:
    """Samples of x -> f(-x). The left endpoint -L is its own mirror image
    under the periodic wrap."""
    return Field(f.grid, np.roll(f.values[::-1], 1))
