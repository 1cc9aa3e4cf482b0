"""Linearized operator assembly, the unstable eigenpair, and projections.

The linearization of the traveling-frame flow around the wave splits the
phase space into a kernel direction (the translation mode), a growing and a
decaying eigendirection with rates +-lambda_c, and a remainder on which the
symmetric part of the operator is coercive. This module assembles the dense
collocation matrices, extracts and normalizes the eigenpair, computes the
coercivity constant, and provides the four projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg

from . import waves
from .errors import ConfigError, ResolutionError
from .grid import Field, Grid, inner_l2, norm_h1, spectral_derivative, translate
from .rng import SplitMix64, random_smooth_values
from .waves import WaveParams

__all__ = [
    "OperatorMatrix",
    "SpectralFrame",
    "assemble_lc",
    "assemble_jlc",
    "unstable_eigenpair",
    "coercivity_constant",
    "project",
    "translate_frame",
    "random_xe_field",
    "EIG_RESIDUAL_TOL",
    "NORMALIZATION_TOL",
]

EIG_RESIDUAL_TOL = 1e-7      # eigen-relation residual, relative, L2
NORMALIZATION_TOL = 1e-8     # pairing normalization and self-pairing bounds
EIG_THRESHOLD = 1e-6         # a real eigenvalue must exceed this to count


def _derivative_matrix(g: Grid, order: int) -> np.ndarray:
    """Dense Fourier differentiation matrix, built as a circulant.

    The first column is the derivative of the discrete delta; building the
    circulant directly is orders of magnitude faster than applying the
    transform to every unit sample.
    """
    mult = (1j * g.wavenumbers) ** order
    if order % 2 == 1:
        mult[g.n_points // 2] = 0.0
    return scipy.linalg.circulant(np.fft.ifft(mult).real)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense collocation matrix acting on fields over a fixed grid."""

    grid: Grid
    entries: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.n_points
        ent = np.array(self.entries, dtype=float)
        if ent.shape != (n, n):
            raise ConfigError(f"operator entries have shape {ent.shape}, want ({n}, {n})")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def dim(self) -> int:
        return self.grid.n_points

    def apply(self, f: Field) -> Field:
        if f.grid != self.grid:
            raise ConfigError("field grid does not match operator grid")
        return Field(self.grid, self.entries @ f.values)


def assemble_lc(p: WaveParams, g: Grid, shift: float = 0.0) -> OperatorMatrix:
    """Symmetric part of the linearization: c - d_xx - k Q_c^{k-1}(. + shift)."""
    q = waves.soliton_profile(p, g, shift)
    ent = -_derivative_matrix(g, 2)
    idx = np.arange(g.n_points)
    ent[idx, idx] += p.c - p.k * q.values ** (p.k - 1)
    return OperatorMatrix(g, ent)


def assemble_jlc(p: WaveParams, g: Grid, shift: float = 0.0) -> OperatorMatrix:
    """Full linearization generator: d/dx composed with the symmetric part."""
    lc = assemble_lc(p, g, shift)
    d1 = _derivative_matrix(g, 1)
    return OperatorMatrix(g, d1 @ lc.entries)


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    """Eigen-data and projection cache for the linearization at one (k, c).

    Carries the profile and the operator-applied eigenfunctions that the
    projection formulas need, so decomposing states never rebuilds a dense
    matrix. Frames at nonzero shift are produced by translate_frame; the
    scalar caches are translation invariant.
    """

    params: WaveParams
    lambda_c: float
    v_plus: Field = dc_field(repr=False)
    v_minus: Field = dc_field(repr=False)
    a_c: float = 0.0
    shift: float = 0.0
    profile: Field = dc_field(default=None, repr=False)
    dx_profile: Field = dc_field(default=None, repr=False)
    dc_profile: Field = dc_field(default=None, repr=False)
    lv_plus: Field = dc_field(default=None, repr=False)
    lv_minus: Field = dc_field(default=None, repr=False)
    qx_norm2: float = 0.0
    qx_dot_vp: float = 0.0
    qx_dot_vm: float = 0.0
    lvp_dot_q: float = 0.0
    lvm_dot_q: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.v_plus.grid


def _realize(vec: np.ndarray) -> np.ndarray:
    """Rotate a complex eigenvector onto the real axis and normalize it."""
    j = int(np.argmax(np.abs(vec)))
    v = (vec * np.exp(-1j * np.angle(vec[j]))).real
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ResolutionError("eigenvector collapsed to zero after phase alignment")
    return v / nrm


def unstable_eigenpair(p: WaveParams, g: Grid) -> SpectralFrame:
    """Extract the positive eigenvalue and build the normalized frame.

    Dense nonsymmetric eigensolve on the collocation matrix. The leading
    eigenvalue must be real, positive, and paired with its negative; the
    eigenfunctions are scaled so the cross pairing through the symmetric
    part equals one, with equal L2 norms, and the growing mode has positive
    component along the translation direction.
    """
    lc = assemble_lc(p, g, 0.0)
    d1 = _derivative_matrix(g, 1)
    jl = d1 @ lc.entries
    w, vec = scipy.linalg.eig(jl)

    i_plus = int(np.argmax(w.real))
    lam = w[i_plus]
    if lam.real <= EIG_THRESHOLD:
        raise ResolutionError(
            f"no real eigenvalue above {EIG_THRESHOLD}; input not supercritical "
            "or grid too coarse")
    if abs(lam.imag) > 1e-8 * lam.real:
        raise ResolutionError(
            f"leading eigenvalue {lam:.3e} is not real; resolution failure")
    lam = float(lam.real)
    i_minus = int(np.argmin(np.abs(w + lam)))
    if abs(w[i_minus] + lam) > 1e-6 * lam:
        raise ResolutionError("no matching negative eigenvalue; resolution failure")

    wp = _realize(vec[:, i_plus])
    wm = _realize(vec[:, i_minus])

    q = waves.soliton_profile(p, g, 0.0)
    qx = spectral_derivative(q, 1)
    dx = g.spacing

    # orientation: the growing mode keeps a positive component along the
    # translation direction (its pairing with the wave itself vanishes
    # identically, so that pairing cannot fix a sign)
    s = float(dx * np.dot(wp, qx.values))
    if abs(s) < 1e-8 * math.sqrt(dx * np.dot(qx.values, qx.values)):
        raise ResolutionError("orientation pairing degenerate; resolution failure")
    if s < 0.0:
        wp = -wp

    beta = float(dx * np.dot(wm, lc.entries @ wp))
    if abs(beta) < 1e-12:
        raise ResolutionError("cross pairing degenerate; resolution failure")
    alpha = 1.0 / math.sqrt(abs(beta))
    vp_vals = alpha * wp
    vm_vals = wm / (alpha * beta)

    waves._check_boundary(vp_vals, g, "growing eigenfunction")
    waves._check_boundary(vm_vals, g, "decaying eigenfunction")

    v_plus = Field(g, vp_vals)
    v_minus = Field(g, vm_vals)
    lv_plus = Field(g, lc.entries @ vp_vals)
    lv_minus = Field(g, lc.entries @ vm_vals)

    def l2(vals):
        return math.sqrt(dx * float(np.dot(vals, vals)))

    res_p = l2(jl @ vp_vals - lam * vp_vals) / l2(vp_vals)
    res_m = l2(jl @ vm_vals + lam * vm_vals) / l2(vm_vals)
    pair = dx * float(np.dot(lv_plus.values, vm_vals))
    self_p = dx * float(np.dot(lv_plus.values, vp_vals))
    self_m = dx * float(np.dot(lv_minus.values, vm_vals))
    if res_p > EIG_RESIDUAL_TOL or res_m > EIG_RESIDUAL_TOL:
        raise ResolutionError(
            f"eigen-relation residuals {res_p:.2e}/{res_m:.2e} exceed {EIG_RESIDUAL_TOL}")
    if abs(pair - 1.0) > NORMALIZATION_TOL:
        raise ResolutionError(f"cross pairing {pair!r} is not 1 after normalization")
    if abs(self_p) > NORMALIZATION_TOL or abs(self_m) > NORMALIZATION_TOL:
        raise ResolutionError("self pairings of the eigenfunctions do not vanish")

    a_c = _coercivity_min(lc.entries, d1, g,
                          lv_plus.values, lv_minus.values, qx.values)
    if a_c <= 0.0:
        raise ResolutionError(f"coercivity constant {a_c:.3e} is not positive")

    return SpectralFrame(
        params=p,
        lambda_c=lam,
        v_plus=v_plus,
        v_minus=v_minus,
        a_c=float(a_c),
        shift=0.0,
        profile=q,
        dx_profile=qx,
        dc_profile=waves.dc_profile(p, g, 0.0),
        lv_plus=lv_plus,
        lv_minus=lv_minus,
        qx_norm2=inner_l2(qx, qx),
        qx_dot_vp=inner_l2(qx, v_plus),
        qx_dot_vm=inner_l2(qx, v_minus),
        lvp_dot_q=inner_l2(lv_plus, q),
        lvm_dot_q=inner_l2(lv_minus, q),
    )


def _coercivity_min(lc_entries: np.ndarray, d1: np.ndarray, g: Grid,
                    c1: np.ndarray, c2: np.ndarray, c3: np.ndarray) -> float:
    """Smallest generalized eigenvalue of the symmetric part against the H1
    Gram matrix, on the complement of the three constraint directions."""
    cons = np.stack([c1, c2, c3], axis=1)
    qfull, _ = scipy.linalg.qr(cons, mode="full")
    basis = qfull[:, 3:]
    sym = 0.5 * (lc_entries + lc_entries.T)
    a = basis.T @ (sym @ basis)
    d1b = d1 @ basis
    b = np.eye(basis.shape[1]) + d1b.T @ d1b
    vals = scipy.linalg.eigh(a, b, eigvals_only=True, subset_by_index=[0, 0])
    return float(vals[0])


def coercivity_constant(frame: SpectralFrame, g: Grid | None = None) -> float:
    """Recompute the coercivity constant of the frame's symmetric part on the
    constrained complement. Must be strictly positive."""
    grid = frame.grid
    if g is not None and g != grid:
        raise ConfigError("grid does not match the frame")
    lc = assemble_lc(frame.params, grid, frame.shift)
    d1 = _derivative_matrix(grid, 1)
    val = _coercivity_min(lc.entries, d1, grid,
                          frame.lv_plus.values, frame.lv_minus.values,
                          frame.dx_profile.values)
    if val <= 0.0:
        raise ResolutionError(f"coercivity constant {val:.3e} is not positive")
    return val


def project(frame: SpectralFrame, v: Field) -> tuple[float, float, float, Field]:
    """Split a field into kernel, growing, decaying, and remainder parts.

    Returns (a_t, a_plus, a_minus, v_e) with
    v = a_t * dxQ + a_plus * V+ + a_minus * V- + v_e
    exactly, and v_e annihilated by the three pairing constraints.
    """
    if v.grid != frame.grid:
        raise ConfigError("field grid does not match the frame")
    a_plus = inner_l2(frame.lv_minus, v)
    a_minus = inner_l2(frame.lv_plus, v)
    a_t = (inner_l2(frame.dx_profile, v)
           - a_plus * frame.qx_dot_vp - a_minus * frame.qx_dot_vm) / frame.qx_norm2
    ve_vals = (v.values - a_t * frame.dx_profile.values
               - a_plus * frame.v_plus.values - a_minus * frame.v_minus.values)
    return a_t, a_plus, a_minus, Field(v.grid, ve_vals)


def translate_frame(frame: SpectralFrame, delta: float) -> SpectralFrame:
    """Frame for the wave shifted by delta.

    Profiles are re-sampled from their closed forms; eigenfunctions move by
    band-limited translation, which commutes with the operator assembly.
    All scalar caches are translation invariant.
    """
    if delta == 0.0:
        return frame
    g = frame.grid
    p = frame.params
    shift = frame.shift + float(delta)
    q = waves.soliton_profile(p, g, shift)
    return SpectralFrame(
        params=p,
        lambda_c=frame.lambda_c,
        v_plus=translate(frame.v_plus, delta),
        v_minus=translate(frame.v_minus, delta),
        a_c=frame.a_c,
        shift=shift,
        profile=q,
        dx_profile=spectral_derivative(q, 1),
        dc_profile=waves.dc_profile(p, g, shift),
        lv_plus=translate(frame.lv_plus, delta),
        lv_minus=translate(frame.lv_minus, delta),
        qx_norm2=frame.qx_norm2,
        qx_dot_vp=frame.qx_dot_vp,
        qx_dot_vm=frame.qx_dot_vm,
        lvp_dot_q=frame.lvp_dot_q,
        lvm_dot_q=frame.lvm_dot_q,
    )


def random_xe_field(frame: SpectralFrame, rng: SplitMix64, n_modes: int = 8,
                    width: float = 6.0) -> Field:
    """Seeded random field in the constrained remainder subspace, unit H1 norm."""
    g = frame.grid
    raw = Field(g, random_smooth_values(g, rng, n_modes, width))
    _, _, _, ve = project(frame, raw)
    nrm = norm_h1(ve)
    if nrm < 1e-10:
        raise ResolutionError("random field collapsed under projection")
    return Field(g, ve.values / nrm)
