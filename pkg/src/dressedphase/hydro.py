"""Hydrodynamic (polar) decomposition of 1-D wavefunctions and its residuals.

A wavefunction on a periodic grid is split as psi = R exp(i S) (hbar = 1);
the quantum Hamilton-Jacobi equation and the continuity equation are then
checked as finite-difference residuals on numerically propagated frames.
Nodes are handled by masking points with R below a floor instead of
regularizing the diverging quantum potential; all derivative stencils are
second-order central differences, so residuals converge at second order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EdgeLeakageError,
    GridError,
    InsufficientFramesError,
    ValidationError,
)

#: Default mask floor as a fraction of max R.
R_FLOOR_FRACTION = 1e-8

#: Edge-safety threshold: max edge |psi|^2 relative to the global max.
EDGE_FRACTION = 1e-10


@dataclass(frozen=True)
class GridWavefunction:
    """Complex wavefunction on a uniform periodic grid.

    ``n_points`` must be a power of two (>= 16) for the spectral kinetic step.
    """

    x_min: float
    dx: float
    values: np.ndarray
    mass: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        n = values.size
        if values.ndim != 1 or n < 16 or n & (n - 1):
            raise ValidationError(
                "GridWavefunction: n_points must be a power of two >= 16"
            )
        if not self.dx > 0.0:
            raise ValidationError("GridWavefunction: dx must be > 0")
        if not self.mass > 0.0:
            raise ValidationError("GridWavefunction: mass must be > 0")
        if not np.all(np.isfinite(values.view(float))):
            raise ValidationError("GridWavefunction: values must be finite")
        values.flags.writeable = False

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def norm(self) -> float:
        """Total probability, sum |psi|^2 dx."""
        return float(np.sum(np.abs(self.values) ** 2) * self.dx)


@dataclass(frozen=True)
class PotentialSpec:
    """Real potential on the grid: free, harmonic, or tabulated values."""

    shape: str
    mass: float = 1.0
    omega0: float = 0.0
    center: float = 0.0
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.shape not in ("free", "harmonic", "tabulated"):
            raise ValidationError(f"PotentialSpec: unknown shape {self.shape!r}")
        if self.shape == "harmonic" and not (self.mass > 0.0 and self.omega0 > 0.0):
            raise ValidationError("PotentialSpec: harmonic needs mass > 0 and omega0 > 0")
        if self.shape == "tabulated":
            if self.values is None:
                raise ValidationError("PotentialSpec: tabulated needs values")
            vals = np.asarray(self.values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValidationError("PotentialSpec: tabulated values must be finite")
            object.__setattr__(self, "values", vals)

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls("free")

    @classmethod
    def harmonic(cls, mass: float, omega0: float, center: float = 0.0) -> "PotentialSpec":
        return cls("harmonic", mass=mass, omega0=omega0, center=center)

    @classmethod
    def tabulated(cls, values) -> "PotentialSpec":
        return cls("tabulated", values=values)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if self.shape == "free":
            return np.zeros_like(x)
        if self.shape == "harmonic":
            return 0.5 * self.mass * self.omega0**2 * (x - self.center) ** 2
        if self.values.size != x.size:
            raise ValidationError("PotentialSpec: tabulated length does not match grid")
        return self.values


@dataclass(frozen=True)
class PolarFields:
    """Amplitude R >= 0 and spatially unwrapped phase S of one frame.

    ``S`` is NaN outside the validity mask (R below the floor); each
    contiguous valid region is unwrapped left to right independently.
    """

    R: np.ndarray
    S: np.ndarray
    valid: np.ndarray
    dx: float
    x_min: float
    r_floor: float

    def reconstruct(self) -> np.ndarray:
        """R exp(i S) on valid points (NaN elsewhere); inverse of the decomposition."""
        out = np.full(self.R.shape, np.nan, dtype=complex)
        v = self.valid
        out[v] = self.R[v] * np.exp(1j * self.S[v])
        return out


def _edge_safe(values: np.ndarray) -> bool:
    dens = np.abs(values) ** 2
    peak = float(np.max(dens))
    return max(float(dens[0]), float(dens[-1])) < EDGE_FRACTION * peak


def split_step_solve(
    psi0: GridWavefunction,
    potential: PotentialSpec,
    t_final: float,
    dt: float,
) -> list[GridWavefunction]:
    """Strang-split spectral propagation; returns frames at t0, t0+dt, ..., t0+t_final.

    Half potential step, full spectral kinetic step, half potential step; the
    scheme is exactly unitary up to roundoff.  Raises ``EdgeLeakageError``
    when probability reaches the grid edge (the grid is periodic, so leakage
    would wrap around).
    """
    if dt <= 0.0 or t_final <= 0.0:
        raise GridError("split_step_solve: t_final and dt must be > 0")
    n_steps = int(round(t_final / dt))
    if n_steps < 1 or abs(n_steps * dt - t_final) > 1e-9 * max(dt, abs(t_final)):
        raise GridError("split_step_solve: dt must divide t_final")
    if not _edge_safe(psi0.values):
        raise EdgeLeakageError(
            "edge leakage: initial wavefunction is not negligible at the grid edge"
        )

    x = psi0.x
    v = potential.evaluate(x)
    k = 2.0 * math.pi * np.fft.fftfreq(psi0.n_points, d=psi0.dx)
    exp_v_half = np.exp(-0.5j * dt * v)
    exp_kin = np.exp(-0.5j * dt * k**2 / psi0.mass)

    frames = [psi0]
    psi = psi0.values
    for step in range(1, n_steps + 1):
        psi = exp_v_half * psi
        psi = np.fft.ifft(exp_kin * np.fft.fft(psi))
        psi = exp_v_half * psi
        if not _edge_safe(psi):
            raise EdgeLeakageError(f"edge leakage at step {step} (t = {psi0.t + step * dt})")
        frames.append(
            GridWavefunction(psi0.x_min, psi0.dx, psi, mass=psi0.mass, t=psi0.t + step * dt)
        )
    return frames


def polar_decompose(psi: GridWavefunction, r_floor: float | None = None) -> PolarFields:
    """Split psi into R = |psi| and spatially unwrapped phase S (hbar = 1).

    Points with R below ``r_floor`` (default 1e-8 of max R) are masked; S is
    unwrapped left to right within each contiguous valid region.
    """
    r = np.abs(psi.values)
    if r_floor is None:
        r_floor = R_FLOOR_FRACTION * float(np.max(r))
    if not r_floor > 0.0:
        raise ValidationError("polar_decompose: r_floor must be > 0")
    valid = r >= r_floor
    s = np.full(psi.n_points, np.nan)
    raw = np.angle(psi.values)
    for start, stop in _valid_runs(valid):
        s[start:stop] = np.unwrap(raw[start:stop])
    return PolarFields(R=r, S=s, valid=valid, dx=psi.dx, x_min=psi.x_min, r_floor=r_floor)


def _valid_runs(valid: np.ndarray):
    """(start, stop) index pairs of contiguous True runs."""
    idx = np.flatnonzero(np.diff(valid.astype(np.int8)))
    edges = np.concatenate([[0], idx + 1, [valid.size]])
    return [
        (int(a), int(b))
        for a, b in zip(edges[:-1], edges[1:])
        if valid[a]
    ]


def quantum_potential(fields: PolarFields, mass: float) -> np.ndarray:
    """U = -(1/2m) (d^2 R / dx^2) / R by second central differences.

    Defined on interior points whose full stencil is valid; NaN elsewhere.
    The divergence at nodes is genuine, which is why masked points are
    omitted rather than regularized.
    """
    if not fields.valid.any():
        raise ValidationError("quantum_potential: validity mask is empty")
    r = fields.R
    out = np.full(r.shape, np.nan)
    core = fields.valid[1:-1] & fields.valid[:-2] & fields.valid[2:]
    d2 = r[2:] - 2.0 * r[1:-1] + r[:-2]
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = -d2 / (2.0 * mass * fields.dx**2 * r[1:-1])
    out[1:-1][core] = vals[core]
    return out


def momentum_field(fields: PolarFields) -> np.ndarray:
    """Particle momentum p = dS/dx (hbar = 1) by central differences; v = p/m.

    NaN outside valid interiors.
    """
    if not fields.valid.any():
        raise ValidationError("momentum_field: validity mask is empty")
    s = fields.S
    out = np.full(s.shape, np.nan)
    core = fields.valid[1:-1] & fields.valid[:-2] & fields.valid[2:]
    grad = (s[2:] - s[:-2]) / (2.0 * fields.dx)
    out[1:-1][core] = grad[core]
    return out


@dataclass(frozen=True)
class ResidualSeries:
    """Residual fields (NaN-masked) and their L2 norms at the interior frames."""

    times: np.ndarray
    fields: np.ndarray
    l2: np.ndarray


def _frame_spacing(frames) -> float:
    if len(frames) < 3:
        raise InsufficientFramesError("insufficient frames: need at least 3")
    times = np.array([f.t for f in frames])
    dts = np.diff(times)
    dt = float(dts[0])
    if dt <= 0.0 or np.max(np.abs(dts - dt)) > 1e-9 * dt:
        raise GridError("frames must be uniformly spaced in time")
    return dt


def _anchored_phase_triple(polars, i):
    """S of frames i-1, i, i+1 with global 2*pi winding anchored at max-R of frame i.

    The spatial unwrap fixes phase structure within a frame only up to a
    global multiple of 2*pi; anchoring at the max-R point keeps the frame-to-
    frame dynamical phase continuous so the centered time derivative of S is
    clean.  Requires the phase at the anchor to advance by less than pi per
    frame, which the frame spacing must provide.
    """
    p_prev, p_mid, p_next = polars[i - 1], polars[i], polars[i + 1]
    anchor = int(np.nanargmax(np.where(p_mid.valid, p_mid.R, -np.inf)))
    out = [p_prev.S, p_mid.S, p_next.S]
    for j, p in ((0, p_prev), (2, p_next)):
        if not (p.valid[anchor] and p_mid.valid[anchor]):
            continue
        k = round((p_mid.S[anchor] - p.S[anchor]) / (2.0 * math.pi))
        if k:
            out[j] = p.S + 2.0 * math.pi * k
    return out


def hj_residual(
    frames, potential: PotentialSpec, r_floor: float | None = None
) -> ResidualSeries:
    """Residual of the quantum Hamilton-Jacobi equation on solver frames.

    residual = dS/dt + (dS/dx)^2 / 2m + V + U, with centered differences in
    both t and x, evaluated at every interior frame on points whose stencils
    are valid; the summary is the L2 norm sqrt(sum residual^2 dx) per frame.
    ``r_floor`` is passed through to the polar decomposition: near the mask
    edge the quantum potential magnifies stencil error, so a caller checking
    tight tolerances can raise the floor.
    """
    dt = _frame_spacing(frames)
    mass = frames[0].mass
    x = frames[0].x
    vx = potential.evaluate(x)
    polars = [polar_decompose(f, r_floor) for f in frames]

    times = []
    rows = []
    l2 = []
    for i in range(1, len(frames) - 1):
        s_prev, s_mid, s_next = _anchored_phase_triple(polars, i)
        p = polars[i]
        ds_dt = (s_next - s_prev) / (2.0 * dt)
        grad = np.full(x.shape, np.nan)
        grad[1:-1] = (s_mid[2:] - s_mid[:-2]) / (2.0 * p.dx)
        u = quantum_potential(p, mass)
        res = ds_dt + grad**2 / (2.0 * mass) + vx + u
        ok = (
            p.valid
            & polars[i - 1].valid
            & polars[i + 1].valid
            & np.isfinite(res)
        )
        res[~ok] = np.nan
        times.append(frames[i].t)
        rows.append(res)
        l2.append(math.sqrt(float(np.nansum(res[ok] ** 2) * p.dx)))
    return ResidualSeries(np.array(times), np.array(rows), np.array(l2))


def continuity_residual(frames, mass: float, r_floor: float | None = None) -> ResidualSeries:
    """Residual of the continuity equation d(R^2)/dt + d(R^2 dS/dx / m)/dx.

    Centered differences in t and x; the probability current needs the phase
    gradient, so points near the mask boundary drop out of the stencil.
    """
    dt = _frame_spacing(frames)
    x = frames[0].x
    polars = [polar_decompose(f, r_floor) for f in frames]

    times = []
    rows = []
    l2 = []
    for i in range(1, len(frames) - 1):
        p = polars[i]
        rho_prev = polars[i - 1].R ** 2
        rho_next = polars[i + 1].R ** 2
        drho_dt = (rho_next - rho_prev) / (2.0 * dt)

        grad_s = np.full(x.shape, np.nan)
        grad_s[1:-1] = (p.S[2:] - p.S[:-2]) / (2.0 * p.dx)
        current = p.R**2 * grad_s / mass
        div = np.full(x.shape, np.nan)
        div[1:-1] = (current[2:] - current[:-2]) / (2.0 * p.dx)

        res = drho_dt + div
        ok = np.isfinite(res)
        res = np.where(ok, res, np.nan)
        times.append(frames[i].t)
        rows.append(res)
        l2.append(math.sqrt(float(np.nansum(res[ok] ** 2) * p.dx)))
    return ResidualSeries(np.array(times), np.array(rows), np.array(l2))
