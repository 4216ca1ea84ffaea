"""Amplitude and phase of a wavefunction codetermine each other.

A free Gaussian packet is propagated spectrally and split into polar fields
psi = R exp(i S).  The phase gradient is the particle momentum, the curvature
of R is the quantum potential, and the two fields jointly satisfy the quantum
Hamilton-Jacobi and continuity equations: zero either field and both
residuals blow up.

Run:  python demos/04_hydrodynamic_wavefunction.py
"""

import numpy as np

from dressedphase import (
    GridWavefunction,
    PotentialSpec,
    continuity_residual,
    hj_residual,
    momentum_field,
    polar_decompose,
    quantum_potential,
    split_step_solve,
)

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

n, length = 2048, 40.0
dx = length / n
x = -20.0 + dx * np.arange(n)
sigma0, k0 = 1.5, 0.8
psi0_values = (2 * np.pi * sigma0**2) ** (-0.25) * np.exp(
    -(x**2) / (4 * sigma0**2) + 1j * k0 * x
)
psi0 = GridWavefunction(-20.0, dx, psi0_values, mass=1.0)

frames = split_step_solve(psi0, PotentialSpec.free(), t_final=2.0, dt=0.01)
print(f"propagated {len(frames)} frames, norm drift "
      f"{abs(frames[-1].norm() - frames[0].norm()):.1e}")

mid = len(frames) // 2
polar = polar_decompose(frames[mid])
momentum = momentum_field(polar)
potential_q = quantum_potential(polar, 1.0)
center = np.nanargmax(polar.R)
print(f"\nat t = {frames[mid].t:.2f}:")
print(f"  momentum at the packet center = {momentum[center]:.4f} (boost k0 = {k0})")
print(f"  quantum potential at center   = {potential_q[center]:+.4f} "
      f"(analytic 1/(4 m sigma_t^2) > 0: the packet pushes itself apart)")

triple = frames[mid - 1 : mid + 2]
hj = hj_residual(triple, PotentialSpec.free())
cont = continuity_residual(triple, 1.0)
print(f"\nresidual L2 at t = {frames[mid].t:.2f}:")
print(f"  quantum Hamilton-Jacobi : {hj.l2[0]:.2e}")
print(f"  continuity              : {cont.l2[0]:.2e}")

zero_phase = [GridWavefunction(-20.0, dx, np.abs(f.values) + 0.0j, t=f.t) for f in triple]
broken = continuity_residual(zero_phase, 1.0)
print(f"  continuity with S := 0  : {broken.l2[0]:.2e}   "
      f"({broken.l2[0] / cont.l2[0]:.0f}x worse: R alone cannot carry the flow)")

if plt is not None:
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.2), constrained_layout=True)
    axes[0].plot(x, polar.R**2)
    axes[0].set(xlabel="x", ylabel="R^2", title="probability density")
    axes[1].plot(x, momentum)
    axes[1].set(xlabel="x", ylabel="dS/dx", title="momentum field")
    axes[2].plot(x, potential_q)
    axes[2].set(xlabel="x", ylabel="U", title="quantum potential", ylim=(-0.2, 0.2))
    fig.savefig("demos/04_hydrodynamic_wavefunction.png", dpi=130)
    print("\nwrote demos/04_hydrodynamic_wavefunction.png")
