import numpy as np
import pytest

from dressedphase.dressed import (
    assemble_bare_state,
    dressed_amplitudes,
    dressed_phases,
    effective_excited_frequency,
    generalized_rabi,
    level_shifts,
)
from dressedphase.errors import FieldBelowFloorError, GridError, ValidationError
from dressedphase.model import (
    DrivingField,
    EnvelopeSpec,
    InitialPhases,
    PhaseSpec,
    TwoLevelSystem,
    complex_detuning,
    rabi_frequency,
)
from dressedphase.propagator import IntegratorConfig, compare_trajectories, rwa_propagate
from oracles import rwa_eigensystem

RESONANT = TwoLevelSystem(0.0, 5.0)
RES_FIELD = DrivingField(5.0, EnvelopeSpec.constant(2.0))
DETUNED = TwoLevelSystem(0.0, 8.0)           # detuning 3 against carrier 5
DET_FIELD = DrivingField(5.0, EnvelopeSpec.constant(4.0))  # Omega 4


class TestGeneralizedRabi:
    def test_resonance(self):
        assert generalized_rabi(RESONANT, RES_FIELD, 0.0) == 2.0 + 0.0j

    def test_three_four_five(self):
        assert generalized_rabi(DETUNED, DET_FIELD, 1.0) == pytest.approx(5.0 + 0.0j, abs=1e-14)

    def test_weak_field_limit_tracks_detuning_sign(self):
        weak = DrivingField(5.0, EnvelopeSpec.constant(1e-8))
        blue = TwoLevelSystem(0.0, 6.0)   # detuning +1
        red = TwoLevelSystem(0.0, 4.5)    # detuning -0.5
        assert generalized_rabi(blue, weak, 0.0).real > 0
        assert generalized_rabi(red, weak, 0.0).real < 0
        assert generalized_rabi(red, weak, 0.0) == pytest.approx(
            complex_detuning(red, weak), abs=1e-8
        )

    def test_radicand_matches_direct_formula(self):
        """Independent evaluation of the square of the branch-tracked root.

        The complex detuning is constant per configuration, so its time
        derivative contributes nothing to the radicand.
        """
        system = TwoLevelSystem(0.0, 7.0, gamma_re=0.1, gamma_im=0.05)
        field = DrivingField(
            5.0,
            EnvelopeSpec.gaussian(1.0, 5.0, 3.0),
            PhaseSpec.linear_chirp(0.02),
        )
        t = np.linspace(0.0, 10.0, 101)
        w = generalized_rabi(system, field, t)
        dw = complex_detuning(system, field)
        omega = rabi_frequency(system, field, t, 0)
        radicand = dw * dw + omega**2 - 2j * 0.0
        np.testing.assert_allclose(w * w, radicand, atol=1e-12)
        # mid-ramp scalar call agrees with the array evaluation
        mid = generalized_rabi(system, field, float(t[30]))
        assert mid == pytest.approx(w[30], abs=1e-12)

    def test_grid_continuity(self):
        system = TwoLevelSystem(0.0, 4.0, gamma_re=0.3)
        field = DrivingField(5.0, EnvelopeSpec.gaussian(3.0, 5.0, 2.0))  # detuning -1
        t = np.linspace(0.0, 10.0, 2001)
        w = generalized_rabi(system, field, t)
        assert np.max(np.abs(np.diff(w))) < 0.05  # no branch flips


class TestLevelShifts:
    def test_bare_limit(self):
        system = TwoLevelSystem(1.0, 2.0)
        field = DrivingField(0.0, EnvelopeSpec.constant(0.0))
        eff = level_shifts(system, field, 0.0)
        assert eff.lambda_minus == 0.0
        assert eff.omega_G == 1.0
        assert eff.omega_E == 2.0
        assert eff.omega_E_eff is None

    def test_resonant_splitting(self):
        eff = level_shifts(RESONANT, RES_FIELD, 0.3)
        assert eff.lambda_plus == pytest.approx(1.0, abs=1e-14)
        assert eff.lambda_minus == pytest.approx(-1.0, abs=1e-14)
        assert eff.omega_G == pytest.approx(-1.0, abs=1e-14)

    def test_static_tilde_equals_plain(self):
        eff = level_shifts(DETUNED, DET_FIELD, 1.0)
        assert eff.lambda_tilde_plus == eff.lambda_plus
        assert eff.lambda_tilde_minus == eff.lambda_minus

    @pytest.mark.parametrize("seed", range(4))
    def test_sum_and_difference_invariants(self, seed):
        rng = np.random.default_rng(seed)
        system = TwoLevelSystem(
            0.0,
            float(rng.uniform(3.0, 9.0)),
            mu=float(rng.uniform(0.5, 2.0)),
            gamma_re=float(rng.uniform(0.0, 0.4)),
            gamma_im=float(rng.uniform(0.0, 0.4)),
        )
        field = DrivingField(
            float(rng.uniform(2.0, 6.0)),
            EnvelopeSpec.gaussian(float(rng.uniform(0.5, 2.0)), 5.0, 3.0),
        )
        dw = complex_detuning(system, field)
        for t in (2.0, 5.0, 7.5):
            eff = level_shifts(system, field, t)
            assert abs(eff.lambda_plus + eff.lambda_minus - dw) < 1e-12
            assert abs(eff.lambda_plus - eff.lambda_minus - eff.gen_rabi) < 1e-12
            assert abs(eff.omega_G + eff.omega_E - (system.omega_g + system.omega_e)) < 1e-12


class TestEffectiveExcitedFrequency:
    def test_static_resonant_is_stark_shifted_level(self):
        eff = level_shifts(RESONANT, RES_FIELD, 0.0)
        val = effective_excited_frequency(RESONANT, RES_FIELD, 0.0)
        assert val == eff.omega_E

    def test_damping_contribution(self):
        system = TwoLevelSystem(0.0, 5.0, gamma_re=0.2)
        field = DrivingField(5.0, EnvelopeSpec.constant(1.0))
        val = effective_excited_frequency(system, field, 0.0)
        eff = level_shifts(system, field, 0.0)
        assert val == pytest.approx(eff.omega_E - 0.1j, abs=1e-14)

    def test_gaussian_log_slope_contribution(self):
        tau = 10.0
        field = DrivingField(5.0, EnvelopeSpec.gaussian(1.0, 0.0, tau))
        val = effective_excited_frequency(RESONANT, field, tau)
        eff = level_shifts(RESONANT, field, tau)
        assert val == pytest.approx(eff.omega_E - 2j / tau, abs=1e-12)

    def test_field_below_floor(self):
        field = DrivingField(5.0, EnvelopeSpec.flat_top_cos2(1.0, 0.0, 1.0, 2.0))
        with pytest.raises(FieldBelowFloorError, match="field below floor"):
            effective_excited_frequency(RESONANT, field, 10.0)


class TestDressedAmplitudes:
    def test_bare_limit(self):
        weak = DrivingField(5.0, EnvelopeSpec.constant(1e-7))
        system = TwoLevelSystem(0.0, 6.0)
        real_amp, virt_amp = dressed_amplitudes(system, weak, 0.0, "ground")
        assert abs(real_amp - 1.0) < 1e-12
        assert abs(virt_amp) < 1e-6

    def test_resonant_equal_mixing(self):
        real_amp, virt_amp = dressed_amplitudes(RESONANT, RES_FIELD, 0.0, "ground")
        assert real_amp == pytest.approx(np.sqrt(0.5), abs=1e-14)
        assert virt_amp == pytest.approx(np.sqrt(0.5), abs=1e-14)

    def test_matches_eigenvector_oracle(self):
        """(cos, sin) of the complex half-angle is the ground eigenvector of
        the rotating-frame matrix; its eigenvalue is lambda_minus."""
        real_amp, virt_amp = dressed_amplitudes(DETUNED, DET_FIELD, 0.0, "ground")
        evals, evecs = rwa_eigensystem(4.0, complex_detuning(DETUNED, DET_FIELD))
        vec = evecs[:, 0] / evecs[0, 0] * abs(evecs[0, 0])
        assert abs(real_amp - vec[0]) < 1e-12
        assert abs(virt_amp - vec[1]) < 1e-12
        eff = level_shifts(DETUNED, DET_FIELD, 0.0)
        assert abs(evals[0] - eff.lambda_minus) < 1e-12
        # magnitudes also match the halved-Rabi matrix [[0, 2], [2, 3]]
        mags = np.abs(np.linalg.eigh(np.array([[0.0, 2.0], [2.0, 3.0]]))[1][:, 0])
        assert np.allclose(sorted(mags), sorted([abs(real_amp), abs(virt_amp)]), atol=1e-12)

    def test_branches_are_orthogonal_and_normalized(self):
        g = dressed_amplitudes(DETUNED, DET_FIELD, 0.0, "ground")
        e = dressed_amplitudes(DETUNED, DET_FIELD, 0.0, "excited")
        ground_vec = np.array([g[0], g[1]])          # (|g>, |e>) content
        excited_vec = np.array([e[1], e[0]])         # virtual is the |g> content
        assert abs(np.dot(ground_vec, excited_vec)) < 1e-12
        assert abs(np.dot(ground_vec, ground_vec) - 1.0) < 1e-12

    def test_rejects_unknown_branch(self):
        with pytest.raises(ValidationError):
            dressed_amplitudes(DETUNED, DET_FIELD, 0.0, "sideways")


PHASES = InitialPhases(phi_g=0.7, phi_e=-0.4)


def _phase_field(phi0=0.1):
    return DrivingField(5.0, EnvelopeSpec.constant(2.0), PhaseSpec.constant(phi0))


class TestDressedPhases:
    def test_initial_constants_ground(self):
        field = _phase_field()
        t = np.linspace(0.0, 5.0, 201)
        first = dressed_phases(RESONANT, field, PHASES, "ground", t)[0]
        phi0 = field.phase.value(0.0)
        assert first.phi_G_r == PHASES.phi_g
        assert first.phi_G_v == PHASES.phi_g + phi0
        assert first.phi_E_r == PHASES.phi_g + phi0
        assert first.phi_E_v == PHASES.phi_g

    def test_initial_constants_excited(self):
        field = _phase_field()
        t = np.linspace(0.0, 5.0, 201)
        first = dressed_phases(RESONANT, field, PHASES, "excited", t)[0]
        phi0 = field.phase.value(0.0)
        assert first.phi_E_r == PHASES.phi_e
        assert first.phi_E_v == PHASES.phi_e - phi0
        assert first.phi_G_r == PHASES.phi_e - phi0
        assert first.phi_G_v == PHASES.phi_e

    def test_static_resonant_linear_phase(self):
        t = np.linspace(0.0, 5.0, 201)
        series = dressed_phases(RESONANT, RES_FIELD, PHASES, "ground", t)
        expected = PHASES.phi_g + (RESONANT.omega_g - 1.0) * t
        np.testing.assert_allclose(series.phi_G_r.real, expected, atol=1e-12)
        np.testing.assert_allclose(series.phi_G_r.imag, 0.0, atol=1e-12)

    @pytest.mark.parametrize("branch", ["ground", "excited"])
    def test_virtual_real_relation(self, branch):
        system = TwoLevelSystem(0.3, 7.0, gamma_re=0.1)
        field = DrivingField(
            6.0, EnvelopeSpec.gaussian(1.5, 4.0, 2.5), PhaseSpec.sinusoidal(0.2, 0.9, phi0=0.4)
        )
        t = np.linspace(0.0, 8.0, 801)
        series = dressed_phases(system, field, PHASES, branch, t)
        full_phase = field.carrier * t + field.phase.value(t)
        np.testing.assert_allclose(series.phi_G_v - series.phi_G_r, full_phase, atol=1e-10)
        np.testing.assert_allclose(series.phi_E_v - series.phi_E_r, -full_phase, atol=1e-10)

    @pytest.mark.parametrize("branch", ["ground", "excited"])
    def test_own_phase_covariance(self, branch):
        """Shifting the branch's own initial phase shifts all four outputs by
        exactly that constant; the other initial phase is inert."""
        system = TwoLevelSystem(0.0, 7.0)
        field = DrivingField(6.0, EnvelopeSpec.gaussian(1.0, 4.0, 2.5))
        t = np.linspace(0.0, 8.0, 401)
        shift = 0.37
        base = dressed_phases(system, field, InitialPhases(0.2, -0.1), branch, t)
        if branch == "ground":
            moved = dressed_phases(system, field, InitialPhases(0.2 + shift, -0.1), branch, t)
            inert = dressed_phases(system, field, InitialPhases(0.2, -0.1 + shift), branch, t)
        else:
            moved = dressed_phases(system, field, InitialPhases(0.2, -0.1 + shift), branch, t)
            inert = dressed_phases(system, field, InitialPhases(0.2 + shift, -0.1), branch, t)
        for name in ("phi_G_r", "phi_G_v", "phi_E_r", "phi_E_v"):
            np.testing.assert_allclose(
                getattr(moved, name) - getattr(base, name), shift, atol=1e-12
            )
            np.testing.assert_array_equal(getattr(inert, name), getattr(base, name))

    @pytest.mark.parametrize("branch", ["ground", "excited"])
    def test_optical_phase_additivity(self, branch):
        system = TwoLevelSystem(0.0, 7.0)
        delta = 0.83

        def build(offset):
            return DrivingField(
                6.0,
                EnvelopeSpec.gaussian(1.0, 4.0, 2.5),
                PhaseSpec.linear_chirp(0.01, phi0=0.2 + offset),
            )

        t = np.linspace(0.0, 8.0, 401)
        base = dressed_phases(system, build(0.0), PHASES, branch, t)
        moved = dressed_phases(system, build(delta), PHASES, branch, t)
        plus = ("phi_G_v", "phi_E_r") if branch == "ground" else ()
        minus = ("phi_E_v", "phi_G_r") if branch == "excited" else ()
        for name in ("phi_G_r", "phi_G_v", "phi_E_r", "phi_E_v"):
            diff = getattr(moved, name) - getattr(base, name)
            expect = delta if name in plus else (-delta if name in minus else 0.0)
            np.testing.assert_allclose(diff, expect, atol=1e-12)

    def test_quadrature_convergence(self):
        system = TwoLevelSystem(0.0, 7.0, gamma_re=0.05)
        field = DrivingField(6.0, EnvelopeSpec.gaussian(1.5, 4.0, 2.5))
        coarse = dressed_phases(system, field, PHASES, "ground", np.linspace(0.0, 8.0, 801))
        fine = dressed_phases(system, field, PHASES, "ground", np.linspace(0.0, 8.0, 1601))
        assert np.max(np.abs(fine.phi_G_r[::2] - coarse.phi_G_r)) < 1e-8
        assert np.max(np.abs(fine.phi_E_r[::2] - coarse.phi_E_r)) < 1e-8

    def test_grid_errors(self):
        with pytest.raises(GridError):
            dressed_phases(RESONANT, RES_FIELD, PHASES, "ground", np.array([1.0, 2.0, 3.0]))
        with pytest.raises(GridError, match="non-monotone"):
            dressed_phases(RESONANT, RES_FIELD, PHASES, "ground", np.array([0.0, 2.0, 1.0]))

    def test_field_below_floor(self):
        field = DrivingField(5.0, EnvelopeSpec.gaussian(1.0, 0.0, 0.1))
        with pytest.raises(FieldBelowFloorError):
            dressed_phases(RESONANT, field, PHASES, "ground", np.linspace(0.0, 10.0, 64))


class TestAssembleBareState:
    def test_composition_at_zero(self):
        field = _phase_field(0.25)
        t = np.linspace(0.0, 2.0, 65)
        traj = assemble_bare_state(DETUNED, field, InitialPhases(0.0, 0.0), "ground", t)
        real_amp, virt_amp = dressed_amplitudes(DETUNED, field, 0.0, "ground")
        assert traj.c_g[0] == pytest.approx(real_amp, abs=1e-14)
        assert traj.c_e[0] == pytest.approx(virt_amp * np.exp(-0.25j), abs=1e-14)

    def test_weak_field_reduces_to_bare_evolution(self):
        system = TwoLevelSystem(0.7, 6.0)
        weak = DrivingField(4.0, EnvelopeSpec.constant(1e-6))
        t = np.linspace(0.0, 3.0, 301)
        traj = assemble_bare_state(system, weak, InitialPhases(0.4, 0.0), "ground", t)
        expected = np.exp(-1j * (0.4 + system.omega_g * t))
        assert np.max(np.abs(traj.c_g - expected)) < 1e-6
        assert np.max(np.abs(traj.c_e)) < 1e-6

    def test_adiabatic_pulse_matches_oracle(self):
        """Ground-branch assembly against the brute-force propagator."""
        from dressedphase.dressed import adiabatic_report

        system = TwoLevelSystem(0.0, 12.0)
        tau = 150.0
        field = DrivingField(2.0, EnvelopeSpec.gaussian(1.0, tau, tau))
        t = np.linspace(0.0, 2 * tau, 1201)
        margin = adiabatic_report(system, field, t, 1).margin
        assembled = assemble_bare_state(system, field, InitialPhases(0.0, 0.0), "ground", t)
        oracle = rwa_propagate(
            system, field, assembled[0], t, IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13)
        )
        comparison = compare_trajectories(assembled, oracle)
        assert comparison.max_amplitude_error <= 10.0 * margin

    def test_excited_branch_phase_tracks_oracle_under_chirp(self):
        from dressedphase.dressed import adiabatic_report

        system = TwoLevelSystem(0.0, 12.0)
        tau = 150.0
        field = DrivingField(
            2.0, EnvelopeSpec.gaussian(1.0, tau, tau), PhaseSpec.linear_chirp(5e-4)
        )
        t = np.linspace(0.0, 2 * tau, 1201)
        margin = adiabatic_report(system, field, t, 1).margin
        series = dressed_phases(system, field, InitialPhases(0.0, 0.3), "excited", t)
        assembled = assemble_bare_state(system, field, InitialPhases(0.0, 0.3), "excited", t)
        oracle = rwa_propagate(
            system, field, assembled[0], t, IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13)
        )
        drift = np.unwrap(np.angle(oracle.c_e)) - np.unwrap(-series.phi_E_r.real)
        drift -= drift[0]
        assert np.max(np.abs(drift)) <= margin
