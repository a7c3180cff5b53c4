import numpy as np
import pytest

from magkerr.errors import SolverError
from magkerr.model import BareConfig, mhz, nhz
from magkerr.steady_state import (
    MeanFieldState,
    branch_scan,
    continuation_solve,
    eliminate_cavity,
    mean_field_residual,
    solve_mean_field,
)
from magkerr.sweep import run_point


def linear_config() -> BareConfig:
    return BareConfig(
        Delta_a=mhz(100.0),
        Delta_b=mhz(-110.0),
        Delta_c=mhz(-185.5),
        gamma_a=mhz(18.6),
        gamma_b=mhz(6.7),
        gamma_c=mhz(6.7),
        g_ab=mhz(30.0),
        Omega_b=mhz(4.0e9),
        Omega_c=mhz(1.5e9),
    )


def bistable_config() -> BareConfig:
    # Red-detuned self-Kerr mode driven hard enough for three
    # coexisting responses.
    return BareConfig(
        Delta_a=mhz(100.0),
        Delta_b=mhz(100.0),
        Delta_c=mhz(-133.251),
        gamma_a=mhz(5.0),
        gamma_b=mhz(5.0),
        gamma_c=mhz(3.23326),
        K_c=nhz(0.218173),
        Omega_c=mhz(2.53342e10),
    )


# Cubic response roots |c|^2 of bistable_config, frozen from a dense
# bracketing scan of the scalar response equation.
BISTABLE_ROOTS = (5.278948e16, 1.607649e17, 3.972040e17)


class TestResidualConventions:
    def test_eliminate_cavity_closed_form(self):
        cfg = linear_config()
        b = 3.0e7 - 4.0e7j
        expect = -1j * cfg.g_ab * b / (1j * cfg.Delta_a + cfg.gamma_a)
        assert eliminate_cavity(b, cfg) == pytest.approx(expect, rel=1e-15)

    def test_residual_term_by_term(self):
        # Re-evaluate the c-mode equation inline to pin the sign and
        # factor conventions independently of the module's helper.
        cfg = bistable_config()
        b, c = 1.0e8 + 2.0e8j, -3.0e8 + 0.5e8j
        res = mean_field_residual((b, c), cfg)
        f_c = (
            -(1j * cfg.Delta_c + cfg.gamma_c) * c
            - 2j * cfg.K_c * abs(c) ** 2 * c
            - 1j * cfg.G * abs(b) ** 2 * c
            - 1j * cfg.Omega_c
        )
        assert res[2] == pytest.approx(f_c.real, rel=1e-12)
        assert res[3] == pytest.approx(f_c.imag, rel=1e-12)

    def test_accepts_state_objects(self):
        cfg = linear_config()
        state = MeanFieldState(
            a_amp=0.0, b_amp=1.0e7, c_amp=2.0e7, stable=True, residual_norm=0.0
        )
        np.testing.assert_array_equal(
            mean_field_residual(state, cfg),
            mean_field_residual((1.0e7, 2.0e7), cfg),
        )


class TestSolveMeanField:
    def test_undriven_state_is_exactly_zero(self):
        cfg = BareConfig(
            Delta_a=mhz(100.0),
            Delta_b=mhz(-70.0),
            Delta_c=mhz(-100.0),
            gamma_a=mhz(5.0),
            gamma_b=mhz(5.0),
            gamma_c=mhz(5.0),
            K_b=nhz(0.1),
            g_ab=mhz(30.0),
        )
        state = continuation_solve(cfg)
        assert state.b_amp == 0.0
        assert state.c_amp == 0.0
        assert state.a_amp == 0.0

    def test_linear_solution_matches_susceptibility_chain(self):
        cfg = linear_config()
        state = solve_mean_field(cfg)
        chi_a = 1j * cfg.Delta_a + cfg.gamma_a
        chi_b = 1j * cfg.Delta_b + cfg.gamma_b + cfg.g_ab**2 / chi_a
        chi_c = 1j * cfg.Delta_c + cfg.gamma_c
        assert state.b_amp == pytest.approx(-1j * cfg.Omega_b / chi_b, rel=1e-12)
        assert state.c_amp == pytest.approx(-1j * cfg.Omega_c / chi_c, rel=1e-12)
        assert state.a_amp == pytest.approx(
            eliminate_cavity(state.b_amp, cfg), rel=1e-12
        )
        assert state.stable

    def test_residual_vanishes_at_solution(self):
        cfg = bistable_config()
        state = continuation_solve(cfg)
        res = np.linalg.norm(mean_field_residual(state, cfg))
        assert res <= 1e-8 * abs(cfg.Omega_c)

    def test_iteration_budget_exposes_best_iterate(self):
        cfg = bistable_config()
        with pytest.raises(SolverError) as exc:
            solve_mean_field(cfg, seed_amp=(1.0e8, 1.0e8), max_iter=1)
        best = exc.value.best
        assert best is not None
        assert best.residual_norm > 0.0


class TestBranchStructure:
    def test_scan_finds_all_three_roots(self):
        states = branch_scan(bistable_config(), rng=np.random.default_rng(0))
        assert len(states) == 3
        occupations = sorted(abs(s.c_amp) ** 2 for s in states)
        for got, want in zip(occupations, BISTABLE_ROOTS):
            assert got == pytest.approx(want, rel=1e-6)

    def test_middle_branch_is_the_unstable_one(self):
        states = branch_scan(bistable_config(), rng=np.random.default_rng(0))
        by_occ = sorted(states, key=lambda s: abs(s.c_amp) ** 2)
        assert [s.stable for s in by_occ] == [True, False, True]

    def test_continuation_takes_the_power_up_branch(self):
        state = continuation_solve(bistable_config())
        assert abs(state.c_amp) ** 2 == pytest.approx(
            BISTABLE_ROOTS[0], rel=1e-6
        )

    def test_continuation_is_insensitive_to_tiny_drive_changes(self):
        from dataclasses import replace

        cfg = bistable_config()
        lo = continuation_solve(replace(cfg, Omega_c=cfg.Omega_c * (1.0 - 1e-6)))
        hi = continuation_solve(replace(cfg, Omega_c=cfg.Omega_c * (1.0 + 1e-6)))
        assert abs(hi.c_amp - lo.c_amp) <= 1e-4 * abs(lo.c_amp)

    def test_continuation_survives_a_branch_fold(self):
        # The low branch of this configuration terminates at a
        # saddle-node around 20% drive; the ramp must land on the
        # surviving branch instead of failing.  The target is the
        # single real root of the response cubic at full drive.
        cfg = BareConfig(
            Delta_a=mhz(100.0),
            Delta_b=mhz(-100.0),
            Delta_c=mhz(-97.303314),
            gamma_a=mhz(5.0),
            gamma_b=mhz(5.0),
            gamma_c=mhz(17.537221),
            K_c=nhz(0.587315),
            Omega_c=3.48472401e17,
        )
        state = continuation_solve(cfg)
        assert abs(state.c_amp) ** 2 == pytest.approx(1.900963e17, rel=1e-5)
        assert state.stable


class TestKerrPhase:
    def test_imaginary_fraction_scales_with_damping(self):
        # Far off resonance the response phase is set by gamma/Delta_eff,
        # so shrinking all dampings by 1000x shrinks Im(c)/|c| by the
        # same factor.
        def config(scale: float) -> BareConfig:
            return BareConfig(
                Delta_a=mhz(100.0),
                Delta_b=mhz(-100.0),
                Delta_c=mhz(100.0),
                gamma_a=mhz(5.0 * scale),
                gamma_b=mhz(5.0 * scale),
                gamma_c=mhz(5.0 * scale),
                K_c=nhz(0.3),
                Omega_c=1.0e17,
            )

        frac = []
        for scale in (1.0, 1.0e-3):
            c = continuation_solve(config(scale)).c_amp
            frac.append(abs(c.imag) / abs(c))
        ratio = frac[0] / frac[1]
        assert 800.0 < ratio < 1250.0


class TestRunPointMicroscopic:
    def test_default_branch_reports_occupations(self):
        report, note = run_point(linear_config())
        assert report.stable
        assert "|b|^2=" in note and "|c|^2=" in note

    def test_branch_selection(self):
        cfg = bistable_config()
        rng = np.random.default_rng(1)
        report_hi, note_hi = run_point(cfg, rng=rng, branch=2)
        assert f"|c|^2={BISTABLE_ROOTS[2]:.6e}"[:14] in note_hi
        assert report_hi.stable

    def test_missing_branch_raises(self):
        with pytest.raises(SolverError, match="branch 5 not found"):
            run_point(linear_config(), rng=np.random.default_rng(1), branch=5)

    def test_rejects_non_config_input(self):
        with pytest.raises(TypeError, match="expected a config"):
            run_point({"Delta_a": 1.0})
