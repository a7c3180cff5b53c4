import pytest

from magkerr.configfile import (
    assemble,
    load_config,
    load_config_text,
    parse_config_text,
)
from magkerr.errors import ConfigError
from magkerr.model import mhz, to_mhz

EFFECTIVE_BASE = """
# reference effective-model working point
mode = effective
Delta_a_MHz        = 100
Delta_b_tilde_MHz  = -70
Delta_c_tilde_MHz  = -100   # dressed HMS detuning
K_b_tilde_MHz      = 15
K_c_tilde_MHz      = 24
G_tilde_MHz        = 19.4
g_ab_MHz           = 30
gamma_a_MHz        = 18.6
gamma_b_MHz        = 6.7
gamma_c_MHz        = 6.7
"""


class TestParse:
    def test_comments_and_blanks_are_ignored(self):
        raw = parse_config_text(EFFECTIVE_BASE)
        assert raw["Delta_c_tilde_MHz"] == "-100"
        assert "mode" in raw
        assert len(raw) == 11

    def test_missing_equals_sign(self):
        with pytest.raises(ConfigError, match="line 2: expected 'key = value'"):
            parse_config_text("# ok\nDelta_a_MHz 100\n")

    def test_empty_value(self):
        with pytest.raises(ConfigError, match="expected 'key = value'"):
            parse_config_text("Delta_a_MHz =\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="line 3: duplicate key"):
            parse_config_text("a = 1\nb = 2\na = 3\n")


class TestAssemble:
    def test_effective_baseline(self):
        loaded = load_config_text(EFFECTIVE_BASE)
        assert loaded.mode == "effective"
        assert loaded.bare is None
        assert loaded.grid is None
        cfg = loaded.effective
        assert cfg.Delta_b_tilde == pytest.approx(mhz(-70.0), rel=1e-15)
        assert cfg.G_tilde == pytest.approx(mhz(19.4), rel=1e-15)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config keys: 'frobnicate'"):
            load_config_text(EFFECTIVE_BASE + "frobnicate = 1\n")

    def test_other_mode_key_gets_a_hint(self):
        with pytest.raises(ConfigError, match="only valid in the other mode"):
            load_config_text(EFFECTIVE_BASE + "K_b_nHz = 0.1\n")

    def test_missing_required_keys(self):
        with pytest.raises(ConfigError, match="missing required keys: .*gamma_c"):
            load_config_text("mode = effective\nDelta_a_MHz = 0\n")

    def test_bad_number(self):
        with pytest.raises(ConfigError, match="expected a number"):
            load_config_text(EFFECTIVE_BASE.replace("= 30", "= thirty"))

    def test_invalid_mode(self):
        with pytest.raises(ConfigError, match="mode must be"):
            load_config_text("mode = hybrid\n")

    def test_mode_override_wins(self):
        text = EFFECTIVE_BASE.replace("mode = effective", "mode = microscopic")
        loaded = load_config_text(text, mode_override="effective")
        assert loaded.mode == "effective"

    def test_warm_bath_requires_frequencies(self):
        with pytest.raises(ConfigError, match="T_e_K > 0 requires omega_a_MHz"):
            load_config_text(EFFECTIVE_BASE + "T_e_K = 0.1\n")

    def test_warm_bath_with_frequencies(self):
        text = EFFECTIVE_BASE + (
            "T_e_K = 0.2\n"
            "omega_a_MHz = 10070\nomega_b_MHz = 9860\nomega_c_MHz = 9784.5\n"
        )
        loaded = load_config_text(text)
        assert loaded.effective.n_a == pytest.approx(0.0979848566527773, rel=1e-10)
        assert loaded.omegas is not None

    def test_microscopic_baseline(self):
        loaded = load_config_text(
            """
mode = microscopic
Delta_a_MHz = 100
Delta_b_MHz = -110
Delta_c_MHz = -185.5
gamma_a_MHz = 18.6
gamma_b_MHz = 6.7
gamma_c_MHz = 6.7
g_ab_MHz    = 30
K_b_nHz     = 0.1
K_c_nHz     = 0.6
G_nHz       = 0.5
Omega_b_MHz = 4.0e9
"""
        )
        assert loaded.effective is None
        assert loaded.bare.K_c == pytest.approx(2.0e-9 * 3.141592653589793 * 0.6)
        assert to_mhz(loaded.bare.Omega_b) == pytest.approx(4.0e9)


SWEEP_TAIL = """
sweep.axis1.name    = Delta_a_MHz
sweep.axis1.points  = 5
sweep.axis1.min_MHz = 0
sweep.axis1.max_MHz = 200
"""


class TestSweepGrammar:
    def test_single_axis(self):
        loaded = load_config_text(EFFECTIVE_BASE + SWEEP_TAIL)
        grid = loaded.grid
        assert grid is not None
        assert grid.axis1.name == "Delta_a_MHz"
        assert grid.axis1.points == 5
        assert grid.shape() == (5, 1)

    def test_two_axes(self):
        text = (
            EFFECTIVE_BASE
            + SWEEP_TAIL
            + """
sweep.axis2.name   = kerr_scale
sweep.axis2.points = 3
sweep.axis2.min    = 0
sweep.axis2.max    = 1
"""
        )
        grid = load_config_text(text).grid
        assert grid.axis2.name == "kerr_scale"
        assert grid.shape() == (5, 3)

    def test_temperature_axis_uses_kelvin_suffix(self):
        text = (
            EFFECTIVE_BASE
            + "omega_a_MHz = 10070\nomega_b_MHz = 9860\nomega_c_MHz = 9784.5\n"
            + """
sweep.axis1.name  = T_e_K
sweep.axis1.points = 4
sweep.axis1.min_K = 0
sweep.axis1.max_K = 0.3
"""
        )
        grid = load_config_text(text).grid
        assert grid.axis1.name == "T_e_K"
        assert grid.axis1.stop == pytest.approx(0.3)

    def test_axis_seeds_the_swept_parameter(self):
        # Delta_a_MHz appears only as the axis; the baseline picks up
        # the axis start value.
        text = EFFECTIVE_BASE.replace("Delta_a_MHz        = 100\n", "") + SWEEP_TAIL
        loaded = load_config_text(text)
        assert loaded.effective.Delta_a == pytest.approx(mhz(0.0))

    def test_axis_without_name(self):
        with pytest.raises(ConfigError, match="needs sweep.axis1.name"):
            load_config_text(
                EFFECTIVE_BASE + "sweep.axis1.points = 5\n"
                "sweep.axis1.min_MHz = 0\nsweep.axis1.max_MHz = 1\n"
            )

    def test_axis_without_points(self):
        with pytest.raises(ConfigError, match="needs sweep.axis1.points"):
            load_config_text(
                EFFECTIVE_BASE + "sweep.axis1.name = Delta_a_MHz\n"
                "sweep.axis1.min_MHz = 0\nsweep.axis1.max_MHz = 1\n"
            )

    def test_non_integer_points(self):
        with pytest.raises(ConfigError, match="expected an integer"):
            load_config_text(
                EFFECTIVE_BASE + SWEEP_TAIL.replace("= 5", "= 5.5")
            )

    def test_unknown_axis_name(self):
        with pytest.raises(ConfigError, match="unknown sweep axis 'bogus_MHz'"):
            load_config_text(
                EFFECTIVE_BASE + SWEEP_TAIL.replace("Delta_a_MHz", "bogus_MHz")
            )

    def test_wrong_range_suffix(self):
        # A MHz-named axis requires MHz-suffixed range keys.
        with pytest.raises(ConfigError, match="min_MHz and .*max_MHz"):
            load_config_text(
                EFFECTIVE_BASE
                + "sweep.axis1.name = Delta_a_MHz\nsweep.axis1.points = 5\n"
                + "sweep.axis1.min = 0\nsweep.axis1.max = 1\n"
            )

    def test_unknown_sweep_keys(self):
        with pytest.raises(ConfigError, match="unknown sweep keys"):
            load_config_text(EFFECTIVE_BASE + SWEEP_TAIL + "sweep.axis1.step = 1\n")
        with pytest.raises(ConfigError, match="unknown sweep keys"):
            load_config_text(EFFECTIVE_BASE + SWEEP_TAIL + "sweep.jobs = 4\n")

    def test_axis2_without_axis1(self):
        with pytest.raises(ConfigError, match="axis2 given without axis1"):
            assemble(
                {
                    "Delta_a_MHz": 0.0,
                    "Delta_b_tilde_MHz": -70.0,
                    "Delta_c_tilde_MHz": -100.0,
                    "g_ab_MHz": 30.0,
                    "gamma_a_MHz": 18.6,
                    "gamma_b_MHz": 6.7,
                    "gamma_c_MHz": 6.7,
                },
                axis2=load_config_text(EFFECTIVE_BASE + SWEEP_TAIL).grid.axis1,
            )


class TestFileRoundtrip:
    def test_load_config_reads_files(self, tmp_path):
        path = tmp_path / "point.cfg"
        path.write_text(EFFECTIVE_BASE, encoding="utf-8")
        loaded = load_config(str(path))
        assert loaded.effective.g_ab == pytest.approx(mhz(30.0))

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="cannot read config file"):
            load_config("/nonexistent/path.cfg")

    def test_preset_dump_roundtrip(self):
        from magkerr.cli import dump_grid
        from magkerr.sweep import preset

        for name in ("fig2", "fig3", "fig4"):
            grid = preset(name)
            loaded = load_config_text(dump_grid(grid))
            assert loaded.grid is not None
            assert loaded.grid.axis1 == grid.axis1
            assert loaded.grid.axis2 == grid.axis2
            base, out = grid.base_effective, loaded.grid.base_effective
            for field in (
                "Delta_a",
                "Delta_b_tilde",
                "Delta_c_tilde",
                "K_b_tilde",
                "K_c_tilde",
                "G_tilde",
                "g_ab",
                "gamma_a",
                "gamma_b",
                "gamma_c",
            ):
                assert getattr(out, field) == pytest.approx(
                    getattr(base, field), rel=1e-9
                ), (name, field)
