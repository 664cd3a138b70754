"""Config file parsing and TrialConfig construction tests."""

import pytest

from sphdoa.config import load_config, make_trial_config, parse_config_text


SAMPLE = """
# scene
t60 = 0.4        # seconds
snr_db = inf
room_dims = 5, 6, 4

n_sources = 3
scheme = EC-2
rigid = false
array_center = none
"""


class TestParsing:
    def test_basic(self):
        out = parse_config_text(SAMPLE)
        assert out == {
            "t60": "0.4",
            "snr_db": "inf",
            "room_dims": "5, 6, 4",
            "n_sources": "3",
            "scheme": "EC-2",
            "rigid": "false",
            "array_center": "none",
        }

    def test_malformed_line_reports_number(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_config_text("a = 1\nnot a pair\n")

    def test_missing_key_rejected(self):
        with pytest.raises(ValueError, match="missing key"):
            parse_config_text("= 3")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            parse_config_text("a = 1\na = 2")

    def test_comment_only_file(self):
        assert parse_config_text("# nothing\n\n  # here\n") == {}

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(OSError, match="nope.cfg"):
            load_config(tmp_path / "nope.cfg")

    def test_load_round_trip(self, tmp_path):
        path = tmp_path / "a.cfg"
        path.write_text("seed = 12\n")
        assert load_config(path) == {"seed": "12"}


class TestMakeTrialConfig:
    def test_typed_values(self):
        cfg = make_trial_config(parse_config_text(SAMPLE))
        assert cfg.t60 == 0.4
        assert cfg.snr_db == float("inf")
        assert cfg.room_dims == (5.0, 6.0, 4.0)
        assert cfg.n_sources == 3
        assert cfg.scheme == "ec2"
        assert cfg.rigid is False
        assert cfg.array_center is None

    def test_defaults_fill_gaps(self):
        cfg = make_trial_config({"seed": "4"})
        assert cfg.seed == 4
        assert cfg.fft_size == 1024
        assert cfg.band == (200.0, 4000.0)

    def test_overrides_beat_file(self):
        cfg = make_trial_config({"t60": "0.4", "seed": "1"}, t60=0.2)
        assert cfg.t60 == 0.2
        assert cfg.seed == 1

    def test_none_override_keeps_file_value(self):
        cfg = make_trial_config({"t60": "0.4"}, t60=None)
        assert cfg.t60 == 0.4

    def test_unknown_keys_listed(self):
        with pytest.raises(ValueError, match="frequency_weighting"):
            make_trial_config({"frequency_weighting": "a"})
        with pytest.raises(ValueError, match="wallpaper"):
            make_trial_config({}, wallpaper=3)

    def test_tuple_arity_checked(self):
        with pytest.raises(ValueError, match="room_dims"):
            make_trial_config({"room_dims": "5, 6"})
        with pytest.raises(ValueError, match="band"):
            make_trial_config({"band": "200"})

    def test_bool_spellings(self):
        for raw, want in (("true", True), ("ON", True), ("0", False), ("No", False)):
            assert make_trial_config({"rigid": raw}).rigid is want
        with pytest.raises(ValueError, match="rigid"):
            make_trial_config({"rigid": "probably"})

    def test_rotation_optional(self):
        assert make_trial_config({"rotation_deg": "none"}).rotation_deg is None
        assert make_trial_config({"rotation_deg": "15"}).rotation_deg == 15.0

    def test_validation_still_applies(self):
        with pytest.raises(ValueError, match="spacing"):
            make_trial_config({"spacing_deg": "500"})
