import pytest
import tomlkit

from pmd_interferometry import ConfigUtils, ConfigurationError

TEMPLATE = [
    {"parameter": "mode", "default_value": "type_a", "description": "Interferometer."},
    {"parameter": "spectrum.wavelength_nm", "default_value": 1550.0, "description": "Center wavelength (nm)."},
    {"parameter": "spectrum.tau_minus", "default_value": 1.0, "description": ""},
]

SCHEMA = {
    "mode": ((str,), True),
    "seed": ((int,), False),
    "spectrum": {"tau_minus": ((float,), False), "physical": ((bool,), False)},
}


def test_template_is_written_with_comments(tmp_path):
    path = tmp_path / "config.toml"
    ConfigUtils.generate_template_config_file(TEMPLATE, str(path))
    text = path.read_text()
    assert "# Interferometer." in text
    assert "# Center wavelength (nm)." in text
    loaded = ConfigUtils.load_config_file(str(path)).unwrap()
    assert loaded == {"mode": "type_a", "spectrum": {"wavelength_nm": 1550.0, "tau_minus": 1.0}}


def test_template_only_adds_missing_parameters(tmp_path):
    path = tmp_path / "config.toml"
    path.write_text('# my setup\nmode = "type_b"\n\n[spectrum]\ntau_minus = 2.5\n')
    ConfigUtils.generate_template_config_file(TEMPLATE, str(path))
    text = path.read_text()
    assert text.startswith("# my setup")
    loaded = tomlkit.parse(text).unwrap()
    assert loaded["mode"] == "type_b"
    assert loaded["spectrum"] == {"tau_minus": 2.5, "wavelength_nm": 1550.0}
    before = path.read_text()
    ConfigUtils.generate_template_config_file(TEMPLATE, str(path))
    assert path.read_text() == before


def test_file_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        ConfigUtils.generate_template_config_file(TEMPLATE, str(tmp_path / "config.json"))
    with pytest.raises(ConfigurationError):
        ConfigUtils.load_config_file(str(tmp_path / "config.yaml"))
    with pytest.raises(FileNotFoundError):
        ConfigUtils.load_config_file(str(tmp_path / "missing.toml"))
    broken = tmp_path / "broken.toml"
    broken.write_text("mode = = 1\n")
    with pytest.raises(ConfigurationError):
        ConfigUtils.load_config_file(str(broken))
    with pytest.raises(ConfigurationError):
        ConfigUtils.generate_template_config_file([{"parameter": "mode"}], str(tmp_path / "new.toml"))


def test_validate_accepts_a_good_document():
    ConfigUtils.validate({"mode": "type_a", "seed": 3, "spectrum": {"tau_minus": 2, "physical": False}}, SCHEMA)


@pytest.mark.parametrize("document, path", [
    ({}, "mode"),
    ({"mode": 1}, "mode"),
    ({"mode": "type_a", "colour": "red"}, "colour"),
    ({"mode": "type_a", "spectrum": {"tau_minus": True}}, "spectrum.tau_minus"),
    ({"mode": "type_a", "spectrum": {"physical": 1}}, "spectrum.physical"),
    ({"mode": "type_a", "spectrum": {"width": 1.0}}, "spectrum.width"),
    ({"mode": "type_a", "spectrum": 1.0}, "spectrum"),
    ({"mode": "type_a", "seed": 1.5}, "seed"),
])
def test_validate_names_the_offending_field(document, path):
    with pytest.raises(ConfigurationError) as excinfo:
        ConfigUtils.validate(document, SCHEMA)
    assert excinfo.value.field_path == path
    assert path in str(excinfo.value)
