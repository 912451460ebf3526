import copy
from pathlib import Path

import pytest

from conftest import CONFIGS
from pmd_interferometry import (ClassicalInterferometer, ConfigUtils, ConfigurationError, DispersionUtils,
                                ExperimentConfig, PostponedDelayInterferometer, TypeAInterferometer,
                                TypeBInterferometer)
from pmd_interferometry.experiment_config import TEMPLATE

BASE = {
    "mode": "type_b",
    "spectrum": {"wavelength_nm": 1550.0, "tau_minus": 1.0},
    "sample_post": {"length": 100.0, "h": {"alpha": 3.0}, "v": {"alpha": 3.05}},
    "delays": {"tau1": 0.0, "tau2": 1000.0, "tau": 0.0},
    "scan": {"axis": "tau1", "start": -50.0, "stop": 350.0, "points": 101},
}


def document(**changes):
    doc = copy.deepcopy(BASE)
    for dotted, value in changes.items():
        *tables, leaf = dotted.split("__")
        table = doc
        for name in tables:
            table = table.setdefault(name, {})
        if value is None:
            table.pop(leaf, None)
        else:
            table[leaf] = value
    return doc


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_configs_load_and_build(path):
    config = ExperimentConfig.from_file(path)
    simulator = config.interferometer()
    assert simulator.MODE == config.mode
    assert config.scan_axis in simulator.AXES
    assert len(config.scan_grid()) == config.scan_points
    assert config.recovery_protocol is not None or config.mode == "classical"


def test_modes_build_their_simulators():
    kinds = {"classical": ClassicalInterferometer, "type_a": TypeAInterferometer, "type_b": TypeBInterferometer,
             "type_b_postponed": PostponedDelayInterferometer}
    axes = {"classical": "delta", "type_a": "tau1", "type_b": "tau1", "type_b_postponed": "tau"}
    for mode, kind in kinds.items():
        config = ExperimentConfig.from_document(document(mode=mode, scan__axis=axes[mode]))
        assert type(config.interferometer()) is kind


def test_template_gives_a_valid_config(tmp_path):
    path = tmp_path / "template.toml"
    ConfigUtils.generate_template_config_file(TEMPLATE, str(path))
    config = ExperimentConfig.from_file(path)
    assert config.mode == "type_a"
    assert config.spectrum.tau_minus == pytest.approx(DispersionUtils.tau_minus_from_bandwidth(1550.0, 200.0))
    assert isinstance(config.interferometer(), TypeAInterferometer)
    assert config.resolve_output() == tmp_path / "scan.tsv"


def test_values_are_carried_over():
    config = ExperimentConfig.from_document(document(seed=5, noise=0.01, threads=2, r0=3.0,
                                                     quadrature={"half_width_lobes": 4, "max_evaluations": 1000}))
    assert config.seed == 5
    assert config.noise == 0.01
    assert config.threads == 2
    assert config.r0 == 3.0
    assert config.quadrature.half_width_lobes == 4.0
    assert config.quadrature.max_evaluations == 1000
    assert config.delays.tau2 == 1000.0
    assert config.sample_post.v.alpha == 3.05
    assert config.spectrum.omega0 == pytest.approx(DispersionUtils.omega0_from_wavelength(1550.0))


@pytest.mark.parametrize("changes, field_path", [
    ({"mode": "type_c"}, "mode"),
    ({"mode": None}, "mode"),
    ({"engine": "fast"}, "engine"),
    ({"colour": "blue"}, "colour"),
    ({"spectrum__omega0": 1.2}, "spectrum"),
    ({"spectrum__tau_minus": None}, "spectrum"),
    ({"spectrum__tau_minus": -1.0}, "spectrum"),
    ({"delays__tau": None}, "delays.tau"),
    ({"delays__tau": -1.0}, "delays"),
    ({"sample_post__length": -5.0}, "sample_post"),
    ({"sample_post__v__alpha": "fast"}, "sample_post.v.alpha"),
    ({"scan__axis": "delta"}, "scan.axis"),
    ({"scan__points": 1}, "scan.points"),
    ({"scan__start": 400.0}, "scan.start"),
    ({"scan__points": None}, "scan.points"),
    ({"r0": 0.0}, "r0"),
    ({"noise": -0.1}, "noise"),
    ({"threads": 0}, "threads"),
    ({"output": {"format": "csv"}}, "output.format"),
    ({"recovery": {"protocol": "guess"}}, "recovery.protocol"),
])
def test_invalid_documents_name_the_field(changes, field_path):
    with pytest.raises(ConfigurationError) as excinfo:
        ExperimentConfig.from_document(document(**changes))
    assert excinfo.value.field_path == field_path


def test_postponed_mode_rejects_a_front_sample():
    config = ExperimentConfig.from_document(document(mode="type_b_postponed", scan__axis="tau",
                                                     sample_pre={"length": 10.0}))
    with pytest.raises(ConfigurationError) as excinfo:
        config.interferometer()
    assert excinfo.value.field_path == "sample_pre.length"


def test_missing_scan_table():
    config = ExperimentConfig.from_document(document(scan=None))
    assert config.scan_axis is None
    with pytest.raises(ConfigurationError):
        config.scan_grid()


def test_resolve_output(tmp_path):
    config = ExperimentConfig.from_document(document(output={"path": "out/scan.tsv"}), base_dir=tmp_path)
    assert config.resolve_output() == tmp_path / "out" / "scan.tsv"
    assert config.resolve_output("elsewhere.tsv") == Path("elsewhere.tsv")
    assert ExperimentConfig.from_document(document()).resolve_output() is None
