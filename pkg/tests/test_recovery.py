import math

import numpy as np
import pytest

from conftest import CONFIGS, OMEGA0, post_sample
from pmd_interferometry import (BranchSet, ConfigurationError, ConsistencyError, DelayConfig, ExperimentConfig,
                                ExtractionUtils, PairingError, PostponedDelayInterferometer, ProtocolError,
                                RecoveryReport, RecoveryUtils, ScanGeometry, ScanResult, ScanUtils, SourceSpectrum,
                                TypeAConfig, TypeAInterferometer, TypeBConfig)


def config_scan(name):
    config = ExperimentConfig.from_file(CONFIGS / f"{name}.toml")
    simulator = config.interferometer()
    return simulator.scan(config.scan_axis, config.scan_grid(), engine=config.engine)


def type_a_scans(k0_v, tau_minus=10.0):
    simulator = TypeAInterferometer(TypeAConfig(spectrum=SourceSpectrum(omega0=OMEGA0, tau_minus=tau_minus),
                                                sample_post=post_sample(k0_v=k0_v)))
    tau1_scan = simulator.scan("tau1", np.linspace(-15.0, 10.0, 1001), engine="analytic")
    tau2_scan = simulator.scan("tau2", np.linspace(-30.0, 20.0, 2001), engine="analytic")
    return tau1_scan, tau2_scan


def test_type_a_from_shipped_scans():
    report = RecoveryUtils.recover_type_a(config_scan("type_a_tau1_scan"), config_scan("type_a_tau2_scan"))
    assert report.value("dA_total") == pytest.approx(5.0, abs=0.01)
    assert report.value("dalpha") == pytest.approx(0.05, abs=1e-4)
    assert report.value("dk0") == pytest.approx(0.002, abs=1e-5)
    assert report.value("fringe_phase") == pytest.approx(0.2, abs=1e-3)
    assert report.value("phase_delay") == pytest.approx(0.2 / OMEGA0, abs=1e-3)
    assert report.value("visibility") == pytest.approx(math.cos(0.2), abs=1e-3)
    assert report.branches["dk0_visibility"].contains(0.002, 1e-5)
    assert report.branches["dk0_visibility"].contains(-0.002, 1e-5)
    assert abs(report.residuals["dA_total_dip_vs_envelope"]) < 0.01
    assert abs(report.residuals["dk0_visibility_vs_fringe"]) < 1e-4


def test_type_a_from_a_tau1_scan_alone():
    tau1_scan, _ = type_a_scans(0.002)
    report = RecoveryUtils.recover_type_a(tau1_scan)
    assert report.value("dA_total") == pytest.approx(5.0, abs=0.01)
    assert "dk0" not in report
    assert report.branches["dk0_visibility"].period == pytest.approx(2.0 * math.pi / 100.0)


def test_quarter_wave_leaves_the_visibility_branch_indeterminate():
    tau1_scan, tau2_scan = type_a_scans(math.pi / 200.0)
    report = RecoveryUtils.recover_type_a(tau1_scan, tau2_scan)
    assert report.branches["dk0_visibility"].indeterminate
    assert report.value("dk0") == pytest.approx(math.pi / 200.0, abs=1e-5)
    assert report.value("dA_total") == pytest.approx(5.0, abs=0.01)
    with pytest.raises(ProtocolError):
        RecoveryUtils.recover_type_a(tau1_scan)
    with pytest.raises(ProtocolError):
        RecoveryUtils.recover_type_a(None)


def test_type_a_dip_center_under_noise():
    simulator = TypeAInterferometer(TypeAConfig(spectrum=SourceSpectrum(omega0=OMEGA0, tau_minus=2.0),
                                                sample_post=post_sample()))
    clean = simulator.scan("tau1", np.round(np.arange(-5.5, 0.5 + 0.025, 0.05), 10), engine="analytic")
    errors = []
    for seed in range(100):
        noisy = clean.with_values(ScanUtils.apply_noise(clean.values, 0.01, seed=seed))
        report = RecoveryUtils.recover_type_a(noisy)
        errors.append(abs(report.value("dA_total") - 5.0))
    assert np.percentile(errors, 90) <= 0.1


def test_type_b_three_scan_procedure():
    report = RecoveryUtils.recover_type_b_three_scan(config_scan("type_b_procedure_i"),
                                                     config_scan("type_b_procedure_ii"),
                                                     config_scan("type_b_procedure_iii"))
    assert report.value("alpha_h") == pytest.approx(3.0, abs=1e-4)
    assert report.value("alpha_v") == pytest.approx(3.05, abs=1e-4)
    assert report.value("dalpha") == pytest.approx(0.05, abs=1e-4)
    assert abs(report.residuals["alpha_difference"]) < 1e-4
    assert abs(report.residuals.get("exchange_position", 0.0)) < 0.01


@pytest.mark.parametrize("procedure, keep", [
    (0, lambda delays: delays < 250.0),
    (1, lambda delays: delays > -250.0),
], ids=["h_delay_cut", "v_delay_cut"])
def test_three_scan_procedure_needs_the_delay_dips_in_window(procedure, keep):
    scans = [config_scan(f"type_b_procedure_{name}") for name in ("i", "ii", "iii")]
    cut = scans[procedure]
    mask = keep(cut.delays)
    scans[procedure] = ScanResult(cut.axis, cut.delays[mask], cut.values[mask], cut.get_metadata())
    with pytest.raises(ProtocolError):
        RecoveryUtils.recover_type_b_three_scan(*scans)


def test_three_scan_procedure_needs_tau1_scans():
    scan = config_scan("type_b_procedure_i")
    tau_scan = ScanResult("tau", scan.delays + 60.0, scan.values, scan.get_metadata())
    with pytest.raises(ProtocolError):
        RecoveryUtils.recover_type_b_three_scan(scan, tau_scan, scan)


def test_type_b_two_scan_from_shipped_scans():
    report = RecoveryUtils.recover_type_b_two_scan(config_scan("type_b_postponed_a"),
                                                   config_scan("type_b_postponed_b"))
    assert report.value("alpha_h") == pytest.approx(3.0, abs=1e-4)
    assert report.value("alpha_v") == pytest.approx(3.02, abs=1e-4)
    assert report.value("dalpha") == pytest.approx(0.02, abs=1e-4)
    assert abs(report.residuals["alpha_v_spread"]) < 1e-4


def postponed_scan(spectrum, tau2, alpha_v):
    config = TypeBConfig(spectrum=spectrum, sample_post=post_sample(alpha_v=alpha_v),
                         delays=DelayConfig(tau2=tau2, physical=False))
    return PostponedDelayInterferometer(config).scan("tau", np.linspace(-320.0, -280.0, 2001), engine="analytic")


def test_two_scan_without_pmd(spectrum):
    report = RecoveryUtils.recover_type_b_two_scan(postponed_scan(spectrum, 3.0, 3.0),
                                                   postponed_scan(spectrum, 8.0, 3.0))
    assert report.value("alpha_h") == pytest.approx(3.0, abs=1e-4)
    assert report.value("dalpha") == pytest.approx(0.0, abs=1e-4)


def test_two_scan_refuses_exchange_fringes(spectrum):
    # tau2 = -dalpha l2 puts the exchange fringe over the whole tau scan
    with pytest.raises(PairingError):
        RecoveryUtils.recover_type_b_two_scan(postponed_scan(spectrum, 0.0, 3.0),
                                              postponed_scan(spectrum, 3.0, 3.0))
    with pytest.raises(ConfigurationError):
        RecoveryUtils.recover_type_b_two_scan(postponed_scan(spectrum, 3.0, 3.0),
                                              postponed_scan(spectrum, 3.0, 3.02))


def test_quadratic_fit_on_shipped_scan():
    config = ExperimentConfig.from_file(CONFIGS / "type_a_quadratic.toml")
    simulator = config.interferometer()
    scan = simulator.scan(config.scan_axis, config.scan_grid(), engine=config.engine)
    report = RecoveryUtils.fit_quadratic(scan, simulator, config.initial_dk0, config.initial_dbeta,
                                         config.min_prominence)
    assert report.value("dk0") == pytest.approx(0.006, rel=0.05)
    assert report.value("dbeta") == pytest.approx(2.0264e-4, rel=0.2)
    assert report.value("shift") == pytest.approx(0.0, abs=0.01)
    assert report.value("r0") == pytest.approx(1.0, rel=1e-3)
    assert report.residuals["rms"] < 1e-3


def quadratic_free_scan(spectrum, points):
    simulator = TypeAInterferometer(TypeAConfig(spectrum=spectrum, sample_post=post_sample(alpha_v=3.01, k0_v=0.006)))
    scan = simulator.scan("tau1", np.linspace(-2.5, 1.5, points), engine="numeric")
    return simulator, scan


def test_quadratic_fit_without_second_order_pmd(spectrum):
    simulator, clean = quadratic_free_scan(spectrum, 161)
    noisy = clean.with_values(ScanUtils.apply_noise(clean.values, 0.01, seed=11))
    report = RecoveryUtils.fit_quadratic(noisy, simulator, 0.006, 1e-4)
    dbeta = report["dbeta"]
    assert 0.0 < dbeta.uncertainty < math.inf
    assert abs(dbeta.value) <= 3.0 * dbeta.uncertainty
    assert report.value("dk0") == pytest.approx(0.006, rel=0.1)


def test_quadratic_fit_reports_unbounded_uncertainties(spectrum, monkeypatch):
    simulator, scan = quadratic_free_scan(spectrum, 41)
    monkeypatch.setattr(ExtractionUtils, "least_squares_sigma", staticmethod(lambda result: np.full(4, np.inf)))
    report = RecoveryUtils.fit_quadratic(scan, simulator, 0.006, 0.0)
    assert report["dbeta"].uncertainty == math.inf
    assert any("unconstrained" in note for note in report.notes)
    loaded = RecoveryReport.from_text(report.to_text())
    assert loaded["dk0"].uncertainty == math.inf


def test_quadratic_pmd_broadens_without_moving_the_dip(spectrum):
    widths = []
    for psi in (0.0, 0.6, 1.2):
        beta = psi / (100.0 * (2.0 * math.pi / spectrum.tau_minus) ** 2)
        simulator = TypeAInterferometer(TypeAConfig(spectrum=spectrum, sample_post=post_sample(beta_v=beta)))
        scan = simulator.scan("tau1", np.linspace(-5.0, 0.0, 201), engine="numeric")
        (feature,) = ExtractionUtils.find_dips(scan, 0.05)
        assert feature.center == pytest.approx(simulator.dip_center(), abs=0.01)
        widths.append(feature.half_width)
    assert widths[0] < widths[1] < widths[2]


def test_report_round_trip(tmp_path):
    report = RecoveryReport("type_a")
    report.add_estimate("dA_total", 5.0, 0.01, "fs", "tau1 dip center")
    report.add_branch_set("dk0_visibility", BranchSet([0.002, -0.002], 0.0628, "rad/um", "tau1 dip visibility"))
    report.add_residual("dA_total_dip_vs_envelope", 1e-4)
    report.add_note("Fringe phase is taken within one fringe of zero delay.")
    path = report.save(tmp_path / "report.toml")
    loaded = RecoveryReport.from_text(path.read_text())
    assert loaded.protocol == "type_a"
    assert loaded["dA_total"] == report["dA_total"]
    assert loaded.branches["dk0_visibility"] == report.branches["dk0_visibility"]
    assert loaded.residuals == report.residuals
    assert loaded.notes == report.notes
    assert path.read_text().startswith("# Recovery report (type_a)")
    with pytest.raises(ConfigurationError):
        RecoveryReport.from_text("estimates = {}")


def test_branch_set():
    branches = BranchSet([0.1, -0.1], 1.0, "rad/um", "test")
    assert branches.solutions(-1.0, 1.0) == pytest.approx([-0.9, -0.1, 0.1, 0.9])
    assert branches.contains(2.1, 1e-9)
    assert not branches.contains(0.5, 0.01)
    empty = BranchSet([], 1.0, "rad/um", "test", indeterminate=True)
    assert empty.solutions(-5.0, 5.0) == []
    assert not empty.contains(0.0, 1.0)


def test_scan_geometry_checks():
    with pytest.raises(ConsistencyError):
        ScanGeometry(tau_minus=1.0, omega0=OMEGA0).check_same(ScanGeometry(tau_minus=2.0, omega0=OMEGA0))
    with pytest.raises(ProtocolError):
        ScanGeometry.from_scan(ScanResult("tau1", [0.0, 1.0], [1.0, 1.0]))
    tau1_scan, _ = type_a_scans(0.002)
    _, other_tau2 = type_a_scans(0.002, tau_minus=5.0)
    with pytest.raises(ConsistencyError):
        RecoveryUtils.recover_type_a(tau1_scan, other_tau2)
