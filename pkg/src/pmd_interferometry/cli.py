# Standard imports
import sys
import argparse
from pathlib import Path
from typing import List, Optional
# Local imports
from .config_utils import ConfigUtils
from .errors import (InputDomainError, ConfigurationError, ClosedFormInapplicableError, QuadratureConvergenceError,
                     FitDivergenceError, ProtocolError)
from .experiment_config import ExperimentConfig, TEMPLATE
from .extraction_utils import ExtractionUtils
from .interferometer import ENGINES
from .logger_utils import LoggerUtils
from .recovery_report import RecoveryReport
from .recovery_utils import RecoveryUtils, ScanGeometry
from .scan_result import ScanResult
from .scan_utils import ScanUtils
from .type_b_interferometer import TypeBInterferometer

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_PROTOCOL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmd-interferometry",
                                     description="Simulate and invert classical and two-photon PMD interferometer scans.")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--log-file", default=None, help="Also write the log to this file.")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="Run the scan described by a config and write it as a TSV file.")
    scan.add_argument("config")
    scan.add_argument("--out", default=None, help="Scan file; defaults to [output] path of the config.")
    scan.add_argument("--engine", choices=ENGINES, default=None, help="Overrides the config engine.")
    scan.add_argument("--threads", type=int, default=None)
    scan.add_argument("--seed", type=int, default=None, help="Noise seed; overrides the config seed.")

    predict = sub.add_parser("predict", help="Tabulate the five predicted Type B features.")
    predict.add_argument("config")
    predict.add_argument("--out", default=None)
    predict.add_argument("--axis", default=None, help="Defaults to the config scan axis, else tau1.")

    recover = sub.add_parser("recover", help="Recover PMD parameters from saved scans.")
    recover.add_argument("config")
    recover.add_argument("scans", nargs="+")
    recover.add_argument("--out", default=None, help="Report file; defaults to standard output.")

    template = sub.add_parser("template", help="Write a commented configuration template.")
    template.add_argument("path")
    return parser


def cmd_scan(args: argparse.Namespace) -> int:
    logger = LoggerUtils.get_logger()
    config = ExperimentConfig.from_file(args.config, logger)
    simulator = config.interferometer(logger)
    engine = args.engine or config.engine
    threads = args.threads or config.threads
    result = simulator.scan(config.scan_axis, config.scan_grid(), engine=engine, threads=threads)
    if config.noise > 0:
        seed = args.seed if args.seed is not None else config.seed
        result = result.with_values(ScanUtils.apply_noise(result.values, config.noise, seed),
                                    noise={"relative_sigma": config.noise, "seed": seed})
    out = config.resolve_output(args.out)
    if out is None:
        out = Path(args.config).with_suffix(".tsv")
    result.save(out)

    summary = result.summary()
    features = ExtractionUtils.find_dips(result, config.min_prominence, logger=logger) if len(result) > 2 else []
    print(f"points\t{summary['points']}")
    print(f"extrema\t{len(features)}")
    print(f"min\t{summary['min']:.10g}\tat\t{summary['argmin']:.10g}")
    print(f"max\t{summary['max']:.10g}\tat\t{summary['argmax']:.10g}")
    print(f"file\t{out}")
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    logger = LoggerUtils.get_logger()
    config = ExperimentConfig.from_file(args.config, logger)
    simulator = config.interferometer(logger)
    if not isinstance(simulator, TypeBInterferometer):
        logger.error(f"[CLI] predict needs a type_b or type_b_postponed config, got mode {config.mode}")
        return EXIT_CONFIG
    axis = args.axis or config.scan_axis or "tau1"
    window = (config.scan_start, config.scan_stop) if config.scan_axis == axis else None
    predictions = simulator.predict_dips(axis, window)
    from_table = simulator.predict_dips_from_table(axis)

    lines = [f"# Type B feature predictions along {axis} (fs)",
             "term\tkind\tcenter\tamplitude\thalf_width\tcase\toverlapping\twindow"]
    for p in predictions:
        center = "none" if p.center is None else f"{p.center:.10g}"
        half_width = "none" if p.half_width is None else f"{p.half_width:.6g}"
        check = from_table[p.term]
        if (check is None) != (p.center is None) or (check is not None and abs(check - p.center) > 1e-9 * max(1.0, abs(check))):
            logger.warning(f"[CLI] Delay-table center of {p.term} disagrees: {check} vs {p.center}")
        lines.append(f"{p.term}\t{p.kind}\t{center}\t{p.amplitude:.6g}\t{half_width}\t{p.table_case}\t"
                     f"{str(p.overlapping).lower()}\t{'in-window' if p.in_window else 'out-of-window'}")
    text = "\n".join(lines) + "\n"
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"[CLI] Predictions written to {path}")
    print(text, end="")
    return EXIT_OK


def cmd_recover(args: argparse.Namespace) -> int:
    logger = LoggerUtils.get_logger()
    config = ExperimentConfig.from_file(args.config, logger)
    if config.recovery_protocol is None:
        raise ConfigurationError("Missing required table.", "recovery")
    scans = [ScanResult.load(path, logger) for path in args.scans]
    geometry = ScanGeometry(tau_minus=config.spectrum.tau_minus, omega0=config.spectrum.omega0,
                            l1=config.sample_pre.length, l2=config.sample_post.length, r0=config.r0)
    protocol = config.recovery_protocol
    prominence = config.min_prominence

    if protocol == "type_a":
        by_axis = {scan.axis: scan for scan in scans}
        if len(by_axis) != len(scans) or not set(by_axis) <= {"tau1", "tau2"}:
            raise ProtocolError("type_a recovery takes at most one tau1 scan and one tau2 scan.")
        report = RecoveryUtils.recover_type_a(by_axis.get("tau1"), by_axis.get("tau2"), geometry, prominence, logger)
    elif protocol == "type_b_three_scan":
        if len(scans) != 3:
            raise ProtocolError(f"type_b_three_scan takes scans (i), (ii), (iii); got {len(scans)}.")
        report = RecoveryUtils.recover_type_b_three_scan(*scans, geometry=geometry, min_prominence=prominence,
                                                          logger=logger)
    elif protocol == "type_b_two_scan":
        if len(scans) != 2:
            raise ProtocolError(f"type_b_two_scan takes two tau scans; got {len(scans)}.")
        report = RecoveryUtils.recover_type_b_two_scan(*scans, geometry=geometry, min_prominence=prominence,
                                                        logger=logger)
    else:
        if len(scans) != 1:
            raise ProtocolError(f"quadratic takes one scan; got {len(scans)}.")
        geometry.check_same(ScanGeometry.from_scan(scans[0]))
        simulator = config.interferometer(logger)
        if config.mode == "classical":
            raise ProtocolError("quadratic recovery needs a type_a or type_b config.")
        report = RecoveryUtils.fit_quadratic(scans[0], simulator, config.initial_dk0, config.initial_dbeta,
                                             prominence, logger)
    return _emit_report(report, args.out)


def _emit_report(report: RecoveryReport, out: Optional[str]) -> int:
    if out:
        report.save(out)
    else:
        print(report.to_text(), end="")
    return EXIT_OK


def cmd_template(args: argparse.Namespace) -> int:
    ConfigUtils.generate_template_config_file(TEMPLATE, args.path, LoggerUtils.get_logger())
    return EXIT_OK


COMMANDS = {"scan": cmd_scan, "predict": cmd_predict, "recover": cmd_recover, "template": cmd_template}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command-line entry point.

    Returns:
        0 on success, 2 for configuration errors, 3 for numerical failures
        and 4 for protocol errors.
    """
    args = build_parser().parse_args(argv)
    logger = LoggerUtils.configure(args.log_level, args.log_file)
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, InputDomainError, ClosedFormInapplicableError, FileNotFoundError) as e:
        logger.error(f"[CLI] {e}")
        return EXIT_CONFIG
    except (QuadratureConvergenceError, FitDivergenceError) as e:
        logger.error(f"[CLI] {e}")
        return EXIT_NUMERIC
    except ProtocolError as e:
        logger.error(f"[CLI] {e}")
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
