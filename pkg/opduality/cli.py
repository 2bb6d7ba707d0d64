# -*- coding: utf-8 -*-
"""
opduality Command Line Interface

Runs one verification job: reads the input file, checks every identity that applies,
writes report.csv plus the data files of the command, and exits 0 only if all checks pass.
"""
import argparse
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from tabulate import tabulate

from opduality import config
from opduality.base import Check, OpDualityError, ParseError
from opduality.config import reset_tolerances, set_tolerance
from opduality.duality import spectral_measure
from opduality.exhaustion import make_family
from opduality.formats import loads_network, loads_pair, parse_interval, parse_matrix, parse_network
from opduality.hilbert_pair import OperatorBetween, WeightedSpace
from opduality.log import add_file_logger, log_checks, logger, set_log_level, suite_context
from opduality.network import Network, network_duality
from opduality.verify import (
    SuiteResult,
    charproj_suite,
    check_common_domain,
    check_family,
    check_network,
    check_operator,
    duality_suite,
    friedrichs_suite,
    interval_suite,
    measure_rows,
    verify_all,
)

COMMANDS = ("charproj", "duality", "spectra", "dipole", "defect", "exhaust", "verify-all")
REPORT_COLUMNS = ["identity", "anchor", "residual", "tolerance", "pass"]
FLOAT_FORMAT = "%.6e"
BUNDLED_P3 = Path(__file__).parent / "data" / "p3.net"


class JobSpec(BaseModel):
    """One CLI job"""
    command: str = Field(..., description="charproj | duality | spectra | dipole | defect | exhaust | verify-all")
    input_path: Optional[Path] = Field(default=None, description="Input file, format depends on the command")
    output_dir: Path = Field(default=Path(config.OUTPUT_DIR), description="Directory for report.csv and data files")
    tolerance_overrides: Dict[str, float] = Field(default_factory=dict, description="Named tolerance overrides")
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, description="Seed of every randomized suite")
    family: str = Field(default="path_n", description="Exhaustion family")
    levels: Optional[List[int]] = Field(default=None, description="Exhaustion levels")

    @field_validator("command")
    @classmethod
    def _known_command(cls, v: str) -> str:
        if v not in COMMANDS:
            raise ValueError(f"unknown command '{v}', expected one of {', '.join(COMMANDS)}")
        return v

    @field_validator("tolerance_overrides")
    @classmethod
    def _known_tolerances(cls, v: Dict[str, float]) -> Dict[str, float]:
        for name, value in v.items():
            if name not in config.TOLERANCES:
                raise ValueError(f"unknown tolerance '{name}'")
            if not value > 0:
                raise ValueError(f"tolerance '{name}' must be positive, got {value}")
        return v

    @field_validator("levels")
    @classmethod
    def _positive_levels(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None and (not v or any(level < 1 for level in v)):
            raise ValueError("levels must be positive integers")
        return v


class Report(BaseModel):
    """One row of report.csv"""
    model_config = ConfigDict(populate_by_name=True)

    identity: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool = Field(alias="pass")

    @model_validator(mode="after")
    def _pass_matches_residual(self) -> "Report":
        expected = Check(self.identity, self.anchor, self.residual, self.tolerance).passed
        if self.passed != expected:
            raise ValueError(f"pass flag {self.passed} contradicts residual {self.residual} vs {self.tolerance}")
        return self

    @classmethod
    def from_check(cls, check: Check) -> "Report":
        return cls(identity=check.name, anchor=check.anchor, residual=float(check.residual),
                   tolerance=float(check.tolerance), passed=bool(check.passed))


def setup_logger(verbose: bool = False, log_file: Optional[str] = None):
    """Configure logging"""
    set_log_level("DEBUG" if verbose else config.LOG_LEVEL)
    if log_file:
        add_file_logger(log_file)


def load_env(env_file: Optional[str] = None):
    """Load a .env file and apply the tolerance variables it sets."""
    path = Path(env_file) if env_file else Path(".env")
    if not path.exists():
        if env_file:
            logger.warning(f"Env file not found: {path}")
        return
    load_dotenv(path, override=True)
    logger.info(f"Loaded environment from: {path}")
    for name in config.TOLERANCES:
        value = os.getenv(f"OPDUALITY_TOL_{name.upper()}")
        if value is not None:
            set_tolerance(name, float(value))


def _read_text(path: Path) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _network_input(job: JobSpec) -> Network:
    return parse_network(job.input_path or BUNDLED_P3)


def _spectra(job: JobSpec) -> SuiteResult:
    """Spectral measures at basis vectors of a pair file or the delta functions of a network."""
    path = job.input_path or BUNDLED_P3
    text = _read_text(path)
    first = next((line.split()[0] for line in text.splitlines() if line.strip() and not line.startswith("#")), "")
    if first == "pair":
        return check_common_domain(loads_pair(text), path.stem)
    n = loads_network(text)
    nd = network_duality(n)
    atoms = []
    for x in n.vertices:
        atoms += measure_rows(spectral_measure(nd.delta, n.delta(x)), f"{n.name}:delta_{x}")
    return SuiteResult("spectra", nd.checks, {"spectral_measures.csv": atoms})


def _charproj(job: JobSpec) -> SuiteResult:
    if job.input_path is None:
        return charproj_suite(job.seed)
    kind, m = parse_matrix(job.input_path)
    if kind != "matrix":
        raise ParseError(f"charproj expects a 'matrix' file, got '{kind}'", 1, 1)
    rows, cols = m.shape
    t = OperatorBetween(m, WeightedSpace.euclidean(cols, "H1"), WeightedSpace.euclidean(rows, "H2"))
    return check_operator(t, job.input_path.stem)


def _duality(job: JobSpec) -> SuiteResult:
    if job.input_path is not None:
        cd = loads_pair(_read_text(job.input_path))
        return check_common_domain(cd, job.input_path.stem)
    return duality_suite(job.seed).extend(friedrichs_suite(job.seed))


def _dipole(job: JobSpec) -> SuiteResult:
    return check_network(_network_input(job), np.random.default_rng(job.seed))


def _defect(job: JobSpec) -> SuiteResult:
    if job.input_path is None:
        return interval_suite(seed=job.seed)
    spec = parse_interval(job.input_path)
    return interval_suite(spec.interval, spec.grid, spec.sweep, seed=job.seed)


def _exhaust(job: JobSpec) -> SuiteResult:
    return check_family(make_family(job.family, job.levels))


def _verify_all(job: JobSpec) -> SuiteResult:
    merged = SuiteResult("verify-all")
    for result in verify_all(_network_input(job), job.seed):
        merged.extend(result)
    return merged


HANDLERS = {
    "charproj": _charproj,
    "duality": _duality,
    "spectra": _spectra,
    "dipole": _dipole,
    "defect": _defect,
    "exhaust": _exhaust,
    "verify-all": _verify_all,
}


def write_outputs(result: SuiteResult, output_dir: Path) -> List[Report]:
    """report.csv and one CSV per data table, floats as %.6e."""
    output_dir.mkdir(parents=True, exist_ok=True)
    reports = [Report.from_check(c) for c in result.checks]
    frame = pd.DataFrame([r.model_dump(by_alias=True) for r in reports], columns=REPORT_COLUMNS)
    frame.to_csv(output_dir / "report.csv", index=False, float_format=FLOAT_FORMAT)
    for name, rows in result.data.items():
        pd.DataFrame(rows).to_csv(output_dir / name, index=False, float_format=FLOAT_FORMAT)
        logger.debug(f"Wrote {len(rows)} rows to {output_dir / name}")
    logger.info(f"Saved report with {len(reports)} rows to: {output_dir / 'report.csv'}")
    return reports


def run(job: JobSpec) -> int:
    """Run one job; 0 if every check passes, 1 otherwise."""
    try:
        for name, value in job.tolerance_overrides.items():
            previous = set_tolerance(name, value)
            logger.warning(f"Tolerance '{name}' overridden: {previous:g} -> {value:g}")
        logger.info(f"Command: {job.command} | Input: {job.input_path or 'default'} | Seed: {job.seed}")
        with suite_context(job.command, job.seed):
            result = HANDLERS[job.command](job)
            if job.command != "verify-all":
                # verify-all logs each suite as it finishes
                log_checks(result.checks)
        reports = write_outputs(result, job.output_dir)
    finally:
        reset_tolerances()
    table = [[r.identity, r.anchor, f"{r.residual:.3e}", f"{r.tolerance:.1e}", "pass" if r.passed else "FAIL"]
             for r in reports]
    print(tabulate(table, headers=REPORT_COLUMNS, tablefmt="pipe"))
    passed = sum(r.passed for r in reports)
    print(f"\n{passed}/{len(reports)} checks pass")
    return 0 if passed == len(reports) else 1


def _parse_tolerances(entries: List[str]) -> Dict[str, float]:
    out = {}
    for entry in entries:
        name, sep, value = entry.partition("=")
        if not sep:
            raise ValueError(f"--tol expects name=value, got '{entry}'")
        out[name.strip()] = float(value)
    return out


def create_parser():
    """Create argument parser"""
    parser = argparse.ArgumentParser(
        prog='opduality',
        description='opduality: operator duality identities checked on finite models',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Every suite with the default seed
  opduality --cmd verify-all --out out/

  # Characteristic projection of the operator in a matrix file
  opduality --cmd charproj --in t.mat --out out/

  # Dipoles of a network
  opduality --cmd dipole --in opduality/data/p3.net

  # Free/wired exhaustion of binary trees of depth 4..10
  opduality --cmd exhaust --family binary_tree:10:1 --levels 4,5,6,7,8,9,10

  # Loosen a tolerance
  opduality --cmd verify-all --tol quadrature=1e-3
        """
    )
    parser.add_argument('--cmd', type=str, required=True, choices=COMMANDS, help='Command to run')
    parser.add_argument('--in', dest='input_path', type=str, default=None,
                        help='Input file (matrix, pair, network or interval format)')
    parser.add_argument('--out', type=str, default=config.OUTPUT_DIR,
                        help=f'Output directory (default: {config.OUTPUT_DIR})')
    parser.add_argument('--seed', type=int, default=config.DEFAULT_SEED,
                        help=f'Seed for randomized suites (default: {config.DEFAULT_SEED})')
    parser.add_argument('--tol', action='append', default=[], metavar='NAME=VALUE',
                        help='Override a named tolerance, may be repeated')
    parser.add_argument('--family', type=str, default='path_n',
                        help='Exhaustion family: path_n | lattice2d_n | binary_tree:<depth>:<ratio>')
    parser.add_argument('--levels', type=str, default=None, help='Comma-separated exhaustion levels')
    parser.add_argument('--env-file', type=str, help='Path to .env file (default: .env)')
    parser.add_argument('--log-file', type=str, help='Also log to this file')
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    return parser


def main(argv: Optional[List[str]] = None):
    """Main entry point"""
    parser = create_parser()
    args = parser.parse_args(argv)

    setup_logger(args.verbose, args.log_file)
    try:
        load_env(args.env_file)
        job = JobSpec(
            command=args.cmd,
            input_path=args.input_path,
            output_dir=args.out,
            tolerance_overrides=_parse_tolerances(args.tol),
            seed=args.seed,
            family=args.family,
            levels=[int(x) for x in args.levels.split(",") if x.strip()] if args.levels else None,
        )
    except (ValidationError, ValueError, KeyError) as e:
        logger.error(f"Invalid arguments: {e}")
        return 2

    try:
        return run(job)
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return 130
    except ParseError as e:
        logger.error(f"ParseError: {e}")
        return 2
    except OpDualityError as e:
        logger.error(f"{type(e).__name__}: {e}")
        if args.verbose:
            logger.exception(e)
        return 3
    except FileNotFoundError as e:
        logger.error(f"Input not found: {e}")
        return 2
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return 2


if __name__ == '__main__':
    sys.exit(main())
