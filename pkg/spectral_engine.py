#!/usr/bin/env python3
"""
spectral_engine.py

Eigenvalues of y'''' + (p y')' + q y = lambda y on [0, 1] with y'(0) = (y''' + p y')(0) = 0 and y(1) = y''(1) = 0,
their high energy asymptotics, and the exact identities behind them.

    spectral_engine.py solve --config config/smooth_pair.yaml
    spectral_engine.py compare --config config/smooth_pair.yaml --order p3_full --precision extended
    spectral_engine.py verify-algebra
"""
from dataclasses import dataclass, field
from typing import List, Optional
import argparse
import json
import pathlib
import sys

import jsonschema
import numpy as np
import pandas as pd
from loguru import logger

import quartic_spectrum
from quartic_spectrum.pytypes import PythonMsg, SearchPlan
from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.asymptotics import FORMS, ORDERS, fit_residual_order, mu_asymptotic, noise_floor
from quartic_spectrum.birkhoff_algebra import load_constants, run_identity_suite
from quartic_spectrum.models.model_types import IntegratorConfig
from quartic_spectrum.spectrum import localize, solve_range
from quartic_spectrum.utils.exceptions import ConfigError, ContourTooCloseError, MissingRootError, UnsupportedOrderError
from quartic_spectrum.utils.log import setup_logger
from quartic_spectrum.utils.utils import MAX_INDEX, load_problem, resolve_thread_count

SCHEMA_FILE = pathlib.Path(quartic_spectrum.__file__).parent.joinpath('schema', 'results.schema.json')
FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_IDENTITY_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_COUNT_MISMATCH = 3

COLUMNS = {
    'solve': ['n', 'mu', 'z_root', 'bracket_width', 'char_residual', 'iterations', 'precision', 'method'],
    'asymptote': ['n', 'order', 'form', 'mu', 'leading', 'p_term', 'p_prime_term', 'constant_block',
                  'oscillatory_block'],
    'compare': ['n', 'mu_numeric', 'mu_asymptotic', 'residual', 'noise_floor', 'excluded'],
    'verify-algebra': ['identity', 'passed', 'offending', 'detail'],
    'localize': ['n', 'z_center', 'radius', 'z_lo', 'z_hi', 'lambda_lo', 'lambda_hi', 'winding', 'samples'],
}


@dataclass
class CommandResult(PythonMsg):
    rows: List[dict]                = field(default = None)
    status: str                     = field(default = 'ok')
    exit_code: int                  = field(default = EXIT_OK)
    summary: Optional[dict]         = field(default = None)
    diagnostics: List[str]          = field(default = None)
    problem: Optional[str]          = field(default = None)
    output: str                     = field(default = 'csv')

    def __post_init__(self):
        if self.rows is None:
            self.rows = []
        if self.diagnostics is None:
            self.diagnostics = []


@dataclass
class Problem(PythonMsg):
    name: str                       = field(default = 'problem')
    p: PeriodicCoefficient          = field(default = None)
    q: PeriodicCoefficient          = field(default = None)
    plan: SearchPlan                = field(default = None)
    precision: str                  = field(default = 'double')
    integrator: IntegratorConfig    = field(default = None)   # double precision pass; extended keeps its own tolerance
    threads: int                    = field(default = 1)
    output: str                     = field(default = 'csv')


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    return value


def _load(args) -> Problem:
    if args.config is None:
        raise ConfigError('Command %s needs --config' % args.command)
    config, p, q = load_problem(args.config)

    n_min = config.n_range[0] if args.n_min is None else args.n_min
    n_max = config.n_range[1] if args.n_max is None else args.n_max
    if not 0 <= n_min <= n_max <= MAX_INDEX:
        raise ConfigError('Index range [%d, %d] is empty or outside [0, %d]' % (n_min, n_max, MAX_INDEX))

    precision = args.precision or config.precision
    try:
        integrator = IntegratorConfig.for_precision('double', tolerance=config.ode_tol)
        plan = SearchPlan(n_min=n_min, n_max=n_max, crossover_index=config.crossover_index,
                          z_abs_tol=config.z_abs_tol)
    except ValueError as e:
        raise ConfigError(str(e), errors=e)

    return Problem(name=config.name, p=p, q=q, plan=plan, precision=precision, integrator=integrator,
                   threads=resolve_thread_count(args.threads, config.thread_count),
                   output=args.format or config.output)


def _tag(result: CommandResult, problem: Problem) -> CommandResult:
    result.problem = problem.name
    result.output = problem.output
    return result


def _solve(problem: Problem, quiet: bool):
    return solve_range(problem.p, problem.q, problem.plan, precision=problem.precision, config=problem.integrator,
                       threads=problem.threads, quiet=quiet)


def _missing_root(e: MissingRootError) -> CommandResult:
    errors = e.errors if isinstance(e.errors, dict) else {}
    diagnostics = [str(e)] + ['%s: %s' % (k, v) for k, v in errors.items() if k != 'records']
    logger.error(f'Spectral count mismatch: {e}')
    return CommandResult(rows=_record_rows(errors.get('records', [])), status='count_mismatch',
                         exit_code=EXIT_COUNT_MISMATCH, diagnostics=diagnostics)


def _record_rows(records) -> List[dict]:
    return [{'n': r.index, 'mu': r.mu, 'z_root': r.z_root, 'bracket_width': r.bracket_width,
             'char_residual': r.char_residual, 'iterations': r.refinement_iterations,
             'precision': r.precision, 'method': r.method}
            for r in sorted(records, key=lambda r: r.index)]


def cmd_solve(args) -> CommandResult:
    problem = _load(args)
    try:
        records = _solve(problem, args.quiet)
    except MissingRootError as e:
        return _tag(_missing_root(e), problem)
    return _tag(CommandResult(rows=_record_rows(records)), problem)


def cmd_asymptote(args) -> CommandResult:
    problem = _load(args)
    rows = []
    for n in range(problem.plan.n_min, problem.plan.n_max + 1):
        a = mu_asymptotic(problem.p, problem.q, n, args.order, args.form)
        row = {'n': n, 'order': a.order, 'form': a.form, 'mu': a.value}
        row.update({k: a.terms.get(k, 0.0) for k in COLUMNS['asymptote'][4:]})
        rows.append(row)
    return _tag(CommandResult(rows=rows), problem)


def cmd_compare(args) -> CommandResult:
    problem = _load(args)
    try:
        records = _solve(problem, args.quiet)
    except MissingRootError as e:
        return _tag(_missing_root(e), problem)

    # the fit only reads indices past the low region
    records = [r for r in records if r.index >= 4]
    try:
        fit = fit_residual_order(records, problem.p, problem.q, args.order, args.form)
    except ValueError as e:
        raise ConfigError('Cannot fit residual order: %s' % e, errors=e)

    by_index = {r.index: r for r in records}
    rows = []
    for n, residual in fit.residuals:
        r = by_index[n]
        rows.append({'n': n, 'mu_numeric': r.mu, 'mu_asymptotic': r.mu - residual, 'residual': residual,
                     'noise_floor': noise_floor(r.mu, r.precision), 'excluded': n in fit.excluded_points})
    summary = {'order': fit.order, 'form': args.form, 'slope': fit.slope, 'intercept': fit.intercept,
               'excluded_points': list(fit.excluded_points), 'status': fit.status}
    return _tag(CommandResult(rows=rows, status=fit.status, summary=summary), problem)


def cmd_verify_algebra(args) -> CommandResult:
    constants = load_constants(args.constants)
    reports = run_identity_suite(constants)
    rows = [{'identity': r.name, 'passed': bool(r.passed),
             'offending': ';'.join('(%d,%d,%s)' % o for o in r.offending), 'detail': r.detail}
            for r in reports]
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.error(f'Identities failing: {failed}')
        return CommandResult(rows=rows, status='identity_failure', exit_code=EXIT_IDENTITY_FAILURE,
                             diagnostics=['%s fails at %s' % (r.name, r.offending) for r in reports if not r.passed])
    return CommandResult(rows=rows)


def cmd_localize(args) -> CommandResult:
    problem = _load(args)
    try:
        reports = localize(problem.p, problem.q, (problem.plan.n_min, problem.plan.n_max),
                           residual_tol=problem.plan.residual_tol, config=problem.integrator)
    except ContourTooCloseError as e:
        logger.error(f'Localization failed: {e}')
        return _tag(CommandResult(status='count_mismatch', exit_code=EXIT_COUNT_MISMATCH, diagnostics=[str(e)]), problem)

    rows = [{'n': r.index, 'z_center': r.z_center, 'radius': r.radius, 'z_lo': r.z_interval[0],
             'z_hi': r.z_interval[1], 'lambda_lo': r.lambda_interval[0], 'lambda_hi': r.lambda_interval[1],
             'winding': r.winding, 'samples': r.samples} for r in reports]
    result = CommandResult(rows=rows)
    off = [r.index for r in reports if r.winding != 1]
    if off:
        result.status = 'count_mismatch'
        result.exit_code = EXIT_COUNT_MISMATCH
        result.diagnostics.append('winding number differs from 1 in disks %s' % off)
    return _tag(result, problem)


COMMANDS = {
    'solve': cmd_solve,
    'asymptote': cmd_asymptote,
    'compare': cmd_compare,
    'verify-algebra': cmd_verify_algebra,
    'localize': cmd_localize,
}


def emit(command: str, result: CommandResult, fmt: str = None, out=None, summary_path=None):
    out = out if out is not None else sys.stdout
    fmt = fmt or result.output
    rows = [{k: _plain(v) for k, v in row.items()} for row in result.rows]

    if summary_path is not None and result.summary is not None:
        with open(summary_path, 'w') as f:
            json.dump(result.summary, f, indent=2)
            f.write('\n')

    if fmt == 'json':
        document = {'tool': 'quartic_spectrum', 'command': command, 'version': FORMAT_VERSION,
                    'problem': result.problem, 'status': result.status, 'columns': COLUMNS[command], 'rows': rows}
        if result.summary is not None:
            document['summary'] = result.summary
        if result.diagnostics:
            document['diagnostics'] = result.diagnostics
        with open(SCHEMA_FILE, 'r') as f:
            jsonschema.validate(instance=document, schema=json.load(f))
        out.write(json.dumps(document, indent=2) + '\n')
        return

    out.write('# quartic_spectrum %s v%d\n' % (command, FORMAT_VERSION))
    pd.DataFrame(rows, columns=COLUMNS[command]).to_csv(out, index=False, float_format='%.17g')
    if result.summary is not None and summary_path is None:
        out.write('# summary: %s\n' % json.dumps(result.summary, sort_keys=True))
    for line in result.diagnostics:
        out.write('# diagnostic: %s\n' % line)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Spectrum of y\'\'\'\' + (p y\')\' + q y = lambda y on [0, 1]')
    parser.add_argument('command', choices=list(COMMANDS))
    parser.add_argument('--config', type=str, default=None)
    parser.add_argument('--order', choices=ORDERS, default='p3_full')
    parser.add_argument('--form', choices=FORMS, default='cosine')
    parser.add_argument('--precision', choices=('double', 'extended'), default=None)
    parser.add_argument('--format', choices=('csv', 'json'), default=None)
    parser.add_argument('--threads', type=int, default=None)
    parser.add_argument('--constants', type=str, default=None)
    parser.add_argument('--summary', type=str, default=None)
    parser.add_argument('--n-min', dest='n_min', type=int, default=None)
    parser.add_argument('--n-max', dest='n_max', type=int, default=None)
    parser.add_argument('--log-level', dest='log_level', default='WARNING')
    parser.add_argument('--quiet', action='store_true')
    return parser


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logger(args.log_level)

    try:
        result = COMMANDS[args.command](args)
    except (ConfigError, UnsupportedOrderError) as e:
        logger.error(f'{type(e).__name__}: {e}')
        return EXIT_CONFIG_ERROR

    emit(args.command, result, args.format, out=out, summary_path=args.summary)
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
