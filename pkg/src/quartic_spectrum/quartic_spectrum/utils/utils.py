import os
from typing import Tuple

import yaml
from loguru import logger

from quartic_spectrum.pytypes import ProblemConfig
from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.utils.exceptions import ConfigError

THREADS_ENV = 'QUARTIC_SPECTRUM_THREADS'
MAX_INDEX = 64

_PRECISIONS = ('double', 'extended')
_OUTPUTS = ('csv', 'json')


def parse_config(filename, name=None):
    '''
    Parameters block of a problem file. When name is None the file must hold exactly one problem.
    '''
    try:
        with open(filename, 'r') as f:
            document = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError('Could not read config file %s' % filename, errors=e)

    if not isinstance(document, dict) or not document:
        raise ConfigError('Config file %s holds no problem definition' % filename)
    if name is None:
        if len(document) != 1:
            raise ConfigError('Config file %s defines %d problems, pick one of %s' % (filename, len(document), list(document)))
        name = next(iter(document))
    if name not in document:
        raise ConfigError('Problem %s not found in %s' % (name, filename))
    try:
        config = document[name]['parameters']
    except (KeyError, TypeError):
        raise ConfigError('Problem %s in %s has no parameters block' % (name, filename))
    config['name'] = name
    return config


def coefficient_from_dict(spec: dict, label: str = 'coefficient') -> PeriodicCoefficient:
    if spec is None:
        return PeriodicCoefficient()
    if not isinstance(spec, dict):
        raise ConfigError('%s must be a mapping, got %s' % (label, type(spec).__name__))
    smoothness = spec.get('smoothness_order', 4)
    try:
        if 'samples' in spec:
            if 'harmonics' in spec or 'constant' in spec:
                raise ConfigError('%s gives both samples and harmonics' % label)
            return PeriodicCoefficient.from_samples(spec['samples'], smoothness_order=spec.get('smoothness_order', 2))
        harmonics = tuple((h['k'], h.get('a', 0.0), h.get('b', 0.0)) for h in spec.get('harmonics', []) or [])
        return PeriodicCoefficient(constant_term=spec.get('constant', 0.0), harmonics=harmonics,
                                   smoothness_order=smoothness)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError('Invalid %s definition: %s' % (label, e), errors=e)


def resolve_thread_count(requested=None, configured=None) -> int:
    '''Command line value, then the environment, then the config file, then the machine.'''
    if requested is not None:
        threads = requested
    elif os.environ.get(THREADS_ENV):
        try:
            threads = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ConfigError('%s must be an integer, got %s' % (THREADS_ENV, os.environ[THREADS_ENV]))
    elif configured is not None:
        threads = configured
    else:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigError('Thread count must be positive, got %d' % threads)
    return threads


def load_problem(filename, name=None) -> Tuple[ProblemConfig, PeriodicCoefficient, PeriodicCoefficient]:
    params = parse_config(filename, name)

    try:
        config = ProblemConfig.from_dict(params)
    except (AttributeError, TypeError, ValueError) as e:
        raise ConfigError('Invalid parameters in %s: %s' % (filename, e), errors=e)

    if len(config.n_range) != 2 or config.n_range[0] < 0 or config.n_range[0] > config.n_range[1]:
        raise ConfigError('n_range must be [n_min, n_max] with 0 <= n_min <= n_max, got %s' % str(config.n_range))
    if config.n_range[1] > MAX_INDEX:
        raise ConfigError('n_max may not exceed %d, got %d' % (MAX_INDEX, config.n_range[1]))
    if config.precision not in _PRECISIONS:
        raise ConfigError('Precision %s not recognized' % config.precision)
    if config.output not in _OUTPUTS:
        raise ConfigError('Output format %s not recognized' % config.output)
    if not config.ode_tol > 0 or not config.z_abs_tol > 0:
        raise ConfigError('Tolerances must be positive')

    p = coefficient_from_dict(config.p, 'p')
    q = coefficient_from_dict(config.q, 'q')
    logger.debug(f'Loaded problem {config.name}: p degree {p.degree}, q degree {q.degree}, n in {config.n_range}')
    return config, p, q
