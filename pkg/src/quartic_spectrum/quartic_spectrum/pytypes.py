from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Tuple
import copy

import numpy as np
import yaml


@dataclass
class PythonMsg:
    '''
    Base class for records passed between modules. Fields cannot be added by accident,
    e.g. "record.mue = 3.0" throws instead of silently creating a new attribute.
    If a field really has to be attached use "object.__setattr__(record, 'mue', 3.0)".
    '''

    def __setattr__(self, key, value):
        if key not in self.__dataclass_fields__.keys():
            raise TypeError('Cannot add new field "%s" to frozen class %s' % (key, self))
        else:
            object.__setattr__(self, key, value)

    def print(self, depth=0, name=None):
        '''
        Indented multi-line dump, easier to read than the dataclass __str__ for nested records.
        '''
        print_str = '  ' * depth
        if name:
            print_str += name + ' (' + type(self).__name__ + '):\n'
        else:
            print_str += type(self).__name__ + ':\n'
        for key in vars(self):
            val = self.__getattribute__(key)
            if isinstance(val, PythonMsg):
                print_str += val.print(depth=depth + 1, name=key)
            else:
                print_str += '  ' * (depth + 1) + str(key) + '=' + str(val) + '\n'

        if depth == 0:
            print(print_str)
        else:
            return print_str

    def copy(self):
        return copy.deepcopy(self)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FourierRecord(PythonMsg):
    n: int                          = field(default = 0)
    f0: float                       = field(default = 0.0)
    f_hat_cn: float                 = field(default = 0.0)
    f_hat_sn: float                 = field(default = 0.0)
    f_hat_n: complex                = field(default = None)

    def __post_init__(self):
        # e^{-i theta} = cos theta - i sin theta
        if self.f_hat_n is None:
            self.f_hat_n = complex(self.f_hat_cn, -self.f_hat_sn)

    def __add__(self, other: 'FourierRecord') -> 'FourierRecord':
        if self.n != other.n:
            raise ValueError('Cannot add Fourier records of different indices %d and %d' % (self.n, other.n))
        return FourierRecord(n=self.n,
                             f0=self.f0 + other.f0,
                             f_hat_cn=self.f_hat_cn + other.f_hat_cn,
                             f_hat_sn=self.f_hat_sn + other.f_hat_sn)


@dataclass
class CharValue(PythonMsg):
    '''
    Scaled complex value mantissa * exp(log_scale) together with the branch value z = lambda^(1/4).
    '''
    mantissa: complex               = field(default = 0j)
    log_scale: float                = field(default = 0.0)
    z: complex                      = field(default = 0j)

    @property
    def value(self) -> complex:
        return complex(self.mantissa) * np.exp(self.log_scale)


@dataclass
class AsymptoticCharValue(CharValue):
    n: int                          = field(default = 0)
    near_zero: bool                 = field(default = False)


@dataclass
class EigenvalueRecord(PythonMsg):
    index: int                      = field(default = 0)
    mu: float                       = field(default = 0.0)
    z_root: float                   = field(default = 0.0)       # signed real root, mu = z_root |z_root|^3
    bracket: Tuple[float, float]    = field(default = (0.0, 0.0))
    char_residual: float            = field(default = 0.0)
    refinement_iterations: int      = field(default = 0)
    precision: str                  = field(default = 'double')
    method: str                     = field(default = 'disk')   # 'disk' above the crossover, 'scan' below

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


@dataclass
class SearchPlan(PythonMsg):
    n_min: int                      = field(default = 0)
    n_max: int                      = field(default = 10)
    crossover_index: int            = field(default = 4)
    low_region_z_max: float         = field(default = None)
    z_abs_tol: float                = field(default = 1e-11)
    residual_tol: float             = field(default = 1e-9)
    low_region_step: float          = field(default = np.pi / 16)

    def __post_init__(self):
        if self.n_min < 0 or self.n_min > self.n_max:
            raise ValueError('Invalid index range [%d, %d]' % (self.n_min, self.n_max))
        if self.crossover_index < 0:
            raise ValueError('Crossover index must be nonnegative, got %d' % self.crossover_index)
        if self.low_region_z_max is None:
            # edge of the ball that holds mu_0 .. mu_{N*-1}
            self.low_region_z_max = np.pi * self.crossover_index

    @property
    def disk_indices(self) -> List[int]:
        return list(range(max(self.n_min, self.crossover_index), self.n_max + 1))

    @property
    def scan_indices(self) -> List[int]:
        return list(range(self.n_min, min(self.crossover_index, self.n_max + 1)))


@dataclass
class WindingReport(PythonMsg):
    index: int                      = field(default = 0)
    z_center: float                 = field(default = 0.0)
    radius: float                   = field(default = np.pi / 4)
    z_interval: Tuple[float, float] = field(default = (0.0, 0.0))
    lambda_interval: Tuple[float, float] = field(default = (0.0, 0.0))
    winding: int                    = field(default = 0)
    samples: int                    = field(default = 0)


@dataclass
class KappaValue(PythonMsg):
    sigma: int                      = field(default = 1)
    n: int                          = field(default = 0)
    value: float                    = field(default = 0.0)


@dataclass
class AsymptoticEigenvalue(PythonMsg):
    index: int                      = field(default = 0)
    order: str                      = field(default = 'rough')
    value: float                    = field(default = 0.0)
    terms: Dict[str, float]         = field(default = None)
    form: str                       = field(default = 'cosine')

    def __post_init__(self):
        if self.terms is None:
            self.terms = dict()


@dataclass
class ResidualFit(PythonMsg):
    order: str                      = field(default = 'L1')
    slope: Optional[float]          = field(default = None)
    intercept: Optional[float]      = field(default = None)
    status: str                     = field(default = 'ok')    # 'ok' or 'inconclusive'
    residuals: List[Tuple[int, float]] = field(default = None)
    excluded_points: List[int]      = field(default = None)

    def __post_init__(self):
        if self.residuals is None:
            self.residuals = []
        if self.excluded_points is None:
            self.excluded_points = []


@dataclass
class ProblemConfig(PythonMsg):
    name: str                       = field(default = 'problem')
    p: dict                         = field(default = None)
    q: dict                         = field(default = None)
    n_range: Tuple[int, int]        = field(default = (0, 10))
    ode_tol: float                  = field(default = 1e-12)
    z_abs_tol: float                = field(default = 1e-11)
    precision: str                  = field(default = 'double')
    thread_count: Optional[int]     = field(default = None)
    output: str                     = field(default = 'csv')
    crossover_index: int            = field(default = 4)

    def __post_init__(self):
        if self.p is None:
            self.p = {'constant': 0.0, 'harmonics': []}
        if self.q is None:
            self.q = {'constant': 0.0, 'harmonics': []}
        self.n_range = tuple(self.n_range)

    @classmethod
    def from_dict(cls, params: dict) -> 'ProblemConfig':
        '''Builds a config from the parameters block of a problem file.'''
        tolerances = params.get('tolerances', {}) or {}
        return cls(name=params.get('name', 'problem'),
                   p=params.get('p'),
                   q=params.get('q'),
                   n_range=tuple(int(n) for n in params.get('n_range', (0, 10))),
                   ode_tol=float(tolerances.get('ode_tol', 1e-12)),
                   z_abs_tol=float(tolerances.get('z_abs_tol', 1e-11)),
                   precision=params.get('precision', 'double'),
                   thread_count=params.get('thread_count'),
                   output=params.get('output', 'csv'),
                   crossover_index=int(params.get('crossover_index', 4)))

    def to_parameters(self) -> dict:
        return {'p': self.p,
                'q': self.q,
                'n_range': list(self.n_range),
                'tolerances': {'ode_tol': self.ode_tol, 'z_abs_tol': self.z_abs_tol},
                'precision': self.precision,
                'thread_count': self.thread_count,
                'output': self.output,
                'crossover_index': self.crossover_index}

    def to_yaml(self) -> str:
        # yaml writes floats with repr, so every coefficient reloads bit for bit
        return yaml.safe_dump({self.name: {'parameters': self.to_parameters()}}, sort_keys=False)


@dataclass
class IdentityReport(PythonMsg):
    name: str                       = field(default = '')
    passed: bool                    = field(default = False)
    offending: List[Tuple[int, int, str]] = field(default = None)   # 1-indexed (row, col, symbol)
    detail: str                     = field(default = '')

    def __post_init__(self):
        if self.offending is None:
            self.offending = []

    def __bool__(self) -> bool:
        return bool(self.passed)
