#!/usr/bin python3

from dataclasses import dataclass, field

from quartic_spectrum.pytypes import PythonMsg


@dataclass
class ModelConfig(PythonMsg):
    model_name: str                 = field(default = 'model')
    verbose: bool                   = field(default = False)


@dataclass
class IntegratorConfig(ModelConfig):
    model_name: str                 = field(default = 'double')   # 'double' or 'extended'

    tolerance: float                = field(default = 1e-12)     # relative local error target
    method: str                     = field(default = 'DOP853')  # scipy solve_ivp method for double precision
    step_cap_factor: float          = field(default = 0.25)      # h <= step_cap_factor / (1 + |z|)
    segment_growth: float           = field(default = 1.0)       # |z| * segment length between renormalizations
    renormalize_log: float          = field(default = 20.0)      # renormalize once the largest entry exceeds e^20

    # Taylor stepper used in extended precision
    extended_dps: int               = field(default = 32)
    taylor_order: int               = field(default = 40)

    def __post_init__(self):
        if self.model_name not in ('double', 'extended'):
            raise ValueError('Precision %s not recognized' % self.model_name)
        lower = 1e-14 if self.model_name == 'double' else 1e-30
        if not lower <= self.tolerance <= 1e-6:
            raise ValueError('Tolerance %.3e outside [%.0e, 1e-06] for %s precision' % (self.tolerance, lower, self.model_name))
        if self.step_cap_factor <= 0 or self.segment_growth <= 0:
            raise ValueError('Step cap and segment growth must be positive')

    @property
    def precision(self) -> str:
        return self.model_name

    @classmethod
    def for_precision(cls, precision: str = 'double', tolerance: float = None, **kwargs) -> 'IntegratorConfig':
        if tolerance is None:
            tolerance = 1e-12 if precision == 'double' else 1e-20
        return cls(model_name=precision, tolerance=tolerance, **kwargs)
