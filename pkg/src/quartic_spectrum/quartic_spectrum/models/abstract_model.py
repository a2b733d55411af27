#!/usr/bin python3

from abc import ABC, abstractmethod

from quartic_spectrum.models.model_types import IntegratorConfig


class AbstractModel(ABC):
    '''
    Base class for transfer models.
    Models may differ widely in arithmetic and stepping, but for interchangeability every model
    propagates a linear system y' = M(x) y across [0, 1] through the same runtime method.
    '''
    def __init__(self, model_config: IntegratorConfig):
        self.model_config = model_config
        self.tolerance = model_config.tolerance
        self.verbose = model_config.verbose

    @abstractmethod
    def propagate(self, evaluator, y0):
        '''
        Returns (mantissa, log_scale, log_det, segments) for the solution at x = 1 started from y0 at x = 0.
        log_det accumulates log det of the segment propagators; it is 0 for vector-valued y0.
        '''
        pass
