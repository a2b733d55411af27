'''
Exact constants of the Birkhoff reduction and the identities they satisfy.

Every matrix is a sympy DomainMatrix over the Gaussian rationals QQ_I. Identities that carry the
scalar functions p, q (or p'', p^2) are checked as polynomial identities in independent symbols,
coefficient by coefficient, never at sampled points.
'''
from dataclasses import dataclass, fields
from typing import Dict, List, Tuple
import hashlib
import pathlib

import numpy as np
import yaml
from sympy import I, Poly, QQ_I, lambdify, symbols, sympify
from sympy.polys.matrices import DomainMatrix
from loguru import logger

from quartic_spectrum.pytypes import IdentityReport
from quartic_spectrum.utils.exceptions import ConfigError

CONSTANTS_FILE = pathlib.Path(__file__).parent.joinpath('data', 'birkhoff_constants.yaml')

z, p, q = symbols('z p q')
e1, e2, e3, e4 = symbols('e1 e2 e3 e4')

KZ = QQ_I[z]

SUITE = ('w1_first', 'w1_second', 'w2', 'w3', 'q4', 'conjugation', 'det_omega', 'det_phi0', 't_powers',
         'f1_offdiagonal')


@dataclass(frozen=True)
class BirkhoffConstants:
    T: DomainMatrix
    P: DomainMatrix
    Q: DomainMatrix
    Qcal: DomainMatrix
    W1: DomainMatrix
    W2: DomainMatrix
    Q1: DomainMatrix
    Q2: DomainMatrix
    Q3: DomainMatrix
    Q4: DomainMatrix
    Omega: DomainMatrix             # over QQ_I[z]
    source: str = '<memory>'


@dataclass(frozen=True)
class LaurentMonomial:
    coefficient: complex
    power: int
    exact: object = None

    def __call__(self, value: complex) -> complex:
        return self.coefficient * value ** self.power


def exact_matrix(rows, K=QQ_I, factor=1) -> DomainMatrix:
    factor = sympify(factor)
    elements = [[K.from_sympy(sympify(str(e)) * factor) for e in row] for row in rows]
    return DomainMatrix(elements, (len(rows), len(rows[0])), K)


def constants_from_rows(rows: Dict[str, dict], source: str = '<memory>') -> BirkhoffConstants:
    '''rows maps a matrix name to {'rows': [[...]], 'factor': ...} as in the constants file.'''
    matrices = {}
    for f in fields(BirkhoffConstants):
        if f.name == 'source':
            continue
        if f.name not in rows:
            raise ConfigError('Constant matrix %s missing from %s' % (f.name, source))
        entry = rows[f.name]
        K = KZ if f.name == 'Omega' else QQ_I
        try:
            M = exact_matrix(entry['rows'], K, entry.get('factor', 1))
        except Exception as e:
            raise ConfigError('Constant matrix %s in %s is not a valid exact matrix: %s' % (f.name, source, e), errors=e)
        if M.shape != (4, 4):
            raise ConfigError('Constant matrix %s must be 4x4, got %s' % (f.name, str(M.shape)))
        matrices[f.name] = M
    return BirkhoffConstants(source=source, **matrices)


def load_constants(path=None) -> BirkhoffConstants:
    path = pathlib.Path(path) if path is not None else CONSTANTS_FILE
    try:
        with open(path, 'r') as f:
            rows = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError('Could not read constants file %s' % path, errors=e)
    if not isinstance(rows, dict):
        raise ConfigError('Constants file %s holds no matrices' % path)
    constants = constants_from_rows(rows, source=str(path))
    logger.debug(f'Loaded Birkhoff constants from {path} (digest {constants_digest(constants)[:12]})')
    return constants


def constants_digest(constants: BirkhoffConstants) -> str:
    '''sha256 of the canonical exact entries, independent of how the file spells them.'''
    h = hashlib.sha256()
    for f in fields(BirkhoffConstants):
        if f.name == 'source':
            continue
        M = getattr(constants, f.name)
        h.update(f.name.encode())
        for row in M.to_Matrix().tolist():
            h.update(('|'.join(str(e.expand()) for e in row) + ';').encode())
    return h.hexdigest()


def with_entry(M: DomainMatrix, row: int, col: int, value) -> DomainMatrix:
    '''Copy of M with the 0-indexed entry (row, col) replaced by the exact value.'''
    K = M.domain
    elements = M.to_list()
    elements[row][col] = K.from_sympy(sympify(value))
    return DomainMatrix(elements, M.shape, K)


def commutator(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    return A * B - B * A


def scaled(A: DomainMatrix, c) -> DomainMatrix:
    return A * A.domain.from_sympy(sympify(c))


def trace(A: DomainMatrix):
    K = A.domain
    out = K.zero
    elements = A.to_list()
    for i in range(A.shape[0]):
        out = out + elements[i][i]
    return K.to_sympy(out)


def exact_det(A: DomainMatrix):
    '''Division free determinant, valid over polynomial rings.'''
    n = A.shape[0]
    cp = A.charpoly()
    return cp[-1] if n % 2 == 0 else -cp[-1]


def _offenders(M: DomainMatrix, symbol: str) -> List[Tuple[int, int, str]]:
    K = M.domain
    out = []
    for i, row in enumerate(M.to_list()):
        for j, e in enumerate(row):
            if not K.is_zero(e):
                out.append((i + 1, j + 1, symbol if symbol else str(K.to_sympy(e))))
    return out


def _report(name: str, residuals: Dict[str, DomainMatrix], detail: str = '') -> IdentityReport:
    offending = []
    for symbol, R in residuals.items():
        offending += _offenders(R, symbol)
    if offending:
        logger.debug(f'Identity {name} fails at {offending}')
    return IdentityReport(name=name, passed=not offending, offending=offending, detail=detail)


def _lift(M: DomainMatrix, K) -> DomainMatrix:
    return M.convert_to(K)


def check_w1_first(c: BirkhoffConstants) -> IdentityReport:
    '''P + 4i[T, W1] = -i T^3'''
    T3 = c.T * c.T * c.T
    R = c.P + scaled(commutator(c.T, c.W1), 4 * I) + scaled(T3, I)
    return _report('w1_first', {'1': R})


def check_w1_second(c: BirkhoffConstants) -> IdentityReport:
    '''[P, W1] - 4i W1 [T, W1] = Qcal / 8'''
    R = commutator(c.P, c.W1) - scaled(c.W1 * commutator(c.T, c.W1), 4 * I) - scaled(c.Qcal, sympify('1/8'))
    return _report('w1_second', {'1': R})


def verify_w1_identities(c: BirkhoffConstants = None) -> IdentityReport:
    c = c or load_constants()
    first, second = check_w1_first(c), check_w1_second(c)
    return IdentityReport(name='w1', passed=first.passed and second.passed,
                          offending=[(i, j, 'first') for i, j, _ in first.offending]
                                    + [(i, j, 'second') for i, j, _ in second.offending])


def verify_w2_identity(c: BirkhoffConstants = None) -> IdentityReport:
    '''W1 + i[W2, T] = 0'''
    c = c or load_constants()
    return _report('w2', {'1': c.W1 + scaled(commutator(c.W2, c.T), I)})


def verify_w3_identity(c: BirkhoffConstants = None) -> IdentityReport:
    '''
    i[W3, T] + (p^2/4)([P, W1] - 4i W1 [T, W1]) - (q/4) Q + p'' W2 = (i p^2/32 - i q/4) T
    with W3 = (p''/32) Q1 + (q/8) Q2 + (p^2/64) Q3, one coefficient matrix per symbol.
    '''
    c = c or load_constants()
    w1_bracket = commutator(c.P, c.W1) - scaled(c.W1 * commutator(c.T, c.W1), 4 * I)
    residuals = {
        "p''": scaled(commutator(c.Q1, c.T), I / 32) + c.W2,
        'q': scaled(commutator(c.Q2, c.T), I / 8) - scaled(c.Q, sympify('1/4')) + scaled(c.T, I / 4),
        'p^2': scaled(commutator(c.Q3, c.T), I / 64) + scaled(w1_bracket, sympify('1/4')) - scaled(c.T, I / 32),
    }
    return _report('w3', residuals)


def verify_q4_combination(c: BirkhoffConstants = None) -> IdentityReport:
    '''64i W1 [W2, T] + 64i W2 [W1, T] + 16 [P, W2] + 64 W1^2 + 2 Q3 = Q4'''
    c = c or load_constants()
    lhs = scaled(c.W1 * commutator(c.W2, c.T), 64 * I) + scaled(c.W2 * commutator(c.W1, c.T), 64 * I) \
          + scaled(commutator(c.P, c.W2), 16) + scaled(c.W1 * c.W1, 64) + scaled(c.Q3, 2)
    return _report('q4', {'1': lhs - c.Q4}, detail='tr Q4 = %s' % trace(c.Q4))


def conjugation_residual(c: BirkhoffConstants) -> DomainMatrix:
    '''
    z^3 (calP Omega) - Omega (i z^4 T - (p z^2/4) P - (q/4) Q) over QQ_I[z, p, q], lambda = z^4.
    This is z^3 Omega times (Omega^{-1} calP Omega - iz T + (p/4z) P + (q/4z^3) Q).
    '''
    K = QQ_I[z, p, q]
    calP = exact_matrix([[0, 1, 0, 0], [0, 0, 1, 0], [0, -p, 0, 1], [z ** 4 - q, 0, 0, 0]], K)
    Omega = _lift(c.Omega, K)
    bracket = scaled(_lift(c.T, K), I * z ** 4) - scaled(_lift(c.P, K), p * z ** 2 / 4) - scaled(_lift(c.Q, K), q / 4)
    return scaled(calP * Omega, z ** 3) - Omega * bracket


def verify_conjugation_identity(c: BirkhoffConstants = None) -> IdentityReport:
    c = c or load_constants()
    return _report('conjugation', {'': conjugation_residual(c)})


def det_omega(c: BirkhoffConstants = None) -> LaurentMonomial:
    c = c or load_constants()
    d = KZ.to_sympy(exact_det(c.Omega))
    terms = Poly(d, z).terms()
    if len(terms) != 1:
        raise ValueError('det Omega = %s is not a monomial in z' % d)
    (power,), coefficient = terms[0]
    return LaurentMonomial(coefficient=complex(coefficient), power=int(power), exact=coefficient)


def _check_det_omega(c: BirkhoffConstants) -> IdentityReport:
    try:
        d = det_omega(c)
    except ValueError as e:
        return IdentityReport(name='det_omega', passed=False, offending=[(0, 0, 'z')], detail=str(e))
    passed = d.power == 6 and sympify(d.exact - (-16 * I)).expand() == 0
    return IdentityReport(name='det_omega', passed=passed, offending=[] if passed else [(0, 0, 'z^%d' % d.power)],
                          detail='det Omega = (%s) z^%d' % (d.exact, d.power))


def phi0_determinant(c: BirkhoffConstants):
    """
    Exact det of phi_0 as a polynomial in z and e_j = exp(i z w_j), w = (i, 1, -1, -i). Rows are y', y''' + p y'
    at x = 0 (rows 2 and 4 of Omega) and y, y'' at x = 1 (rows 1 and 3 of Omega times e_j).
    """
    K = QQ_I[z, e1, e2, e3, e4]
    Omega = c.Omega.to_Matrix()
    e = (e1, e2, e3, e4)
    rows = [list(Omega.row(1)), list(Omega.row(3)),
            [Omega[0, j] * e[j] for j in range(4)],
            [Omega[2, j] * e[j] for j in range(4)]]
    return K.to_sympy(exact_det(exact_matrix(rows, K)))


def verify_det_phi0(c: BirkhoffConstants = None, samples: int = 20, seed: int = 0, rtol: float = 1e-12) -> IdentityReport:
    '''
    det phi_0(z) = 16 i z^6 cos z cosh z at seeded random points with |z| <= 3, away from zeros of cos z cosh z.
    '''
    c = c or load_constants()
    f = lambdify((z, e1, e2, e3, e4), phi0_determinant(c), 'numpy')
    rng = np.random.default_rng(seed)
    offending = []
    worst = 0.0
    taken = 0
    while taken < samples:
        w = rng.uniform(0.5, 3.0) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        if abs(np.cos(w)) < 0.1 or abs(np.cosh(w)) < 0.1:
            continue
        taken += 1
        expected = 16j * w ** 6 * np.cos(w) * np.cosh(w)
        got = complex(f(w, np.exp(-w), np.exp(1j * w), np.exp(-1j * w), np.exp(w)))
        err = abs(got - expected) / abs(expected)
        worst = max(worst, err)
        if err > rtol:
            offending.append((taken, 0, 'z=%.6g%+.6gj' % (w.real, w.imag)))
    return IdentityReport(name='det_phi0', passed=not offending, offending=offending,
                          detail='max relative error %.3e over %d points' % (worst, samples))


def verify_t_powers(c: BirkhoffConstants = None) -> IdentityReport:
    '''T^4 = I and T^3 = T^{-1}'''
    c = c or load_constants()
    eye = DomainMatrix.eye(4, QQ_I)
    T3 = c.T * c.T * c.T
    return _report('t_powers', {'T^4': T3 * c.T - eye, 'T^3 T': c.T * T3 - eye})


def verify_f1_offdiagonal(c: BirkhoffConstants = None) -> IdentityReport:
    '''F1 = -(p/4)(P + i T^3) has zero diagonal for symbolic p.'''
    c = c or load_constants()
    K = QQ_I[p]
    T3 = _lift(c.T * c.T * c.T, K)
    F1 = scaled(_lift(c.P, K) + scaled(T3, I), -p / 4)
    elements = F1.to_list()
    diagonal = DomainMatrix([[elements[i][j] if i == j else K.zero for j in range(4)] for i in range(4)], (4, 4), K)
    return _report('f1_offdiagonal', {'p': diagonal})


def trace_w1_squared(c: BirkhoffConstants = None):
    c = c or load_constants()
    return trace(c.W1 * c.W1)


def build_T(sigma: int, x: float, zv: complex, p_coef, q_coef) -> np.ndarray:
    '''
    Diagonal of T_sigma(x, z):
      T1 = T2 = T + (p/4z^2) T^3
      T3 = T1 - (q/4z^4) T + (p^2/32z^4) T
      T4 = T3 + (q'/4z^5) T + (i p p'/64z^5)(-3 I + 4i T)
    '''
    if sigma not in (1, 2, 3, 4):
        raise ValueError('Reduction order sigma must be 1..4, got %s' % str(sigma))
    if zv == 0:
        raise ValueError('T_sigma is defined for z != 0')
    t = np.array([1j, 1, -1, -1j])
    pv = p_coef.eval(x)
    out = t + pv / (4 * zv ** 2) * t ** 3
    if sigma >= 3:
        qv = q_coef.eval(x)
        out = out - qv / (4 * zv ** 4) * t + pv ** 2 / (32 * zv ** 4) * t
    if sigma == 4:
        dq, dp = q_coef.eval(x, 1), p_coef.eval(x, 1)
        out = out + dq / (4 * zv ** 5) * t + 1j * pv * dp / (64 * zv ** 5) * (-3 + 4j * t)
    return out


def run_identity_suite(c: BirkhoffConstants = None) -> List[IdentityReport]:
    c = c or load_constants()
    reports = [check_w1_first(c), check_w1_second(c), verify_w2_identity(c), verify_w3_identity(c),
               verify_q4_combination(c), verify_conjugation_identity(c), _check_det_omega(c), verify_det_phi0(c),
               verify_t_powers(c), verify_f1_offdiagonal(c)]
    for r in reports:
        logger.info(f"{r.name:16s} {'pass' if r.passed else 'FAIL'} {r.detail}")
    return reports
