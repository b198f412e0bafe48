r"""
Integer polynomials, cyclotomic polynomials and the correspondence between
complete multiplicity functions and products of cyclotomic polynomials.
"""
import logging
import re
from dataclasses import dataclass
from functools import lru_cache

from sympy import Poly, ZZ, cyclotomic_poly, symbols, totient

from tame_monodromy.exceptions import NotCyclotomicError, ParseError, RejectedInput
from tame_monodromy.rational_circle import complete_function, elements_of_order, is_complete

__all__ = [
    'IntPoly',
    'CycloFactorization',
    'cyclotomic',
    'q_poly',
    'factor_cyclotomic',
    'charpoly_from_exponents',
]

logger = logging.getLogger(__name__)

t = symbols('t')

_INT_PATTERN = re.compile(r'^-?(?:0|[1-9][0-9]*)$')


@dataclass(frozen=True)
class IntPoly:
    r"""Polynomial in Z[t]; coefficients ascending, no trailing zeros."""
    coefficients: tuple = ()

    def __post_init__(self):
        coeffs = [int(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coefficients', tuple(coeffs))

    @classmethod
    def from_poly(cls, poly):
        poly = Poly(poly, t, domain=ZZ)
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    @property
    def poly(self):
        return Poly(list(reversed(self.coefficients)) or [0], t, domain=ZZ)

    @property
    def degree(self):
        return len(self.coefficients) - 1 if self.coefficients else -1

    def is_zero(self):
        return not self.coefficients

    def is_monic(self):
        return bool(self.coefficients) and self.coefficients[-1] == 1

    def __mul__(self, other):
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly.from_poly(self.poly * other.poly)

    def __str__(self):
        return str(self.poly.as_expr())

    def to_json(self):
        return [str(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list) or not all(isinstance(c, str) and _INT_PATTERN.match(c) for c in data):
            raise ParseError('integer polynomial must be an array of decimal strings')
        if data and int(data[-1]) == 0:
            raise ParseError('integer polynomial has a zero leading coefficient')
        return cls(tuple(int(c) for c in data))


@dataclass(frozen=True)
class CycloFactorization:
    r"""Exponents of Phi_d in a product of cyclotomic polynomials, sorted by d."""
    factors: tuple = ()

    def __post_init__(self):
        factors = dict(self.factors)
        assert all(m > 0 for m in factors.values()), f'non-positive multiplicity in {factors}'
        object.__setattr__(self, 'factors', tuple(sorted(factors.items())))

    def as_dict(self):
        return dict(self.factors)

    @property
    def degree(self):
        return sum(int(totient(d)) * m for d, m in self.factors)

    def to_multfunc(self):
        r"""The complete multiplicity function f with Q_f = this product."""
        return complete_function(self.as_dict())

    def to_json(self):
        return {str(d): m for d, m in self.factors}


@lru_cache(maxsize=None)
def cyclotomic(d):
    r"""The d-th cyclotomic polynomial Phi_d."""
    if d < 1:
        raise RejectedInput(f'cyclotomic index must be positive, got {d}')
    return IntPoly.from_poly(cyclotomic_poly(d, t, polys=True))


def q_poly(f):
    r"""
    Product of Phi_d^{c_d} where c_d is the common value of the complete
    function f on the elements of order d.
    """
    if not is_complete(f):
        raise RejectedInput(f'{f!r} is not complete')

    result = Poly(1, t, domain=ZZ)
    for d in f.orders():
        c = f[elements_of_order(d)[0]]
        result = result * cyclotomic(d).poly ** c
    return IntPoly.from_poly(result)


charpoly_from_exponents = q_poly


def _max_index(degree):
    # phi(d) >= sqrt(d) for d > 6
    return max(degree * degree, 6)


def factor_cyclotomic(P):
    r"""
    Exponents of the cyclotomic factors of a monic integer polynomial, by
    trial division in increasing d. Raises NotCyclotomicError with the
    leftover factor when P is not a product of cyclotomic polynomials.
    """
    if P.is_zero():
        raise RejectedInput('cannot factor the zero polynomial')
    if not P.is_monic():
        raise RejectedInput(f'{P} is not monic')

    residual = P.poly
    factors = {}
    for d in range(1, _max_index(P.degree) + 1):
        remaining = residual.degree()
        if remaining == 0:
            break

        if totient(d) > remaining:
            continue

        phi = cyclotomic(d).poly
        while residual.degree() >= phi.degree():
            q, r = residual.div(phi)
            if not r.is_zero:
                break
            residual = q
            factors[d] = factors.get(d, 0) + 1

    if residual.degree() > 0:
        logger.debug(f'non-cyclotomic residual {residual.as_expr()} of {P}')
        raise NotCyclotomicError(
            f'{P} is not a product of cyclotomic polynomials; residual {residual.as_expr()}',
            residual=IntPoly.from_poly(residual)
        )

    result = CycloFactorization(tuple(factors.items()))
    assert result.degree == P.degree, f'factor degrees sum to {result.degree}, expected {P.degree}'
    return result
