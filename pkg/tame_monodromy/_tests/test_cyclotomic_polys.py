import numpy as np
import pytest

from tame_monodromy.cyclotomic_polys import IntPoly, cyclotomic, factor_cyclotomic, q_poly
from tame_monodromy.exceptions import NotCyclotomicError, ParseError, RejectedInput
from tame_monodromy.rational_circle import MultFunc, complete_function, norm


@pytest.mark.parametrize('d, coefficients', [
    (1, (-1, 1)),
    (2, (1, 1)),
    (3, (1, 1, 1)),
    (4, (1, 0, 1)),
    (6, (1, -1, 1)),
    (12, (1, 0, -1, 0, 1)),
])
def test_cyclotomic(d, coefficients):
    assert cyclotomic(d).coefficients == coefficients


def test_intpoly_normalizes():
    P = IntPoly((1, 2, 0, 0))
    assert P.coefficients == (1, 2)
    assert P.degree == 1
    assert IntPoly().degree == -1
    assert IntPoly().is_zero()
    assert (IntPoly((-1, 1)) ** 2).coefficients == (1, -2, 1)
    assert (IntPoly((1, 1)) * IntPoly((-1, 1))).coefficients == (-1, 0, 1)


def test_intpoly_json():
    assert IntPoly.from_json(['1', '0', '1']) == IntPoly((1, 0, 1))
    assert IntPoly((-2, 0, 1)).to_json() == ['-2', '0', '1']


@pytest.mark.parametrize('data', [['1', '0'], [1, 0, 1], ['01'], ['1.5'], '1 0 1'])
def test_intpoly_from_json_rejects(data):
    with pytest.raises(ParseError):
        IntPoly.from_json(data)


@pytest.mark.parametrize('entries, coefficients', [
    ({'0': 2}, (1, -2, 1)),
    ({'1/4': 1, '3/4': 1}, (1, 0, 1)),
    ({'0': 2, '1/2': 2}, (1, 0, -2, 0, 1)),
    ({}, (1,)),
])
def test_q_poly(entries, coefficients):
    assert q_poly(MultFunc(entries)).coefficients == coefficients


def test_q_poly_rejects_incomplete():
    with pytest.raises(RejectedInput):
        q_poly(MultFunc({'1/3': 1}))


@pytest.mark.parametrize('coefficients, factors', [
    ((1, 0, 1), {4: 1}),
    ((1, 0, -2, 0, 1), {1: 2, 2: 2}),
    ((1,), {}),
    ((1, 0, -1, 0, 1), {12: 1}),
])
def test_factor_cyclotomic(coefficients, factors):
    result = factor_cyclotomic(IntPoly(coefficients))
    assert result.as_dict() == factors
    assert result.degree == len(coefficients) - 1


def test_factor_cyclotomic_residual():
    with pytest.raises(NotCyclotomicError) as info:
        factor_cyclotomic(IntPoly((-2, 0, 1)) * cyclotomic(3))
    assert info.value.residual == IntPoly((-2, 0, 1))


def test_factor_cyclotomic_rejects():
    with pytest.raises(RejectedInput):
        factor_cyclotomic(IntPoly((1, 2)))
    with pytest.raises(RejectedInput):
        factor_cyclotomic(IntPoly())


def test_complete_functions_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(30):
        orders = rng.choice(np.arange(1, 31), size=int(rng.integers(1, 4)), replace=False)
        f = complete_function({int(d): int(rng.integers(1, 3)) for d in orders})
        P = q_poly(f)
        assert P.degree == norm(f)
        assert factor_cyclotomic(P).to_multfunc() == f
