from fractions import Fraction

import numpy as np
import pytest
from sympy import QQ

from tame_monodromy.cyclotomic_polys import IntPoly
from tame_monodromy.exact_linalg import (
    CycloElem,
    CycloMatrix,
    Subspace,
    cyclotomic_domain,
    generalized_eigenspace,
    is_nilpotent,
    jordan_chevalley,
    jordan_profile,
    mat_charpoly,
    mat_rank,
    root_element,
    root_of_unity,
    wedge_matrix,
)
from tame_monodromy.exceptions import ParseError, RejectedInput, UncoveredSpectrumError
from tame_monodromy.jordan_calc import JordanSpec, materialize
from tame_monodromy.rational_circle import ZERO, QZElem
from tame_monodromy.verify import random_conjugator

HALF = QZElem(1, 2)


def test_domains():
    assert cyclotomic_domain(1) == QQ
    assert cyclotomic_domain(2) == QQ
    assert cyclotomic_domain(4) != QQ
    with pytest.raises(RejectedInput):
        cyclotomic_domain(0)


def test_roots_of_unity():
    assert root_element(HALF, 2) == QQ(-1)
    assert root_element(ZERO, 1) == QQ(1)
    assert root_of_unity(QZElem(1, 4), 4).residue == (Fraction(0), Fraction(1))
    assert root_of_unity(HALF, 4).residue == (Fraction(-1), Fraction(0))
    assert root_of_unity(ZERO, 6).residue == (Fraction(1), Fraction(0))
    with pytest.raises(RejectedInput):
        root_element(QZElem(1, 3), 4)


def test_roots_multiply():
    K = cyclotomic_domain(12)
    product = root_element(QZElem(1, 4), 12) * root_element(QZElem(1, 3), 12)
    assert product == root_element(QZElem(7, 12), 12)
    assert root_element(QZElem(1, 12), 12) ** 12 == K.one


def test_cyclo_elem_length():
    with pytest.raises(RejectedInput):
        CycloElem(4, (1,))


def test_matrix_arithmetic():
    A = CycloMatrix.from_rows([[1, 2], [3, 4]], 1)
    identity = CycloMatrix.identity(2, 1)
    assert A @ identity == A
    assert A.inv() @ A == identity
    assert A - A == CycloMatrix.zeros(2, 2, 1)
    assert (A * 2) == A + A
    assert A ** 0 == identity
    assert A ** 2 == A @ A
    assert A.transpose().entry(0, 1).residue == (Fraction(3),)


def test_singular_inverse():
    with pytest.raises(RejectedInput):
        CycloMatrix.from_rows([[1, 2], [2, 4]], 1).inv()


def test_conductor_mismatch():
    with pytest.raises(RejectedInput):
        CycloMatrix.identity(2, 1) + CycloMatrix.identity(2, 3)


def test_block_diag_and_kron():
    A = CycloMatrix.from_rows([[1, 2], [3, 4]], 1)
    B = CycloMatrix.from_rows([[5]], 1)
    D = CycloMatrix.block_diag([A, B], 1)
    assert D == CycloMatrix.from_rows([[1, 2, 0], [3, 4, 0], [0, 0, 5]], 1)

    K = A.kron(CycloMatrix.identity(2, 1))
    assert K.shape == (4, 4)
    assert [K.entry(0, j).residue[0] for j in range(4)] == [1, 0, 2, 0]


def test_json_round_trip():
    M = CycloMatrix.from_rows([[root_element(QZElem(1, 3), 3), 0], [Fraction(1, 2), 1]], 3)
    data = M.to_json()
    assert data['rows'][0][0] == ['0', '1']
    assert data['rows'][1][0] == ['1/2', '0']
    assert CycloMatrix.from_json(data) == M


@pytest.mark.parametrize('data', [
    {'N': 4, 'rows': [[['1']]]},
    {'N': 0, 'rows': [[['1']]]},
    {'N': 1, 'rows': []},
    {'N': 1, 'rows': [[['1/0']]]},
    {'N': 1, 'rows': [[['1']], [['1'], ['2']]]},
    {'rows': [[['1']]]},
])
def test_from_json_rejects(data):
    with pytest.raises(ParseError):
        CycloMatrix.from_json(data)


def test_charpoly():
    rotation = CycloMatrix.from_rows([[0, -1], [1, 0]], 1)
    assert mat_charpoly(rotation) == IntPoly((1, 0, 1))

    spec = JordanSpec(((QZElem(1, 3), 1, 1), (QZElem(2, 3), 1, 1), (ZERO, 2, 1)))
    assert mat_charpoly(materialize(spec, 3)) == IntPoly((1, 1, 1)) * IntPoly((1, -2, 1))

    with pytest.raises(RejectedInput):
        mat_charpoly(CycloMatrix.from_rows([[root_element(QZElem(1, 4), 4)]], 4))


def test_wedge_matrix():
    M = CycloMatrix.from_rows([[1, 0, 0], [0, 2, 0], [0, 0, 3]], 1)
    assert wedge_matrix(M, 1) == M
    assert wedge_matrix(M, 2) == CycloMatrix.from_rows([[2, 0, 0], [0, 3, 0], [0, 0, 6]], 1)

    A = CycloMatrix.from_rows([[2, 1, 0], [1, 3, 1], [0, 1, 4]], 1)
    assert wedge_matrix(A, 3) == CycloMatrix.from_rows([[18]], 1)
    for j in (0, 4):
        with pytest.raises(RejectedInput):
            wedge_matrix(A, j)


def test_wedge_is_multiplicative():
    rng = np.random.default_rng(3)
    A = random_conjugator(rng, 4, 1)
    B = random_conjugator(rng, 4, 1)
    assert wedge_matrix(A @ B, 2) == wedge_matrix(A, 2) @ wedge_matrix(B, 2)


def _random_elem(rng, N, nonzero=False):
    phi = len(root_of_unity(ZERO, N).residue)
    while True:
        a = CycloElem(N, tuple(int(rng.integers(-3, 4)) for _ in range(phi)))
        if not (nonzero and a.is_zero()):
            return a


def _random_matrix(rng, rows, cols, N):
    return CycloMatrix.from_rows([[_random_elem(rng, N) for _ in range(cols)] for _ in range(rows)], N)


def test_nonzero_elements_are_invertible():
    rng = np.random.default_rng(12)
    one = CycloMatrix.identity(1, 12)
    for _ in range(20):
        a = CycloMatrix.from_rows([[_random_elem(rng, 12, nonzero=True)]], 12)
        assert a @ a.inv() == one
        assert a.inv() @ a == one


def test_rank_nullity():
    rng = np.random.default_rng(21)
    for inner in (1, 2, 3, 5):
        M = _random_matrix(rng, 4, inner, 12) @ _random_matrix(rng, inner, 5, 12)
        assert mat_rank(M) <= inner
        assert mat_rank(M) + Subspace.kernel(M).dim == M.cols


@pytest.mark.parametrize('j', [1, 2, 3])
def test_wedge_is_functorial_over_cyclotomic_field(j):
    rng = np.random.default_rng(40 + j)
    A, B = _random_matrix(rng, 4, 4, 12), _random_matrix(rng, 4, 4, 12)
    assert wedge_matrix(A @ B, j) == wedge_matrix(A, j) @ wedge_matrix(B, j)


def test_jordan_profile():
    spec = JordanSpec(((ZERO, 3, 1), (ZERO, 1, 1), (HALF, 2, 1)))
    M = materialize(spec, 2)
    profile = jordan_profile(M, [ZERO, HALF])
    assert profile.as_dict() == {ZERO: {1: 1, 3: 1}, HALF: {2: 1}}
    assert profile.max_blocks() == {ZERO: 3, HALF: 2}
    assert profile.dimension == 6
    assert profile.to_json() == {'0': {'1': 1, '3': 1}, '1/2': {'2': 1}}


def test_jordan_profile_is_conjugation_invariant():
    rng = np.random.default_rng(7)
    spec = JordanSpec(((QZElem(1, 4), 2, 1), (QZElem(3, 4), 1, 1), (HALF, 1, 1)))
    J = materialize(spec, 4)
    S = random_conjugator(rng, 4, 4)
    assert jordan_profile(S @ J @ S.inv(), spec.exponents()) == jordan_profile(J, spec.exponents())


def test_uncovered_spectrum():
    M = materialize(JordanSpec(((ZERO, 1, 1), (HALF, 1, 2))), 2)
    with pytest.raises(UncoveredSpectrumError) as info:
        jordan_profile(M, [ZERO])
    assert (info.value.covered, info.value.dimension) == (1, 3)

    with pytest.raises(UncoveredSpectrumError):
        jordan_chevalley(M, [HALF])


def test_jordan_chevalley():
    rng = np.random.default_rng(11)
    spec = JordanSpec(((QZElem(1, 3), 2, 1), (ZERO, 2, 1), (QZElem(2, 3), 1, 1)))
    S = random_conjugator(rng, 5, 3)
    M = S @ materialize(spec, 3) @ S.inv()

    semisimple, nilpotent = jordan_chevalley(M, spec.exponents())
    assert semisimple + nilpotent == M
    assert semisimple @ nilpotent == nilpotent @ semisimple
    assert is_nilpotent(nilpotent)
    assert mat_rank(nilpotent) == 2
    assert jordan_profile(semisimple, spec.exponents()).max_blocks() == {
        ZERO: 1, QZElem(1, 3): 1, QZElem(2, 3): 1
    }


def test_generalized_eigenspace():
    M = materialize(JordanSpec(((ZERO, 3, 1), (HALF, 2, 1))), 2)
    assert generalized_eigenspace(M, ZERO).dim == 3
    assert generalized_eigenspace(M, HALF).dim == 2
    assert generalized_eigenspace(M, ZERO) == Subspace.span(
        [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]], 5, 2
    )


def test_subspaces():
    e = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    xy = Subspace.span([e[0], e[1]], 3, 1)
    yz = Subspace.span([e[1], e[2]], 3, 1)

    assert xy.intersect(yz) == Subspace.span([e[1]], 3, 1)
    assert (xy + yz) == Subspace.full(3, 1)
    assert xy.contains(Subspace.span([[1, 1, 0]], 3, 1))
    assert not xy.contains_vector([0, 0, 1])
    assert xy.annihilator() == Subspace.span([e[2]], 3, 1)
    assert Subspace.zero(3, 1).annihilator() == Subspace.full(3, 1)
    assert Subspace.span([[2, 2, 0], [1, 1, 0]], 3, 1).dim == 1


def test_kernel_and_image():
    M = CycloMatrix.from_rows([[1, 1], [2, 2]], 1)
    assert Subspace.kernel(M) == Subspace.span([[1, -1]], 2, 1)
    assert Subspace.image(M) == Subspace.span([[1, 2]], 2, 1)
    assert Subspace.kernel(CycloMatrix.identity(2, 1)).dim == 0


def test_apply_and_extend():
    N = CycloMatrix.from_rows([[0, 0], [1, 0]], 1)
    assert Subspace.full(2, 1).apply(N) == Subspace.span([[0, 1]], 2, 1)

    line = Subspace.span([[0, 1]], 2, 1)
    extra = line.extend_within(Subspace.full(2, 1))
    assert len(extra) == 1
    assert (line + Subspace.span(extra, 2, 1)).dim == 2
    assert line.extend_within(line) == []
