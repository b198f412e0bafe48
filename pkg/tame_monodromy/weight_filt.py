r"""
Weight filtrations of nilpotent operators.

For a nilpotent N on V and an integer center w, the weight filtration is the
unique ascending filtration W with N W_i in W_{i-2} and
N^a : Gr_{w+a} -> Gr_{w-a} an isomorphism for every a >= 0. It is built
here from a Jordan basis: in a chain v, Nv, ..., N^{m-1}v the vector N^k v
gets weight w + m - 1 - 2k.
"""
import logging
from itertools import combinations

from tame_monodromy.exact_linalg import (
    CycloMatrix,
    Subspace,
    generalized_eigenspace,
    is_nilpotent,
    jordan_chevalley,
    wedge_matrix,
)
from tame_monodromy.exceptions import RejectedInput

__all__ = [
    'WeightFiltration',
    'weight_filtration',
    'weight_filtration_from_kernels',
    'filtration_failures',
    'amplitude',
    'graded_dims',
    'max_block_from_amplitude',
    'dual_filtration',
    'tensor_filtration',
    'wedge_filtration',
    'graded_eigen_multiplicities',
]

logger = logging.getLogger(__name__)


class WeightFiltration:
    r"""
    Ascending filtration of Q(zeta_N)^dimension with a center.

    ``lo`` is the largest index with W_lo = 0 and ``hi`` the smallest with
    W_hi = V; ``step(i)`` is valid for every integer i.
    """

    __slots__ = ('center', 'dimension', 'N', 'lo', 'hi', '_steps')

    def __init__(self, center, steps, dimension, N):
        if dimension < 1:
            raise RejectedInput('filtrations need a non-zero ambient space')
        indices = sorted(steps)
        if steps[indices[0]].dim != 0 or steps[indices[-1]].dim != dimension:
            raise RejectedInput('filtration steps must start at 0 and end at the whole space')

        self.center = center
        self.dimension = dimension
        self.N = N
        self.lo = max(i for i in indices if steps[i].dim == 0)
        self.hi = min(i for i in indices if steps[i].dim == dimension)
        self._steps = {i: steps[i] for i in indices if self.lo < i < self.hi}

    @classmethod
    def from_weighted_basis(cls, vectors, weights, center, dimension, N):
        r"""Filtration with W_i spanned by the vectors of weight <= i."""
        steps = {}
        for i in range(min(weights) - 1, max(weights) + 1):
            steps[i] = Subspace.span(
                [v for v, wt in zip(vectors, weights) if wt <= i], dimension, N
            )
        return cls(center, steps, dimension, N)

    def step(self, i):
        if i <= self.lo:
            return Subspace.zero(self.dimension, self.N)
        if i >= self.hi:
            return Subspace.full(self.dimension, self.N)
        return self._steps[i]

    def adapted_basis(self):
        r"""Pairs (vector, weight) such that W_i is spanned by the weights <= i."""
        basis = []
        for i in range(self.lo + 1, self.hi + 1):
            for v in self.step(i - 1).extend_within(self.step(i)):
                basis.append((v, i))
        return basis

    def __eq__(self, other):
        if not isinstance(other, WeightFiltration):
            return NotImplemented
        if (self.center, self.dimension, self.N, self.lo, self.hi) != \
                (other.center, other.dimension, other.N, other.lo, other.hi):
            return False
        return all(self.step(i) == other.step(i) for i in range(self.lo + 1, self.hi))

    def __hash__(self):
        return hash((self.center, self.dimension, self.N, self.lo, self.hi))

    def __repr__(self):
        return f'WeightFiltration(center={self.center}, graded_dims={graded_dims(self)})'

    def to_json(self):
        return {
            'center': self.center,
            'graded_dims': {str(i): d for i, d in graded_dims(self).items()},
        }


def _apply(M, vector):
    K = M.domain
    result = []
    for row in M.dm.to_list():
        total = K.zero
        for a, b in zip(row, vector):
            total += a * b
        result.append(total)
    return result


def _kernels(N):
    # ker N^0 = 0, ker N, ..., up to the whole space
    n = N.rows
    kernels = [Subspace.zero(n, N.N)]
    power = N
    while kernels[-1].dim < n:
        kernels.append(Subspace.kernel(power))
        power = power @ N
    return kernels


def weight_filtration(N, w):
    r"""Weight filtration of the nilpotent matrix N centered at w."""
    if N.rows != N.cols:
        raise RejectedInput('weight filtrations need a square matrix')
    if not is_nilpotent(N):
        raise RejectedInput('matrix is not nilpotent')

    n = N.rows
    kernels = _kernels(N)
    length = len(kernels) - 1

    # heads of Jordan chains, longest first
    heads = []
    for k in range(length, 0, -1):
        pushed = []
        for v, m in heads:
            u = v
            for _ in range(m - k):
                u = _apply(N, u)
            pushed.append(u)
        level = kernels[k - 1] + Subspace.span(pushed, n, N.N)
        heads += [(v, k) for v in level.extend_within(kernels[k])]

    vectors, weights = [], []
    for v, m in heads:
        u = v
        for a in range(m):
            vectors.append(u)
            weights.append(w + m - 1 - 2 * a)
            u = _apply(N, u)

    assert len(vectors) == n, f'Jordan basis has {len(vectors)} vectors in dimension {n}'
    W = WeightFiltration.from_weighted_basis(vectors, weights, w, n, N.N)

    failures = filtration_failures(W, N)
    assert not failures, f'weight filtration axioms fail: {failures}'
    logger.debug(f'weight filtration of a {n}x{n} nilpotent, center {w}: {graded_dims(W)}')
    return W


def weight_filtration_from_kernels(N, w):
    r"""
    The same filtration from the closed formula
    W_{w+k} = sum over i - j = k of ker N^{i+1} cap im N^j.
    """
    if not is_nilpotent(N):
        raise RejectedInput('matrix is not nilpotent')

    n = N.rows
    kernels = _kernels(N)
    length = len(kernels) - 1
    images = [Subspace.full(n, N.N)]
    for j in range(1, length + 1):
        images.append(Subspace.image(N ** j))

    steps = {}
    for k in range(-length, length + 1):
        total = Subspace.zero(n, N.N)
        for j in range(0, length + 1):
            i = j + k
            if i < 0:
                continue
            kernel = kernels[min(i + 1, length)]
            total = total + kernel.intersect(images[j])
        steps[w + k] = total
    return WeightFiltration(w, steps, n, N.N)


def filtration_failures(W, N):
    r"""Defining conditions of the weight filtration of N that W violates."""
    failures = []
    for i in range(W.lo + 1, W.hi + 2):
        if not W.step(i - 2).contains(W.step(i).apply(N)):
            failures.append(f'N W_{i} not in W_{i - 2}')

    dims = graded_dims(W)
    power = CycloMatrix.identity(W.dimension, W.N)
    for a in range(0, max(W.hi - W.center, W.center - W.lo) + 1):
        if a:
            power = power @ N
        top, bottom = W.center + a, W.center - a
        if dims.get(top, 0) != dims.get(bottom, 0):
            failures.append(f'dim Gr_{top} != dim Gr_{bottom}')
            continue
        onto = W.step(top).apply(power) + W.step(bottom - 1)
        if not onto.contains(W.step(bottom)):
            failures.append(f'N^{a} does not map Gr_{top} onto Gr_{bottom}')
    return failures


def amplitude(W):
    r"""Smallest n >= 0 with W_{w+n} = V."""
    return max(0, W.hi - W.center)


def graded_dims(W):
    dims = {}
    for i in range(W.lo + 1, W.hi + 1):
        d = W.step(i).dim - W.step(i - 1).dim
        if d:
            dims[i] = d
    return dims


def max_block_from_amplitude(M, candidates):
    r"""Largest Jordan block of M, read off as amplitude + 1."""
    _, nilpotent = jordan_chevalley(M, candidates)
    return amplitude(weight_filtration(nilpotent, 0)) + 1


def dual_filtration(W):
    r"""(W^v)_i = annihilator of W_{-i-1}, centered at -w."""
    steps = {i: W.step(-i - 1).annihilator() for i in range(-W.hi - 1, -W.lo)}
    return WeightFiltration(-W.center, steps, W.dimension, W.N)


def tensor_filtration(W, V):
    r"""(W (x) V)_i = sum over i1 + i2 = i of W_i1 (x) V_i2, centered at w + w'."""
    if W.N != V.N:
        raise RejectedInput(f'conductor mismatch: {W.N} and {V.N}')

    vectors, weights = [], []
    right = V.adapted_basis()
    for v, a in W.adapted_basis():
        for u, b in right:
            vectors.append([x * y for x in v for y in u])
            weights.append(a + b)
    return WeightFiltration.from_weighted_basis(
        vectors, weights, W.center + V.center, W.dimension * V.dimension, W.N
    )


def wedge_filtration(W, j):
    r"""(Lambda^j W)_i = sum over i1 + ... + ij = i of W_i1 ^ ... ^ W_ij, centered at j*w."""
    n = W.dimension
    if not 1 <= j <= n:
        raise RejectedInput(f'exterior power degree must be in [1, {n}], got {j}')

    basis = W.adapted_basis()
    P = _columns_matrix([v for v, _ in basis], W.N)
    columns = wedge_matrix(P, j).dm.transpose().to_list()
    weights = [sum(basis[k][1] for k in I) for I in combinations(range(n), j)]
    return WeightFiltration.from_weighted_basis(columns, weights, j * W.center, len(columns), W.N)


def _columns_matrix(vectors, N):
    n = len(vectors[0])
    return CycloMatrix.from_rows([[v[i] for v in vectors] for i in range(n)], N)


def graded_eigen_multiplicities(W, M, candidates):
    r"""
    Multiplicity of each eigenvalue exponent of M on each graded piece of W.

    W must be stable under the semisimple part of M, which holds when W is
    the weight filtration of the nilpotent part.
    """
    eigenspaces = [(x, generalized_eigenspace(M, x)) for x in sorted(set(candidates))]
    result = {}
    for i in range(W.lo + 1, W.hi + 1):
        below, here = W.step(i - 1), W.step(i)
        per_eigenvalue = {}
        for x, E in eigenspaces:
            if E.dim == 0:
                continue
            d = here.intersect(E).dim - below.intersect(E).dim
            if d:
                per_eigenvalue[x] = d
        if per_eigenvalue:
            result[i] = per_eigenvalue
    return result
