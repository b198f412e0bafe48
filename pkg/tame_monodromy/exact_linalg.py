r"""
Exact linear algebra over the cyclotomic field Q(zeta_N).

Matrices are thin wrappers around sympy's ``DomainMatrix`` over
``QQ.cyclotomic_field(N)`` (or ``QQ`` when phi(N) = 1). All computations
are exact; one conductor N is fixed per computation.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from sympy import QQ, totient
from sympy.polys.matrices import DomainMatrix

from tame_monodromy.cyclotomic_polys import IntPoly
from tame_monodromy.exceptions import ParseError, RejectedInput, UncoveredSpectrumError

__all__ = [
    'CycloElem',
    'CycloMatrix',
    'JordanProfile',
    'Subspace',
    'cyclotomic_domain',
    'root_of_unity',
    'root_element',
    'mat_rank',
    'wedge_matrix',
    'jordan_profile',
    'jordan_chevalley',
    'generalized_eigenspace',
    'is_nilpotent',
    'mat_charpoly',
]

logger = logging.getLogger(__name__)

_RATIONAL_PATTERN = re.compile(r'^-?(?:0|[1-9][0-9]*)(?:/[1-9][0-9]*)?$')


@lru_cache(maxsize=None)
def cyclotomic_domain(N):
    r"""The field Q(zeta_N) as a sympy domain."""
    if N < 1:
        raise RejectedInput(f'conductor must be positive, got {N}')
    if totient(N) == 1:
        return QQ
    return QQ.cyclotomic_field(N)


def _phi(N):
    return int(totient(N))


def _qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _fraction(q):
    return Fraction(int(QQ.numer(q)), int(QQ.denom(q)))


def _domain_coeffs(a, N):
    # ascending coefficients in zeta_N of a domain element
    K = cyclotomic_domain(N)
    if K is QQ:
        return [_fraction(a)]

    coeffs = [_fraction(c) for c in reversed(a.to_list())]
    return coeffs + [Fraction(0)] * (_phi(N) - len(coeffs))


def _to_domain(value, N):
    K = cyclotomic_domain(N)
    if isinstance(value, CycloElem):
        if value.N != N:
            raise RejectedInput(f'entry over Q(zeta_{value.N}) used in a matrix over Q(zeta_{N})')
        return value.to_domain()
    if isinstance(value, (int, Fraction)):
        q = _qq(value)
        return q if K is QQ else K([q])
    if K.of_type(value):
        return value
    raise RejectedInput(f'cannot convert {value!r} into Q(zeta_{N})')


@dataclass(frozen=True)
class CycloElem:
    r"""Element of Q(zeta_N) as a residue modulo Phi_N, ascending powers of zeta_N."""
    N: int
    residue: tuple

    def __post_init__(self):
        residue = tuple(Fraction(r) for r in self.residue)
        if len(residue) != _phi(self.N):
            raise RejectedInput(
                f'residue over Q(zeta_{self.N}) needs {_phi(self.N)} coefficients, got {len(residue)}'
            )
        object.__setattr__(self, 'residue', residue)

    def to_domain(self):
        K = cyclotomic_domain(self.N)
        if K is QQ:
            return _qq(self.residue[0])
        return K([_qq(r) for r in reversed(self.residue)])

    @classmethod
    def from_domain(cls, a, N):
        return cls(N, tuple(_domain_coeffs(a, N)))

    def is_zero(self):
        return not any(self.residue)

    def to_json(self):
        return [str(r) for r in self.residue]


def root_element(x, N):
    if N % x.order:
        raise RejectedInput(f'order of {x} does not divide the conductor {N}')

    k = x.numerator * (N // x.order) % N
    K = cyclotomic_domain(N)
    if K is QQ:
        # N is 1 or 2
        return QQ(-1) if k % 2 else QQ(1)
    return K.unit ** k


def root_of_unity(x, N):
    r"""zeta_N^(x*N) = exp(2 pi i x) as a residue."""
    return CycloElem.from_domain(root_element(x, N), N)


class CycloMatrix:
    r"""
    Dense matrix over Q(zeta_N).

    Wraps a sympy ``DomainMatrix``; ``@`` is the matrix product, ``*`` takes
    a scalar. Instances are never mutated.
    """

    __slots__ = ('N', 'dm')

    def __init__(self, N, dm):
        K = cyclotomic_domain(N)
        if dm.domain != K:
            raise RejectedInput(f'matrix domain {dm.domain} is not Q(zeta_{N})')
        self.N = N
        self.dm = dm.to_dense()

    @classmethod
    def from_rows(cls, rows, N):
        K = cyclotomic_domain(N)
        rows = [[_to_domain(v, N) for v in row] for row in rows]
        if not rows or not rows[0]:
            raise RejectedInput('matrix must have at least one row and column')
        if any(len(row) != len(rows[0]) for row in rows):
            raise RejectedInput('matrix rows have different lengths')
        return cls(N, DomainMatrix(rows, (len(rows), len(rows[0])), K))

    @classmethod
    def identity(cls, n, N):
        return cls(N, DomainMatrix.eye(n, cyclotomic_domain(N)))

    @classmethod
    def zeros(cls, rows, cols, N):
        return cls(N, DomainMatrix.zeros((rows, cols), cyclotomic_domain(N)))

    @classmethod
    def block_diag(cls, blocks, N):
        blocks = [b for b in blocks]
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        K = cyclotomic_domain(N)
        rows = [[K.zero] * m for _ in range(n)]

        r0 = c0 = 0
        for b in blocks:
            if b.N != N:
                raise RejectedInput(f'block over Q(zeta_{b.N}) in a matrix over Q(zeta_{N})')
            for i, row in enumerate(b.dm.to_list()):
                rows[r0 + i][c0:c0 + b.cols] = row
            r0 += b.rows
            c0 += b.cols
        return cls(N, DomainMatrix(rows, (n, m), K))

    @property
    def shape(self):
        return self.dm.shape

    @property
    def rows(self):
        return self.dm.shape[0]

    @property
    def cols(self):
        return self.dm.shape[1]

    @property
    def domain(self):
        return self.dm.domain

    def entry(self, i, j):
        return CycloElem.from_domain(self.dm.to_list()[i][j], self.N)

    def _check(self, other):
        if not isinstance(other, CycloMatrix):
            raise RejectedInput(f'expected a CycloMatrix, got {type(other).__name__}')
        if other.N != self.N:
            raise RejectedInput(f'conductor mismatch: {self.N} and {other.N}')

    def __add__(self, other):
        self._check(other)
        return CycloMatrix(self.N, self.dm + other.dm)

    def __sub__(self, other):
        self._check(other)
        return CycloMatrix(self.N, self.dm - other.dm)

    def __neg__(self):
        return CycloMatrix(self.N, -self.dm)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise RejectedInput(f'cannot multiply {self.shape} by {other.shape}')
        return CycloMatrix(self.N, self.dm * other.dm)

    def __mul__(self, scalar):
        return CycloMatrix(self.N, self.dm.scalarmul(_to_domain(scalar, self.N)))

    __rmul__ = __mul__

    def __pow__(self, n):
        if self.rows != self.cols:
            raise RejectedInput('only square matrices have powers')
        if n == 0:
            return CycloMatrix.identity(self.rows, self.N)
        return CycloMatrix(self.N, self.dm ** n)

    def __eq__(self, other):
        if not isinstance(other, CycloMatrix):
            return NotImplemented
        return self.N == other.N and self.shape == other.shape and self.dm.to_list() == other.dm.to_list()

    def __hash__(self):
        return hash((self.N, self.shape))

    def __repr__(self):
        return f'CycloMatrix(N={self.N}, shape={self.shape})'

    def __reduce__(self):
        return (CycloMatrix.from_json, (self.to_json(),))

    def is_zero(self):
        return self.dm.is_zero_matrix

    def transpose(self):
        return CycloMatrix(self.N, self.dm.transpose())

    def inv(self):
        if self.rows != self.cols or mat_rank(self) < self.rows:
            raise RejectedInput('matrix is not invertible')
        return CycloMatrix(self.N, self.dm.inv())

    def kron(self, other):
        r"""Kronecker product; basis e_i (x) f_k is index i*other.rows + k."""
        self._check(other)
        K = self.domain
        a, b = self.dm.to_list(), other.dm.to_list()
        rows = []
        for i in range(self.rows):
            for k in range(other.rows):
                rows.append([a[i][j] * b[k][l] for j in range(self.cols) for l in range(other.cols)])
        return CycloMatrix(self.N, DomainMatrix(rows, (self.rows * other.rows, self.cols * other.cols), K))

    def to_json(self):
        return {
            'N': self.N,
            'rows': [[CycloElem.from_domain(a, self.N).to_json() for a in row] for row in self.dm.to_list()],
        }

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or set(data) != {'N', 'rows'}:
            raise ParseError('matrix must be an object with keys "N" and "rows"')

        N, rows = data['N'], data['rows']
        if isinstance(N, bool) or not isinstance(N, int) or N < 1:
            raise ParseError(f'"N" must be a positive integer, got {N!r}')
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and r for r in rows):
            raise ParseError('"rows" must be a non-empty array of non-empty arrays')

        phi = _phi(N)
        parsed = []
        for row in rows:
            parsed_row = []
            for entry in row:
                if not isinstance(entry, list) or len(entry) != phi:
                    raise ParseError(f'each entry must be an array of {phi} rational strings')
                if not all(isinstance(c, str) and _RATIONAL_PATTERN.match(c) for c in entry):
                    raise ParseError(f'malformed rational in entry {entry!r}')
                parsed_row.append(CycloElem(N, tuple(Fraction(c) for c in entry)))
            parsed.append(parsed_row)

        try:
            return cls.from_rows(parsed, N)
        except RejectedInput as err:
            raise ParseError(str(err))


def mat_rank(M):
    return M.dm.rank()


def is_nilpotent(M):
    return (M ** M.rows).is_zero()


def mat_charpoly(M):
    r"""Characteristic polynomial of M, whose coefficients must be rational integers."""
    coeffs = []
    for c in M.dm.charpoly():
        residue = _domain_coeffs(c, M.N)
        if any(residue[1:]) or residue[0].denominator != 1:
            raise RejectedInput(f'characteristic polynomial coefficient {residue} is not an integer')
        coeffs.append(int(residue[0]))
    return IntPoly(tuple(reversed(coeffs)))


def wedge_matrix(M, j):
    r"""
    Matrix of M on the j-th exterior power.

    The basis is e_I for index subsets I in lexicographic order; the (I, J)
    entry is the minor det M[I, J].
    """
    n = M.rows
    if M.rows != M.cols:
        raise RejectedInput('exterior powers need a square matrix')
    if not 1 <= j <= n:
        raise RejectedInput(f'exterior power degree must be in [1, {n}], got {j}')
    if j == 1:
        return M

    subsets = list(combinations(range(n), j))
    rows = [[M.dm.extract(list(I), list(J)).det() for J in subsets] for I in subsets]
    logger.debug(f'wedge power {j} of a {n}x{n} matrix has dimension {len(subsets)}')
    return CycloMatrix(M.N, DomainMatrix(rows, (len(subsets), len(subsets)), M.domain))


@dataclass(frozen=True)
class JordanProfile:
    r"""Jordan block counts per eigenvalue exponent: ((x, ((size, count), ...)), ...)."""
    blocks: tuple = ()

    @classmethod
    def from_dict(cls, blocks):
        cleaned = []
        for x in sorted(blocks):
            sizes = tuple(sorted((s, c) for s, c in blocks[x].items() if c))
            assert all(c > 0 for _, c in sizes), f'negative block count at {x}: {sizes}'
            if sizes:
                cleaned.append((x, sizes))
        return cls(tuple(cleaned))

    def as_dict(self):
        return {x: dict(sizes) for x, sizes in self.blocks}

    @property
    def dimension(self):
        return sum(s * c for _, sizes in self.blocks for s, c in sizes)

    def max_blocks(self):
        return {x: max(s for s, _ in sizes) for x, sizes in self.blocks}

    def to_json(self):
        return {str(x): {str(s): c for s, c in sizes} for x, sizes in self.blocks}


def _check_candidates(candidates, N):
    candidates = sorted(set(candidates))
    for x in candidates:
        if N % x.order:
            raise RejectedInput(f'candidate {x} has order not dividing the conductor {N}')
    return candidates


def _rank_sequence(A):
    # ranks of A^0, A^1, ... until they stabilize
    n = A.rows
    ranks = [n]
    power = A
    while True:
        r = mat_rank(power)
        if r == ranks[-1]:
            return ranks
        ranks.append(r)
        if r == 0:
            ranks.append(0)
            return ranks
        power = power @ A


def jordan_profile(M, candidates):
    r"""
    Jordan structure of M from rank sequences.

    With r_k = rank((M - lambda)^k), the number of blocks of size >= k at
    lambda is r_{k-1} - r_k. Raises UncoveredSpectrumError when the
    candidate eigenvalues do not exhaust the space.
    """
    n = M.rows
    candidates = _check_candidates(candidates, M.N)
    identity = CycloMatrix.identity(n, M.N)

    blocks = {}
    covered = 0
    for x in candidates:
        ranks = _rank_sequence(M - identity * root_element(x, M.N))
        at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
        sizes = {k: at_least[k - 1] - at_least[k] for k in range(1, len(at_least))}
        covered += ranks[0] - ranks[-1]
        if any(sizes.values()):
            blocks[x] = sizes

    if covered != n:
        raise UncoveredSpectrumError(
            f'candidate eigenvalues cover {covered} of {n} dimensions',
            covered=covered, dimension=n
        )
    return JordanProfile.from_dict(blocks)


def generalized_eigenspace(M, x):
    r"""ker((M - exp(2 pi i x))^dim) as a Subspace."""
    shifted = M - CycloMatrix.identity(M.rows, M.N) * root_element(x, M.N)

    # ker A^k stops growing exactly when it reaches ker A^dim
    power = shifted
    space = Subspace.kernel(power)
    while space.dim:
        power = power @ shifted
        larger = Subspace.kernel(power)
        if larger.dim == space.dim:
            break
        space = larger
    return space


def jordan_chevalley(M, candidates):
    r"""
    Semisimple and nilpotent parts (M_s, M_n) of a quasi-unipotent matrix.

    M_s acts as lambda on each generalized eigenspace, M_n = M - M_s.
    """
    n = M.rows
    candidates = _check_candidates(candidates, M.N)

    columns = []
    diagonal = []
    for x in candidates:
        space = generalized_eigenspace(M, x)
        lam = root_element(x, M.N)
        for vector in space.vectors():
            columns.append(vector)
            diagonal.append(lam)

    if len(columns) != n:
        raise UncoveredSpectrumError(
            f'candidate eigenvalues cover {len(columns)} of {n} dimensions',
            covered=len(columns), dimension=n
        )

    K = M.domain
    P = DomainMatrix([list(r) for r in zip(*columns)], (n, n), K)
    D = DomainMatrix.diag(diagonal, K).to_dense()
    semisimple = CycloMatrix(M.N, P * D * P.inv())
    nilpotent = M - semisimple

    assert semisimple @ nilpotent == nilpotent @ semisimple, 'M_s and M_n do not commute'
    assert is_nilpotent(nilpotent), 'M_n is not nilpotent'
    return semisimple, nilpotent


class Subspace:
    r"""
    Subspace of Q(zeta_N)^n with a canonical basis.

    The basis is the reduced row echelon form of any spanning set, so two
    subspaces are equal iff their stored bases are equal.
    """

    __slots__ = ('N', 'ambient', '_basis')

    def __init__(self, N, ambient, basis=None):
        # basis: DomainMatrix whose rows span the subspace, or None
        self.N = N
        self.ambient = ambient
        self._basis = None

        if basis is not None and basis.shape[0] > 0:
            if basis.shape[1] != ambient:
                raise RejectedInput(f'vectors of length {basis.shape[1]} in a space of dimension {ambient}')
            reduced, pivots = basis.to_dense().rref()
            if pivots:
                self._basis = reduced.extract(list(range(len(pivots))), list(range(ambient)))

    @classmethod
    def zero(cls, ambient, N):
        return cls(N, ambient)

    @classmethod
    def full(cls, ambient, N):
        return cls(N, ambient, DomainMatrix.eye(ambient, cyclotomic_domain(N)))

    @classmethod
    def span(cls, vectors, ambient, N):
        vectors = [[_to_domain(a, N) for a in v] for v in vectors]
        if not vectors:
            return cls.zero(ambient, N)
        return cls(N, ambient, DomainMatrix(vectors, (len(vectors), ambient), cyclotomic_domain(N)))

    @classmethod
    def kernel(cls, M):
        if mat_rank(M) == M.cols:
            return cls.zero(M.cols, M.N)
        return cls(M.N, M.cols, M.dm.nullspace())

    @classmethod
    def image(cls, M):
        return cls(M.N, M.rows, M.dm.transpose())

    @property
    def dim(self):
        return 0 if self._basis is None else self._basis.shape[0]

    def vectors(self):
        return [] if self._basis is None else [list(row) for row in self._basis.to_list()]

    def _check(self, other):
        if (self.N, self.ambient) != (other.N, other.ambient):
            raise RejectedInput('subspaces live in different spaces')

    def __add__(self, other):
        self._check(other)
        return Subspace.span(self.vectors() + other.vectors(), self.ambient, self.N)

    def contains(self, other):
        self._check(other)
        return (self + other).dim == self.dim

    def contains_vector(self, vector):
        return self.contains(Subspace.span([vector], self.ambient, self.N))

    def annihilator(self):
        r"""{phi : phi(v) = 0 for v in self} under the standard pairing."""
        if self._basis is None:
            return Subspace.full(self.ambient, self.N)
        return Subspace.kernel(CycloMatrix(self.N, self._basis))

    def intersect(self, other):
        self._check(other)
        return (self.annihilator() + other.annihilator()).annihilator()

    def apply(self, M):
        r"""M(self) for a matrix M acting on column vectors."""
        if M.cols != self.ambient:
            raise RejectedInput(f'cannot apply a {M.shape} matrix to a subspace of dimension {self.ambient}')
        if self._basis is None:
            return Subspace.zero(M.rows, self.N)
        return Subspace(self.N, M.rows, self._basis * M.dm.transpose())

    def extend_within(self, other):
        r"""Vectors of ``other`` completing a basis of self to a basis of self + other."""
        self._check(other)
        own, extra = self.vectors(), other.vectors()
        if not extra:
            return []

        # pivot columns pick a maximal independent subset, left to right
        stacked = DomainMatrix(own + extra, (len(own) + len(extra), self.ambient), cyclotomic_domain(self.N))
        _, pivots = stacked.transpose().rref()
        return [extra[p - len(own)] for p in pivots if p >= len(own)]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if (self.N, self.ambient, self.dim) != (other.N, other.ambient, other.dim):
            return False
        return self.dim == 0 or self._basis.to_list() == other._basis.to_list()

    def __hash__(self):
        return hash((self.N, self.ambient, self.dim))

    def __repr__(self):
        return f'Subspace(N={self.N}, dim={self.dim}, ambient={self.ambient})'
