r"""
Symbolic Jordan calculus.

A :class:`JordanSpec` lists Jordan blocks as (exponent, size, count) with
eigenvalue exp(2 pi i exponent). Blocks use the subdiagonal convention:
Jord_n(a) has a on the diagonal and ones just below it.
"""
import logging
from dataclasses import dataclass
from math import lcm

from tame_monodromy.exact_linalg import CycloMatrix, root_element, cyclotomic_domain
from tame_monodromy.exceptions import ParseError, RejectedInput
from tame_monodromy.rational_circle import ZERO, MultFunc, QZElem

__all__ = [
    'JordanSpec',
    'jord',
    'spec_charpoly_exponents',
    'materialize',
    'wedge_max_ranks',
    'wedge_candidates',
    'single_block_wedge_amplitude',
    'spec_from_profile',
    'render_text',
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JordanSpec:
    r"""Multiset of Jordan blocks, merged on (exponent, size) and sorted."""
    blocks: tuple = ()

    def __post_init__(self):
        merged = {}
        for x, size, count in self.blocks:
            if not isinstance(x, QZElem):
                x = QZElem.parse(x) if isinstance(x, str) else QZElem.from_fraction(x)
            if size < 1 or count < 0:
                raise RejectedInput(f'invalid block ({x}, {size}, {count})')
            if count:
                merged[(x, size)] = merged.get((x, size), 0) + count
        object.__setattr__(
            self, 'blocks', tuple((x, size, c) for (x, size), c in sorted(merged.items()))
        )

    @property
    def dimension(self):
        return sum(size * count for _, size, count in self.blocks)

    def exponents(self):
        return sorted({x for x, _, _ in self.blocks})

    def conductor(self):
        r"""Smallest N with every eigenvalue in Q(zeta_N)."""
        return lcm(*[x.order for x in self.exponents()]) if self.blocks else 1

    def max_blocks(self):
        result = {}
        for x, size, _ in self.blocks:
            result[x] = max(result.get(x, 0), size)
        return result

    def count(self, x, size):
        return dict(((b[0], b[1]), b[2]) for b in self.blocks).get((x, size), 0)

    def __add__(self, other):
        if not isinstance(other, JordanSpec):
            return NotImplemented
        return JordanSpec(self.blocks + other.blocks)

    def to_json(self):
        return [{'exponent': str(x), 'size': size, 'count': count} for x, size, count in self.blocks]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list):
            raise ParseError('Jordan spec must be a JSON array')

        blocks = []
        for item in data:
            if not isinstance(item, dict) or set(item) != {'exponent', 'size', 'count'}:
                raise ParseError(f'malformed block {item!r}')
            size, count = item['size'], item['count']
            for name, value in (('size', size), ('count', count)):
                if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                    raise ParseError(f'block {name} must be a positive integer, got {value!r}')
            blocks.append((QZElem.parse(item['exponent']), size, count))
        return cls(tuple(blocks))


def jord(m1, m2):
    r"""Jord(m1, m2): size-1 blocks from m1 and size-2 blocks from m2."""
    blocks = [(x, 1, c) for x, c in m1.items()]
    blocks += [(y, 2, c) for y, c in m2.items()]
    return JordanSpec(tuple(blocks))


def spec_charpoly_exponents(s):
    r"""Algebraic multiplicity of each eigenvalue exponent."""
    result = {}
    for x, size, count in s.blocks:
        result[x] = result.get(x, 0) + size * count
    return MultFunc(result)


def materialize(s, N):
    r"""Block diagonal matrix of s over Q(zeta_N), blocks in canonical order."""
    if s.dimension == 0:
        raise RejectedInput('cannot materialize an empty Jordan spec')
    for x in s.exponents():
        if N % x.order:
            raise RejectedInput(f'exponent {x} has order not dividing the conductor {N}')

    K = cyclotomic_domain(N)
    n = s.dimension
    rows = [[K.zero] * n for _ in range(n)]
    offset = 0
    for x, size, count in s.blocks:
        lam = root_element(x, N)
        for _ in range(count):
            for k in range(size):
                rows[offset + k][offset + k] = lam
                if k:
                    rows[offset + k][offset + k - 1] = K.one
            offset += size
    return CycloMatrix.from_rows(rows, N)


def _group_profile(m, count):
    # best[t] = max sum s_i(m - s_i) over count parts 0 <= s_i <= m summing to t
    best = {0: 0}
    for _ in range(count):
        nxt = {}
        for t, value in best.items():
            for s in range(m + 1):
                cand = value + s * (m - s)
                if nxt.get(t + s, -1) < cand:
                    nxt[t + s] = cand
        best = nxt
    return best


def wedge_max_ranks(s, j):
    r"""
    Largest Jordan block of Lambda^j of s at each eigenvalue.

    A block of Lambda^j comes from a tuple (s_i) with 0 <= s_i <= m_i and
    sum s_i = j, with eigenvalue exponent sum s_i x_i and largest block
    1 + sum s_i (m_i - s_i). Exponents without such a tuple are absent.
    """
    if not 1 <= j <= s.dimension:
        raise RejectedInput(f'exterior power degree must be in [1, {s.dimension}], got {j}')

    # states: (used, exponent) -> best sum
    states = {(0, ZERO): 0}
    for x, size, count in s.blocks:
        profile = _group_profile(size, count)
        nxt = {}
        for (used, z), value in states.items():
            for t, gain in profile.items():
                if used + t > j:
                    continue
                key = (used + t, z + x * t)
                if nxt.get(key, -1) < value + gain:
                    nxt[key] = value + gain
        states = nxt

    result = {z: value + 1 for (used, z), value in states.items() if used == j}
    return dict(sorted(result.items()))


def wedge_candidates(s, j):
    r"""Eigenvalue exponents of Lambda^j: sums over j-element sub-multisets."""
    if not 1 <= j <= s.dimension:
        raise RejectedInput(f'exterior power degree must be in [1, {s.dimension}], got {j}')

    reachable = {(0, ZERO)}
    for x, multiplicity in spec_charpoly_exponents(s).items():
        reachable = {
            (used + t, z + x * t)
            for used, z in reachable
            for t in range(min(multiplicity, j - used) + 1)
        }
    return sorted(z for used, z in reachable if used == j)


def single_block_wedge_amplitude(m, j):
    r"""Amplitude of the weight filtration on Lambda^j of one block of size m."""
    if not 1 <= j <= m:
        raise RejectedInput(f'need 1 <= j <= m, got m={m}, j={j}')
    # (m-1) + (m-3) + ... + (m-2j+1)
    return j * (m - j)


def spec_from_profile(profile):
    return JordanSpec(tuple(
        (x, size, count) for x, sizes in profile.blocks for size, count in sizes
    ))


def render_text(s):
    if not s.blocks:
        return '0'

    parts = []
    for x, size, count in s.blocks:
        parts += [f'Jord_{size}(exp(2πi·{x}))'] * count
    return ' ⊕ '.join(parts)
