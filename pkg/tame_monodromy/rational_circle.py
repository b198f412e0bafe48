r"""
Exact arithmetic in Q/Z and finitely supported multiplicity functions.

An element of Q/Z is stored as its reduced representative in [0, 1). A
:class:`MultFunc` is a map Q/Z -> N with finite support, stored sparsely
with the support sorted by the numeric order of the representatives.
"""
import re
from fractions import Fraction
from functools import total_ordering
from math import gcd

from sympy import totient

from tame_monodromy.exceptions import ParseError, RejectedInput

__all__ = [
    'QZElem',
    'MultFunc',
    'ZERO',
    'qz_make',
    'qz_order',
    'reflect',
    'add',
    'norm',
    'is_complete',
    'is_semicomplete',
    'pushforward',
    'elements_of_order',
    'complete_function',
    'supported_on',
]

_QZ_PATTERN = re.compile(r'^(?:0|([1-9][0-9]*)/([1-9][0-9]*))$')


@total_ordering
class QZElem:
    r"""Class of numerator/denominator in Q/Z, reduced into [0, 1)."""

    __slots__ = ('_num', '_den')

    def __init__(self, numerator, denominator=1):
        numerator, denominator = int(numerator), int(denominator)
        if denominator <= 0 or not 0 <= numerator < denominator:
            raise RejectedInput(
                f'QZElem needs 0 <= numerator < denominator, got {numerator}/{denominator}'
            )
        if gcd(numerator, denominator) != 1:
            raise RejectedInput(f'QZElem {numerator}/{denominator} is not reduced')

        object.__setattr__(self, '_num', numerator)
        object.__setattr__(self, '_den', denominator)

    def __setattr__(self, name, value):
        raise AttributeError('QZElem is immutable')

    @property
    def numerator(self):
        return self._num

    @property
    def denominator(self):
        return self._den

    @property
    def order(self):
        return self._den

    def to_fraction(self):
        return Fraction(self._num, self._den)

    @classmethod
    def from_fraction(cls, value):
        value = Fraction(value)
        return qz_make(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text):
        r"""Strict parser for the canonical string form ("0", "a/b")."""
        match = _QZ_PATTERN.match(text) if isinstance(text, str) else None
        if match is None:
            raise ParseError(f'{text!r} is not a canonical Q/Z element')

        if match.group(1) is None:
            return ZERO

        num, den = int(match.group(1)), int(match.group(2))
        if num >= den or gcd(num, den) != 1:
            raise ParseError(f'{text!r} is not reduced into [0, 1)')
        return cls(num, den)

    def __add__(self, other):
        if not isinstance(other, QZElem):
            return NotImplemented
        return qz_make(self._num * other._den + other._num * self._den, self._den * other._den)

    def __neg__(self):
        return qz_make(-self._num, self._den)

    def __sub__(self, other):
        if not isinstance(other, QZElem):
            return NotImplemented
        return self + (-other)

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return qz_make(self._num * n, self._den)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QZElem):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __lt__(self, other):
        if not isinstance(other, QZElem):
            return NotImplemented
        return self._num * other._den < other._num * self._den

    def __hash__(self):
        return hash((self._num, self._den))

    def __str__(self):
        return '0' if self._num == 0 else f'{self._num}/{self._den}'

    def __repr__(self):
        return f'QZElem({self._num}, {self._den})'

    def __reduce__(self):
        return (QZElem, (self._num, self._den))


ZERO = QZElem(0, 1)


def qz_make(a, b):
    r"""Class of a/b in Q/Z."""
    if b == 0:
        raise RejectedInput('zero denominator')
    if b < 0:
        a, b = -a, -b

    a = a % b
    d = gcd(a, b)
    return QZElem(a // d, b // d)


def qz_order(x):
    return x.denominator


def _as_key(key):
    if isinstance(key, QZElem):
        return key
    if isinstance(key, str):
        return QZElem.parse(key)
    if isinstance(key, (int, Fraction)):
        return QZElem.from_fraction(key)
    raise RejectedInput(f'cannot use {key!r} as an element of Q/Z')


class MultFunc:
    r"""
    Finitely supported map Q/Z -> N.

    Keys may be given as :class:`QZElem`, canonical strings or fractions.
    Zero values are dropped; ``f[x]`` is 0 off the support.
    """

    __slots__ = ('_entries', '_lookup')

    def __init__(self, entries=None):
        if entries is None:
            entries = {}
        items = entries.items() if hasattr(entries, 'items') else entries

        lookup = {}
        for key, value in items:
            key = _as_key(key)
            if isinstance(value, bool) or int(value) != value:
                raise RejectedInput(f'multiplicity at {key} must be an integer, got {value!r}')
            value = int(value)
            if value < 0:
                raise RejectedInput(f'multiplicity at {key} is negative ({value})')
            lookup[key] = lookup.get(key, 0) + value

        lookup = {k: v for k, v in lookup.items() if v}
        object.__setattr__(self, '_entries', tuple(sorted(lookup.items())))
        object.__setattr__(self, '_lookup', lookup)

    def __setattr__(self, name, value):
        raise AttributeError('MultFunc is immutable')

    def __getitem__(self, key):
        return self._lookup.get(_as_key(key), 0)

    def items(self):
        return self._entries

    def support(self):
        return tuple(k for k, _ in self._entries)

    def orders(self):
        return sorted({k.order for k, _ in self._entries})

    def scale(self, n):
        return MultFunc({k: n * v for k, v in self._entries})

    def __iter__(self):
        return iter(self.support())

    def __len__(self):
        return len(self._entries)

    def __bool__(self):
        return bool(self._entries)

    def __add__(self, other):
        if not isinstance(other, MultFunc):
            return NotImplemented
        return add(self, other)

    def __eq__(self, other):
        if not isinstance(other, MultFunc):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self):
        body = ', '.join(f"'{k}': {v}" for k, v in self._entries)
        return f'MultFunc({{{body}}})'

    def __reduce__(self):
        return (MultFunc, (self._entries,))

    def to_json(self):
        return {str(k): v for k, v in self._entries}

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict):
            raise ParseError(f'multiplicity function must be a JSON object, got {type(data).__name__}')

        entries = {}
        for key, value in data.items():
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ParseError(f'multiplicity at {key!r} must be a positive integer, got {value!r}')
            entries[QZElem.parse(key)] = value
        return cls(entries)


def reflect(f):
    r"""f^refl(x) = f(-x)"""
    return MultFunc({-x: v for x, v in f.items()})


def add(f, g):
    entries = dict(f.items())
    for x, v in g.items():
        entries[x] = entries.get(x, 0) + v
    return MultFunc(entries)


def norm(f):
    return sum(v for _, v in f.items())


def elements_of_order(d):
    r"""All phi(d) elements of Q/Z of exact order d, in increasing order."""
    if d < 1:
        raise RejectedInput(f'order must be positive, got {d}')
    return [QZElem(a, d) for a in range(d) if gcd(a, d) == 1] if d > 1 else [ZERO]


def is_complete(f):
    r"""Whether f(x) only depends on the order of x."""
    by_order = {}
    for x, v in f.items():
        by_order.setdefault(x.order, []).append(v)

    for d, values in by_order.items():
        if len(values) != int(totient(d)) or len(set(values)) != 1:
            return False
    return True


def is_semicomplete(f):
    return is_complete(add(f, reflect(f)))


def pushforward(f, n):
    r"""g(x) = sum of f(y) over n*y = x."""
    if n < 1:
        raise RejectedInput(f'pushforward degree must be positive, got {n}')

    entries = {}
    for y, v in f.items():
        x = y * n
        entries[x] = entries.get(x, 0) + v
    return MultFunc(entries)


def complete_function(values):
    r"""The complete function taking value values[d] on every element of order d."""
    entries = {}
    for d, c in values.items():
        for x in elements_of_order(d):
            entries[x] = c
    return MultFunc(entries)


def supported_on(f, e):
    r"""Whether Supp(f) is contained in ((1/e)Z)/Z."""
    return all(e % x.order == 0 for x in f)
