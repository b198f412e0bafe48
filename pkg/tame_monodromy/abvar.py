r"""
Tamely ramified abelian varieties, known through their multiplicity data.

An :class:`AbelianType` records the dimension g, the degree e of the minimal
extension acquiring semi-abelian reduction and the three multiplicity
functions m_tor, m_ab and m_dual_ab on Q/Z. Everything else (ranks,
conductors, monodromy on H^1 and H^g, the limit mixed Hodge structure
bookkeeping) is derived from them.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm

from sympy import divisors, totient

from tame_monodromy.cyclotomic_polys import charpoly_from_exponents, q_poly
from tame_monodromy.exact_linalg import jordan_chevalley, wedge_matrix
from tame_monodromy.exceptions import InadmissibleError, OracleTooLargeError, ParseError, RejectedInput
from tame_monodromy.jordan_calc import (
    jord,
    materialize,
    render_text,
    spec_charpoly_exponents,
    wedge_candidates,
    wedge_max_ranks,
)
from tame_monodromy.rational_circle import (
    ZERO,
    MultFunc,
    QZElem,
    add,
    complete_function,
    is_complete,
    is_semicomplete,
    norm,
    pushforward,
    reflect,
    supported_on,
)
from tame_monodromy.utils import Finding
from tame_monodromy.weight_filt import amplitude, graded_eigen_multiplicities, weight_filtration

__all__ = [
    'AbelianType',
    'RankReport',
    'HgAnalysis',
    'MHSSummary',
    'HgWeightProfile',
    'validate',
    'ranks',
    'conductor',
    'conductor_cormult',
    'artin_conductor',
    'base_change',
    'product',
    'dual',
    'isogeny_key',
    'prime_to_p_isogeny_key',
    'reflexivity_holds',
    'h1_monodromy',
    'h1_charpoly',
    'hg_analysis',
    'mhs_summary',
    'hg_weight_profile',
    'report',
    'random_abelian_type',
]

logger = logging.getLogger(__name__)

HALF = QZElem(1, 2)


def _multfunc(value):
    return value if isinstance(value, MultFunc) else MultFunc(value)


@dataclass(frozen=True)
class AbelianType:
    g: int
    e: int
    m_tor: MultFunc = field(default_factory=MultFunc)
    m_ab: MultFunc = field(default_factory=MultFunc)
    m_dual_ab: MultFunc = field(default_factory=MultFunc)
    residue_char_zero: bool = False
    principally_polarized: bool = False

    def __post_init__(self):
        for name in ('g', 'e'):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise RejectedInput(f'{name} must be a positive integer, got {value!r}')
            object.__setattr__(self, name, int(value))

        for name in ('m_tor', 'm_ab', 'm_dual_ab'):
            object.__setattr__(self, name, _multfunc(getattr(self, name)))

    @property
    def m_total(self):
        r"""m_A = m_tor + m_ab"""
        return add(self.m_tor, self.m_ab)

    @property
    def flags(self):
        return {
            'residue_char_zero': self.residue_char_zero,
            'principally_polarized': self.principally_polarized,
        }

    def to_json(self):
        return {
            'g': self.g,
            'e': self.e,
            'tor': self.m_tor.to_json(),
            'ab': self.m_ab.to_json(),
            'dual_ab': self.m_dual_ab.to_json(),
            'flags': self.flags,
        }

    @classmethod
    def from_json(cls, data):
        required = {'g', 'e', 'tor', 'ab', 'dual_ab'}
        if not isinstance(data, dict) or not required <= set(data) or set(data) - required - {'flags'}:
            raise ParseError(f'abelian type must be an object with keys {sorted(required)} and optional "flags"')

        for name in ('g', 'e'):
            if isinstance(data[name], bool) or not isinstance(data[name], int) or data[name] < 1:
                raise ParseError(f'"{name}" must be a positive integer, got {data[name]!r}')

        flags = data.get('flags', {})
        if not isinstance(flags, dict) or set(flags) - {'residue_char_zero', 'principally_polarized'} \
                or not all(isinstance(v, bool) for v in flags.values()):
            raise ParseError('"flags" may only hold the booleans residue_char_zero and principally_polarized')

        return cls(
            g=data['g'],
            e=data['e'],
            m_tor=MultFunc.from_json(data['tor']),
            m_ab=MultFunc.from_json(data['ab']),
            m_dual_ab=MultFunc.from_json(data['dual_ab']),
            residue_char_zero=flags.get('residue_char_zero', False),
            principally_polarized=flags.get('principally_polarized', False),
        )


@dataclass(frozen=True)
class RankReport:
    t: int
    u: int
    a: int
    t_pot: int
    a_pot: int
    c: Fraction

    def to_json(self):
        return {
            't': self.t, 'u': self.u, 'a': self.a,
            't_pot': self.t_pot, 'a_pot': self.a_pot,
            'c': str(self.c),
        }


@dataclass(frozen=True)
class HgAnalysis:
    pole_candidate: QZElem
    max_block_at_candidate: int
    global_max_block: int
    per_eigenvalue: dict
    findings: tuple = ()

    def to_json(self):
        return {
            'pole_candidate': str(self.pole_candidate),
            'max_block_at_candidate': self.max_block_at_candidate,
            'global_max_block': self.global_max_block,
            'per_eigenvalue': {str(x): b for x, b in self.per_eigenvalue.items()},
            'findings': [f.to_json() for f in self.findings],
        }


@dataclass(frozen=True)
class MHSSummary:
    gr_0: MultFunc
    gr_m1_hodge_10: MultFunc
    gr_m1_hodge_01: MultFunc
    gr_m2: MultFunc

    def to_json(self):
        return {
            'gr_0': self.gr_0.to_json(),
            'gr_m1_hodge_10': self.gr_m1_hodge_10.to_json(),
            'gr_m1_hodge_01': self.gr_m1_hodge_01.to_json(),
            'gr_m2': self.gr_m2.to_json(),
        }


@dataclass(frozen=True)
class HgWeightProfile:
    center: int
    gradeds: dict
    top_alpha: int
    amplitude: int
    findings: tuple = ()

    def to_json(self):
        return {
            'center': self.center,
            'gradeds': {
                str(i): {str(x): m for x, m in per.items()} for i, per in self.gradeds.items()
            },
            'top_alpha': self.top_alpha,
            'amplitude': self.amplitude,
            'findings': [f.to_json() for f in self.findings],
        }


def _names(elements):
    return [str(x) for x in elements]


def validate(A, strict=False):
    r"""
    Admissibility violations of A; empty iff A is admissible.

    With ``strict``, a warning is added when e is not the lcm of the orders
    in the supports.
    """
    findings = []
    functions = (('m_tor', A.m_tor), ('m_ab', A.m_ab), ('m_dual_ab', A.m_dual_ab))

    for name, f in functions:
        if not supported_on(f, A.e):
            outside = [x for x in f if A.e % x.order]
            findings.append(Finding(
                'support', f'{name} not supported on (1/{A.e})Z/Z',
                {'function': name, 'elements': _names(outside)}
            ))

    if norm(A.m_tor) + norm(A.m_ab) != A.g:
        findings.append(Finding(
            'dimension', f'‖m_tor‖ + ‖m_ab‖ = {norm(A.m_tor) + norm(A.m_ab)} differs from g = {A.g}',
            {'norm_tor': norm(A.m_tor), 'norm_ab': norm(A.m_ab), 'g': A.g}
        ))

    if norm(A.m_ab) != norm(A.m_dual_ab):
        findings.append(Finding(
            'norm_mismatch', f'‖m_ab‖ = {norm(A.m_ab)} differs from ‖m_dual_ab‖ = {norm(A.m_dual_ab)}',
            {'norm_ab': norm(A.m_ab), 'norm_dual_ab': norm(A.m_dual_ab)}
        ))

    if A.m_ab[ZERO] != A.m_dual_ab[ZERO]:
        findings.append(Finding(
            'abelian_rank', f'm_ab(0) = {A.m_ab[ZERO]} differs from m_dual_ab(0) = {A.m_dual_ab[ZERO]}',
            {'m_ab(0)': A.m_ab[ZERO], 'm_dual_ab(0)': A.m_dual_ab[ZERO]}
        ))

    if not is_complete(A.m_tor):
        findings.append(Finding('tor_complete', 'm_tor not complete', {'m_tor': A.m_tor.to_json()}))

    ab_sum = add(A.m_ab, A.m_dual_ab)
    if not is_complete(ab_sum):
        findings.append(Finding(
            'ab_complete', 'm_ab + m_dual_ab not complete', {'m_ab + m_dual_ab': ab_sum.to_json()}
        ))

    if A.residue_char_zero or A.principally_polarized:
        if not reflexivity_holds(A):
            findings.append(Finding(
                'reflexivity', 'm_dual_ab differs from the reflection of m_ab',
                {'reflect(m_ab)': reflect(A.m_ab).to_json(), 'm_dual_ab': A.m_dual_ab.to_json()}
            ))
        for name, f in functions[1:]:
            if not is_semicomplete(f):
                findings.append(Finding('semicomplete', f'{name} not semi-complete', {name: f.to_json()}))

    if strict:
        orders = [x.order for _, f in functions for x in f]
        minimal = lcm(*orders) if orders else 1
        if minimal != A.e:
            findings.append(Finding(
                'minimal_degree', f'e = {A.e} but the supports only need {minimal}',
                {'e': A.e, 'lcm_of_orders': minimal}, severity='warning'
            ))

    return findings


def _require_admissible(A):
    findings = [f for f in validate(A) if f.is_error]
    if findings:
        raise InadmissibleError(
            'inadmissible abelian type: ' + '; '.join(f.message for f in findings), findings
        )


def reflexivity_holds(A):
    r"""Whether m_dual_ab is the reflection of m_ab."""
    return A.m_dual_ab == reflect(A.m_ab)


def conductor_cormult(A):
    r"""c(A) = (t_pot - t)/2 + sum of m_ab(x) x."""
    _require_admissible(A)
    c = Fraction(norm(A.m_tor) - A.m_tor[ZERO], 2)
    for x, v in A.m_ab.items():
        c += v * x.to_fraction()
    return c


def conductor(A):
    r"""Base change conductor, the sum of m_A(x) x over representatives in [0, 1)."""
    _require_admissible(A)
    c = sum((v * x.to_fraction() for x, v in A.m_total.items()), Fraction(0))

    other = conductor_cormult(A)
    assert c == other, f'conductor formulas disagree: {c} != {other}'
    return c


def ranks(A):
    _require_admissible(A)
    t, a = A.m_tor[ZERO], A.m_ab[ZERO]
    u = A.g - t - a

    nonzero = sum(v for x, v in A.m_total.items() if x != ZERO)
    assert u == nonzero, f'unipotent rank {u} differs from the mass off 0 ({nonzero})'
    return RankReport(t=t, u=u, a=a, t_pot=norm(A.m_tor), a_pot=norm(A.m_ab), c=conductor(A))


def artin_conductor(A):
    r"""Artin conductor of the Tate module, 2g - m_ab(0) - m_dual_ab(0) - 2 m_tor(0)."""
    _require_admissible(A)
    f = 2 * A.g - A.m_ab[ZERO] - A.m_dual_ab[ZERO] - 2 * A.m_tor[ZERO]

    u = ranks(A).u
    assert f == 2 * u, f'Artin conductor {f} is not twice the unipotent rank {u}'
    return f


def _check_result(A):
    failures = [f.message for f in validate(A) if f.is_error]
    assert not failures, f'transform produced an inadmissible type: {failures}'
    return A


def base_change(A, n, prime_to_residue_char=False):
    r"""A over the tame extension of degree n: every function pushed forward by n."""
    _require_admissible(A)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise RejectedInput(f'base change degree must be a positive integer, got {n!r}')
    if not A.residue_char_zero and not prime_to_residue_char:
        raise RejectedInput(
            'base change in positive residue characteristic needs the degree declared prime to it'
        )

    n = int(n)
    return _check_result(AbelianType(
        g=A.g,
        e=A.e // gcd(A.e, n),
        m_tor=pushforward(A.m_tor, n),
        m_ab=pushforward(A.m_ab, n),
        m_dual_ab=pushforward(A.m_dual_ab, n),
        residue_char_zero=A.residue_char_zero,
        principally_polarized=A.principally_polarized,
    ))


def product(A1, A2):
    _require_admissible(A1)
    _require_admissible(A2)
    if A1.residue_char_zero != A2.residue_char_zero:
        raise RejectedInput('cannot multiply types over fields of different residue characteristic')

    return _check_result(AbelianType(
        g=A1.g + A2.g,
        e=lcm(A1.e, A2.e),
        m_tor=add(A1.m_tor, A2.m_tor),
        m_ab=add(A1.m_ab, A2.m_ab),
        m_dual_ab=add(A1.m_dual_ab, A2.m_dual_ab),
        residue_char_zero=A1.residue_char_zero,
        principally_polarized=A1.principally_polarized and A2.principally_polarized,
    ))


def dual(A):
    r"""The dual abelian variety: m_ab and m_dual_ab swap roles up to reflection."""
    _require_admissible(A)
    return _check_result(AbelianType(
        g=A.g,
        e=A.e,
        m_tor=A.m_tor,
        m_ab=reflect(A.m_dual_ab),
        m_dual_ab=reflect(A.m_ab),
        residue_char_zero=A.residue_char_zero,
        principally_polarized=A.principally_polarized,
    ))


def isogeny_key(A):
    r"""(m_tor, m_ab + m_dual_ab), invariant under all isogenies."""
    return A.m_tor, add(A.m_ab, A.m_dual_ab)


def prime_to_p_isogeny_key(A):
    r"""(m_tor, m_ab, m_dual_ab), invariant under isogenies of degree prime to p."""
    return A.m_tor, A.m_ab, A.m_dual_ab


def h1_monodromy(A):
    r"""Jordan form Jord(m_ab + m_dual_ab, m_tor) of the monodromy on H^1."""
    _require_admissible(A)
    spec = jord(add(A.m_ab, A.m_dual_ab), A.m_tor)
    assert spec.dimension == 2 * A.g, f'H^1 has dimension {spec.dimension}, expected {2 * A.g}'
    return spec


def h1_charpoly(A):
    _require_admissible(A)
    exponents = add(add(A.m_ab, A.m_dual_ab), A.m_tor.scale(2))
    P = charpoly_from_exponents(exponents)

    from_spec = q_poly(spec_charpoly_exponents(h1_monodromy(A)))
    assert P == from_spec, f'characteristic polynomials disagree: {P} != {from_spec}'
    assert P.degree == 2 * A.g
    return P


def hg_analysis(A):
    r"""
    Largest Jordan blocks of the monodromy on H^g = Lambda^g H^1.

    Every block has size at most t_pot + 1 and a block of exactly that size
    sits at the eigenvalue exp(2 pi i c(A)); violations are returned as
    findings.
    """
    spec = h1_monodromy(A)
    report = ranks(A)
    candidate = QZElem.from_fraction(report.c)
    per_eigenvalue = wedge_max_ranks(spec, A.g)

    expected = report.t_pot + 1
    at_candidate = per_eigenvalue.get(candidate, 0)
    global_max = max(per_eigenvalue.values())

    findings = []
    if at_candidate != expected:
        findings.append(Finding(
            'pole_block', f'largest block at exp(2πi·{candidate}) is {at_candidate}, expected {expected}',
            {'candidate': str(candidate), 'block': at_candidate, 't_pot': report.t_pot}
        ))
    if global_max != expected:
        findings.append(Finding(
            'global_block', f'largest block overall is {global_max}, expected {expected}',
            {'block': global_max, 't_pot': report.t_pot}
        ))

    return HgAnalysis(
        pole_candidate=candidate,
        max_block_at_candidate=at_candidate,
        global_max_block=global_max,
        per_eigenvalue=per_eigenvalue,
        findings=tuple(findings),
    )


def mhs_summary(A):
    r"""Multiplicity data of the graded pieces of the limit mixed Hodge structure on H_1."""
    if not A.residue_char_zero:
        raise RejectedInput('limit MHS requires the complex-analytic setting')
    _require_admissible(A)

    summary = MHSSummary(
        gr_0=A.m_tor,
        gr_m1_hodge_10=A.m_ab,
        gr_m1_hodge_01=A.m_dual_ab,
        gr_m2=A.m_tor,
    )
    assert summary.gr_m1_hodge_10 == reflect(summary.gr_m1_hodge_01), 'Hodge symmetry fails'
    return summary


def hg_weight_profile(A, cap):
    r"""
    Eigenvalue multiplicities of M_s on the graded pieces of the weight
    filtration on H^g, computed on explicit matrices.
    """
    _require_admissible(A)
    size = comb(2 * A.g, A.g)
    if size > cap:
        raise OracleTooLargeError(f'H^{A.g} has dimension {size}, over the cap {cap}', size=size, cap=cap)

    spec = h1_monodromy(A)
    N = spec.conductor()
    candidates = wedge_candidates(spec, A.g)
    M = wedge_matrix(materialize(spec, N), A.g)
    _, nilpotent = jordan_chevalley(M, candidates)
    W = weight_filtration(nilpotent, A.g)
    gradeds = graded_eigen_multiplicities(W, M, candidates)

    t_pot = norm(A.m_tor)
    pole = QZElem.from_fraction(conductor(A))
    carrying = [i - A.g for i, per in gradeds.items() if per.get(pole)]
    top_alpha = max(carrying) if carrying else -1

    findings = []
    if top_alpha != t_pot:
        findings.append(Finding(
            'weight_alpha', f'exp(2πi·{pole}) reaches Gr_{A.g + top_alpha}, expected Gr_{A.g + t_pot}',
            {'candidate': str(pole), 'alpha': top_alpha, 't_pot': t_pot}
        ))

    logger.debug(f'weight profile on H^{A.g} of dimension {size}: {gradeds}')
    return HgWeightProfile(
        center=A.g,
        gradeds=gradeds,
        top_alpha=top_alpha,
        amplitude=amplitude(W),
        findings=tuple(findings),
    )


def report(A, strict=False):
    r"""Everything computable about A, as a JSON-ready dict."""
    findings = validate(A, strict=strict)
    if any(f.is_error for f in findings):
        raise InadmissibleError('inadmissible abelian type', findings)

    spec = h1_monodromy(A)
    hg = hg_analysis(A)
    result = {
        'type': A.to_json(),
        'ranks': ranks(A).to_json(),
        'conductor': str(conductor(A)),
        'artin_conductor': artin_conductor(A),
        'h1': spec.to_json(),
        'h1_text': render_text(spec),
        'h1_charpoly': h1_charpoly(A).to_json(),
        'hg': hg.to_json(),
        'isogeny_key': [f.to_json() for f in isogeny_key(A)],
        'reflexive': reflexivity_holds(A),
    }
    if A.residue_char_zero:
        result['mhs'] = mhs_summary(A).to_json()
    result['findings'] = [f.to_json() for f in findings + list(hg.findings)]
    return result


def _random_complete(rng, total, options):
    # options: list of (order, cost, value step); fills exactly `total`
    values = {}
    remaining = total
    while remaining > 0:
        fitting = [o for o in options if o[1] <= remaining]
        d, cost, step = fitting[int(rng.integers(len(fitting)))]
        values[d] = values.get(d, 0) + step
        remaining -= cost
    return complete_function(values)


def random_abelian_type(rng, max_g, max_e):
    r"""
    Admissible type drawn from a fixed distribution.

    g and e are uniform; t_pot is uniform in [0, g]. m_tor is a random
    complete function of norm t_pot on orders dividing e. A complete h of
    norm 2 a_pot with h(0) even is split into m_ab + m_dual_ab with both
    halves equal on 0. When either flag is set h(1/2) is even too and the
    split is reflexive; otherwise the nonzero part of h, 1/2 included, is
    dealt out at random.
    """
    g = int(rng.integers(1, max_g + 1))
    e = int(rng.integers(1, max_e + 1))
    residue_char_zero = bool(rng.random() < 0.5)
    principally_polarized = bool(rng.random() < 0.3)
    reflexive = residue_char_zero or principally_polarized

    t_pot = int(rng.integers(0, g + 1))
    a_pot = g - t_pot
    orders = [int(d) for d in divisors(e)]

    m_tor = _random_complete(rng, t_pot, [(d, int(totient(d)), 1) for d in orders])

    # orders of the fixed points of x -> -x on which h takes even values
    even_orders = (1, 2) if reflexive else (1,)
    h_options = [(d, 2, 2) for d in orders if d in even_orders]
    h_options += [(d, int(totient(d)), 1) for d in orders if d not in even_orders]
    h = _random_complete(rng, 2 * a_pot, h_options)

    ab, dual_ab = {}, {}
    for x in (ZERO, HALF)[:len(even_orders)]:
        if h[x]:
            ab[x] = dual_ab[x] = h[x] // 2

    if reflexive:
        for x in [x for x in h if x < -x]:
            c = h[x]
            k = int(rng.integers(0, c + 1))
            ab[x], ab[-x] = k, c - k
            dual_ab[x], dual_ab[-x] = c - k, k
    else:
        units = [x for x in h if x != ZERO for _ in range(h[x])]
        chosen = rng.permutation(len(units))[:len(units) // 2]
        for i in chosen:
            ab[units[i]] = ab.get(units[i], 0) + 1
        for x in h:
            if x != ZERO:
                dual_ab[x] = h[x] - ab.get(x, 0)

    A = AbelianType(
        g=g, e=e, m_tor=m_tor, m_ab=MultFunc(ab), m_dual_ab=MultFunc(dual_ab),
        residue_char_zero=residue_char_zero, principally_polarized=principally_polarized,
    )
    failures = [f.message for f in validate(A)]
    assert not failures, f'random type is inadmissible: {failures}'
    return A
