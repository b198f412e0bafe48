r"""
Randomized verification harness.

Each case draws an admissible abelian type, a few random nilpotent and
quasi-unipotent matrices and a random complete function from its own
``numpy.random.SeedSequence`` child, then runs every consistency check on
them. A failing or crashing check becomes a Finding; nothing is raised.
Results are merged by case index, so the report only depends on the seed.
"""
import logging
import multiprocessing as mp
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from tqdm import tqdm

from tame_monodromy import abvar
from tame_monodromy.cyclotomic_polys import factor_cyclotomic, q_poly
from tame_monodromy.exact_linalg import (
    CycloMatrix,
    jordan_chevalley,
    jordan_profile,
    mat_charpoly,
    wedge_matrix,
)
from tame_monodromy.jordan_calc import (
    JordanSpec,
    materialize,
    single_block_wedge_amplitude,
    spec_from_profile,
    wedge_candidates,
    wedge_max_ranks,
)
from tame_monodromy.rational_circle import (
    ZERO,
    add,
    complete_function,
    is_complete,
    norm,
    pushforward,
    qz_make,
)
from tame_monodromy.utils import Finding
from tame_monodromy.weight_filt import (
    amplitude,
    dual_filtration,
    filtration_failures,
    graded_dims,
    tensor_filtration,
    weight_filtration,
    weight_filtration_from_kernels,
    wedge_filtration,
)

__all__ = [
    'VerifyReport',
    'verify_harness',
    'run_case',
    'onejord_table',
    'random_partition',
    'random_conjugator',
    'random_nilpotent',
    'random_quasi_unipotent',
]

logger = logging.getLogger(__name__)

PAIR_CONDUCTORS = (1, 2, 3, 4, 6)


@dataclass
class VerifyReport:
    seed: int
    cases: int
    checks: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)
    onejord: list = field(default_factory=list)

    @property
    def passed(self):
        return not any(f.is_error for f in self.findings)

    def to_json(self):
        return {
            'seed': self.seed,
            'cases': self.cases,
            'passed': self.passed,
            'checks': dict(sorted(self.checks.items())),
            'findings': [f.to_json() for f in self.findings],
            'onejord': self.onejord,
        }


class _CaseRunner:
    r"""Runs named checks for one case, turning failures into findings."""

    def __init__(self, index):
        self.index = index
        self.counts = {}
        self.findings = []

    def check(self, name, fn, *args):
        self.counts[name] = self.counts.get(name, 0) + 1
        try:
            problems = fn(*args)
        except Exception as err:
            problems = [f'{type(err).__name__}: {err}']

        for problem in problems or []:
            self.findings.append(Finding(name, problem, {'case': self.index}))


def random_partition(rng, n):
    sizes = []
    while n > 0:
        size = int(rng.integers(1, n + 1))
        sizes.append(size)
        n -= size
    return sizes


def random_conjugator(rng, n, N):
    r"""Invertible L*U with unit triangular integer factors."""
    lower = [[1 if i == j else (int(rng.integers(-1, 2)) if i > j else 0) for j in range(n)] for i in range(n)]
    upper = [[1 if i == j else (int(rng.integers(-1, 2)) if i < j else 0) for j in range(n)] for i in range(n)]
    return CycloMatrix.from_rows(lower, N) @ CycloMatrix.from_rows(upper, N)


def _conjugate(rng, M):
    S = random_conjugator(rng, M.rows, M.N)
    return S @ M @ S.inv()


def random_nilpotent(rng, n):
    spec = JordanSpec(tuple((ZERO, size, 1) for size in random_partition(rng, n)))
    J = materialize(spec, 1) - CycloMatrix.identity(n, 1)
    return _conjugate(rng, J)


def random_quasi_unipotent(rng, n, N):
    r"""A conjugated Jordan matrix over Q(zeta_N) together with its spec."""
    blocks = [(qz_make(int(rng.integers(0, N)), N), size, 1) for size in random_partition(rng, n)]
    spec = JordanSpec(tuple(blocks))
    return _conjugate(rng, materialize(spec, N)), spec


def _expect(condition, message):
    return [] if condition else [message]


# checks on one abelian type

def _check_validate(A):
    return [f.message for f in abvar.validate(A)]


def _check_blocksize(A):
    return [f.message for f in abvar.hg_analysis(A).findings]


def _check_conductor(A):
    c, other = abvar.conductor(A), abvar.conductor_cormult(A)
    r = abvar.ranks(A)
    problems = _expect(c == other, f'conductor {c} != multiplicity formula {other}')
    problems += _expect(0 <= c < A.g, f'conductor {c} outside [0, {A.g})')
    if r.a_pot == 0:
        problems += _expect(c == Fraction(r.u, 2), f'conductor {c} != u/2 = {r.u}/2')
    semi_abelian = all(x == ZERO for x in A.m_total)
    problems += _expect((c == 0) == semi_abelian, f'conductor {c} but semi-abelian is {semi_abelian}')
    return problems


def _check_artin(A):
    f, r = abvar.artin_conductor(A), abvar.ranks(A)
    problems = _expect(f == 2 * r.u, f'Artin conductor {f} != 2u = {2 * r.u}')
    if r.a_pot == 0:
        problems += _expect(f == 4 * r.c, f'Artin conductor {f} != 4c = {4 * r.c}')
    return problems


def _check_charpoly(A, caps):
    P = abvar.h1_charpoly(A)
    exponents = add(add(A.m_ab, A.m_dual_ab), A.m_tor.scale(2))
    recovered = factor_cyclotomic(P).to_multfunc()
    problems = _expect(recovered == exponents, f'factor_cyclotomic gives {recovered!r}, expected {exponents!r}')

    if 2 * A.g <= caps['charpoly_max_dim']:
        spec = abvar.h1_monodromy(A)
        M = materialize(spec, spec.conductor())
        oracle = mat_charpoly(M)
        problems += _expect(oracle == P, f'matrix charpoly {oracle} != {P}')

        profile = spec_from_profile(jordan_profile(M, spec.exponents()))
        problems += _expect(profile == spec, f'Jordan profile {profile.to_json()} != {spec.to_json()}')
    return problems


def _check_blocksize_oracle(A):
    spec = abvar.h1_monodromy(A)
    M = wedge_matrix(materialize(spec, spec.conductor()), A.g)
    oracle = jordan_profile(M, wedge_candidates(spec, A.g)).max_blocks()
    symbolic = wedge_max_ranks(spec, A.g)
    return _expect(oracle == symbolic, f'oracle blocks {oracle} != symbolic {symbolic}')


def _check_weight_bridge(A, cap):
    profile = abvar.hg_weight_profile(A, cap)
    analysis = abvar.hg_analysis(A)
    problems = [f.message for f in profile.findings]
    problems += _expect(
        profile.amplitude + 1 == analysis.global_max_block,
        f'amplitude {profile.amplitude} + 1 != largest block {analysis.global_max_block}'
    )
    return problems


def _check_transforms(A, B, n1, n2):
    problems = []
    D = abvar.dual(A)
    problems += _expect(abvar.dual(D) == A, 'dual is not an involution')
    problems += _expect(not abvar.validate(D), 'dual is inadmissible')
    problems += _expect(abvar.isogeny_key(D) == abvar.isogeny_key(A), 'isogeny key changes under duality')

    full = abvar.base_change(A, A.e, prime_to_residue_char=True)
    problems += _expect(abvar.conductor(full) == 0, 'base change to e has non-zero conductor')
    problems += _expect(
        all(x == ZERO for x in abvar.h1_monodromy(full).exponents()),
        'base change to e leaves non-trivial eigenvalues'
    )

    twice = abvar.base_change(abvar.base_change(A, n1, True), n2, True)
    problems += _expect(twice == abvar.base_change(A, n1 * n2, True), f'base change by {n1} then {n2} != by {n1 * n2}')
    problems += _expect(is_complete(pushforward(A.m_tor, n1)), 'pushforward broke completeness')

    if B is not None:
        P = abvar.product(A, B)
        problems += _expect(
            abvar.conductor(P) == abvar.conductor(A) + abvar.conductor(B), 'conductor is not additive'
        )
        ra, rb, rp = abvar.ranks(A), abvar.ranks(B), abvar.ranks(P)
        for name in ('t', 'u', 'a', 't_pot', 'a_pot'):
            problems += _expect(
                getattr(rp, name) == getattr(ra, name) + getattr(rb, name), f'rank {name} is not additive'
            )
        key = tuple(add(x, y) for x, y in zip(abvar.isogeny_key(A), abvar.isogeny_key(B)))
        problems += _expect(abvar.isogeny_key(P) == key, 'isogeny key is not additive')
    return problems


# checks on random matrices and functions

def _check_complete_roundtrip(rng, max_order):
    orders = {int(rng.integers(1, max_order + 1)): int(rng.integers(1, 3)) for _ in range(int(rng.integers(1, 4)))}
    f = complete_function(orders)
    recovered = factor_cyclotomic(q_poly(f)).to_multfunc()
    problems = _expect(recovered == f, f'round trip of {f!r} gives {recovered!r}')
    problems += _expect(q_poly(f).degree == norm(f), 'degree of Q_f differs from the norm')
    return problems


def _check_weight_axioms(rng, max_dim):
    n = int(rng.integers(1, max_dim + 1))
    N = random_nilpotent(rng, n)
    w = int(rng.integers(-3, 6))
    W = weight_filtration(N, w)

    problems = filtration_failures(W, N)
    problems += _expect(W == weight_filtration_from_kernels(N, w), 'Jordan-basis and kernel formulas disagree')

    amplitudes = {amplitude(weight_filtration(N, c)) for c in (-3, 0, 5)}
    problems += _expect(len(amplitudes) == 1, f'amplitude depends on the center: {amplitudes}')

    dims = graded_dims(W)
    problems += _expect(
        all(dims.get(w + a, 0) == dims.get(w - a, 0) for a in range(n + 1)), f'graded dims {dims} not symmetric'
    )

    # multiplying by a commuting invertible or perturbing by N^2 keeps W
    identity = CycloMatrix.identity(n, N.N)
    problems += _expect(weight_filtration(N @ (identity + N), w) == W, 'W changes under N -> N(1 + N)')
    problems += _expect(weight_filtration(N + N @ N, w) == W, 'W changes under N -> N + N^2')
    return problems


def _check_filtration_pairs(rng, max_dim):
    N = PAIR_CONDUCTORS[int(rng.integers(len(PAIR_CONDUCTORS)))]
    M1, s1 = random_quasi_unipotent(rng, int(rng.integers(1, max_dim + 1)), N)
    M2, s2 = random_quasi_unipotent(rng, int(rng.integers(1, max_dim + 1)), N)
    w1, w2 = int(rng.integers(-2, 3)), int(rng.integers(-2, 3))

    _, N1 = jordan_chevalley(M1, s1.exponents())
    _, N2 = jordan_chevalley(M2, s2.exponents())
    W1, W2 = weight_filtration(N1, w1), weight_filtration(N2, w2)

    problems = _expect(
        dual_filtration(W1) == weight_filtration(-N1.transpose(), -w1), 'dual filtration != filtration of -N^T'
    )

    candidates = {x + y for x in s1.exponents() for y in s2.exponents()}
    _, Nt = jordan_chevalley(M1.kron(M2), candidates)
    problems += _expect(
        tensor_filtration(W1, W2) == weight_filtration(Nt, w1 + w2), 'tensor filtration != filtration of (M1 (x) M2)_n'
    )

    j = int(rng.integers(1, M1.rows + 1))
    _, Nw = jordan_chevalley(wedge_matrix(M1, j), wedge_candidates(s1, j))
    problems += _expect(
        wedge_filtration(W1, j) == weight_filtration(Nw, j * w1), f'wedge filtration != filtration of (Lambda^{j} M)_n'
    )
    return problems


def _check_wedge_spec(rng, max_dim):
    N = PAIR_CONDUCTORS[int(rng.integers(len(PAIR_CONDUCTORS)))]
    n = int(rng.integers(1, max_dim + 1))
    blocks = [(qz_make(int(rng.integers(0, N)), N), size, 1) for size in random_partition(rng, n)]
    spec = JordanSpec(tuple(blocks))
    j = int(rng.integers(1, n + 1))

    M = wedge_matrix(materialize(spec, N), j)
    oracle = jordan_profile(M, wedge_candidates(spec, j)).max_blocks()
    symbolic = wedge_max_ranks(spec, j)
    return _expect(oracle == symbolic, f'wedge {j} of {spec.to_json()}: oracle {oracle} != symbolic {symbolic}')


def _second_type(rng, A, caps):
    for _ in range(20):
        B = abvar.random_abelian_type(rng, caps['max_g'], caps['max_e'])
        if B.residue_char_zero == A.residue_char_zero:
            return B
    return None


def run_case(index, seed_sequence, caps):
    r"""All checks for one case; returns (counts, findings)."""
    rng = np.random.default_rng(seed_sequence)
    runner = _CaseRunner(index)
    oracle_turn = index % caps['oracle_stride'] == 0

    A = abvar.random_abelian_type(rng, caps['max_g'], caps['max_e'])
    B = _second_type(rng, A, caps)
    n1, n2 = int(rng.integers(1, 7)), int(rng.integers(1, 7))

    runner.check('validate', _check_validate, A)
    runner.check('blocksize_symbolic', _check_blocksize, A)
    runner.check('conductor', _check_conductor, A)
    runner.check('artin_conductor', _check_artin, A)
    runner.check('charpoly', _check_charpoly, A, caps)
    runner.check('transforms', _check_transforms, A, B, n1, n2)

    if oracle_turn and A.g <= caps['oracle_max_g'] and A.e <= caps['oracle_max_e']:
        runner.check('blocksize_oracle', _check_blocksize_oracle, A)
        if comb(2 * A.g, A.g) <= caps['oracle_cap']:
            runner.check('weight_bridge', _check_weight_bridge, A, caps['oracle_cap'])

    for _ in range(2):
        runner.check('complete_roundtrip', _check_complete_roundtrip, rng, caps['cyclo_max_order'])
        runner.check('weight_axioms', _check_weight_axioms, rng, caps['weight_max_dim'])
    runner.check('filtration_pairs', _check_filtration_pairs, rng, caps['pair_max_dim'])
    if oracle_turn:
        runner.check('wedge_spec', _check_wedge_spec, rng, caps['wedge_max_dim'])

    return runner.counts, runner.findings


def _run_case_star(args):
    return run_case(*args)


def onejord_table(max_m):
    r"""
    Amplitude of the weight filtration on Lambda^j of a single Jordan block,
    computed on matrices, next to j(m - j) and m(m - j).
    """
    rows = []
    for m in range(1, max_m + 1):
        block = materialize(JordanSpec(((ZERO, m, 1),)), 1)
        for j in range(1, m + 1):
            _, nilpotent = jordan_chevalley(wedge_matrix(block, j), [ZERO])
            measured = amplitude(weight_filtration(nilpotent, 0))
            rows.append({
                'm': m,
                'j': j,
                'amplitude': measured,
                'j(m-j)': single_block_wedge_amplitude(m, j),
                'm(m-j)': m * (m - j),
                'matches_j(m-j)': measured == j * (m - j),
                'matches_m(m-j)': measured == m * (m - j),
            })
    return rows


def verify_harness(seed, cases, caps, workers=1, progress=False):
    r"""Run ``cases`` seeded cases and the single-block amplitude table."""
    report = VerifyReport(seed=seed, cases=cases)
    if cases <= 0:
        return report

    children = np.random.SeedSequence(seed).spawn(cases)
    jobs = [(i, children[i], caps) for i in range(cases)]

    if workers > 1:
        with mp.Pool(workers) as pool:
            results = pool.imap(_run_case_star, jobs)
            results = list(tqdm(results, total=cases, disable=not progress, file=sys.stderr))
    else:
        results = [_run_case_star(job) for job in tqdm(jobs, disable=not progress, file=sys.stderr)]

    for counts, findings in results:
        for name, k in counts.items():
            report.checks[name] = report.checks.get(name, 0) + k
        report.findings.extend(findings)

    runner = _CaseRunner(-1)
    runner.check('onejord', lambda: _onejord_into(report, caps['onejord_max_m']))
    report.checks['onejord'] = report.checks.get('onejord', 0) + runner.counts['onejord']
    report.findings.extend(runner.findings)

    logger.info(f'{cases} cases, {sum(report.checks.values())} checks, {len(report.findings)} findings')
    return report


def _onejord_into(report, max_m):
    report.onejord = onejord_table(max_m)
    return [
        f'm={row["m"]}, j={row["j"]}: amplitude {row["amplitude"]} != j(m-j) = {row["j(m-j)"]}'
        for row in report.onejord if not row['matches_j(m-j)']
    ]
