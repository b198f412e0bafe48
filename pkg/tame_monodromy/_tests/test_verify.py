from fractions import Fraction

import numpy as np
import pytest

from tame_monodromy import abvar
from tame_monodromy.exact_linalg import is_nilpotent, jordan_profile
from tame_monodromy.utils import dump_json
from tame_monodromy.verify import (
    onejord_table,
    random_conjugator,
    random_nilpotent,
    random_partition,
    random_quasi_unipotent,
    run_case,
    verify_harness,
)

SMALL_CAPS = {
    'max_g': 3,
    'max_e': 6,
    'oracle_max_g': 2,
    'oracle_max_e': 6,
    'oracle_cap': 20,
    'oracle_stride': 1,
    'charpoly_max_dim': 6,
    'weight_max_dim': 4,
    'pair_max_dim': 3,
    'wedge_max_dim': 4,
    'onejord_max_m': 4,
    'cyclo_max_order': 20,
}


def test_harness_passes():
    report = verify_harness(42, 3, SMALL_CAPS)
    assert report.passed, [f.message for f in report.findings]
    assert report.findings == []
    assert report.checks['validate'] == 3
    assert report.checks['weight_axioms'] == 6
    assert report.checks['onejord'] == 1
    assert len(report.onejord) == 10


def test_harness_is_deterministic():
    first = dump_json(verify_harness(7, 2, SMALL_CAPS).to_json())
    second = dump_json(verify_harness(7, 2, SMALL_CAPS).to_json())
    assert first == second


def test_cases_are_independent_of_the_batch():
    children = np.random.SeedSequence(5).spawn(3)
    alone = run_case(2, children[2], SMALL_CAPS)
    again = run_case(2, np.random.SeedSequence(5).spawn(3)[2], SMALL_CAPS)
    assert alone[0] == again[0]


def test_no_cases():
    report = verify_harness(42, 0, SMALL_CAPS)
    assert report.passed
    assert report.checks == {}
    assert report.findings == []
    assert report.to_json()['onejord'] == []


def test_detects_wrong_conductor_formula(monkeypatch):
    original = abvar.conductor_cormult
    monkeypatch.setattr(abvar, 'conductor_cormult', lambda A: original(A) + Fraction(1, 7))

    report = verify_harness(42, 2, SMALL_CAPS)
    assert not report.passed
    assert {f.check for f in report.findings} >= {'conductor'}
    assert all('case' in f.witnesses for f in report.findings)


def test_report_json():
    report = verify_harness(1, 2, SMALL_CAPS)
    assert report.to_json()['passed'] is True
    assert list(report.to_json()['checks']) == sorted(report.checks)


def test_onejord_table():
    rows = onejord_table(4)
    assert len(rows) == 10
    assert all(row['matches_j(m-j)'] for row in rows)
    by_key = {(row['m'], row['j']): row for row in rows}
    assert by_key[(3, 1)]['amplitude'] == 2
    assert not by_key[(3, 1)]['matches_m(m-j)']
    assert by_key[(4, 4)]['matches_m(m-j)']


@pytest.mark.parametrize('n', [1, 3, 6])
def test_random_partition(n):
    rng = np.random.default_rng(n)
    sizes = random_partition(rng, n)
    assert sum(sizes) == n
    assert all(s >= 1 for s in sizes)


def test_random_matrices():
    rng = np.random.default_rng(9)
    S = random_conjugator(rng, 4, 3)
    assert S.inv() @ S == S ** 0
    for _ in range(5):
        assert is_nilpotent(random_nilpotent(rng, 4))

    M, spec = random_quasi_unipotent(rng, 4, 6)
    assert jordan_profile(M, spec.exponents()).dimension == 4


def test_onejord_table_up_to_eight():
    rows = onejord_table(8)
    assert len(rows) == 36
    assert all(row['amplitude'] == row['j(m-j)'] == row['j'] * (row['m'] - row['j']) for row in rows)
    differs = {(row['m'], row['j']) for row in rows if not row['matches_m(m-j)']}
    assert differs == {(m, j) for m in range(2, 9) for j in range(1, m)}
