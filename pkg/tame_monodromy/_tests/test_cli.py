import json

import pytest
import yaml

from tame_monodromy import utils
from tame_monodromy._cli import RunConfig, main, run
from tame_monodromy.exceptions import RejectedInput

QUARTIC = {'g': 1, 'e': 4, 'tor': {}, 'ab': {'1/4': 1}, 'dual_ab': {'3/4': 1}}
SEMI_ABELIAN = {'g': 1, 'e': 1, 'tor': {'0': 1}, 'ab': {}, 'dual_ab': {}}
INCOMPLETE = {'g': 1, 'e': 3, 'tor': {'1/3': 1}, 'ab': {}, 'dual_ab': {}}


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    monkeypatch.setattr(utils, 'USER_DIR', str(tmp_path / 'home'))
    monkeypatch.delenv(utils.CONFIG_ENV_VAR, raising=False)


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


@pytest.fixture
def small_config(tmp_path):
    caps = {
        'max_g': 2, 'max_e': 4, 'oracle_max_g': 2, 'oracle_max_e': 4, 'oracle_cap': 6,
        'oracle_stride': 1, 'charpoly_max_dim': 4, 'weight_max_dim': 3, 'pair_max_dim': 2,
        'wedge_max_dim': 3, 'onejord_max_m': 3, 'cyclo_max_order': 12,
    }
    path = tmp_path / 'small.yaml'
    path.write_text(yaml.safe_dump({'caps': caps, 'harness': {'progress': False}}))
    return str(path)


def test_conductor_text(write, capsys):
    assert main(['conductor', write('a.json', QUARTIC), '--format', 'text']) == 0
    assert capsys.readouterr().out.strip() == '1/4'


def test_conductor_json(write, capsys):
    assert main(['conductor', write('a.json', QUARTIC)]) == 0
    assert json.loads(capsys.readouterr().out) == '1/4'


def test_validate_reports_findings(write, capsys):
    assert main(['validate', write('bad.json', INCOMPLETE)]) == 1
    findings = json.loads(capsys.readouterr().out)
    assert [f['message'] for f in findings] == ['m_tor not complete']


def test_validate_admissible(write, capsys):
    assert main(['validate', write('a.json', QUARTIC), '--format', 'text']) == 0
    assert capsys.readouterr().out.strip() == 'admissible'


def test_inadmissible_input_exits_one(write, capsys):
    assert main(['ranks', write('bad.json', INCOMPLETE)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out['error'] == 'InadmissibleError'
    assert out['findings'][0]['check'] == 'tor_complete'


def test_malformed_input_exits_two(tmp_path, write, capsys):
    bad = tmp_path / 'broken.json'
    bad.write_text('{"g": 1,')
    assert main(['ranks', str(bad)]) == 2
    assert json.loads(capsys.readouterr().out)['error'] == 'ParseError'

    assert main(['ranks', write('unreduced.json', dict(QUARTIC, ab={'2/8': 1}))]) == 2


def test_usage_errors(write, capsys):
    assert main([]) == 2
    assert main(['no-such-command']) == 2
    assert main(['base-change', write('a.json', QUARTIC), '--degree', '2']) == 2
    assert main(['mhs', write('b.json', QUARTIC)]) == 2
    assert main(['verify', '--seed', '1', '--cases', '-1']) == 2


def test_h1_text(write, capsys):
    assert main(['h1', write('a.json', SEMI_ABELIAN), '--format', 'text']) == 0
    assert capsys.readouterr().out.strip() == 'Jord_2(exp(2πi·0))'


def test_charpoly(write, capsys):
    assert main(['charpoly', write('a.json', QUARTIC)]) == 0
    assert json.loads(capsys.readouterr().out) == ['1', '0', '1']


def test_base_change(write, capsys):
    assert main(['base-change', write('a.json', QUARTIC), '--degree', '2', '--prime-to-p']) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out['e'], out['ab'], out['dual_ab']) == (2, {'1/2': 1}, {'1/2': 1})


def test_product_and_dual(write, capsys):
    a, b = write('a.json', QUARTIC), write('b.json', SEMI_ABELIAN)
    assert main(['product', a, b]) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out['g'], out['e'], out['tor']) == (2, 4, {'0': 1})

    assert main(['dual', a]) == 0
    assert json.loads(capsys.readouterr().out)['ab'] == {'1/4': 1}


def test_hg_and_weight(write, capsys):
    path = write('a.json', SEMI_ABELIAN)
    assert main(['hg', path]) == 0
    assert json.loads(capsys.readouterr().out)['global_max_block'] == 2

    assert main(['hg-weight', path, '--cap', '2']) == 0
    assert json.loads(capsys.readouterr().out)['top_alpha'] == 1

    assert main(['hg-weight', path, '--cap', '1']) == 2
    assert json.loads(capsys.readouterr().out)['error'] == 'OracleTooLargeError'


def test_mhs_and_isogeny_key(write, capsys):
    char_zero = dict(QUARTIC, flags={'residue_char_zero': True, 'principally_polarized': False})
    assert main(['mhs', write('a.json', char_zero)]) == 0
    assert json.loads(capsys.readouterr().out)['gr_m1_hodge_10'] == {'1/4': 1}

    assert main(['isogeny-key', write('b.json', QUARTIC)]) == 0
    assert json.loads(capsys.readouterr().out) == {'tor': {}, 'ab_plus_dual_ab': {'1/4': 1, '3/4': 1}}


def test_wedge(write, capsys):
    spec = [{'exponent': '0', 'size': 3, 'count': 1}]
    assert main(['wedge', write('s.json', spec), '--j', '2']) == 0
    out = json.loads(capsys.readouterr().out)
    assert out['max_blocks'] == {'0': 3}
    assert out['eigenvalues'] == ['0']


def test_weight_filtration(write, capsys):
    matrix = {'N': 1, 'rows': [[['0'], ['0']], [['1'], ['0']]]}
    assert main(['weight-filtration', write('n.json', matrix), '--center', '0']) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {'center': 0, 'graded_dims': {'-1': 1, '1': 1}, 'amplitude': 1}

    identity = {'N': 1, 'rows': [[['1'], ['0']], [['0'], ['1']]]}
    assert main(['weight-filtration', write('i.json', identity), '--center', '0']) == 2


def test_qpoly_and_factor(write, capsys):
    assert main(['qpoly', write('f.json', {'0': 2})]) == 0
    assert json.loads(capsys.readouterr().out) == ['1', '-2', '1']

    assert main(['factor-cyclotomic', write('p.json', ['1', '0', '1']), '--format', 'text']) == 0
    assert capsys.readouterr().out.strip() == 'Phi_4'

    assert main(['factor-cyclotomic', write('q.json', ['-2', '0', '1'])]) == 2
    assert json.loads(capsys.readouterr().out)['error'] == 'NotCyclotomicError'


def test_report(write, capsys):
    assert main(['report', write('a.json', QUARTIC)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out['conductor'] == '1/4'
    assert out['artin_conductor'] == 2


def test_verify(small_config, capsys):
    args = ['verify', '--seed', '42', '--cases', '2', '--config', small_config]
    assert main(args) == 0
    first = capsys.readouterr().out
    report = json.loads(first)
    assert report['passed'] is True
    assert report['cases'] == 2
    assert report['checks']['validate'] == 2

    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_verify_without_cases(small_config, capsys):
    assert main(['verify', '--seed', '42', '--cases', '0', '--config', small_config]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['findings'] == []
    assert report['onejord'] == []


def test_run_config():
    with pytest.raises(RejectedInput):
        RunConfig(command='verify')
    with pytest.raises(RejectedInput):
        RunConfig(command='product', inputs=['a.json'])
    with pytest.raises(RejectedInput):
        RunConfig(command='ranks', inputs=['a.json'], output_format='xml')


def test_run(write, capsys):
    status = run(RunConfig(command='ranks', inputs=[write('a.json', QUARTIC)]))
    assert status == 0
    assert json.loads(capsys.readouterr().out)['c'] == '1/4'


def test_undecodable_input_exits_two(tmp_path, capsys):
    bad = tmp_path / 'binary.json'
    bad.write_bytes(b'{"g": 1, "e": "\xff"}')
    assert main(['validate', str(bad)]) == 2
    assert json.loads(capsys.readouterr().out)['error'] == 'ParseError'


def test_malformed_config_exits_two(tmp_path, capsys):
    bad = tmp_path / 'bad.yaml'
    bad.write_text('caps: [1, 2\n')
    assert main(['verify', '--seed', '1', '--cases', '1', '--config', str(bad)]) == 2
    assert json.loads(capsys.readouterr().out)['error'] == 'ParseError'


@pytest.mark.parametrize('seed', ['-5', str(2 ** 64)])
def test_seed_out_of_range_exits_two(seed, capsys):
    assert main(['verify', '--seed', seed, '--cases', '1']) == 2
    assert json.loads(capsys.readouterr().out)['error'] == 'RejectedInput'

    with pytest.raises(RejectedInput):
        RunConfig(command='verify', seed=int(seed))
