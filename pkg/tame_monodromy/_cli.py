r"""
Command-line front-end. Every subcommand reads JSON files, calls one
library function and prints JSON (or a short text rendering) on stdout.

Exit status: 0 on success, 1 when error findings are reported or the
abelian type is inadmissible, 2 on malformed input and usage errors.
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field

from tame_monodromy import abvar
from tame_monodromy.cyclotomic_polys import IntPoly, factor_cyclotomic, q_poly
from tame_monodromy.exact_linalg import CycloMatrix
from tame_monodromy.exceptions import InadmissibleError, RejectedInput
from tame_monodromy.jordan_calc import JordanSpec, render_text, wedge_candidates, wedge_max_ranks
from tame_monodromy.rational_circle import MultFunc
from tame_monodromy.utils import dump_json, load_config, read_json
from tame_monodromy.verify import verify_harness
from tame_monodromy.weight_filt import amplitude, weight_filtration

__all__ = ['RunConfig', 'run', 'build_parser', 'main']

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    output_format: str = 'json'
    config_file: str = None
    seed: int = None
    cases: int = None
    workers: int = None
    degree: int = None
    prime_to_p: bool = False
    cap: int = None
    j: int = None
    center: int = None
    strict: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise RejectedInput(f'unknown command {self.command!r}')
        if self.output_format not in ('json', 'text'):
            raise RejectedInput(f'unknown output format {self.output_format!r}')

        arity = COMMANDS[self.command][1]
        if len(self.inputs) != arity:
            raise RejectedInput(f'{self.command} takes {arity} input file(s), got {len(self.inputs)}')

        if self.command == 'verify' and self.seed is None:
            raise RejectedInput('verify needs --seed')
        if self.seed is not None and not 0 <= self.seed < 2 ** 64:
            raise RejectedInput(f'--seed must be a 64-bit unsigned integer, got {self.seed}')
        for name in ('cases', 'workers', 'degree', 'cap', 'j'):
            value = getattr(self, name)
            if value is not None and value < (0 if name == 'cases' else 1):
                raise RejectedInput(f'--{name} must be positive, got {value}')


@dataclass
class _Result:
    data: object
    text: str = None
    status: int = EXIT_OK


def _type(path):
    return abvar.AbelianType.from_json(read_json(path))


def _findings_status(findings):
    return EXIT_FINDINGS if any(f.is_error for f in findings) else EXIT_OK


def _validate(config):
    findings = abvar.validate(_type(config.inputs[0]), strict=config.strict)
    data = [f.to_json() for f in findings]
    text = '\n'.join(f'{f.severity}: {f.message}' for f in findings) or 'admissible'
    return _Result(data, text, _findings_status(findings))


def _ranks(config):
    r = abvar.ranks(_type(config.inputs[0]))
    return _Result(r.to_json(), ' '.join(f'{k}={v}' for k, v in r.to_json().items()))


def _conductor(config):
    c = str(abvar.conductor(_type(config.inputs[0])))
    return _Result(c, c)


def _h1(config):
    spec = abvar.h1_monodromy(_type(config.inputs[0]))
    return _Result(spec.to_json(), render_text(spec))


def _charpoly(config):
    P = abvar.h1_charpoly(_type(config.inputs[0]))
    return _Result(P.to_json(), str(P))


def _hg(config):
    analysis = abvar.hg_analysis(_type(config.inputs[0]))
    text = ', '.join(f'{x}: {b}' for x, b in analysis.per_eigenvalue.items())
    return _Result(analysis.to_json(), text, _findings_status(analysis.findings))


def _base_change(config):
    if config.degree is None:
        raise RejectedInput('base-change needs --degree')
    A = abvar.base_change(_type(config.inputs[0]), config.degree, config.prime_to_p)
    return _Result(A.to_json())


def _product(config):
    A = abvar.product(_type(config.inputs[0]), _type(config.inputs[1]))
    return _Result(A.to_json())


def _dual(config):
    return _Result(abvar.dual(_type(config.inputs[0])).to_json())


def _isogeny_key(config):
    tor, ab = abvar.isogeny_key(_type(config.inputs[0]))
    return _Result({'tor': tor.to_json(), 'ab_plus_dual_ab': ab.to_json()})


def _mhs(config):
    return _Result(abvar.mhs_summary(_type(config.inputs[0])).to_json())


def _hg_weight(config):
    cap = config.cap if config.cap is not None else _caps(config)['oracle_cap']
    profile = abvar.hg_weight_profile(_type(config.inputs[0]), cap)
    return _Result(profile.to_json(), status=_findings_status(profile.findings))


def _wedge(config):
    if config.j is None:
        raise RejectedInput('wedge needs --j')
    spec = JordanSpec.from_json(read_json(config.inputs[0]))
    blocks = wedge_max_ranks(spec, config.j)
    data = {
        'j': config.j,
        'eigenvalues': [str(x) for x in wedge_candidates(spec, config.j)],
        'max_blocks': {str(x): b for x, b in blocks.items()},
    }
    return _Result(data, ', '.join(f'{x}: {b}' for x, b in blocks.items()))


def _weight_filtration(config):
    if config.center is None:
        raise RejectedInput('weight-filtration needs --center')
    N = CycloMatrix.from_json(read_json(config.inputs[0]))
    W = weight_filtration(N, config.center)
    data = dict(W.to_json(), amplitude=amplitude(W))
    return _Result(data)


def _qpoly(config):
    P = q_poly(MultFunc.from_json(read_json(config.inputs[0])))
    return _Result(P.to_json(), str(P))


def _factor_cyclotomic(config):
    factors = factor_cyclotomic(IntPoly.from_json(read_json(config.inputs[0])))
    text = ' * '.join(f'Phi_{d}^{m}' if m > 1 else f'Phi_{d}' for d, m in factors.factors) or '1'
    return _Result(factors.to_json(), text)


def _report(config):
    return _Result(abvar.report(_type(config.inputs[0]), strict=config.strict))


def _caps(config):
    return load_config(config.config_file)['caps']


def _verify(config):
    settings = load_config(config.config_file)
    harness = settings.get('harness', {})
    workers = config.workers if config.workers is not None else harness.get('workers', 1)
    progress = bool(harness.get('progress', False)) and sys.stderr.isatty()

    report = verify_harness(config.seed, config.cases or 0, settings['caps'], workers=workers, progress=progress)
    text = f'{report.cases} cases, {sum(report.checks.values())} checks, {len(report.findings)} findings'
    return _Result(report.to_json(), text, EXIT_OK if report.passed else EXIT_FINDINGS)


# name -> (handler, number of input files)
COMMANDS = {
    'validate': (_validate, 1),
    'ranks': (_ranks, 1),
    'conductor': (_conductor, 1),
    'h1': (_h1, 1),
    'charpoly': (_charpoly, 1),
    'hg': (_hg, 1),
    'base-change': (_base_change, 1),
    'product': (_product, 2),
    'dual': (_dual, 1),
    'isogeny-key': (_isogeny_key, 1),
    'mhs': (_mhs, 1),
    'hg-weight': (_hg_weight, 1),
    'wedge': (_wedge, 1),
    'weight-filtration': (_weight_filtration, 1),
    'qpoly': (_qpoly, 1),
    'factor-cyclotomic': (_factor_cyclotomic, 1),
    'report': (_report, 1),
    'verify': (_verify, 0),
}


def _emit(result, output_format):
    if output_format == 'text' and result.text is not None:
        print(result.text)
    else:
        print(dump_json(result.data))


def run(config):
    r"""Run one command and print its result; returns the exit status."""
    handler, _ = COMMANDS[config.command]
    try:
        result = handler(config)
    except InadmissibleError as err:
        print(dump_json({
            'error': 'InadmissibleError',
            'message': str(err),
            'findings': [f.to_json() for f in err.findings],
        }))
        return EXIT_FINDINGS
    except RejectedInput as err:
        print(dump_json({'error': type(err).__name__, 'message': str(err)}))
        return EXIT_USAGE

    _emit(result, config.output_format)
    return result.status


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', dest='output_format', choices=('json', 'text'), default='json',
                        help='Output format of the report on stdout')
    common.add_argument('--config', dest='config_file', default=None,
                        help='YAML file with caps and harness settings')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='Log at INFO (-v) or DEBUG (-vv) on stderr')

    parser = argparse.ArgumentParser(
        prog='tame-monodromy', description='Exact monodromy invariants of tamely ramified abelian varieties.'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    single = {
        'validate': 'Admissibility findings of an abelian type',
        'ranks': 'Toric, unipotent and abelian ranks and the conductor',
        'conductor': 'Base change conductor as a rational string',
        'h1': 'Jordan form of the monodromy on H^1',
        'charpoly': 'Characteristic polynomial of the monodromy on H^1',
        'hg': 'Largest Jordan blocks on H^g',
        'dual': 'Type of the dual abelian variety',
        'isogeny-key': 'Isogeny invariants',
        'mhs': 'Graded pieces of the limit mixed Hodge structure',
        'report': 'Everything computable about an abelian type',
    }
    for name, description in single.items():
        sub = subparsers.add_parser(name, parents=[common], help=description)
        sub.add_argument('inputs', nargs=1, help='Abelian type JSON file')
        if name in ('validate', 'report'):
            sub.add_argument('--strict', action='store_true', help='Warn when e is not minimal')

    sub = subparsers.add_parser('base-change', parents=[common], help='Type over a tame extension')
    sub.add_argument('inputs', nargs=1)
    sub.add_argument('--degree', type=int, required=True, help='Degree of the extension')
    sub.add_argument('--prime-to-p', dest='prime_to_p', action='store_true',
                     help='Declare the degree prime to the residue characteristic')

    sub = subparsers.add_parser('product', parents=[common], help='Type of a product')
    sub.add_argument('inputs', nargs=2)

    sub = subparsers.add_parser('hg-weight', parents=[common], help='Weight profile on H^g from explicit matrices')
    sub.add_argument('inputs', nargs=1)
    sub.add_argument('--cap', type=int, default=None, help='Largest dimension of H^g to materialize')

    sub = subparsers.add_parser('wedge', parents=[common], help='Largest Jordan blocks of an exterior power')
    sub.add_argument('inputs', nargs=1, help='Jordan spec JSON file')
    sub.add_argument('--j', type=int, required=True, help='Exterior power degree')

    sub = subparsers.add_parser('weight-filtration', parents=[common], help='Weight filtration of a nilpotent matrix')
    sub.add_argument('inputs', nargs=1, help='Matrix JSON file')
    sub.add_argument('--center', type=int, required=True, help='Center of the filtration')

    sub = subparsers.add_parser('qpoly', parents=[common], help='Product of cyclotomic polynomials of a function')
    sub.add_argument('inputs', nargs=1, help='Multiplicity function JSON file')

    sub = subparsers.add_parser('factor-cyclotomic', parents=[common], help='Factor a product of cyclotomic polynomials')
    sub.add_argument('inputs', nargs=1, help='Integer polynomial JSON file')

    sub = subparsers.add_parser('verify', parents=[common], help='Randomized verification harness')
    sub.add_argument('--seed', type=int, required=True)
    sub.add_argument('--cases', type=int, default=100)
    sub.add_argument('--workers', type=int, default=None, help='Worker processes, 1 runs in-process')

    return parser


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else EXIT_USAGE

    _configure_logging(args.verbose)
    options = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    options.setdefault('inputs', [])

    try:
        config = RunConfig(**options)
    except RejectedInput as err:
        print(dump_json({'error': type(err).__name__, 'message': str(err)}))
        return EXIT_USAGE
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
