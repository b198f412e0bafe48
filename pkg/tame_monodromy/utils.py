import os
import json
import yaml
from copy import deepcopy
from dataclasses import dataclass, field
from pathlib import Path

from tame_monodromy.exceptions import ParseError, RejectedInput

__all__ = [
    'Finding',
    'abspath',
    'read_yaml',
    'get_configs',
    'load_config',
    'read_json',
    'dump_json',
    'CONFIG_ENV_VAR',
]

CONFIG_ENV_VAR = 'TAME_MONODROMY_CONFIG'
USER_DIR = os.path.join(os.path.expanduser('~'), '.tame_monodromy')
CONFIG_SECTIONS = ('caps', 'harness')


@dataclass(frozen=True)
class Finding:
    r"""A failed check, reported as data rather than raised."""
    check: str
    message: str
    witnesses: dict = field(default_factory=dict)
    severity: str = 'error'

    @property
    def is_error(self):
        return self.severity == 'error'

    def to_json(self):
        return {
            'check': self.check,
            'message': self.message,
            'severity': self.severity,
            'witnesses': self.witnesses,
        }


def abspath(root, relpath):
    root = Path(root)
    if root.is_dir():
        path = root/relpath
    else:
        path = root.parent/relpath
    return str(path.absolute())


def read_yaml(path):
    try:
        with open(path, mode='r', encoding='utf-8') as f:
            config = yaml.safe_load(f)
    except (yaml.YAMLError, UnicodeDecodeError) as err:
        raise ParseError(f'{path}: invalid YAML ({err})')

    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ParseError(f'{path} must hold a YAML mapping')
    return config


def get_configs():
    # get dict of all named configs, user configs override bundled ones
    config_path = abspath(__file__, 'configs')
    configs = {}
    for fn in sorted(os.listdir(config_path)):
        if fn.endswith('.yaml'):
            configs[fn[:-len('.yaml')]] = os.path.join(config_path, fn)

    user_path = os.path.join(USER_DIR, 'configs')
    if os.path.isdir(user_path):
        for fn in sorted(os.listdir(user_path)):
            if fn.endswith('.yaml'):
                configs[fn[:-len('.yaml')]] = os.path.join(user_path, fn)

    return configs


def _merge(base, update):
    for section, values in update.items():
        if isinstance(values, dict) and isinstance(base.get(section), dict):
            base[section].update(values)
        else:
            base[section] = values
    return base


def _check_config(config, source):
    for section in CONFIG_SECTIONS:
        if not isinstance(config.get(section, {}), dict):
            raise ParseError(f'{source}: section {section!r} must be a mapping')

    for name, value in config.get('caps', {}).items():
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise RejectedInput(f'{source}: cap {name!r} must be a positive integer, got {value!r}')


def load_config(config_file=None, overrides=None, name='verify'):
    r"""
    Layered run configuration: bundled defaults, then the user config
    directory, then the file named by $TAME_MONODROMY_CONFIG, then
    ``config_file``, then ``overrides``.
    """
    configs = get_configs()
    bundled = abspath(__file__, f'configs/{name}.yaml')
    config = read_yaml(bundled)

    layers = []
    if configs.get(name) != bundled:
        layers.append(configs[name])

    if os.environ.get(CONFIG_ENV_VAR):
        layers.append(os.environ[CONFIG_ENV_VAR])

    if config_file is not None:
        layers.append(config_file)

    for path in layers:
        if not os.path.isfile(path):
            raise RejectedInput(f'config file {path} does not exist')
        layer = read_yaml(path)
        _check_config(layer, path)
        _merge(config, layer)

    if overrides:
        _merge(config, deepcopy(overrides))

    _check_config(config, 'configuration')
    return config


def read_json(path):
    try:
        with open(path, mode='r', encoding='utf-8') as f:
            return json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as err:
        raise ParseError(f'{path}: invalid JSON ({err})')
    except OSError as err:
        raise ParseError(f'{path}: {err.strerror}')


def dump_json(obj):
    # dicts are built in canonical order, so no key sorting here
    return json.dumps(obj, indent=2, ensure_ascii=False)
