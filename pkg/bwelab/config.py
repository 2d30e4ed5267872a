"""bwelab configurations.

Import this module in every module that needs access to bwelab defaults.

Usage:

    from bwelab import config
    print(config.step_ms)
    print(config.settings.get('ukf.q_bandwidth'))
    config.settings.set('reward.weights', [0.5, 0.3, 0.2])
"""
import copy
import json
import logging
import os

from .exception import ConfigurationError

logger = logging.getLogger(__name__)


class Settings(object):
    """bwelab settings.

    Defaults are loaded once from the packaged config.json. Values are addressed
    with dotted keys in the form of ``section.key`` (e.g. ``ukf.alpha``).

    Usage:

        settings = Settings()
        settings.load_from_file('./lab.cfg')
        print(settings.get('bc.batch_size'))
    """

    __defaults = {}

    __configFile = os.path.join(os.path.dirname(__file__), 'config.json')

    def __init__(self):
        if not Settings.__defaults:
            Settings.__defaults = self._read_json(self.__configFile)
        self._values = copy.deepcopy(Settings.__defaults)

    @staticmethod
    def _read_json(file_path):
        with open(file_path, 'r') as cfg:
            values = json.load(cfg)
        return {section: dict(keys) for section, keys in values.items()
                if not section.startswith('__')}

    @property
    def sections(self):
        """List of configuration sections."""
        return sorted(self._values.keys())

    def keys(self):
        """Return all the dotted keys."""
        return sorted('{}.{}'.format(s, k) for s in self._values
                      for k in self._values[s])

    def _split(self, key):
        try:
            section, name = key.strip().split('.', 1)
        except ValueError:
            raise ConfigurationError('config key', key, self.keys())
        if section not in self._values or name not in self._values[section]:
            raise ConfigurationError('config key', key, self.keys())
        return section, name

    def get(self, key):
        """Get the value for a dotted key."""
        section, name = self._split(key)
        return copy.deepcopy(self._values[section][name])

    def set(self, key, value):
        """Set the value for a dotted key. Unknown keys raise ConfigurationError."""
        section, name = self._split(key)
        self._values[section][name] = value

    def section(self, section):
        """Return a copy of all the values in a section as a dictionary."""
        if section not in self._values:
            raise ConfigurationError('config section', section, self.sections)
        return copy.deepcopy(self._values[section])

    def reset(self):
        """Restore packaged defaults."""
        self._values = copy.deepcopy(Settings.__defaults)

    def to_json(self):
        """Settings as a dictionary."""
        return copy.deepcopy(self._values)

    @staticmethod
    def parse_value(text):
        """Parse a config value as int, float, comma-separated list or string."""
        text = text.strip()
        if ',' in text:
            return [Settings.parse_value(t) for t in text.split(',') if t.strip()]
        for num_type in (int, float):
            try:
                return num_type(text)
            except ValueError:
                continue
        return text

    def load_from_file(self, file_path):
        """Load settings from a json file or a key-value text file.

        The key-value format has one ``section.key = value`` per line. Lines
        starting with # and empty lines are ignored.
        """
        if not os.path.isfile(str(file_path)):
            raise ConfigurationError('config file', file_path)

        if str(file_path).endswith('.json'):
            for section, keys in self._read_json(file_path).items():
                for name, value in keys.items():
                    self.set('{}.{}'.format(section, name), value)
            return

        with open(file_path, 'r') as cfg:
            for count, line in enumerate(cfg):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise ConfigurationError(
                        'line {} of {}'.format(count + 1, file_path), line)
                key, value = line.split('=', 1)
                self.set(key, self.parse_value(value))
                logger.debug('%s set to %s from %s', key.strip(), value.strip(),
                             file_path)


settings = Settings()

step_ms = settings.get('netsim.step_ms')
"""Duration of a monitor interval in milliseconds."""

min_kbps = float(settings.get('netsim.min_kbps'))
"""Lowest valid bandwidth estimate in kbps."""

max_kbps = float(settings.get('netsim.max_kbps'))
"""Highest valid bandwidth estimate in kbps."""

long_term_steps = 10
"""Number of short-term intervals in a long-term (600 ms) interval."""
