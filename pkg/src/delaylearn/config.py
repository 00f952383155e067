"""Experiment configuration and its flat ``key = value`` file format.

Lines are ``key = value``; ``#`` starts a comment.  List values are comma
separated.  Unknown keys are rejected.
"""
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .dataio import SplitSpec
from .errors import ConfigError
from .neuron import IzhikevichParams
from .plasticity import PlasticityConfig


@dataclass(frozen=True)
class ExperimentConfig:
    # network
    layer_size: int = 100
    n_layers: int = 3
    connection_probability: float = 0.1
    weight: float = 6.0
    init_delay_min: int = 1
    init_delay_max: int = 39
    # digits and instances
    digits_trained: tuple = (0, 1)
    digits_unseen: tuple = (2,)
    train_instances: int = 20
    test_instances: int = 25
    epochs: int = 1
    # decoding
    pgp_thresholds: tuple = (0.8, 0.9)
    readout_layers: tuple = (2, 3)  # 1-based, input layer is 1
    # simulation
    duration: float = 200.0
    dt: float = 0.5
    impulse_ms: float = 1.0
    t_max: float = 40.0
    invert: bool = False
    izh_a: float = 0.02
    izh_b: float = 0.2
    izh_c: float = -65.0
    izh_d: float = 8.0
    # plasticity
    window: float = 10.0
    amplitude: float = 3.0
    slope: float = 3.0
    delay_min: float = 1.0
    delay_max: float = 60.0
    # data
    images_file: str = "train-images-idx3-ubyte"
    labels_file: str = "train-labels-idx1-ubyte"
    seed: int = 0

    def __post_init__(self):
        if self.n_layers < 2 or self.layer_size <= 0:
            raise ConfigError("need at least 2 layers of positive size")
        if not all(0.0 < t <= 1.0 for t in self.pgp_thresholds) or not self.pgp_thresholds:
            raise ConfigError(f"PGP thresholds must lie in (0, 1], got {self.pgp_thresholds}")
        if self.train_instances < 0 or self.test_instances <= 0 or self.epochs < 0:
            raise ConfigError("train_instances >= 0, test_instances > 0 and epochs >= 0 required")
        if not all(2 <= l <= self.n_layers for l in self.readout_layers) or not self.readout_layers:
            raise ConfigError(f"readout layers must be within 2..{self.n_layers}")
        if self.dt <= 0 or self.duration <= self.t_max:
            raise ConfigError("dt must be positive and the trial must outlast the input window")
        # constructs and validates the nested configs
        self.plasticity
        self.params
        self.split

    @property
    def layer_sizes(self):
        return (self.layer_size,) * self.n_layers

    @property
    def params(self):
        return IzhikevichParams(self.izh_a, self.izh_b, self.izh_c, self.izh_d)

    @property
    def plasticity(self):
        return PlasticityConfig(self.window, self.amplitude, self.slope,
                                self.delay_min, self.delay_max)

    @property
    def split(self):
        return SplitSpec(tuple(self.digits_trained), tuple(self.digits_unseen),
                         self.train_instances, self.test_instances, self.seed)

    def with_overrides(self, **values):
        return replace(self, **{k: v for k, v in values.items() if v is not None})


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}
_DEFAULTS = ExperimentConfig()


def _convert(name, text):
    default = getattr(_DEFAULTS, name)
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if isinstance(default, tuple):
            item = type(default[0]) if default else int
            return tuple(item(x) for x in text.replace(",", " ").split())
        return type(default)(text)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {text!r}") from None


def parse_config(text, base=None):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, value)
    return replace(base or _DEFAULTS, **values)


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text())


def format_config(config):
    lines = []
    for name in _FIELDS:
        value = getattr(config, name)
        if isinstance(value, tuple):
            value = ", ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"


def override_value(name, text):
    """Convert a command-line override string for ``name``."""
    if name not in _FIELDS:
        raise ConfigError(f"unknown config key {name!r}")
    return _convert(name, text)
