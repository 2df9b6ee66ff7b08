"""Plain-text ``key = value`` configuration with optional ``[section]`` headers.

An empty file gives the baseline fibre scenario: signal/decoy intensities
0.5/0.25 sent with probability 0.7/0.3, 0.4 ns bins, 1 kHz background,
25 dB loss and a +-3 ms clock offset window.
"""

import configparser
import math
from dataclasses import dataclass, field, fields, replace

from .channel import ChannelConfig
from .errors import InvalidConfig
from .protocol import build_intensity_table

SWEEPABLE = {
    "block_size": "n_alice",
    "background_rate": "bcr",
    "channel_loss_db": "loss_db",
    "sync_brightness": "sync_mu",
    "sync_probability": "sync_probability",
}

SECTIONS = {
    "protocol": ("mu_signal", "mu_decoy", "p_signal", "p_decoy", "sync_mu", "sync_probability",
                 "n_alice", "template_mode", "zero_mean"),
    "channel": ("loss_db", "bcr", "t_bin", "dead_bins", "delta_ppm"),
    "sync": ("d_max_s", "d_max_bins", "true_offset", "delta_grid", "exclusion_halfwidth", "method"),
    "sweep": ("swept_param", "grid", "trials_per_point", "base_seed", "score_window"),
}


@dataclass(frozen=True)
class Config:
    # protocol
    mu_signal: float = 0.5
    mu_decoy: float = 0.25
    p_signal: float = 0.7
    p_decoy: float = 0.3
    sync_mu: float = 0.0
    sync_probability: float = 0.0
    n_alice: int = 1_000_000
    template_mode: str = "intensity"
    zero_mean: bool = True
    # channel
    loss_db: float = 25.0
    bcr: float = 1e3
    t_bin: float = 4e-10
    dead_bins: int = 0
    delta_ppm: float = 0.0
    # sync
    d_max_s: float = 3e-3
    d_max_bins: int | None = None
    true_offset: int | None = None
    delta_grid: tuple = ()
    exclusion_halfwidth: int = 2
    method: str = "fft"
    # sweep
    swept_param: str | None = None
    grid: tuple = field(default=())
    trials_per_point: int = 100
    base_seed: int = 0
    score_window: int = 100

    def __post_init__(self):
        # building these runs their own invariant checks
        self.table()
        self.channel()
        if self.n_alice < 1:
            raise InvalidConfig(f"n_alice must be >= 1, got {self.n_alice}")
        if self.template_mode not in ("binary", "intensity"):
            raise InvalidConfig(f"template_mode must be 'binary' or 'intensity', got {self.template_mode!r}")
        if self.method not in ("fft", "direct", "sparse"):
            raise InvalidConfig(f"method must be fft, direct or sparse, got {self.method!r}")
        if self.d_max < 0:
            raise InvalidConfig(f"d_max must be >= 0, got {self.d_max}")
        if self.true_offset is not None and abs(self.true_offset) > self.d_max:
            raise InvalidConfig(f"|true_offset| = {abs(self.true_offset)} exceeds d_max = {self.d_max}")
        if self.delta_grid and 0.0 not in self.delta_grid:
            raise InvalidConfig("delta_grid must contain 0")
        if self.exclusion_halfwidth < 0:
            raise InvalidConfig("exclusion_halfwidth must be >= 0")
        if self.trials_per_point < 1:
            raise InvalidConfig(f"trials_per_point must be >= 1, got {self.trials_per_point}")
        if self.score_window < 1:
            raise InvalidConfig(f"score_window must be >= 1, got {self.score_window}")
        if self.base_seed < 0 or self.base_seed >= 2 ** 64:
            raise InvalidConfig(f"base_seed must be an unsigned 64-bit integer, got {self.base_seed}")
        if self.swept_param is not None:
            if self.swept_param not in SWEEPABLE:
                raise InvalidConfig(f"swept_param must be one of {sorted(SWEEPABLE)}, got {self.swept_param!r}")
            if not self.grid:
                raise InvalidConfig("grid must be non-empty when swept_param is set")
            diffs = [b - a for a, b in zip(self.grid, self.grid[1:])]
            if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
                raise InvalidConfig("grid must be strictly monotone")

    @property
    def d_max(self):
        if self.d_max_bins is not None:
            return int(self.d_max_bins)
        return int(round(self.d_max_s / self.t_bin))

    @property
    def record_length(self):
        return self.n_alice + 2 * self.d_max

    def table(self):
        if self.sync_probability > 0:
            return build_intensity_table(self.mu_signal, self.mu_decoy, self.p_signal, self.p_decoy,
                                         self.sync_mu, self.sync_probability)
        return build_intensity_table(self.mu_signal, self.mu_decoy, self.p_signal, self.p_decoy)

    def channel(self):
        return ChannelConfig(self.loss_db, self.bcr, self.t_bin, self.dead_bins, self.delta_ppm)

    def with_param(self, swept_param, value):
        """Copy of this config with one sweepable parameter set to ``value``."""
        name = SWEEPABLE[swept_param]
        if name == "n_alice":
            value = int(round(value))
        return replace(self, **{name: value})


_KINDS = {
    "n_alice": "int", "dead_bins": "int", "exclusion_halfwidth": "int", "trials_per_point": "int",
    "base_seed": "int", "score_window": "int",
    "d_max_bins": "optional int", "true_offset": "optional int",
    "zero_mean": "bool",
    "delta_grid": "list", "grid": "list",
    "template_mode": "str", "method": "str", "swept_param": "optional str",
}
_KINDS.update({f.name: "float" for f in fields(Config) if f.name not in _KINDS})
_SECTION_OF = {key: sec for sec, keys in SECTIONS.items() for key in keys}


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text):
    v = float(text)
    if not v.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(text) if text.strip().lstrip("+-").isdigit() else int(v)


def parse_grid(text):
    """Parse ``a, b, c`` or an inclusive range ``start:stop:step``."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step == 0 or (stop - start) / step < 0:
            raise ValueError(f"bad range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    return tuple(float(x) for x in text.split(",") if x.strip())


def _convert(key, text):
    kind = _KINDS[key]
    text = text.strip()
    if kind.startswith("optional") and text.lower() in ("", "none", "random"):
        return None
    if kind == "float":
        return float(text)
    if kind.endswith("int"):
        return _parse_int(text)
    if kind == "bool":
        return _parse_bool(text)
    if kind == "list":
        return parse_grid(text)
    return text


def parse_config_text(text):
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__",
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[__top__]\n" + text)
    except configparser.Error as exc:
        raise InvalidConfig(f"malformed config: {exc}") from None
    values = {}
    for section in parser.sections():
        if section != "__top__" and section not in SECTIONS:
            raise InvalidConfig(f"unknown section [{section}]; expected one of {sorted(SECTIONS)}")
        for key, raw in parser.items(section):
            if key not in _KINDS:
                raise InvalidConfig(f"unknown config key {key!r}")
            if section != "__top__" and _SECTION_OF[key] != section:
                raise InvalidConfig(f"key {key!r} belongs in [{_SECTION_OF[key]}], not [{section}]")
            if key in values:
                raise InvalidConfig(f"config key {key!r} given twice")
            try:
                values[key] = _convert(key, raw)
            except ValueError as exc:
                raise InvalidConfig(f"bad value for {key!r}: {exc}") from None
    return Config(**values)


def parse_config(path):
    """Read and validate a configuration file."""
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())
