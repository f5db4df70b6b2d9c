"""Run configuration: file parsing, validation, defaults, echo.

The config format is line-oriented ``key = value`` grouped in ``[section]``
headers (diff-friendly for regression suites).  CLI flags override file
values; unknown keys are rejected with their path and line number.
"""

import os
from dataclasses import dataclass, fields

from .errors import ConfigError

CASES = ("free_stream", "vortex", "double_mach", "cylinder", "scl_check")
SCHEMES = ("linear_upwind5", "weno5", "weno7")
SPLITTINGS = ("local_lf", "global_lf", "case_default")


@dataclass
class RunConfig:
    """Fully validated configuration for one harness run."""

    case: str = "free_stream"
    # scheme
    scheme: str = "weno5"
    fp: bool = True
    metric_order: int = 6
    splitting: str = "case_default"
    weno_eps: float = 1e-6
    weno_power: int = 2
    # grid
    nx: int = 0           # 0: the case default
    ny: int = 0
    randomness: float = 0.2
    seed: int = 2024
    paper_resolution: bool = False
    resolutions: tuple = ()   # vortex ladder override
    # time
    dt: float = 0.0       # 0: unset
    cfl: float = 0.0      # 0: unset
    t_end: float = 0.0    # 0: case default
    # run
    out: str = "out"
    threads: int = 0      # 0: library default
    overwrite: bool = False

    def validate(self):
        if self.case not in CASES:
            raise ConfigError(f"run.case: unknown case {self.case!r}, expected one of {CASES}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme.name: unknown scheme {self.scheme!r}")
        if self.metric_order not in (2, 4, 6, 8):
            raise ConfigError(f"scheme.metric_order: must be 2, 4, 6 or 8, got {self.metric_order}")
        if self.splitting not in SPLITTINGS:
            raise ConfigError(f"scheme.splitting: unknown value {self.splitting!r}")
        if self.weno_eps <= 0.0:
            raise ConfigError("scheme.eps: must be positive")
        if self.dt and self.cfl:
            raise ConfigError("time.dt and time.cfl are mutually exclusive; set exactly one")
        if self.dt < 0.0 or self.cfl < 0.0:
            raise ConfigError("time.dt and time.cfl must be nonnegative")
        if not 0.0 <= self.randomness < 0.5:
            raise ConfigError("grid.randomness: must satisfy 0 <= r < 0.5")
        if self.nx < 0 or self.ny < 0:
            raise ConfigError("grid.nx/grid.ny must be nonnegative")
        return self


# (section, key) -> (attribute, parser)
def _parse_bool(s):
    low = s.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_resolutions(s):
    vals = tuple(int(v) for v in s.replace(",", " ").split())
    if not vals:
        raise ValueError("empty resolution list")
    return vals


_KEYMAP = {
    ("run", "case"): ("case", str),
    ("run", "out"): ("out", str),
    ("run", "threads"): ("threads", int),
    ("run", "overwrite"): ("overwrite", _parse_bool),
    ("scheme", "name"): ("scheme", str),
    ("scheme", "fp"): ("fp", _parse_bool),
    ("scheme", "metric_order"): ("metric_order", int),
    ("scheme", "splitting"): ("splitting", str),
    ("scheme", "eps"): ("weno_eps", float),
    ("scheme", "power"): ("weno_power", int),
    ("grid", "nx"): ("nx", int),
    ("grid", "ny"): ("ny", int),
    ("grid", "randomness"): ("randomness", float),
    ("grid", "seed"): ("seed", int),
    ("grid", "paper_resolution"): ("paper_resolution", _parse_bool),
    ("grid", "resolutions"): ("resolutions", _parse_resolutions),
    ("time", "dt"): ("dt", float),
    ("time", "cfl"): ("cfl", float),
    ("time", "t_end"): ("t_end", float),
}

_ATTR_TO_SECTION_KEY = {attr: sk for sk, (attr, _) in _KEYMAP.items()}


def parse_config(path=None, text=None, overrides=None):
    """Read a config file (or text), apply overrides, validate.

    ``overrides`` maps RunConfig attribute names to already-typed values
    (the CLI layer builds it from flags).
    """
    cfg = RunConfig()
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            text = fh.read()
    if text is not None:
        section = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if section is None:
                raise ConfigError(f"line {lineno}: key {key!r} outside any [section]")
            if (section, key) not in _KEYMAP:
                raise ConfigError(f"line {lineno}: unknown key {section}.{key}")
            attr, parser = _KEYMAP[(section, key)]
            try:
                setattr(cfg, attr, parser(value))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"line {lineno}: bad value for {section}.{key}: {exc}")
    if overrides:
        for attr, value in overrides.items():
            if value is None:
                continue
            if attr not in {f.name for f in fields(RunConfig)}:
                raise ConfigError(f"unknown config attribute {attr!r}")
            setattr(cfg, attr, value)
    return cfg.validate()


def echo_config(cfg):
    """Render the canonical config text; parse(echo(cfg)) == cfg."""
    sections = {}
    for attr, (section, key) in _ATTR_TO_SECTION_KEY.items():
        value = getattr(cfg, attr)
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, tuple):
            if not value:
                continue
            rendered = " ".join(str(v) for v in value)
        elif isinstance(value, float):
            rendered = f"{value:.17g}"
        else:
            rendered = str(value)
        sections.setdefault(section, []).append((key, rendered))
    lines = []
    for sec in ("run", "scheme", "grid", "time"):
        if sec not in sections:
            continue
        lines.append(f"[{sec}]")
        for key, rendered in sorted(sections[sec]):
            lines.append(f"{key} = {rendered}")
        lines.append("")
    return "\n".join(lines)


def config_as_dict(cfg):
    return {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
