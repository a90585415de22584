"""Flat key=value run configuration with a canonical serialization.

Format rules: full-line comments start with '#', blank lines are ignored,
and the first meaningful line must be the schema marker so stale files
fail loudly.  Keys are dotted, values are typed by a fixed schema; the
open `expected.` namespace carries pinned reference numbers.  Environment
variables named SPECTRAN_<KEY> override file values, with '__' standing
for the dot.  The canonical dump (schema line, sorted keys, 17 significant
digits) backs a sha256 digest and round-trips through the parser.
"""

import hashlib
import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .grids import Grid1D, Grid2D
from .model import ModelParams, make_potential

SCHEMA_LINE = "spectran-config-1"
ENV_PREFIX = "SPECTRAN_"
EXPECTED_PREFIX = "expected."

_FLOAT = "float"
_INT = "int"
_STR = "str"
_FLOATS = "float-list"
_INTS = "int-list"

# key -> (type tag, default)
SCHEMA = {
    "model.omega": (_FLOAT, 1.0),
    "model.lambda": (_FLOAT, 0.0),
    "model.potential.kind": (_STR, "cosine-bump"),
    "model.potential.a": (_FLOAT, 1.0),
    "model.potential.v0": (_FLOAT, 1.0),
    "grid1d.half_width": (_FLOAT, 12.0),
    "grid1d.n": (_INT, 1199),
    "grid2d.x_half_width": (_FLOAT, 5.0),
    "grid2d.y_half_width": (_FLOAT, 4.5),
    "grid2d.nx": (_INT, 301),
    "grid2d.ny": (_INT, 301),
    "ladder.x_half_widths": (_FLOATS, (4.0, 5.0, 6.0)),
    "ladder.y_half_widths": (_FLOATS, (4.5, 4.5, 4.5)),
    "ladder.nx": (_INTS, (121, 151, 181)),
    "ladder.ny": (_INTS, (121, 121, 121)),
    "tol.gamma0": (_FLOAT, 1e-8),
    "tol.eig": (_FLOAT, 1e-6),
    "tol.quadrature": (_FLOAT, 1e-12),
    "tol.regime": (_FLOAT, 1e-7),
    "tol.disc": (_FLOAT, 1e-2),
    "tol.bracket": (_FLOAT, 1e-8),
    "solver.count": (_INT, 6),
    "solver.seed": (_INT, 0),
    "solver.max_cycles": (_INT, 200),
    "quasimode.mu_grid": (_FLOATS, (0.0, 0.5, 1.0, 2.0)),
    "quasimode.n_list": (_INTS, (4, 8, 16, 32)),
    "quasimode.k_list": (_INTS, (4, 8, 16, 32)),
    "trial.k_list": (_INTS, (2, 4, 8, 16, 32)),
    "moment.sigma_list": (_FLOATS, (0.75, 1.0, 2.0)),
    "certify.index": (_INT, 32),
    "certify.max_radius": (_FLOAT, 0.1),
}


def _parse_value(key: str, tag: str, raw: str):
    raw = raw.strip()
    try:
        if tag == _FLOAT:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
            return value
        if tag == _INT:
            return int(raw, 10)
        if tag == _STR:
            return raw
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty list")
        if tag == _FLOATS:
            return tuple(float(p) for p in parts)
        if tag == _INTS:
            return tuple(int(p, 10) for p in parts)
    except ValueError as exc:
        raise ConfigError("bad %s value for %s: %r" % (tag, key, raw)) from exc
    raise ConfigError("unknown type tag %r for %s" % (tag, key))


def _format_value(value) -> str:
    if isinstance(value, bool):
        raise ConfigError("boolean values are not part of the schema")
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, int):
        return "%d" % value
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def _parse_expected(key: str, raw: str):
    raw = raw.strip()
    try:
        return float(raw)
    except ValueError:
        return raw


@dataclass(frozen=True)
class Config:
    """Resolved configuration: schema defaults, file values, env overrides."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        merged = {key: default for key, (_, default) in SCHEMA.items()}
        for key, value in self.values.items():
            if key not in SCHEMA and not key.startswith(EXPECTED_PREFIX):
                raise ConfigError("unknown configuration key %r" % key)
            merged[key] = value
        object.__setattr__(self, "values", merged)

    def __getitem__(self, key: str):
        try:
            return self.values[key]
        except KeyError:
            raise ConfigError("no configuration value for %r" % key) from None

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def expected(self) -> dict:
        return {
            k[len(EXPECTED_PREFIX) :]: v
            for k, v in self.values.items()
            if k.startswith(EXPECTED_PREFIX)
        }

    def with_updates(self, updates: dict) -> "Config":
        overrides = dict(self.values)
        overrides.update(updates)
        return Config(overrides)

    def model_params(self) -> ModelParams:
        kind = self["model.potential.kind"]
        if kind == "tabulated":
            raise ConfigError(
                "tabulated potentials need explicit samples and cannot be "
                "built from a flat configuration"
            )
        potential = make_potential(
            kind, a=self["model.potential.a"], v0=self["model.potential.v0"]
        )
        return ModelParams(
            omega=self["model.omega"], lam=self["model.lambda"], potential=potential
        )

    def grid1d(self) -> Grid1D:
        return Grid1D(self["grid1d.half_width"], self["grid1d.n"])

    def grid2d(self) -> Grid2D:
        return Grid2D(
            self["grid2d.x_half_width"],
            self["grid2d.y_half_width"],
            self["grid2d.nx"],
            self["grid2d.ny"],
        )

    def box_ladder(self) -> list:
        xs = self["ladder.x_half_widths"]
        ys = self["ladder.y_half_widths"]
        nxs = self["ladder.nx"]
        nys = self["ladder.ny"]
        if not (len(xs) == len(ys) == len(nxs) == len(nys)):
            raise ConfigError(
                "ladder lists disagree in length: %d, %d, %d, %d"
                % (len(xs), len(ys), len(nxs), len(nys))
            )
        if len(xs) < 2:
            raise ConfigError("the box ladder needs at least two rungs")
        return [Grid2D(x, y, nx, ny) for x, y, nx, ny in zip(xs, ys, nxs, nys)]


def parse_config(text: str) -> Config:
    """Parse config text; the first meaningful line must be the schema marker."""
    seen_schema = False
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not seen_schema:
            if stripped != SCHEMA_LINE:
                raise ConfigError(
                    "line %d: expected schema line %r, got %r"
                    % (lineno, SCHEMA_LINE, stripped)
                )
            seen_schema = True
            continue
        if "=" not in stripped:
            raise ConfigError("line %d: expected key = value, got %r" % (lineno, stripped))
        key, _, rest = stripped.partition("=")
        key = key.strip()
        if key in raw:
            raise ConfigError("line %d: duplicate key %r" % (lineno, key))
        if key in SCHEMA:
            raw[key] = _parse_value(key, SCHEMA[key][0], rest)
        elif key.startswith(EXPECTED_PREFIX):
            raw[key] = _parse_expected(key, rest)
        else:
            raise ConfigError("line %d: unknown configuration key %r" % (lineno, key))
    if not seen_schema:
        raise ConfigError("missing schema line %r" % SCHEMA_LINE)
    return Config(raw)


def load_config(path) -> Config:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def apply_env(config: Config, environ=None) -> Config:
    """Overlay SPECTRAN_* variables; unknown ones are rejected, not ignored."""
    env = os.environ if environ is None else environ
    updates: dict = {}
    for name in sorted(env):
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX) :].lower().replace("__", ".")
        if key in SCHEMA:
            updates[key] = _parse_value(key, SCHEMA[key][0], env[name])
        elif key.startswith(EXPECTED_PREFIX):
            updates[key] = _parse_expected(key, env[name])
        else:
            raise ConfigError(
                "environment variable %s does not map to a known key (%r)"
                % (name, key)
            )
    return config.with_updates(updates) if updates else config


def dump_config(config: Config) -> str:
    """Canonical text: schema line, then every key sorted, floats at 17 digits."""
    lines = [SCHEMA_LINE]
    for key in sorted(config.values):
        lines.append("%s = %s" % (key, _format_value(config.values[key])))
    return "\n".join(lines) + "\n"


def config_digest(config: Config) -> str:
    return hashlib.sha256(dump_config(config).encode("utf-8")).hexdigest()
