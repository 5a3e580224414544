"""Run configuration and its flat ``key = value`` text format.

Canonical keys are the parameter-table row names in snake_case; short
aliases (``n``, ``k``, ``n_iter``, ...) are accepted anywhere a key is.
Lines starting with ``#`` are comments.
"""

import dataclasses
import math
from dataclasses import dataclass, field

from .annealer import AnnealConfig
from .dataset import CONVENTIONAL, Policy
from .exceptions import ConfigError
from .training import TrainConfig


@dataclass(frozen=True)
class FmaConfig:
    n: int = 64
    k: int = 8
    d_init: int = 100
    d_reads: int = 15
    d_adds: int = 3
    n_iter: int = 1500
    policy: Policy = CONVENTIONAL
    train: TrainConfig = field(default_factory=TrainConfig)
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    seed: int = 0
    # Optional per-source overrides; None derives the stream from ``seed``.
    data_seed: int = None
    fm_seed: int = None
    anneal_seed: int = None
    reset_params_each_round: bool = False

    def __post_init__(self):
        for name in ("n", "k", "d_init", "d_reads", "d_adds", "n_iter"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val or val < 1:
                raise ConfigError(f"must be an integer >= 1, got {val!r}", name)
        if self.n < 2:
            raise ConfigError("must be >= 2", "n")
        if self.d_adds > self.d_reads:
            raise ConfigError(f"d_adds ({self.d_adds}) exceeds d_reads ({self.d_reads})", "d_adds")
        if self.n < 63 and self.d_init > 2**self.n:
            raise ConfigError(f"cannot draw {self.d_init} unique vectors of length {self.n}", "d_init")
        for name in ("seed", "data_seed", "fm_seed", "anneal_seed"):
            val = getattr(self, name)
            if val is not None and (isinstance(val, bool) or int(val) != val or val < 0 or val >= 2**64):
                raise ConfigError(f"must be an integer in [0, 2**64), got {val!r}", name)
        if self.anneal.num_reads != self.d_reads:
            object.__setattr__(self, "anneal", dataclasses.replace(self.anneal, num_reads=self.d_reads))

    @property
    def total_added_solutions(self):
        """Dataset size at the end of a conventional run with full batches."""
        return self.d_init + self.n_iter * self.d_adds

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _parse_bool(s):
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_int(s):
    t = s.strip()
    try:
        return int(t)
    except ValueError:
        f = float(t)
        if not f.is_integer():
            raise
        return int(f)


def _parse_opt_int(s):
    return None if s.strip().lower() in ("", "none") else _parse_int(s)


def _parse_float(s):
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _fmt_float(v):
    return repr(float(v))


def _fixed(expected):
    def parse(s):
        if s.strip().lower().replace(" ", "_") != expected:
            raise ValueError(f"only {expected!r} is supported")
        return expected
    return parse


# canonical key -> (parser, getter, setter target)
# target is (section, attribute) where section is None (top level), "train" or "anneal".
_FIELDS = {
    "input_dimension": (_parse_int, (None, "n")),
    "hyperparameter_k": (_parse_int, (None, "k")),
    "optimizer": (_fixed("adamw"), None),
    "number_of_initial_training_data": (_parse_int, (None, "d_init")),
    "number_of_iteration": (_parse_int, (None, "n_iter")),
    "number_of_epochs": (_parse_int, ("train", "epochs")),
    "learning_rate": (_parse_float, ("train", "lr")),
    "adamw_beta1": (_parse_float, ("train", "beta1")),
    "adamw_beta2": (_parse_float, ("train", "beta2")),
    "adamw_eps": (_parse_float, ("train", "eps")),
    "adamw_weight_decay": (_parse_float, ("train", "weight_decay")),
    "ising_solver": (_fixed("simulated_annealing_sampler"), None),
    "initial_inverse_temperature": (_parse_float, ("anneal", "beta_initial")),
    "final_inverse_temperature": (_parse_float, ("anneal", "beta_final")),
    "annealing_schedule": (lambda s: s.strip().lower(), ("anneal", "schedule")),
    "number_of_outer_loops": (_parse_int, ("anneal", "outer_loops")),
    "number_of_inner_loops": (_parse_int, ("anneal", "inner_loops")),
    "reads_samples_per_iteration": (_parse_int, (None, "d_reads")),
    "added_samples_per_iteration": (_parse_int, (None, "d_adds")),
    "recent_learning_data_count": (Policy.parse, (None, "policy")),
    "seed": (_parse_int, (None, "seed")),
    "data_seed": (_parse_opt_int, (None, "data_seed")),
    "fm_seed": (_parse_opt_int, (None, "fm_seed")),
    "anneal_seed": (_parse_opt_int, (None, "anneal_seed")),
    "reset_params_each_round": (_parse_bool, (None, "reset_params_each_round")),
}

_ATTR_TO_KEY = {t[1]: key for key, (_, t) in _FIELDS.items() if t is not None and t[0] is None}

# Keys that are not part of FmaConfig but travel with a run configuration.
EXTRA_KEYS = ("optimum", "total_added_solutions_to_the_dataset")

ALIASES = {
    "n": "input_dimension",
    "k": "hyperparameter_k",
    "d_init": "number_of_initial_training_data",
    "n_iter": "number_of_iteration",
    "epochs": "number_of_epochs",
    "lr": "learning_rate",
    "beta_initial": "initial_inverse_temperature",
    "beta_final": "final_inverse_temperature",
    "schedule": "annealing_schedule",
    "outer_loops": "number_of_outer_loops",
    "inner_loops": "number_of_inner_loops",
    "d_reads": "reads_samples_per_iteration",
    "d_adds": "added_samples_per_iteration",
    "policy": "recent_learning_data_count",
    "d_latest": "recent_learning_data_count",
    "weight_decay": "adamw_weight_decay",
}


def canonical_key(key):
    k = key.strip().lower()
    k = ALIASES.get(k, k)
    if k not in _FIELDS and k not in EXTRA_KEYS:
        raise ConfigError("unknown configuration key", key.strip())
    return k


def parse_text(text):
    """Parse ``key = value`` lines into a dict of canonical keys to raw strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[canonical_key(key)] = value.strip()
    return out


def parse_overrides(pairs):
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[canonical_key(key)] = value.strip()
    return out


def build_config(raw, base=None):
    """Apply a dict of canonical-key strings to ``base`` (default: table defaults).

    Returns ``(FmaConfig, optimum_or_None)``.
    """
    cfg = base or FmaConfig()
    top, train, anneal = {}, {}, {}
    sections = {None: top, "train": train, "anneal": anneal}
    optimum = None
    for key, value in raw.items():
        if key == "optimum":
            try:
                optimum = None if value.lower() in ("", "none") else _parse_float(value)
            except ValueError as exc:
                raise ConfigError(str(exc), key) from None
            continue
        if key == "total_added_solutions_to_the_dataset":
            # derived quantity (d_init + n_iter * d_adds); accepted for readability, not applied
            continue
        parser, target = _FIELDS[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ConfigError(str(exc), key) from None
        if target is not None:
            section, attr = target
            sections[section][attr] = parsed
    try:
        train_cfg = dataclasses.replace(cfg.train, **train)
    except ValueError as exc:
        raise ConfigError(str(exc), "train") from None
    try:
        anneal_cfg = dataclasses.replace(cfg.anneal, **anneal)
    except ValueError as exc:
        raise ConfigError(str(exc), "anneal") from None
    try:
        new = dataclasses.replace(cfg, train=train_cfg, anneal=anneal_cfg, **top)
    except ConfigError as exc:
        field_name = _ATTR_TO_KEY.get(exc.field, exc.field)
        raise ConfigError(str(exc).split(": ", 1)[-1], field_name) from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return new, optimum


def load_config(path=None, overrides=None):
    """Read a config file (optional) and apply ``key=value`` overrides."""
    raw = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw.update(parse_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    raw.update(parse_overrides(overrides))
    return build_config(raw)


def to_flat(cfg, optimum=None):
    """Canonical-key dict of strings; the inverse of :func:`build_config`."""
    out = {}
    for key, (_, target) in _FIELDS.items():
        if target is None:
            out[key] = "adamw" if key == "optimizer" else "simulated_annealing_sampler"
            continue
        section, attr = target
        obj = cfg if section is None else getattr(cfg, section)
        val = getattr(obj, attr)
        if isinstance(val, bool):
            out[key] = "true" if val else "false"
        elif isinstance(val, float):
            out[key] = _fmt_float(val)
        elif isinstance(val, Policy):
            out[key] = "all" if val.is_conventional else str(val.d_latest)
        else:
            out[key] = "none" if val is None else str(val)
    if optimum is not None:
        out["optimum"] = _fmt_float(optimum)
    return out


def dump_config(cfg, optimum=None):
    lines = [f"# total added solutions to the dataset: {cfg.total_added_solutions}"]
    lines += [f"{k} = {v}" for k, v in to_flat(cfg, optimum).items()]
    return "\n".join(lines) + "\n"
