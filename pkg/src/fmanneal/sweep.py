"""Parameter sweeps over seeds with per-cell record files."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import FmaConfig, build_config, parse_text
from .dataset import Policy
from .driver import RunAborted, run_fma
from .exceptions import ConfigError
from .labs import reference_optimum
from .stats import aggregate, load_records, to_csv

AXES = ("d_latest", "k", "d_init", "n")
AGGREGATE_FILE = "aggregate.csv"


@dataclass
class SweepSpec:
    base: FmaConfig
    axis: str
    values: list
    seeds: list
    output_dir: str
    optimum: float = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}", "axis")
        if not self.values:
            raise ConfigError("at least one value required", "values")
        if not self.seeds:
            raise ConfigError("at least one seed required", "seeds")
        for v in self.values:
            if self.axis != "d_latest" and v == "all":
                raise ConfigError("'all' is only valid on the d_latest axis", "values")

    def cell_config(self, value, seed):
        cfg = self.base.replace(seed=seed)
        if self.axis == "d_latest":
            return cfg.replace(policy=Policy.parse(value))
        return cfg.replace(**{self.axis: int(value)})


def _parse_list(text):
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


def load_sweep_spec(path):
    """Read a sweep spec: ``axis``, ``values``, ``seeds``, ``output_dir``,
    optional ``base_config`` (path relative to the spec file) and any run
    configuration key, which overrides the base."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read sweep spec: {exc}") from None
    own = {}
    cfg_lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        key = line.split("=", 1)[0].strip().lower() if "=" in line else None
        if key in ("axis", "values", "seeds", "output_dir", "base_config"):
            own[key] = line.split("=", 1)[1].strip()
        else:
            cfg_lines.append(raw)
    for key in ("axis", "values", "seeds"):
        if key not in own:
            raise ConfigError("missing required key", key)
    raw_cfg = {}
    if "base_config" in own:
        base_path = os.path.join(os.path.dirname(os.path.abspath(path)), own["base_config"])
        try:
            with open(base_path, encoding="utf-8") as fh:
                raw_cfg.update(parse_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read base config: {exc}", "base_config") from None
    raw_cfg.update(parse_text("\n".join(cfg_lines)))
    base, optimum = build_config(raw_cfg)
    axis = own["axis"].lower()
    axis = {"policy": "d_latest"}.get(axis, axis)
    values = [v.lower() if v.lower() == "all" else v for v in _parse_list(own["values"])]
    try:
        seeds = [int(s) for s in _parse_list(own["seeds"])]
        if axis != "d_latest":
            [int(v) for v in values]
    except ValueError as exc:
        raise ConfigError(str(exc), "values/seeds") from None
    out = own.get("output_dir") or os.path.splitext(os.path.basename(path))[0] + "_out"
    out = os.path.join(os.path.dirname(os.path.abspath(path)), out)
    spec = SweepSpec(base, axis, values, seeds, out, optimum)
    for v in values:  # validate every cell configuration up front
        spec.cell_config(v, seeds[0])
    return spec


def _cell_tasks(spec):
    tasks = []
    for idx, value in enumerate(spec.values):
        group = "" if spec.axis == "d_latest" else str(value)
        for seed in spec.seeds:
            cfg = spec.cell_config(value, seed)
            is_base = cfg.policy.is_conventional
            meta = {"axis": spec.axis, "value": str(value), "value_index": idx, "role": "cell",
                    "is_baseline": is_base, "group": group}
            tasks.append((f"{spec.axis}={value}__seed={seed}.jsonl", cfg, meta))
            if spec.axis != "d_latest" and not is_base:
                bmeta = dict(meta, role="baseline", is_baseline=True)
                tasks.append((f"baseline__{spec.axis}={value}__seed={seed}.jsonl",
                              cfg.replace(policy=Policy(None)), bmeta))
    return tasks


def _run_task(task, optimum):
    name, cfg, meta = task
    opt = optimum if optimum is not None else reference_optimum(cfg.n)
    try:
        rec = run_fma(cfg, optimum=opt)
    except RunAborted as exc:
        rec = exc.record
    rec.meta = {"sweep": meta}
    return name, rec.to_jsonl()


def _worker(args):
    return _run_task(*args)


def worker_count():
    env = os.environ.get("FMA_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(spec, workers=None, progress=None):
    """Run every (value, seed) cell, write records and ``aggregate.csv``.

    Records are written per cell and the aggregate is recomputed from the
    files, so the outcome does not depend on the worker count.
    """
    os.makedirs(spec.output_dir, exist_ok=True)
    tasks = _cell_tasks(spec)
    workers = worker_count() if workers is None else workers
    args = [(t, spec.optimum) for t in tasks]
    if workers <= 1:
        results = map(_worker, args)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_worker, args)
    try:
        for name, text in results:
            with open(os.path.join(spec.output_dir, name), "w", encoding="utf-8") as fh:
                fh.write(text)
            if progress is not None:
                progress(name)
    finally:
        if workers > 1:
            pool.shutdown()
    names = [t[0] for t in tasks]
    records = load_records([os.path.join(spec.output_dir, n) for n in names])
    rows = aggregate(records)
    csv_text = to_csv(rows)
    with open(os.path.join(spec.output_dir, AGGREGATE_FILE), "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    return rows, records
