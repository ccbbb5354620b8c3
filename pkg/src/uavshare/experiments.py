"""Parameter sweeps over seeded scenarios and CSV output.

Sweep files use the scenario TOML layout plus a ``[sweep]`` table::

    [sweep]
    parameter = "outage_po"
    values = [0.001, 0.01, 0.1]
    methods = ["algo1", "algo2", "baseline1"]
    n_seeds = 100
    mc_samples = 0        # > 0 adds an empirical LCU outage estimate

Units of the swept value: ``ji_ratio`` is J / I at fixed I, ``outage_po`` a
probability, ``speed`` m/s, ``sinr_threshold`` dB and ``max_power`` dBm
applied to both the HCU and LCU caps.
"""

import csv
import dataclasses
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algorithms import Method, prepare, run_method
from .channel import db_to_linear
from .montecarlo import SamplingConfig, empirical_outage
from .scenario import ConfigError, ScenarioConfig, config_from_dict, generate

CI_Z = 1.96

CSV_COLUMNS = (
    "parameter", "value", "method", "mode", "n_hcu", "n_lcu", "n_seeds", "n_ok",
    "mean_sum_capacity", "ci_sum_capacity", "mean_min_capacity", "ci_min_capacity",
    "mean_feasible_sum", "mean_pairs", "mean_outage_closed",
    "mean_outage_empirical", "ci_outage_empirical",
)


class SweptParameter(str, enum.Enum):
    JI_RATIO = "ji_ratio"
    OUTAGE_PO = "outage_po"
    SPEED = "speed"
    SINR_THRESHOLD = "sinr_threshold"
    MAX_POWER = "max_power"


@dataclass(frozen=True)
class SweepSpec:
    swept_parameter: SweptParameter
    values: tuple
    methods: tuple = (Method.ALGO1, Method.ALGO2, Method.BASELINE1)
    n_seeds: int = 10
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    mc_samples: int = 0
    refine: bool = False

    def __post_init__(self):
        object.__setattr__(self, "swept_parameter", SweptParameter(self.swept_parameter))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        if list(self.values) != sorted(self.values):
            raise ConfigError("sweep values must be sorted ascending")
        if not self.methods:
            raise ConfigError("at least one method is required")
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be at least 1")
        if self.mc_samples < 0:
            raise ConfigError("mc_samples must be non-negative")


@dataclass
class SweepResult:
    rows: list
    failures: list = field(default_factory=list)


def apply_value(base, parameter, value):
    """Scenario config for one point of the sweep."""
    p = SweptParameter(parameter)
    try:
        if p is SweptParameter.JI_RATIO:
            return base.replace(n_lcu_pairs=int(round(value * base.n_hcu)))
        if p is SweptParameter.OUTAGE_PO:
            return base.replace(qos=dataclasses.replace(base.qos, outage_max=value))
        if p is SweptParameter.SPEED:
            return base.replace(speed=value)
        if p is SweptParameter.SINR_THRESHOLD:
            return base.replace(qos=dataclasses.replace(base.qos, sinr_min_lcu=db_to_linear(value)))
        watts = db_to_linear(value, "dbm")
        return base.replace(limits=dataclasses.replace(base.limits, p_max_hcu=watts,
                                                       p_max_lcu=watts))
    except ValueError as exc:
        raise ConfigError(f"{p.value}={value}: {exc}") from exc


def _empirical_mean_outage(res, problem, samples, seed):
    if not res.pairs:
        return float("nan")
    cfg = SamplingConfig(n_samples=samples, seed=seed)
    est = []
    for k, ((i, j), a) in enumerate(zip(res.pairs, res.powers)):
        p, _ = empirical_outage(a.p_hcu, a.p_lcu, problem.gains.at(i, j), problem.qos,
                                problem.limits.noise, cfg, link_id=i * problem.n_lcu + j)
        est.append(p)
    return float(np.mean(est))


def evaluate_seed(spec, value_index, seed_offset):
    """Metrics of every method for one (value, seed); pure and deterministic."""
    value = spec.values[value_index]
    cfg = apply_value(spec.base, spec.swept_parameter, value)
    seed = spec.base.seed + seed_offset
    cfg = cfg.replace(seed=seed)
    problem = prepare(generate(cfg))
    out = {}
    for m in spec.methods:
        res = run_method(problem, m, seed=seed, refine=spec.refine)
        outage = float(np.mean(res.lcu_outage)) if res.pairs else float("nan")
        emp = (_empirical_mean_outage(res, problem, spec.mc_samples, seed)
               if spec.mc_samples else float("nan"))
        out[m] = (res.sum_capacity, res.min_capacity, res.feasible_sum,
                  float(len(res.pairs)), outage, emp)
    return out


def _task(args):
    spec, v, s = args
    try:
        return v, s, evaluate_seed(spec, v, s), None
    except Exception as exc:  # noqa: BLE001 - logged per seed, sweep continues
        return v, s, None, f"{type(exc).__name__}: {exc}"


def _mean_ci(x):
    x = np.asarray(x, dtype=float)
    x = x[~np.isnan(x)]
    if x.size == 0:
        return float("nan"), float("nan")
    ci = CI_Z * x.std(ddof=1) / math.sqrt(x.size) if x.size > 1 else 0.0
    return float(x.mean()), float(ci)


def run_sweep(spec, workers=1):
    """Run every method on ``n_seeds`` scenarios per swept value.

    Seeds are ``base.seed + k`` for ``k < n_seeds``, shared by all values,
    so neighbouring points differ only in the swept parameter. A seed that
    raises is recorded in ``failures`` and left out of the averages.
    """
    tasks = [(spec, v, s) for v in range(len(spec.values)) for s in range(spec.n_seeds)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            done = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        done = [_task(t) for t in tasks]

    per_value = {v: [] for v in range(len(spec.values))}
    failures = []
    for v, s, metrics, err in done:
        if err is None:
            per_value[v].append(metrics)
        else:
            failures.append({"value": spec.values[v], "seed": spec.base.seed + s, "error": err})

    rows = []
    for v, value in enumerate(spec.values):
        cfg = apply_value(spec.base, spec.swept_parameter, value)
        for m in spec.methods:
            data = np.array([d[m] for d in per_value[v]], dtype=float).reshape(-1, 6)
            s_mean, s_ci = _mean_ci(data[:, 0])
            m_mean, m_ci = _mean_ci(data[:, 1])
            e_mean, e_ci = _mean_ci(data[:, 5])
            rows.append({
                "parameter": spec.swept_parameter.value,
                "value": value,
                "method": m.value,
                "mode": cfg.mode.value,
                "n_hcu": cfg.n_hcu,
                "n_lcu": cfg.n_lcu_pairs,
                "n_seeds": spec.n_seeds,
                "n_ok": int(data.shape[0]),
                "mean_sum_capacity": s_mean,
                "ci_sum_capacity": s_ci,
                "mean_min_capacity": m_mean,
                "ci_min_capacity": m_ci,
                "mean_feasible_sum": _mean_ci(data[:, 2])[0],
                "mean_pairs": _mean_ci(data[:, 3])[0],
                "mean_outage_closed": _mean_ci(data[:, 4])[0],
                "mean_outage_empirical": e_mean,
                "ci_outage_empirical": e_ci,
            })
    return SweepResult(rows=rows, failures=failures)


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_rows(result, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in result.rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def emit_csv(result, path):
    """Write the rows with a header in :data:`CSV_COLUMNS` order.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _write_rows(result, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(result, fh)


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into typed rows."""
    ints = {"n_hcu", "n_lcu", "n_seeds", "n_ok"}
    strs = {"parameter", "method", "mode"}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = []
        for rec in csv.DictReader(fh):
            rows.append({k: v if k in strs else int(v) if k in ints else float(v)
                         for k, v in rec.items()})
    return rows


def sweep_from_dict(data):
    data = dict(data)
    sweep = dict(data.pop("sweep", None) or {})
    if not sweep:
        raise ConfigError("missing [sweep] table")
    known = {"parameter", "values", "methods", "n_seeds", "mc_samples", "refine"}
    unknown = set(sweep) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [sweep]: {', '.join(sorted(unknown))}")
    if "parameter" not in sweep or "values" not in sweep:
        raise ConfigError("[sweep] needs 'parameter' and 'values'")
    try:
        return SweepSpec(
            swept_parameter=sweep["parameter"],
            values=sweep["values"],
            methods=sweep.get("methods", SweepSpec.methods),
            n_seeds=int(sweep.get("n_seeds", 10)),
            base=config_from_dict(data),
            mc_samples=int(sweep.get("mc_samples", 0)),
            refine=bool(sweep.get("refine", False)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_sweep(path):
    import tomli

    try:
        with open(path, "rb") as fh:
            return sweep_from_dict(tomli.load(fh))
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
