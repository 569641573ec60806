"""Config-driven experiment runs with deterministic structured output.

A run is described by one JSON config (schema below), executed by
run_experiment, and emitted as a structured JSON report plus a
plot-ready CSV of per-shift correlation data.  Identical configs yield
byte-identical files: every random quantity is seeded, dict keys are
sorted, and wall time is kept off the serialized payload.

Config schema (JSON object; defaults in parentheses):

    name              report file stem (required)
    site_dim          local dimension d (2)
    seed              integer, required; no wall-clock entropy
    source            {"kind": "iid", "state": MATRIX}
                      | {"kind": "classically_correlated",
                         "process": PROCESS,
                         "alphabet": "computational" | MATRIX_OF_ROWS}
    channel           optional {"kind": NAME, "params": {...},
                                "block_sites": int (1)}
    tests             "all" | list from {consistency, stationarity,
                      ergodic_mean, weak_mixing, strong_mixing} ("all")
    block_sites       observable block length m (1)
    n_max             largest shift index (2000)
    observable_count  random observable pairs in the sweep (2)
    backend           auto | dense | transfer ("auto")
    tolerance         verdict tolerance override (backend default)
    check_sites       largest m + i for consistency checks (4)
    output_dir        default emission directory (".")

    PROCESS = {"kind": "iid", "probs": [...]}
            | {"kind": "markov", "transition": [[...]], "initial": [...]?}
            | {"kind": "mixture", "weights": [...], "components": [PROCESS, ...]}

    MATRIX entries are numbers or [re, im] pairs.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .channels import block_channel, make_standard_channel
from .classical import (
    ClassificationReport,
    IIDProcess,
    MarkovProcess,
    MixtureProcess,
    classify_process,
)
from .errors import ConfigError
from .operators import density_operator
from .sources import (
    AlphabetSpec,
    ChannelTransformedSource,
    ClassicallyCorrelatedSource,
    IIDSource,
    check_consistency,
    check_n_consistency,
    check_n_stationarity,
    check_stationarity,
)
from .ergodicity import SourceSweepReport, sweep_report

TEST_NAMES = ("consistency", "stationarity", "ergodic_mean", "weak_mixing", "strong_mixing")
_ALIASES = {"ergodic": "ergodic_mean", "weak": "weak_mixing", "strong": "strong_mixing"}
_MIXING = ("ergodic_mean", "weak_mixing", "strong_mixing")


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def _decode_matrix(obj, field: str) -> np.ndarray:
    """Nested lists of numbers or [re, im] pairs as a complex matrix."""
    if not isinstance(obj, list) or not obj:
        raise ConfigError("expected a nonempty list of rows", field)
    rows = []
    for r, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise ConfigError(f"row {r} is not a nonempty list", field)
        out = []
        for c, entry in enumerate(row):
            if isinstance(entry, (int, float)):
                out.append(complex(entry))
            elif (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(x, (int, float)) for x in entry)
            ):
                out.append(complex(entry[0], entry[1]))
            else:
                raise ConfigError(
                    f"entry [{r}][{c}] must be a number or [re, im]", field
                )
        rows.append(out)
    if len({len(r) for r in rows}) != 1:
        raise ConfigError("rows have unequal lengths", field)
    return np.array(rows, dtype=complex)


def _require(mapping: dict, key: str, field: str):
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r}", field)
    return mapping[key]


def _build_process(spec, field: str):
    if not isinstance(spec, dict):
        raise ConfigError("process spec must be an object", field)
    kind = _require(spec, "kind", field)
    try:
        if kind == "iid":
            return IIDProcess(np.asarray(_require(spec, "probs", field), dtype=float))
        if kind == "markov":
            transition = np.asarray(_require(spec, "transition", field), dtype=float)
            initial = spec.get("initial")
            if initial is not None:
                initial = np.asarray(initial, dtype=float)
            return MarkovProcess(transition, initial)
        if kind == "mixture":
            weights = np.asarray(_require(spec, "weights", field), dtype=float)
            comps = _require(spec, "components", field)
            return MixtureProcess(
                weights,
                tuple(
                    _build_process(c, f"{field}.components[{j}]")
                    for j, c in enumerate(comps)
                ),
            )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), field) from exc
    raise ConfigError(f"unknown process kind {kind!r}", field)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved run description; equal configs produce equal reports."""

    name: str
    site_dim: int
    seed: int
    source_spec: dict
    channel_spec: dict | None
    tests: tuple
    block_sites: int
    n_max: int
    observable_count: int
    backend: str
    tolerance: float | None
    check_sites: int
    output_dir: str

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {
            "name", "site_dim", "seed", "source", "channel", "tests",
            "block_sites", "n_max", "observable_count", "backend",
            "tolerance", "check_sites", "output_dir",
        }
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown key {key!r}", key)
        name = _require(raw, "name", "name")
        if not isinstance(name, str) or not name or "/" in name:
            raise ConfigError("name must be a nonempty string without '/'", "name")
        seed = _require(raw, "seed", "seed")
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer (and is mandatory)", "seed")
        tests = raw.get("tests", "all")
        if tests == "all":
            tests = TEST_NAMES
        elif isinstance(tests, list):
            resolved = []
            for t in tests:
                t = _ALIASES.get(t, t)
                if t not in TEST_NAMES:
                    raise ConfigError(f"unknown test {t!r}", "tests")
                if t not in resolved:
                    resolved.append(t)
            if not resolved:
                raise ConfigError("at least one test must be selected", "tests")
            tests = tuple(sorted(resolved, key=TEST_NAMES.index))
        else:
            raise ConfigError("tests must be 'all' or a list of names", "tests")
        source = _require(raw, "source", "source")
        if not isinstance(source, dict):
            raise ConfigError("source spec must be an object", "source")
        channel = raw.get("channel")
        if channel is not None and not isinstance(channel, dict):
            raise ConfigError("channel spec must be an object", "channel")

        def _int(key, default, minimum):
            v = raw.get(key, default)
            if not isinstance(v, int) or v < minimum:
                raise ConfigError(f"{key} must be an integer >= {minimum}", key)
            return v

        backend = raw.get("backend", "auto")
        if backend not in ("auto", "dense", "transfer"):
            raise ConfigError("backend must be auto, dense, or transfer", "backend")
        tolerance = raw.get("tolerance")
        if tolerance is not None:
            if not isinstance(tolerance, (int, float)) or not 0 < tolerance < 1:
                raise ConfigError("tolerance must be a number in (0, 1)", "tolerance")
            tolerance = float(tolerance)
        output_dir = raw.get("output_dir", ".")
        if not isinstance(output_dir, str):
            raise ConfigError("output_dir must be a string", "output_dir")
        config = cls(
            name=name,
            site_dim=_int("site_dim", 2, 2),
            seed=seed,
            source_spec=source,
            channel_spec=channel,
            tests=tests,
            block_sites=_int("block_sites", 1, 1),
            n_max=_int("n_max", 2000, 8),
            observable_count=_int("observable_count", 2, 0),
            backend=backend,
            tolerance=tolerance,
            check_sites=_int("check_sites", 4, 2),
            output_dir=output_dir,
        )
        # dry build so malformed matrices and specs fail at load time
        build_source(config)
        return config

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        return cls.from_dict(raw)

    def echo(self) -> dict:
        """Round-trippable resolved config (emission directory excluded)."""
        out = {
            "name": self.name,
            "site_dim": self.site_dim,
            "seed": self.seed,
            "source": self.source_spec,
            "tests": list(self.tests),
            "block_sites": self.block_sites,
            "n_max": self.n_max,
            "observable_count": self.observable_count,
            "backend": self.backend,
            "check_sites": self.check_sites,
        }
        if self.channel_spec is not None:
            out["channel"] = self.channel_spec
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        return out


def build_source(config: ExperimentConfig):
    """(source, base classical process or None) from a config."""
    d = config.site_dim
    spec = config.source_spec
    kind = _require(spec, "kind", "source")
    process = None
    if kind == "iid":
        state = _decode_matrix(_require(spec, "state", "source.state"), "source.state")
        try:
            source = IIDSource(density_operator(state, site_dim=d, sites=1))
        except ValueError as exc:
            raise ConfigError(str(exc), "source.state") from exc
    elif kind == "classically_correlated":
        process = _build_process(_require(spec, "process", "source.process"), "source.process")
        alph = spec.get("alphabet", "computational")
        try:
            if alph == "computational":
                vectors = np.eye(d, dtype=complex)[: process.alphabet_size]
            else:
                vectors = _decode_matrix(alph, "source.alphabet")
            source = ClassicallyCorrelatedSource(process, AlphabetSpec(vectors))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), "source.alphabet") from exc
    else:
        raise ConfigError(f"unknown source kind {kind!r}", "source.kind")
    if config.channel_spec is not None:
        cs = config.channel_spec
        name = _require(cs, "kind", "channel.kind")
        params = dict(cs.get("params", {}))
        if "alphabet" in params:
            params["alphabet"] = _decode_matrix(params["alphabet"], "channel.params.alphabet")
        try:
            channel = make_standard_channel(name, params, dim=d)
            blocks = cs.get("block_sites", 1)
            if not isinstance(blocks, int) or blocks < 1:
                raise ConfigError("block_sites must be an integer >= 1", "channel.block_sites")
            if blocks > 1:
                channel = block_channel(channel, blocks)
            source = ChannelTransformedSource(source, channel)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), "channel") from exc
    return source, process


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    """Everything a run produced.  wall_time_s never enters the payload."""

    config: ExperimentConfig
    version: str
    checks: dict
    sweep: SourceSweepReport | None
    classification: ClassificationReport | None
    failures: tuple
    passed: bool
    wall_time_s: float

    def payload(self) -> dict:
        out = {
            "toolkit_version": self.version,
            "config": self.config.echo(),
            "checks": {k: _ser_check(v) for k, v in self.checks.items()},
            "classification_oracle": _ser_classification(self.classification),
            "sweep": _ser_sweep(self.sweep, self.config.tests),
            "failures": list(self.failures),
            "passed": self.passed,
        }
        return out

    def decay_rows(self) -> list:
        """CSV rows: one per observable pair per shift index."""
        if self.sweep is None:
            return []
        rows = []
        for pair in self.sweep.pairs:
            strong = pair.strong_mixing
            cesaro = pair.ergodic_mean.statistics
            for j, i in enumerate(strong.shifts):
                rows.append(
                    (
                        pair.label,
                        int(i),
                        float(strong.statistics[j].real),
                        float(strong.statistics[j].imag),
                        float(strong.target.real),
                        float(strong.deviations[j]),
                        float(cesaro[j].real),
                    )
                )
        return rows


def _ser_check(report) -> dict:
    return {
        "mode": report.mode,
        "max_sites": report.max_sites,
        "worst_deviation": float(report.worst_deviation),
        "worst_pair": [int(x) for x in report.worst_pair],
        "tol": float(report.tol),
        "passed": report.passed,
    }


def _ser_classification(report) -> dict | None:
    if report is None:
        return None
    return {
        "kind": report.kind,
        "stationary": report.stationary,
        "irreducible": report.irreducible,
        "period": report.period,
        "unique_stationary": report.unique_stationary,
        "verdicts": {
            "ergodic_mean": report.ergodic_mean,
            "weak_mixing": report.weak_mixing,
            "strong_mixing": report.strong_mixing,
        },
    }


def _ser_test(report) -> dict:
    out = {
        "verdict": report.verdict,
        "final_deviation": float(report.final_deviation),
        "target": [float(report.target.real), float(report.target.imag)],
        "tol": float(report.tol),
        "n_max": int(report.n_max),
    }
    if report.test == "strong_mixing":
        decay = report.decay
        out["decay"] = None if decay is None else {
            "rate": decay.rate,
            "log_intercept": decay.log_intercept,
            "points_used": decay.points_used,
            "max_log_residual": decay.max_log_residual,
        }
    return out


def _ser_sweep(sweep, tests) -> dict | None:
    if sweep is None:
        return None
    selected = [t for t in _MIXING if t in tests]
    pairs = []
    for p in sweep.pairs:
        entry = {"label": p.label, "tests": {}}
        for t in selected:
            entry["tests"][t] = _ser_test(getattr(p, t))
        pairs.append(entry)
    out = {
        "block_sites": sweep.block_sites,
        "n_max": sweep.n_max,
        "backend": sweep.backend,
        "tol": float(sweep.tol),
        "note": sweep.note,
        "verdicts": {t: getattr(sweep, t) for t in selected},
        "pairs": pairs,
    }
    if len(selected) == 3:
        out["monotone_ok"] = sweep.monotone_ok
    return out


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Build the source, run the selected checks and tests, collect failures."""
    t0 = time.perf_counter()
    source, process = build_source(config)
    checks = {}
    blocks = (config.channel_spec or {}).get("block_sites", 1)
    if "consistency" in config.tests:
        if blocks > 1:
            checks["consistency"] = check_n_consistency(
                source, blocks, max(2, config.check_sites // blocks)
            )
        else:
            checks["consistency"] = check_consistency(source, config.check_sites)
    if "stationarity" in config.tests:
        if blocks > 1:
            checks["stationarity"] = check_n_stationarity(
                source, blocks, max(2, config.check_sites // blocks)
            )
        else:
            checks["stationarity"] = check_stationarity(source, config.check_sites)
    sweep = None
    selected_mixing = [t for t in _MIXING if t in config.tests]
    if selected_mixing:
        sweep = sweep_report(
            source,
            block_sites=config.block_sites,
            n_max=config.n_max,
            backend=config.backend,
            tol=config.tolerance,
            random_pair_count=config.observable_count,
            seed=config.seed,
        )
    failures = []
    for name, report in checks.items():
        if not report.passed:
            failures.append(
                {
                    "kind": "check",
                    "name": name,
                    "worst_deviation": float(report.worst_deviation),
                    "worst_pair": [int(x) for x in report.worst_pair],
                }
            )
    if sweep is not None:
        for pair in sweep.pairs:
            for t in selected_mixing:
                report = getattr(pair, t)
                if report.verdict != "pass":
                    failures.append(
                        {
                            "kind": "test",
                            "name": t,
                            "pair": pair.label,
                            "verdict": report.verdict,
                            "final_deviation": float(report.final_deviation),
                        }
                    )
    classification = classify_process(process) if process is not None else None
    wall = time.perf_counter() - t0
    return RunReport(
        config, __version__, checks, sweep, classification,
        tuple(failures), not failures, wall,
    )


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

CSV_HEADER = ("pair", "i", "corr_real", "corr_imag", "target", "abs_deviation", "cesaro_mean")


def emit_report(report: RunReport, output_dir=None) -> list:
    """Write <name>.report.json (and <name>.decay.csv when a sweep ran).

    Returns the written paths.  Identical reports produce byte-identical
    files.
    """
    directory = Path(output_dir if output_dir is not None else report.config.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    json_path = directory / f"{report.config.name}.report.json"
    json_path.write_text(
        json.dumps(report.payload(), sort_keys=True, indent=2) + "\n"
    )
    written.append(json_path)
    rows = report.decay_rows()
    if rows:
        csv_path = directory / f"{report.config.name}.decay.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow(
                    [row[0], row[1]] + [repr(x) for x in row[2:]]
                )
        written.append(csv_path)
    return written


def run_config_file(path, overrides: dict | None = None) -> tuple:
    """(RunReport, written paths) for one config file, with CLI overrides."""
    config = ExperimentConfig.from_json(path)
    if overrides:
        config = replace(config, **overrides)
    report = run_experiment(config)
    return report, emit_report(report)
