"""
Experiment runner.

Dispatches each subcommand to its experiment, writes CSV/JSON results and a
run manifest. Result files depend only on the configuration and master seed;
timestamps live in the manifest alone.
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .adversary import (
    WedgePolicy,
    complexity_estimate,
    eve_ciphertext_only_ber,
    gamma_analytic,
    gamma_empirical,
    run_bruteforce_trial,
    run_correlation_trial,
)
from .config import SUBCOMMANDS, ExperimentConfig
from .constellation import constellation_table, pol
from .dsr import dsr_scaling_experiment
from .errors import ConfigError
from .jointattack import pe_vs_n, write_gram
from .keystream import SeedKey, chunk_symbols, format_bits
from .receiver import bob_ber_analytic, encrypt, receive, roundtrip_ber
from .seeding import derive_rng

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int, str], None]


@dataclass
class RunResult:
    """Tabular result of one subcommand plus a JSON-ready summary."""

    subcommand: str
    header: List[str]
    rows: List[List[Any]]
    summary: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    files: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "header": self.header,
            "rows": [dict(zip(self.header, row)) for row in self.rows],
            "summary": self.summary,
            "notes": self.notes,
        }


@dataclass
class RunManifest:
    """Record of one run: configuration, seed, timing and files written."""

    subcommand: str
    config: Dict[str, Any]
    version: str
    master_seed: int
    started_at: str
    finished_at: str = ""
    status: str = "running"
    files: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json_file(self, path: Path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def from_json_file(cls, path: Path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as f:
            return cls(**json.load(f))

    def load_config(self) -> ExperimentConfig:
        """Rebuild the configuration snapshot."""
        return ExperimentConfig.from_dict(self.config)


# ============================================================================
# WRITERS
# ============================================================================


def format_cell(value: Any) -> str:
    """Deterministic text form of a CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".10g")
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a UTF-8 CSV with a header row and LF line endings."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")
    return path


# ============================================================================
# RUNNER
# ============================================================================


class ExperimentRunner:
    """
    Runs subcommand experiments for one configuration.

    Every subcommand draws from its own stream ``derive_rng(master_seed, name)``
    so results do not depend on which other subcommands ran.
    """

    def __init__(
        self,
        config: Optional[ExperimentConfig] = None,
        progress_callback: Optional[ProgressCallback] = None,
    ):
        """
        Initialize runner.

        Args:
            config: Experiment configuration. Uses defaults if not provided.
            progress_callback: Callback(current, total, label)
        """
        self.config = config or ExperimentConfig()
        self.progress_callback = progress_callback

    @property
    def params(self):
        return self.config.system.to_params()

    def _rng(self, subcommand: str) -> np.random.Generator:
        return derive_rng(self.config.run.master_seed, subcommand)

    def _progress(self, current: int, total: int, label: str) -> None:
        if self.progress_callback:
            self.progress_callback(current, total, label)

    def _seed(self, rng: np.random.Generator) -> SeedKey:
        return self.config.expander.fixed_seed() or SeedKey.random(self.config.expander.key_bits, rng)

    def execute(self, subcommand: str) -> RunResult:
        """
        Run one subcommand without writing files.

        Raises:
            ConfigError: On invalid configuration
            GuardViolation: If a guard is exceeded without override
        """
        self.config.validate(subcommand)
        handler = getattr(self, "run_" + subcommand.replace("-", "_"))
        logger.info("Running %s (master seed %d)", subcommand, self.config.run.master_seed)
        return handler()

    # ------------------------------------------------------------------
    # Subcommands
    # ------------------------------------------------------------------

    def run_constellation_dump(self) -> RunResult:
        table = constellation_table(self.params)
        header = ["index", "angle_radians", "bit", "basis"]
        rows = [[row[k] for k in header] for row in table]
        return RunResult("constellation-dump", header, rows, {"params": self.params.to_dict()})

    def run_keystream(self) -> RunResult:
        params = self.params
        expander = self.config.expander.to_expander()
        seed = self._seed(self._rng("keystream"))
        n = self.config.run.keystream_slots
        bits = expander.expand(seed, n * params.m)
        symbols = chunk_symbols(bits, params.M) if n else np.zeros(0, dtype=np.int64)
        blocks = bits.reshape(n, params.m) if n else np.zeros((0, params.m))
        header = ["slot", "symbol", "bits", "pol"]
        rows = [
            [i + 1, int(z), format_bits(block), int(pol(int(z)))]
            for i, (z, block) in enumerate(zip(symbols, blocks))
        ]
        summary = {"seed": seed.to_string(), "expander": expander.describe(), "M": params.M}
        return RunResult("keystream", header, rows, summary)

    def run_encrypt(self) -> RunResult:
        params = self.params
        expander = self.config.expander.to_expander()
        seed = self._seed(self._rng("encrypt"))
        plaintext = self.config.run.plaintext
        frame = encrypt(plaintext, seed, expander.spec, params, expander=expander)
        if frame.n:
            symbols = chunk_symbols(expander.expand(seed, frame.n * params.m), params.M)
            decoded = receive(frame, symbols, params, noiseless=True)
        else:
            symbols = decoded = np.zeros(0, dtype=np.int64)
        header = ["slot", "plaintext_bit", "keystream_symbol", "index", "angle_radians", "noiseless_decision"]
        rows = [
            [i + 1, int(plaintext[i]), int(symbols[i]), int(frame.indices[i]), float(frame.angles[i]), int(decoded[i])]
            for i in range(frame.n)
        ]
        summary = {
            "seed": seed.to_string(),
            "expander": expander.describe(),
            "plaintext": plaintext,
            "roundtrip_ok": bool(np.all(decoded == np.array([int(c) for c in plaintext], dtype=np.int64))),
        }
        return RunResult("encrypt", header, rows, summary)

    def run_bob_ber(self) -> RunResult:
        params = self.params
        run = self.config.run
        if params.is_power_of_two:
            expander = self.config.expander.to_expander()
            spec = expander.spec
        else:
            expander = spec = None
        estimate = roundtrip_ber(
            params, spec, run.trials, self._rng("bob-ber"), expander=expander, workers=run.workers
        )
        analytic = bob_ber_analytic(params)
        header = ["S", "M", "trials", "errors", "ber", "ci_low", "ci_high", "ber_analytic"]
        rows = [[params.S, params.M, estimate.trials, estimate.errors, estimate.ber,
                 estimate.ci_low, estimate.ci_high, analytic]]
        notes = []
        if spec is None:
            notes.append(f"M = {params.M} is not a power of two: keystream symbols drawn uniformly")
        summary = {"estimate": estimate.to_dict(), "ber_analytic": analytic,
                   "keystream": "uniform" if spec is None else expander.describe()}
        return RunResult("bob-ber", header, rows, summary, notes)

    def _wedge_policy(self) -> WedgePolicy:
        attack = self.config.attack
        return WedgePolicy(attack.wedge_policy, attack.confidence)

    def run_gamma(self) -> RunResult:
        params = self.params
        attack = self.config.attack
        policy = self._wedge_policy()
        estimate = gamma_empirical(
            params, policy, attack.gamma_trials, self._rng("gamma"), workers=self.config.run.workers
        )
        analytic = gamma_analytic(params)
        complexity = complexity_estimate(estimate.mean, self.config.expander.key_bits, params)
        header = ["M", "S", "wedge_policy", "width", "gamma_analytic", "gamma_empirical",
                  "gamma_std", "gamma_stderr", "coverage", "trials", "key_bits", "log10_complexity"]
        rows = [[params.M, params.S, policy.kind, estimate.width, analytic, estimate.mean,
                 estimate.std, estimate.stderr, estimate.coverage, estimate.trials,
                 self.config.expander.key_bits, complexity.log10]]
        notes = [complexity.note] if complexity.note else []
        summary = {"estimate": estimate.to_dict(), "gamma_analytic": analytic,
                   "complexity": complexity.to_dict()}
        return RunResult("gamma", header, rows, summary, notes)

    def run_eve_co(self) -> RunResult:
        params = self.params
        rule = self.config.attack.eve_rule
        run = self.config.run
        estimate = eve_ciphertext_only_ber(params, rule, run.trials, self._rng("eve-co"), workers=run.workers)
        bob = bob_ber_analytic(params)
        header = ["M", "S", "rule", "trials", "errors", "ber", "ci_low", "ci_high", "bob_ber_analytic"]
        rows = [[params.M, params.S, rule, estimate.trials, estimate.errors, estimate.ber,
                 estimate.ci_low, estimate.ci_high, bob]]
        return RunResult("eve-co", header, rows, {"estimate": estimate.to_dict(), "bob_ber_analytic": bob})

    def run_eve_bruteforce(self) -> RunResult:
        params = self.params
        attack = self.config.attack
        spec = self.config.expander.to_spec()
        policy = self._wedge_policy()
        rng = self._rng("eve-bruteforce")
        header = ["n", "runs", "mean_surviving", "true_seed_survival", "mean_slots_checked",
                  "mean_keystream_classes", "work", "wedge_width"]
        rows = []
        last_reports = {}
        total = len(attack.n_values) * attack.runs
        done = 0
        for n in attack.n_values:
            survivors, kept, checked, classes = [], 0, [], []
            for _ in range(attack.runs):
                report = run_bruteforce_trial(
                    params, spec, n, policy, rng,
                    guard=attack.bruteforce_guard, allow_override=attack.allow_override,
                )
                survivors.append(report.surviving_seeds)
                kept += int(report.details["true_seed_survives"])
                checked.append(report.details["mean_slots_checked"])
                classes.append(report.details["keystream_classes"])
                done += 1
                self._progress(done, total, f"n={n}")
            rows.append([n, attack.runs, float(np.mean(survivors)), kept / attack.runs,
                         float(np.mean(checked)), float(np.mean(classes)), 2**spec.length,
                         policy.width(params)])
            last_reports[str(n)] = report.to_dict()
        means = [row[2] for row in rows]
        notes = []
        if any(b > a for a, b in zip(means, means[1:])):
            notes.append("mean surviving count increased with n")
        summary = {"policy": asdict(policy), "last_reports": last_reports}
        return RunResult("eve-bruteforce", header, rows, summary, notes)

    def run_eve_correlation(self) -> RunResult:
        params = self.params
        attack = self.config.attack
        expander = self.config.expander.to_expander()
        rng = self._rng("eve-correlation")
        reports = []
        for i in range(attack.runs):
            reports.append(run_correlation_trial(
                params, expander, attack.n_slots, attack.msb_count, rng,
                guard=attack.correlation_guard, allow_override=attack.allow_override,
            ))
            self._progress(i + 1, attack.runs, "run")
        successes = sum(r.success for r in reports)
        channel = float(np.mean([r.error_rates["msb_channel_error"] for r in reports]))
        estimate = float(np.mean([r.error_rates["msb_error_estimate"] for r in reports]))
        header = ["M", "S", "key_bits", "nonlinear_filter", "n_slots", "msb_count", "runs",
                  "successes", "success_rate", "msb_channel_error", "msb_error_estimate", "work"]
        rows = [[params.M, params.S, expander.key_bits, not expander.linear, attack.n_slots,
                 attack.msb_count, attack.runs, successes, successes / attack.runs, channel,
                 estimate, 2**expander.key_bits]]
        summary = {"expander": expander.describe(), "last_report": reports[-1].to_dict()}
        notes = []
        if not expander.linear and successes > 0.1 * attack.runs:
            notes.append(
                f"filtered expander: linear decoding recovered the seed in {successes} of "
                f"{attack.runs} runs"
            )
            logger.warning(notes[-1])
        return RunResult("eve-correlation", header, rows, summary, notes)

    def run_dsr_sweep(self) -> RunResult:
        dsr = self.config.dsr
        run = self.config.run
        table = dsr_scaling_experiment(
            dsr.gamma_target,
            dsr.S_list,
            run.trials,
            self._rng("dsr-sweep"),
            coupling=dsr.coupling,
            delta=dsr.delta,
            gamma_trials=self.config.attack.gamma_trials,
            workers=run.workers,
        )
        header = ["S", "M", "delta", "bob_ber", "bob_penalty", "eve_gamma",
                  "log10_bob_penalty", "eve_gamma_stderr", "eve_coverage", "gamma_analytic"]
        rows = [[r.S, r.M, r.delta, r.bob_ber, r.bob_penalty, r.eve_gamma,
                 r.log10_bob_penalty, r.eve_gamma_stderr, r.eve_coverage, r.gamma_analytic]
                for r in table.rows]
        failures = table.failures()
        for problem in failures:
            logger.warning(problem)
        return RunResult("dsr-sweep", header, rows, table.to_dict(), failures)

    def run_joint_srm(self) -> RunResult:
        params = self.params
        joint = self.config.joint
        expander = self.config.expander.to_expander()
        captured = []
        curve = pe_vs_n(
            expander.spec,
            params,
            joint.n_values,
            joint.plaintext_policy,
            rng=self._rng("joint-srm"),
            guard=joint.guard,
            allow_override=self.config.attack.allow_override,
            expander=expander,
            progress_callback=self.progress_callback,
            gram_sink=captured.append if joint.dump_gram else None,
        )
        result = RunResult("joint-srm", ["n", "pe"], [list(row) for row in curve.rows], curve.to_dict())
        if not curve.is_monotone():
            result.notes.append("SRM error is not monotone in n beyond 1e-9")
        result.summary["gram"] = captured[-1] if captured else None
        return result


# ============================================================================
# PERSISTENCE
# ============================================================================


def save_result(result: RunResult, output_dir: Path, output_format: str = "csv") -> List[Path]:
    """Write the result file(s) of one subcommand into ``output_dir``."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    gram = result.summary.pop("gram", None)
    if output_format == "csv":
        paths.append(write_csv(output_dir / f"{result.subcommand}.csv", result.header, result.rows))
        if result.summary or result.notes:
            paths.append(write_json(output_dir / f"{result.subcommand}-summary.json", result.to_dict()))
    else:
        paths.append(write_json(output_dir / f"{result.subcommand}.json", result.to_dict()))
    if gram is not None:
        paths.append(write_gram(output_dir / f"{result.subcommand}-gram.bin", gram))
    result.files = [p.name for p in paths]
    return paths


def run(
    subcommand: str,
    config: ExperimentConfig,
    overrides: Sequence[str] = (),
    progress_callback: Optional[ProgressCallback] = None,
) -> RunResult:
    """
    Run one subcommand end to end: overrides, validation, experiment, files, manifest.

    Args:
        subcommand: One of ``SUBCOMMANDS``
        config: Base configuration (modified in place by ``overrides``)
        overrides: ``section.key=value`` strings
        progress_callback: Callback(current, total, label)

    Returns:
        RunResult with ``files`` listing what was written

    Raises:
        ConfigError: Invalid configuration or subcommand
        GuardViolation: Guard exceeded without override
        NumericalError: Numerical routine out of tolerance
        OSError: Output directory not writable
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"Unknown subcommand '{subcommand}'. Available: {', '.join(SUBCOMMANDS)}")
    config.apply_overrides(overrides)
    config.validate(subcommand)
    output_dir = Path(config.run.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    manifest = RunManifest(
        subcommand=subcommand,
        config=config.to_dict(),
        version=__version__,
        master_seed=config.run.master_seed,
        started_at=_now(),
    )
    manifest_path = output_dir / f"{subcommand}-manifest.json"
    try:
        result = ExperimentRunner(config, progress_callback).execute(subcommand)
        save_result(result, output_dir, config.run.output_format)
        manifest.status = "ok"
        manifest.files = list(result.files)
        return result
    except Exception as e:
        manifest.status = f"failed: {type(e).__name__}: {e}"
        raise
    finally:
        manifest.finished_at = _now()
        try:
            manifest.to_json_file(manifest_path)
        except OSError:
            logger.error("Could not write manifest %s", manifest_path)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def batch_run(
    subcommands: List[str],
    config: ExperimentConfig,
    progress_callback: Optional[ProgressCallback] = None,
) -> dict:
    """
    Run several subcommands with one configuration.

    Args:
        subcommands: Subcommand names
        config: Experiment configuration
        progress_callback: Callback(current, total, subcommand)

    Returns:
        Dict with success/failed counts and results list
    """
    results = {"total": len(subcommands), "success": 0, "failed": 0, "results": []}
    for i, name in enumerate(subcommands, 1):
        if progress_callback:
            progress_callback(i, len(subcommands), name)
        try:
            result = run(name, config)
            results["success"] += 1
            results["results"].append({"subcommand": name, "success": True, "error": None,
                                       "error_type": None, "files": result.files})
        except (ValueError, ArithmeticError, OSError) as e:
            results["failed"] += 1
            logger.error("%s failed: %s", name, e)
            results["results"].append({"subcommand": name, "success": False, "error": str(e),
                                       "error_type": type(e).__name__, "files": []})
    return results
