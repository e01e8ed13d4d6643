"""
Experiment orchestration: one method per command-line subcommand.

Every method writes its tables and reports into config.output_dir and
returns the reports it produced. Proven inequalities that fail numerically
raise InvariantViolation after the outputs are written.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from src.analysis.functionals import make_functional
from src.analysis.invariant import ergodic_from_moments, tail_mass
from src.analysis.models import ErgodicReport, StabilityReport, TailReport
from src.analysis.stability import stability_check
from src.experiment.io import read_json, write_csv, write_json, write_jsonl
from src.experiment.models import ExperimentConfig
from src.experiment.validator import ExperimentValidator
from src.monotonicity.estimator import (
    estimate_boundedness,
    estimate_constant,
    hypothesis_check,
    verify_inequality,
)
from src.pdf.generator import ReportPDFGenerator
from src.simulation.integrator import simulate_ensemble
from src.simulation.models import MomentTable
from src.simulation.oracle import OracleComparison, strong_error_sweep
from src.simulation.rng import split
from src.spectral.basis import enumerate_indices
from src.spectral.space import GradedVector, embedding_bound_check
from src.utils.errors import ConfigError, InvariantViolation

logger = logging.getLogger(__name__)

MONOTONE_RTOL = 1e-9
EMBEDDING_EXTRA_GRADES = 8
REPORT_FILES = ("hypothesis", "stability", "tail", "ergodic", "oracle")


class ExperimentRunner:
    """Run the diagnostics of one experiment configuration."""

    def __init__(self, config: ExperimentConfig, validator: Optional[ExperimentValidator] = None):
        """
        Validate the config and prepare the output directory.

        Args:
            config: Parsed configuration (overrides applied)
            validator: Cross-field validator (default ExperimentValidator())

        Raises:
            ConfigError: listing every validation issue
        """
        validator = validator or ExperimentValidator()
        is_valid, issues = validator.validate(config)
        if not is_valid:
            raise ConfigError(validator.validate_and_report(config).strip())
        self.config = config
        self.validator = validator
        self.output_dir = Path(config.output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        (self.output_dir / "config.json").write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @property
    def spec(self):
        return self.config.model

    def _path(self, name: str) -> Path:
        return self.output_dir / name

    def _write_moments(self, moments: MomentTable, prefix: str):
        write_csv(self._path(f"{prefix}moments.csv"),
                  ["t", "mean_sq_norm", "stderr", "min_norm", "max_norm"], moments.rows())
        if moments.states is not None:
            write_jsonl(self._path(f"{prefix}states.jsonl"), (s.to_json() for s in moments.states))

    def _C0(self) -> float:
        return estimate_constant(self.spec, self.spec.p - 2.0, self.config.sim.N).C_hat

    def monotonicity(self, N_list: Optional[Sequence[int]] = None) -> List[dict]:
        """
        Constants table over the indices (p, p-2, q-2) and N_list.

        Raises:
            InvariantViolation: if C_hat decreases in N or a random vector beats C_hat
        """
        N_list = sorted(N_list or self.config.analysis.N_list)
        spec, q = self.spec, self.config.q
        indices = [("p", spec.p), ("p-2", spec.p - 2.0), ("q-2", q - 2.0)]

        rows, table, problems = [], [], []
        for label, s in indices:
            previous = None
            for N in N_list:
                estimate = estimate_constant(spec, s, N)
                check = verify_inequality(
                    spec, s, N, self.config.analysis.inequality_trials, self.config.sim.seed, estimate
                )
                rows.append([self.config.name, spec.d, s, N, estimate.C_hat, estimate.residual, label, estimate.method,
                             check.max_ratio, check.passed])
                table.append({"index": label, "s": s, "N": N, "C_hat": estimate.C_hat})
                if not check.passed:
                    problems.append(f"random vector exceeds C_hat at s={s}, N={N}")
                if previous is not None and estimate.C_hat < previous - MONOTONE_RTOL * max(abs(previous), 1.0):
                    problems.append(f"C_hat decreased from {previous} to {estimate.C_hat} at s={s}, N={N}")
                previous = estimate.C_hat

        write_csv(self._path("monotonicity.csv"),
                  ["model_id", "d", "p", "N", "C_hat", "residual", "index", "method", "max_sampled_ratio",
                   "inequality_ok"], rows)

        N_max = N_list[-1]
        bounds = [estimate_boundedness(spec, spec.p, N) for N in N_list]
        write_csv(self._path("boundedness.csv"), ["p", "N", "C1_hat", "C2_hat"],
                  [[b.p, b.N, b.C1_hat, b.C2_hat] for b in bounds])
        write_json(self._path("hypothesis.json"), hypothesis_check(spec, N_max, q))

        if problems:
            raise InvariantViolation("; ".join(problems))
        return table

    def stability(self) -> StabilityReport:
        """
        C0 at p-2, ensemble simulation, stability check.

        Raises:
            BlowUpError: on a non-finite path
            InvariantViolation: if the bound fails by more than 3 stderr while 2 alpha > C0
        """
        cfg = self.config
        C0 = self._C0()
        warning = self.validator.check_hypothesis(cfg, C0)
        if warning:
            logger.warning(warning)
        moments = simulate_ensemble(self.spec, cfg.sim, cfg.x0())
        report = stability_check(
            moments, self.spec, C0, cfg.analysis.stability_tol, cfg.analysis.fit_window
        )
        self._write_moments(moments, "")
        write_csv(self._path("stability_curve.csv"), ["t", "value", "stderr"], report.curve_rows())
        write_json(self._path("stability.json"), report)
        logger.info(f"beta_hat = {report.beta_hat}, bound rate = {report.bound_rate:.6g}, pass = {report.passed}")
        if report.violated:
            raise InvariantViolation(
                f"Mean-square norm exceeds ||x0||^2 exp(-{report.bound_rate:.6g} t) (1 + {report.tol:g})"
                " by more than 3 stderr"
            )
        if report.passed is False:
            logger.warning("Mean-square bound exceeded within Monte Carlo error; increase sim.paths")
        return report

    def invariant(self) -> Dict[str, object]:
        """
        Tail mass from x0 and ergodic averages from two starts (common random numbers).

        Raises:
            ConfigError: if q >= p
            InvariantViolation: if the Chebyshev bound fails in the stable regime
        """
        cfg = self.config
        spec = self.spec
        if cfg.q >= spec.p:
            raise ConfigError(f"Hypothesis q < p violated: q={cfg.q}, p={spec.p}")
        C0 = self._C0()
        warning = self.validator.check_hypothesis(cfg, C0)
        if warning:
            logger.warning(warning)

        functionals = [make_functional(f, cfg.q - 2.0) for f in cfg.analysis.functionals]
        observables = {f.name: f for f in functionals}
        first = simulate_ensemble(spec, cfg.sim, cfg.x0(), observables=observables)
        second = simulate_ensemble(spec, cfg.sim, cfg.x1(), observables=observables)

        tail: TailReport = tail_mass(first, cfg.analysis.R_grid, cfg.analysis.eps, enforce=False)
        ergodic: List[ErgodicReport] = [ergodic_from_moments(first, f, second) for f in functionals]

        self._write_moments(first, "")
        write_json(self._path("tail.json"), tail)
        write_csv(self._path("tail.csv"), ["R", "time_avg_exceed", "stderr", "chebyshev_bound"], tail.rows())
        write_json(self._path("ergodic.json"), ergodic)
        write_csv(
            self._path("ergodic.csv"),
            ["functional", "T", "running_avg", "stderr", "start_gap"],
            [[report.functional_id] + row for report in ergodic for row in report.rows()],
        )
        logger.info(f"R_eps = {tail.R_eps}")

        if warning is None and not tail.passed:
            failed = [e.R for e in tail.entries if not e.within_bound]
            raise InvariantViolation(f"Chebyshev tail bound violated at R = {failed}")
        return {"tail": tail, "ergodic": ergodic}

    def embedding(self, n_list: Optional[Sequence[int]] = None, trials: int = 1000) -> List[list]:
        """
        Random-vector sweep of ||T_n x - x||_q <= (2n+d)^{-(p-q)} ||x||_p.

        Raises:
            InvariantViolation: on any violation
        """
        cfg = self.config
        n_list = sorted(n_list or cfg.analysis.embedding_n)
        pairs = cfg.analysis.embedding_pairs or [(self.spec.p, cfg.q)]
        d = self.spec.d
        index_set = enumerate_indices(d, max(n_list) + EMBEDDING_EXTRA_GRADES)
        generator = split(cfg.sim.seed, 0)
        vectors = [GradedVector(index_set, generator.standard_normal(index_set.size)) for _ in range(trials)]

        rows, violations = [], 0
        for p, q in pairs:
            for n in n_list:
                checks = [embedding_bound_check(x, p, q, n) for x in vectors]
                failed = sum(not c.passed for c in checks)
                worst = max((c.lhs / c.rhs for c in checks if c.rhs > 0.0), default=0.0)
                rows.append([d, p, q, n, trials, worst, failed])
                violations += failed
        write_csv(self._path("embedding.csv"), ["d", "p", "q", "n", "trials", "max_ratio", "violations"], rows)
        if violations:
            raise InvariantViolation(f"{violations} compact-embedding bound violations")
        return rows

    def oracle_compare(self, dts: Optional[Sequence[float]] = None) -> OracleComparison:
        """Strong error of the Galerkin scheme against the exact translation solution."""
        cfg = self.config
        comparison = strong_error_sweep(self.spec, cfg.sim, cfg.x0(), dts or cfg.analysis.oracle_dts)
        write_json(self._path("oracle.json"), comparison)
        write_csv(self._path("oracle.csv"), ["dt", "strong_error", "stderr"], comparison.rows())
        if comparison.order < 0.5:
            logger.warning(f"Empirical strong order {comparison.order:.3f} is below 0.5")
        return comparison

    def report(self) -> Path:
        """Collect the JSON reports present in output_dir into report.pdf."""
        reports = {}
        for name in REPORT_FILES:
            path = self._path(f"{name}.json")
            if path.exists():
                reports[name] = read_json(path)
        return ReportPDFGenerator().save_to_file(
            reports, f"Experiment: {self.config.name}", self._path("report.pdf")
        )
