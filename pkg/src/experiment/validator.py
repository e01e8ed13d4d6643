"""
Cross-field validation of experiment configurations.
"""
from typing import List, Optional, Tuple

from src.experiment.models import ExperimentConfig
from src.spectral.basis import basis_size
from src.utils.errors import ConfigError
from src.utils.settings import get_settings


class ExperimentValidator:
    """Validate the parts of an experiment that pydantic checks field by field cannot."""

    def __init__(self, max_basis_size: Optional[int] = None):
        """
        Initialize validator.

        Args:
            max_basis_size: Cap on C(N+d, d) (default HERMSPDE_MAX_BASIS_SIZE)
        """
        self.max_basis_size = max_basis_size or get_settings().max_basis_size

    def validate(self, config: ExperimentConfig) -> Tuple[bool, List[str]]:
        """
        Validate experiment.

        Args:
            config: Parsed configuration

        Returns:
            Tuple of (is_valid, list_of_issues)
        """
        issues = []
        model, sim = config.model, config.sim

        # Invariant-measure index
        if config.q >= model.p:
            issues.append(f"Hypothesis q < p violated: q={config.q}, p={model.p}")

        # Save grid
        try:
            sim.save_steps()
        except ConfigError as e:
            issues.append(str(e))

        size = basis_size(model.d, sim.N)
        if size > self.max_basis_size:
            issues.append(
                f"Basis size C(N+d, d) = {size} for d={model.d}, N={sim.N} exceeds {self.max_basis_size}"
            )

        # Initial conditions
        for label, start in (("initial", config.initial), ("alternate_initial", config.alternate_initial)):
            for term in start.terms:
                if len(term.k) != model.d:
                    issues.append(f"{label}: term {term.k} does not have d={model.d} entries")
                elif sum(term.k) > sim.N:
                    issues.append(f"{label}: term {term.k} lies above the truncation N={sim.N}")

        analysis = config.analysis
        if any(R <= 0.0 for R in analysis.R_grid):
            issues.append(f"R_grid must be positive: {analysis.R_grid}")
        for functional in analysis.functionals:
            if functional.kind == "sq_norm":
                issues.append("Functional sq_norm is unbounded and cannot be averaged")
            if functional.kind == "cos_coeff" and len(functional.k) != model.d:
                issues.append(f"cos_coeff index {functional.k} does not have d={model.d} entries")
        if analysis.fit_window is not None and analysis.fit_window[0] >= analysis.fit_window[1]:
            issues.append(f"fit_window must be increasing: {analysis.fit_window}")
        if any(n < 0 for n in analysis.N_list + analysis.embedding_n):
            issues.append("Truncation and projection orders must be non-negative")
        for p, q in analysis.embedding_pairs or []:
            if q >= p:
                issues.append(f"Embedding pair needs q < p, got (p={p}, q={q})")

        is_valid = len(issues) == 0
        return is_valid, issues

    def validate_and_report(self, config: ExperimentConfig) -> str:
        """
        Validate and generate report.

        Args:
            config: Parsed configuration

        Returns:
            Validation report string
        """
        is_valid, issues = self.validate(config)

        if is_valid:
            return "Experiment validation passed!"
        report = "Experiment validation found issues:\n"
        for i, issue in enumerate(issues, 1):
            report += f"{i}. {issue}\n"
        return report

    @staticmethod
    def check_hypothesis(config: ExperimentConfig, C0: float) -> Optional[str]:
        """Warning text when 2 alpha > C0 fails (results are then informational)."""
        alpha = config.model.alpha
        if 2.0 * alpha > C0:
            return None
        return (
            f"2*alpha = {2.0 * alpha:g} does not exceed C0 = {C0:.6g}; "
            "stability and tail results are informational"
        )
