"""Runs a scenario: one library pipeline per command, then the reports.

Results are computed in full before anything is written, so a failure
never leaves partial output. Exit codes: 0 success, 2 invalid scenario or
argument, 3 optimizer did not converge (outputs still written).
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from certilab.components.report import emit_csv, emit_json, render_records
from certilab.components.scenario import Scenario, gamma_t_to_p, load_scenario
from certilab.config import get_settings
from certilab.utils.certify import certifiability_exact, epsilon_ball_certifiable
from certilab.utils.channels import verify_correction_map
from certilab.utils.confuse import (
    confusability_index_upper_bound,
    confusability_matrix,
    effective_size_report,
    equal_mixture_distance,
    mixture_entropy,
    superposition_macro_check,
)
from certilab.utils.errors import CertilabError
from certilab.utils.families import family_bounds, get_hamiltonian
from certilab.utils.hamiltonians import spectral_info
from certilab.utils.scaling import MIN_RECORDS, SweepRecord, classify_decay, scaling_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

__all__ = ["EXIT_INVALID", "EXIT_NOT_CONVERGED", "EXIT_OK", "RunOutput", "execute", "gamma_t_to_p", "run_scenario"]


@dataclass
class RunOutput:
    results: Union[Dict, List]
    records: List[SweepRecord] = field(default_factory=list)
    converged: bool = True


def _certify(scenario: Scenario, jobs: int) -> RunOutput:
    family = scenario.resolve_family()
    opts = scenario.optimizer_options(jobs)
    results, records, converged = [], [], True
    for N in scenario.N_values:
        for p in scenario.p_values:
            bounds = family_bounds(family, N, p)
            result = certifiability_exact(
                family.state(N), p, opts, family.candidates(N), bounds["lower"], bounds["upper"]
            )
            entry = {"N": N, **result.to_dict()}
            if scenario.delta is not None:
                entry["certifiable"] = epsilon_ball_certifiable(result, scenario.delta, scenario.eps)
            results.append(entry)
            records.append(SweepRecord(family.name, N, p, "certifiability", result.value, "exact", family.params, result.converged))
            converged = converged and result.converged
    return RunOutput(results, records, converged)


def _sweep(scenario: Scenario, jobs: int) -> RunOutput:
    family = scenario.resolve_family()
    opts = scenario.optimizer_options(jobs)
    records: List[SweepRecord] = []
    classifications = {}
    for p in scenario.p_values:
        batch = scaling_sweep(family, scenario.N_values, p, scenario.quantity, opts, jobs)
        records.extend(batch)
        if len(batch) >= MIN_RECORDS:
            classifications[repr(p)] = classify_decay(batch, scenario.margin).to_dict()
    results = {
        "records": [dict(r.to_row(), converged=r.converged) for r in records],
        "classifications": classifications,
    }
    return RunOutput(results, records, all(r.converged for r in records))


def _bounds(scenario: Scenario, jobs: int) -> RunOutput:
    family = scenario.resolve_family()
    results, records = [], []
    for N in scenario.N_values:
        for p in scenario.p_values:
            bounds = family_bounds(family, N, p)
            results.append({"N": N, "p": p, **bounds})
            for side in ("lower", "upper", "pairwise"):
                for name, value in sorted(bounds[side].items()):
                    records.append(SweepRecord(family.name, N, p, f"{side}:{name}", value, "bound", family.params))
    return RunOutput(results, records)


def _confuse(scenario: Scenario, jobs: int) -> RunOutput:
    family = scenario.resolve_family()
    results, records = [], []
    for p in scenario.p_values:
        matrix = confusability_matrix(family.members, p, scenario.N_values, scenario.margin, jobs)
        entry = matrix.to_dict()
        entry["all_confusable"] = matrix.all_confusable()
        entry["equal_mixture_distance"] = equal_mixture_distance(list(matrix.states), p)
        entry["mixture_entropy"] = mixture_entropy(list(matrix.states))
        if family.has_hamiltonian:
            try:
                entry["index_upper_bound"] = confusability_index_upper_bound(family.hamiltonian(matrix.N))
            except CertilabError as exc:
                logger.info("no confusability index bound for %s: %s", family.name, exc)
        results.append(entry)
        for N, distances in sorted(matrix.sweep.items()):
            size = distances.shape[0]
            for i in range(size):
                for j in range(i + 1, size):
                    records.append(SweepRecord(family.name, N, p, f"distance:{i}-{j}", float(distances[i, j]), "pairwise", family.params))
    return RunOutput(results, records)


def _effective_size(scenario: Scenario, jobs: int) -> RunOutput:
    family = scenario.resolve_family()
    results = []
    for N in scenario.N_values:
        psi0, psi1 = family.branches(N)
        entry = {"N": N, **effective_size_report(psi0, psi1, scenario.eps).to_dict()}
        entry["macro_checks"] = [
            {"p": p, **superposition_macro_check(psi0, psi1, p).to_dict()} for p in scenario.p_values
        ]
        results.append(entry)
    return RunOutput(results)


def _gap(scenario: Scenario, jobs: int) -> RunOutput:
    results = []
    for N in scenario.N_values:
        h = get_hamiltonian(scenario.family, N, scenario.params)
        results.append({"N": N, "locality": h.locality, "terms": len(h.terms), **spectral_info(h).to_dict()})
    return RunOutput(results)


def _verify_channel(scenario: Scenario, jobs: int) -> RunOutput:
    rng = np.random.default_rng(scenario.seed)
    checks = [
        verify_correction_map(m, p, rng, scenario.samples) for m in scenario.N_values for p in scenario.p_values
    ]
    return RunOutput([c.to_dict() for c in checks], converged=all(c.passed for c in checks))


PIPELINES: Dict[str, Callable[[Scenario, int], RunOutput]] = {
    "certify": _certify,
    "sweep": _sweep,
    "bounds": _bounds,
    "confuse": _confuse,
    "effective-size": _effective_size,
    "gap": _gap,
    "verify-channel": _verify_channel,
}


def execute(scenario: Scenario, jobs: int = 1) -> RunOutput:
    logger.info("running %s for %s", scenario.command, scenario.family or "correction map")
    return PIPELINES[scenario.command](scenario, jobs)


def run_scenario(
    path: Union[str, Path],
    jobs: Optional[int] = None,
    seed: Optional[int] = None,
    out_dir: Union[str, Path] = ".",
) -> int:
    """Load, run and report one scenario; returns the process exit code"""
    try:
        scenario = load_scenario(path).with_seed(seed)
        output = execute(scenario, jobs if jobs is not None else get_settings().jobs)
    except CertilabError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        payload = {
            "command": scenario.command,
            "scenario": scenario.to_dict(),
            "converged": output.converged,
            "results": output.results,
        }
        emit_json(payload, out / scenario.outputs["json"])
        if output.records:
            emit_csv(output.records, out / scenario.outputs["csv"])
    except (CertilabError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_INVALID

    if output.records:
        logger.info("summary:\n%s", render_records(output.records))
    if not output.converged:
        logger.warning("%s finished without convergence; results carry converged=false", scenario.command)
        return EXIT_NOT_CONVERGED
    return EXIT_OK
