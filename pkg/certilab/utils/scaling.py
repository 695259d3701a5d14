"""Scaling sweeps over N and the exponential-versus-polynomial decay test."""
import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .certify import certifiability_exact, pairwise_noisy_distance
from .channels import _check_probability, apply_to_operator
from .errors import ArgumentError
from .hilbert import fidelity_with_pure, purity
from .optimizer import OptimizerOptions
from .pool import run_ordered

logger = logging.getLogger(__name__)

CLAMP_FLOOR = 1e-300
MIN_RECORDS = 4
# slopes closer to zero than this many standard errors count as no decay
SLOPE_SIGNIFICANCE = 2.0

# kind -> value of the CSV `quantity` column
QUANTITY_NAMES = {
    "exact": "certifiability",
    "pairwise": "distance",
    "bound": "bound",
    "purity": "purity",
    "fidelity": "fidelity",
}


@dataclass(frozen=True)
class SweepRecord:
    family: str
    N: int
    p: float
    quantity: str
    value: float
    kind: str
    params: Dict = field(default_factory=dict, compare=False, hash=False)
    converged: bool = True

    def __post_init__(self):
        if not -1e-12 <= self.value <= 1.0 + 1e-12:
            raise ArgumentError(f"{self.quantity} value {self.value} for N={self.N} lies outside [0, 1]")

    def to_row(self) -> Dict:
        return {
            "family": self.family,
            "N": self.N,
            "p": self.p,
            "quantity": self.quantity,
            "value": self.value,
            "kind": self.kind,
        }


def _sweep_point(family, N: int, p: float, kind: str, opts: OptimizerOptions) -> Tuple[float, bool]:
    psi = family.state(N)
    if kind == "pairwise":
        return pairwise_noisy_distance(psi, family.partner(N), p), True
    if kind == "exact":
        result = certifiability_exact(
            psi,
            p,
            opts,
            candidates=family.candidates(N),
            lower_bounds=family.lower_bounds(N, p),
            upper_bounds=family.upper_bounds(N, p),
        )
        return result.value, result.converged
    if kind == "bound":
        return family.primary_bound(N, p)[1], True
    noisy = apply_to_operator(psi.projector(), p)
    if kind == "purity":
        return purity(noisy), True
    return fidelity_with_pure(noisy, psi), True


def scaling_sweep(
    family,
    N_list: Sequence[int],
    p: float,
    kind: str = "pairwise",
    opts: Optional[OptimizerOptions] = None,
    jobs: int = 1,
) -> List[SweepRecord]:
    """One record per N, in the order given; parallel runs give identical records"""
    if kind not in QUANTITY_NAMES:
        raise ArgumentError(f"unknown sweep quantity {kind!r}; choose from {sorted(QUANTITY_NAMES)}")
    _check_probability(p)
    N_list = [int(N) for N in N_list]
    for N in N_list:
        family.check_n(N)
    opts = opts or OptimizerOptions()
    if jobs > 1:
        # the sweep owns the workers; restarts then run serially
        opts = replace(opts, jobs=1)

    def run(N: int) -> SweepRecord:
        value, converged = _sweep_point(family, N, p, kind, opts)
        logger.debug("%s N=%d p=%g %s=%.12g", family.name, N, p, kind, value)
        return SweepRecord(
            family.name, N, p, QUANTITY_NAMES[kind], float(np.clip(value, 0.0, 1.0)), kind,
            dict(family.params), converged,
        )

    return run_ordered(run, N_list, jobs)


@dataclass(frozen=True)
class FitResult:
    model: str
    slope: float
    intercept: float
    residual: float
    slope_stderr: float = 0.0


@dataclass(frozen=True)
class DecayClassification:
    label: str
    rate: float
    exponential: FitResult
    polynomial: FitResult
    clamped: bool = False

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "rate": self.rate,
            "clamped": self.clamped,
            "exponential": vars(self.exponential),
            "polynomial": vars(self.polynomial),
        }


def _line(x, a, b):
    return a + b * x


def _fit(model: str, x: np.ndarray, y: np.ndarray) -> FitResult:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        (a, b), _ = curve_fit(_line, x, y, p0=(float(y[0]), 0.0))
    residual = float(np.sum((y - _line(x, a, b)) ** 2))
    # ordinary least-squares standard error of the slope, n - 2 degrees of freedom
    spread = float(np.sum((x - x.mean()) ** 2))
    stderr = float(np.sqrt(residual / (len(x) - 2) / spread))
    return FitResult(model, float(b), float(a), residual, stderr)


def _series(records: Sequence[SweepRecord]) -> Tuple[np.ndarray, np.ndarray]:
    ordered = sorted(records, key=lambda r: r.N)
    Ns = np.array([r.N for r in ordered], dtype=float)
    if len(ordered) < MIN_RECORDS:
        raise ArgumentError(f"decay classification needs at least {MIN_RECORDS} records, got {len(ordered)}")
    if np.any(np.diff(Ns) <= 0):
        raise ArgumentError("decay classification needs one record per N")
    return Ns, np.array([r.value for r in ordered], dtype=float)


def fit_decay_models(records: Sequence[SweepRecord]) -> Tuple[FitResult, FitResult, bool]:
    """Least-squares fits of log(value) against N and against log N"""
    Ns, values = _series(records)
    clamped = bool(np.any(values <= 0))
    if clamped:
        logger.warning("nonpositive values clamped at %g before the decay fit", CLAMP_FLOOR)
    logs = np.log(np.maximum(values, CLAMP_FLOOR))
    return _fit("exponential", Ns, logs), _fit("polynomial", np.log(Ns), logs), clamped


def classify_decay(records: Sequence[SweepRecord], margin: float = 2.0) -> DecayClassification:
    """exponential, polynomial or inconclusive by comparing residual sums.

    The winner's residual must be at most 1/margin of the loser's. Data that
    does not decay at all is bounded below by a constant and counts as
    polynomial, and so does data whose fitted exponential slope lies within
    SLOPE_SIGNIFICANCE standard errors of zero.
    """
    if margin < 1:
        raise ArgumentError(f"margin must be at least 1, got {margin}")
    exp_fit, poly_fit, clamped = fit_decay_models(records)
    if exp_fit.slope >= -1e-9 or -exp_fit.slope <= SLOPE_SIGNIFICANCE * exp_fit.slope_stderr:
        label, rate = "polynomial", poly_fit.slope
    elif exp_fit.residual * margin <= poly_fit.residual:
        label, rate = "exponential", exp_fit.slope
    elif poly_fit.residual * margin <= exp_fit.residual:
        label, rate = "polynomial", poly_fit.slope
    else:
        label, rate = "inconclusive", exp_fit.slope
    return DecayClassification(label, rate, exp_fit, poly_fit, clamped)


def records_from_values(name: str, Ns: Sequence[int], values: Sequence[float], p: float, kind: str = "pairwise") -> List[SweepRecord]:
    return [SweepRecord(name, int(N), p, QUANTITY_NAMES[kind], float(v), kind) for N, v in zip(Ns, values)]
