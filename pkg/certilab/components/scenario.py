"""Scenario files: JSON descriptions of one batch job.

A scenario names a command, a family with its parameters, the noise level
and the system sizes. Every field is validated here, before any numerical
work starts, so a bad file never leaves partial output behind.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

from certilab.config import get_settings
from certilab.utils.channels import NoiseModel
from certilab.utils.errors import CertilabError, ScenarioError
from certilab.utils.families import FAMILIES, HAMILTONIANS, StateFamily, get_family
from certilab.utils.optimizer import OptimizerOptions
from certilab.utils.scaling import QUANTITY_NAMES

logger = logging.getLogger(__name__)

COMMANDS = ("certify", "sweep", "bounds", "confuse", "effective-size", "gap", "verify-channel")

# keys with a fixed meaning; everything else at top level is a family parameter
RESERVED = {
    "command", "family", "params", "p", "gamma", "t", "N", "quantity", "optimizer",
    "eps", "delta", "margin", "output", "seed", "samples",
}

# commands that need a noise level, and those that need a state family
NEEDS_P = {"certify", "sweep", "bounds", "confuse", "verify-channel"}
NEEDS_FAMILY = {"certify", "sweep", "bounds", "confuse", "effective-size"}


def gamma_t_to_p(gamma: float, t: float) -> float:
    """p = exp(-gamma t)"""
    return NoiseModel.from_gamma_t(gamma, t).p


@dataclass(frozen=True)
class Scenario:
    command: str
    family: Optional[str] = None
    params: Dict = field(default_factory=dict)
    p_values: Tuple[float, ...] = ()
    N_values: Tuple[int, ...] = ()
    quantity: str = "pairwise"
    optimizer: Dict = field(default_factory=dict)
    eps: float = 0.0
    delta: Optional[float] = None
    margin: float = 2.0
    samples: int = 100
    outputs: Dict[str, str] = field(default_factory=dict)
    seed: int = 0

    def resolve_family(self) -> StateFamily:
        return get_family(self.family, self.params)

    def optimizer_options(self, jobs: int = 1) -> OptimizerOptions:
        raw = dict(self.optimizer)
        raw.setdefault("seed", self.seed)
        return OptimizerOptions.from_dict(raw, jobs=jobs)

    def with_seed(self, seed: Optional[int]) -> "Scenario":
        if seed is None:
            return self
        return replace(self, seed=int(seed))

    def to_dict(self) -> Dict:
        return {
            "command": self.command,
            "family": self.family,
            "params": dict(self.params),
            "p": list(self.p_values),
            "N": list(self.N_values),
            "quantity": self.quantity,
            "optimizer": dict(self.optimizer),
            "eps": self.eps,
            "delta": self.delta,
            "margin": self.margin,
            "samples": self.samples,
            "seed": self.seed,
        }


def _number(raw: Dict, key: str, default=None, cast=float):
    if key not in raw:
        return default
    value = raw[key]
    if isinstance(value, bool):
        raise ScenarioError(f"{key} must be a number, got {value!r}")
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{key} must be a number, got {value!r}") from None


def _parse_N(value: Union[int, Sequence, Dict]) -> Tuple[int, ...]:
    if isinstance(value, dict):
        try:
            start, stop = int(value["start"]), int(value["stop"])
            step = int(value.get("step", 1))
        except (KeyError, TypeError, ValueError):
            raise ScenarioError(f"N range needs integer start and stop, got {value!r}") from None
        if step < 1 or stop < start:
            raise ScenarioError(f"empty N range {value!r}")
        return tuple(range(start, stop + 1, step))
    values = value if isinstance(value, list) else [value]
    try:
        Ns = tuple(int(v) for v in values)
    except (TypeError, ValueError):
        raise ScenarioError(f"N must be an integer, a list of integers or a range, got {value!r}") from None
    if not Ns or any(N < 1 for N in Ns):
        raise ScenarioError(f"N values must be positive, got {list(Ns)}")
    if len(set(Ns)) != len(Ns):
        raise ScenarioError(f"N values repeat: {list(Ns)}")
    return Ns


def _parse_p(raw: Dict) -> Tuple[float, ...]:
    if "p" in raw and ("gamma" in raw or "t" in raw):
        raise ScenarioError("give either p or gamma and t, not both")
    if "gamma" in raw or "t" in raw:
        gamma, t = _number(raw, "gamma"), _number(raw, "t")
        if gamma is None or t is None:
            raise ScenarioError("gamma and t must be given together")
        try:
            return (gamma_t_to_p(gamma, t),)
        except CertilabError as exc:
            raise ScenarioError(str(exc)) from None
    if "p" not in raw:
        return ()
    values = raw["p"] if isinstance(raw["p"], list) else [raw["p"]]
    ps = tuple(_number({"p": v}, "p") for v in values)
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise ScenarioError(f"p values must lie in [0, 1], got {list(ps)}")
    return ps


def _parse_outputs(raw: Dict) -> Dict[str, str]:
    outputs = raw.get("output", {})
    if not isinstance(outputs, dict) or set(outputs) - {"csv", "json"}:
        raise ScenarioError("output must be an object with optional csv and json file names")
    command = raw["command"]
    return {
        "csv": str(outputs.get("csv", f"{command}.csv")),
        "json": str(outputs.get("json", f"{command}.json")),
    }


def _family_params(raw: Dict) -> Dict:
    params = raw.get("params") or {}
    if not isinstance(params, dict):
        raise ScenarioError("params must be an object")
    params = dict(params)
    for key, value in raw.items():
        if key not in RESERVED:
            if key in params:
                raise ScenarioError(f"family parameter {key!r} given twice")
            params[key] = value
    return params


def _check_family(scenario: Scenario):
    """Resolve the family and check every N against it"""
    name = scenario.family
    if scenario.command == "gap":
        if name not in HAMILTONIANS and name not in FAMILIES:
            raise ScenarioError(f"unknown Hamiltonian or family {name!r}")
        return
    family = scenario.resolve_family()
    for N in scenario.N_values:
        family.check_n(N)
    if scenario.command == "effective-size" and not family.has_branches:
        raise ScenarioError(f"family {name} has no superposition branches")


def parse_scenario(raw: Dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("a scenario must be a JSON object")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ScenarioError(f"command must be one of {list(COMMANDS)}, got {command!r}")

    family = raw.get("family")
    if command in NEEDS_FAMILY or command == "gap":
        if not isinstance(family, str):
            raise ScenarioError(f"{command} needs a family name")
    elif family is not None:
        raise ScenarioError(f"{command} takes no family")

    p_values = _parse_p(raw)
    if command in NEEDS_P and not p_values:
        raise ScenarioError(f"{command} needs p (or gamma and t)")

    params = _family_params(raw)
    N_values = _parse_N(raw["N"]) if "N" in raw else ()
    if not N_values and family in FAMILIES:
        # a fixed-size family supplies its own N
        try:
            fixed = get_family(family, params).fixed_n
        except CertilabError as exc:
            raise ScenarioError(str(exc)) from None
        N_values = (fixed,) if fixed else ()
    if not N_values:
        raise ScenarioError(f"{command} needs N")

    quantity = raw.get("quantity", "pairwise")
    if quantity not in QUANTITY_NAMES:
        raise ScenarioError(f"quantity must be one of {sorted(QUANTITY_NAMES)}, got {quantity!r}")
    optimizer = raw.get("optimizer") or {}
    if not isinstance(optimizer, dict):
        raise ScenarioError("optimizer must be an object")

    scenario = Scenario(
        command=command,
        family=family,
        params=params,
        p_values=p_values,
        N_values=N_values,
        quantity=quantity,
        optimizer=dict(optimizer),
        eps=_number(raw, "eps", 0.0),
        delta=_number(raw, "delta"),
        margin=_number(raw, "margin", 2.0),
        samples=_number(raw, "samples", 100, int),
        outputs=_parse_outputs(raw),
        seed=_number(raw, "seed", get_settings().default_seed, int),
    )
    try:
        if family is not None:
            _check_family(scenario)
        scenario.optimizer_options()
    except (CertilabError, TypeError) as exc:
        raise ScenarioError(str(exc)) from None
    if not 0.0 <= scenario.eps < 0.5:
        raise ScenarioError(f"eps must lie in [0, 1/2), got {scenario.eps}")
    return scenario


def load_scenario(path: Union[str, Path]) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario {path}: {exc}") from None
    scenario = parse_scenario(raw)
    logger.info("loaded %s scenario from %s", scenario.command, path)
    return scenario
