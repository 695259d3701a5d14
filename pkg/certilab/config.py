import logging
import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

from certilab.utils.errors import ArgumentError, CapExceededError

logger = logging.getLogger(__name__)

HARD_QUBIT_LIMIT = 12


@dataclass(frozen=True)
class Settings:
    max_exact_qubits: int = 8
    max_dense_qubits: int = 10
    jobs: int = 1
    log_level: str = "WARNING"
    default_seed: int = 0


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ArgumentError(f"{name} must be an integer, got {raw!r}") from None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings from the environment (and a .env file if present)"""
    load_dotenv()

    max_exact, max_dense = Settings.max_exact_qubits, Settings.max_dense_qubits
    override = _int_env("CERTILAB_MAX_QUBITS", 0)
    if override:
        if override > HARD_QUBIT_LIMIT:
            logger.warning("CERTILAB_MAX_QUBITS=%d clamped to %d", override, HARD_QUBIT_LIMIT)
            override = HARD_QUBIT_LIMIT
        if override < 1:
            raise ArgumentError("CERTILAB_MAX_QUBITS must be positive")
        max_exact = max_dense = override

    return Settings(
        max_exact_qubits=max_exact,
        max_dense_qubits=max_dense,
        jobs=max(1, _int_env("CERTILAB_JOBS", os.cpu_count() or 1)),
        log_level=os.getenv("CERTILAB_LOG_LEVEL", "WARNING").upper(),
        default_seed=_int_env("CERTILAB_SEED", 0),
    )


def check_qubit_cap(n_qubits: int, exact: bool = False):
    """Refuse problem sizes beyond the configured caps"""
    settings = get_settings()
    cap = settings.max_exact_qubits if exact else settings.max_dense_qubits
    if n_qubits > cap:
        kind = "exact minimization" if exact else "dense evaluation"
        raise CapExceededError(f"{kind} is capped at {cap} qubits, got {n_qubits}")
