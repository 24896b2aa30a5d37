"""
Solver Settings
Environment-driven defaults for limits, tolerances and the HTTP service
"""

import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

load_dotenv()

# Numerical tolerances shared by every service
TOL_FEAS = 1e-6
TOL_INT = 1e-6
TOL_OPT = 1e-7
TOL_PRUNE = 1e-9


def _env_float(key: str, default: float) -> float:
    raw = os.getenv(key)
    if raw is None or raw.strip() == '':
        return default
    try:
        return float(raw)
    except ValueError:
        print(f"Warning: {key}={raw!r} is not a number, using {default}")
        return default


def _env_int(key: str, default: int) -> int:
    return int(_env_float(key, default))


@dataclass(frozen=True)
class Settings:
    time_limit: float
    node_limit: int
    gap_limit: float
    exact_node_budget: int
    bench_workers: int
    log_level: str
    rate_limit: str
    secret_key: str
    debug: bool
    port: int
    cors_origins: str


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read settings from the environment once per process"""
    return Settings(
        time_limit=_env_float('CCP_TIME_LIMIT', 3600.0),
        node_limit=_env_int('CCP_NODE_LIMIT', 1_000_000),
        gap_limit=_env_float('CCP_GAP_LIMIT', 0.0),
        exact_node_budget=_env_int('CCP_EXACT_NODE_BUDGET', 10_000),
        bench_workers=max(1, _env_int('CCP_BENCH_WORKERS', 1)),
        log_level=os.getenv('CCP_LOG_LEVEL', 'INFO').upper(),
        rate_limit=os.getenv('CCP_RATE_LIMIT', '30 per minute'),
        secret_key=os.getenv('FLASK_SECRET_KEY', 'dev-secret-key'),
        debug=os.getenv('FLASK_DEBUG', 'False').lower() == 'true',
        port=_env_int('PORT', 5000),
        cors_origins=os.getenv('CCP_CORS_ORIGINS', '*'),
    )
