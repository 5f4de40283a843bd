"""Grid sweeps of the canonical four-Bob chain, parallel over eta_1 rows."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .chain import ChainConfig, run_chain

SWEEP_COLUMNS = ("eta1", "eta2", "eta3", "I1", "I2", "I3", "I4")
THREADS_ENV = "SEQBELL_THREADS"


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def eta_grid(step: float) -> np.ndarray:
    """k * step for k = 1..round(1/step); 1/step must be (close to) an integer."""
    if not (0.0 < step <= 0.5):
        raise ValueError("step must lie in (0, 0.5]")
    n = int(round(1.0 / step))
    if abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"1/step = {1.0 / step} is not an integer")
    return np.arange(1, n + 1) / n


def _row(eta1: float, grid: np.ndarray) -> list[tuple]:
    out = []
    for eta2 in grid:
        for eta3 in grid:
            res = run_chain(ChainConfig.canonical([eta1, eta2, eta3, 1.0]))
            out.append((eta1, eta2, eta3, *res.bell_values))
    return out


def chain_sweep(step: float, threads: int | None = None) -> list[tuple]:
    """Simulated (eta1, eta2, eta3, I1..I4) rows with eta4 = 1, in lexicographic eta order."""
    grid = eta_grid(step)
    n = resolve_threads(threads)
    if n == 1:
        rows = [_row(e, grid) for e in grid]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(lambda e: _row(e, grid), grid))
    return [r for block in rows for r in block]
