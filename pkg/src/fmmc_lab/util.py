"""Shared runtime plumbing: error taxonomy, seed derivation, trial parallelism, output helpers."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence, TypeVar

import numpy as np

THREADS_ENV = "FMMC_LAB_THREADS"


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""


class InstanceRejected(WorkbenchError):
    """The request is well-formed but the instance is not admissible (CLI exit code 2)."""


class CapExceeded(InstanceRejected):
    """Instance is larger than the module's desk-scale cap."""


class DisconnectedGraph(InstanceRejected):
    """Operation requires a connected graph."""


class DegenerateEmbedding(InstanceRejected):
    """Embedding has all points identical; normalization would divide by zero."""


class NumericalFailure(WorkbenchError):
    """A solver could not certify its result (CLI exit code 3)."""


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic 64-bit child seed; a pure function of (seed, path).

    Trial t of experiment stream s uses derive_seed(seed, s, t), so trials are
    reproducible independently of execution order.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(p) & 0xFFFFFFFFFFFFFFFF for p in path)])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def make_rng(seed: int) -> np.random.Generator:
    # Philox is counter-based: identical seeds give bit-identical streams on any platform.
    return np.random.Generator(np.random.Philox(key=int(seed)))


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


T = TypeVar("T")


def run_trials(fn: Callable[[int], T], n_trials: int) -> list[T]:
    """Run fn(0..n_trials-1), optionally in parallel, folding results in trial order."""
    cap = thread_cap()
    if cap <= 1 or n_trials <= 1:
        return [fn(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, range(n_trials)))


def dump_json(obj, path: str | os.PathLike | None = None) -> str:
    """Serialize a report dict; identical inputs give byte-identical text."""
    text = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def write_csv(rows: Sequence[Sequence], header: Sequence[str], path: str | os.PathLike) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
