"""Run configuration: tolerances, caps, output settings and the worker budget."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

JOBS_ENV = "ADELIC_LAB_JOBS"


@dataclass
class RunConfig:
    tol_circle: float = 1e-6
    tol_point: float = 1e-6
    tol_rank: float = 1e-9
    n_max: int = 60
    depth: int = 16
    k_max: int = 26
    grid_max: int = 400
    out_dir: str = "."
    formats: str = "csv,svg,dot"
    jobs: int = 1

    def __post_init__(self):
        for name in ("tol_circle", "tol_point", "tol_rank"):
            v = getattr(self, name)
            if not 0 < v < 1e-2:
                raise ValueError(f"{name}={v} must lie in (0, 1e-2)")
        caps = {"n_max": 60, "depth": 16, "k_max": 26, "grid_max": 400}
        for name, cap in caps.items():
            v = getattr(self, name)
            if not 1 <= v <= cap:
                raise ValueError(f"{name}={v} must lie in [1, {cap}]")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    @classmethod
    def from_file(cls, path, **overrides) -> "RunConfig":
        """Read ``key = value`` lines; ``#`` starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in types:
                raise ValueError(f"{path}:{lineno}: unknown setting {line!r}")
            conv = {"float": float, "int": int}.get(types[key], str)
            kw[key] = conv(value.strip())
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


def resolve_jobs(jobs: int | None = None) -> int:
    if jobs is not None:
        return max(1, int(jobs))
    return max(1, int(os.environ.get(JOBS_ENV, "1")))


def map_jobs(fn, items, jobs: int | None = None) -> list:
    """Apply ``fn`` to each item, in order, across at most ``jobs`` worker processes."""
    items = list(items)
    jobs = min(resolve_jobs(jobs), len(items) or 1)
    if jobs == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
