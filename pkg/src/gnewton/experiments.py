"""Basin portraits, seeded randomized benchmarks, and timing.

Sampling uses a counter-based splitmix64 stream ("splitmix64-v1"): the j-th
uniform for sample i is derived purely from (seed, i*n + j), so partitioning
work across processes cannot change the draw and results are byte-identical
for any worker count.  Aggregation is integer-only for the same reason.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .errors import DimensionMismatch, NoSuccessfulStarts, ZeroSuccessRate
from .generalizers import Generalizer, make
from .problems import Box, ProblemSystem, restore
from .solver import DEFAULT_CONFIG, SolveConfig, Status, is_success, run_counted

FAILURE_COUNT = 255

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(seed: int, index: int) -> int:
    """index-th raw output of the splitmix64 stream for this seed."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def unit_uniform(seed: int, index: int) -> float:
    """Deterministic uniform in [0, 1) at stream position ``index``."""
    return (_splitmix64(seed, index) >> 11) * 2.0 ** -53


def sample_point(seed: int, sample_index: int, domain: Box) -> tuple:
    """Sample ``sample_index`` of the uniform stream over an axis-aligned box."""
    n = len(domain)
    base = sample_index * n
    return tuple(lo + unit_uniform(seed, base + j) * (hi - lo)
                 for j, (lo, hi) in enumerate(domain))


def random_starts(domain: Box, count: int, seed: int) -> list:
    return [sample_point(seed, i, domain) for i in range(count)]


# --------------------------------------------------------------------------
# basin portraits


@dataclass
class BasinGrid:
    """Iterations-to-converge raster over a 2-D start domain.

    counts/statuses are row-major with row 0 at the top (largest second
    coordinate); counts[i] is iterations used on success, 255 on failure.
    """

    domain: Box
    resolution: Tuple[int, int]
    counts: list
    statuses: list

    def fraction_converged(self) -> float:
        ok = sum(1 for c in self.counts if c != FAILURE_COUNT)
        return ok / len(self.counts)


def _pixel_center(domain: Box, resolution, col: int, row: int) -> tuple:
    (x_lo, x_hi), (y_lo, y_hi) = domain
    w, h = resolution
    return (x_lo + (col + 0.5) * (x_hi - x_lo) / w,
            y_hi - (row + 0.5) * (y_hi - y_lo) / h)


def _basin_rows(source, s_name, domain, resolution, cfg, row_range):
    p = restore(source)
    s = make(s_name)
    w, _ = resolution
    counts = []
    statuses = []
    for row in row_range:
        for col in range(w):
            x0 = _pixel_center(domain, resolution, col, row)
            status, used, _ = run_counted(p, s, x0, cfg)
            if is_success(status, used, cfg):
                counts.append(used)
            else:
                counts.append(FAILURE_COUNT)
            statuses.append(status.value)
    return counts, statuses


def render_basin(p: ProblemSystem, s: Generalizer, domain: Box,
                 resolution: Tuple[int, int], cfg: SolveConfig = DEFAULT_CONFIG,
                 workers: int = 1) -> BasinGrid:
    """Solve from the center of every grid cell; deterministic for any
    worker count."""
    if p.n != 2 or len(domain) != 2:
        raise DimensionMismatch("basin portraits need a two-variable system")
    w, h = resolution
    if w < 1 or h < 1:
        raise DimensionMismatch("resolution must be at least 1x1")
    if workers > 1 and p.source is not None and h > 1:
        chunk = max(1, math.ceil(h / (workers * 4)))
        ranges = [range(r, min(r + chunk, h)) for r in range(0, h, chunk)]
        counts: list = []
        statuses: list = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part_counts, part_statuses in pool.map(
                    _basin_rows_star,
                    [(p.source, s.name, domain, resolution, cfg, rr) for rr in ranges]):
                counts.extend(part_counts)
                statuses.extend(part_statuses)
    else:
        counts, statuses = _basin_rows_local(p, s, domain, resolution, cfg)
    return BasinGrid(domain=tuple(tuple(d) for d in domain), resolution=(w, h),
                     counts=counts, statuses=[Status(v) for v in statuses])


def _basin_rows_local(p, s, domain, resolution, cfg):
    w, h = resolution
    counts = []
    statuses = []
    for row in range(h):
        for col in range(w):
            x0 = _pixel_center(domain, resolution, col, row)
            status, used, _ = run_counted(p, s, x0, cfg)
            counts.append(used if is_success(status, used, cfg) else FAILURE_COUNT)
            statuses.append(status.value)
    return counts, statuses


def _basin_rows_star(args):
    return _basin_rows(*args)


# --------------------------------------------------------------------------
# palette and image output


@dataclass(frozen=True)
class Palette:
    """12 ramp colors for counts 2..13 plus the failure color."""

    ramp: tuple
    failure: tuple

    def color(self, count: int) -> tuple:
        if count == FAILURE_COUNT:
            return self.failure
        idx = min(max(count, 2), 13) - 2
        return self.ramp[idx]


def default_palette() -> Palette:
    """Linear ramp dark blue (0,0,128) at 2 -> (234,234,10) at 13; failures
    render pure yellow."""
    start = (0, 0, 128)
    end = (234, 234, 10)
    ramp = tuple(
        tuple(round(a + (b - a) * k / 11.0) for a, b in zip(start, end))
        for k in range(12))
    return Palette(ramp=ramp, failure=(255, 255, 0))


def write_ppm(grid: BasinGrid, palette: Palette, path: str) -> None:
    """Binary P6 image, one pixel per grid cell; byte-exact across platforms."""
    w, h = grid.resolution
    payload = bytearray()
    for count in grid.counts:
        payload.extend(palette.color(count))
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(bytes(payload))


def write_counts_csv(grid: BasinGrid, path: str) -> None:
    w, h = grid.resolution
    with open(path, "w", encoding="utf-8") as fh:
        for row in range(h):
            line = ",".join(str(c) for c in grid.counts[row * w:(row + 1) * w])
            fh.write(line + "\n")


# --------------------------------------------------------------------------
# randomized benchmarks


@dataclass
class BenchReport:
    problem: str
    generalizer: str
    domain: Box
    samples: int
    seed: int
    success_rate: float
    avg_iterations: Optional[float]
    cpu_per_iteration: Optional[float]
    time_to_solution: Optional[float]
    per_solution_counts: dict
    config: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "problem": self.problem,
            "generalizer": self.generalizer,
            "domain": [list(d) for d in self.domain],
            "samples": self.samples,
            "seed": self.seed,
            "success_rate": self.success_rate,
            "avg_iterations": self.avg_iterations,
            "cpu_per_iteration": self.cpu_per_iteration,
            "time_to_solution": self.time_to_solution,
            "per_solution_counts": {str(k): v for k, v in sorted(
                self.per_solution_counts.items(), key=lambda kv: str(kv[0]))},
            "config": self.config,
        }


def _bench_chunk(source, s_name, domain, seed, lo, hi, cfg):
    p = restore(source)
    s = make(s_name)
    succ = 0
    iters = 0
    per_sol: dict = {}
    for i in range(lo, hi):
        x0 = sample_point(seed, i, domain)
        status, used, x = run_counted(p, s, x0, cfg)
        if is_success(status, used, cfg):
            succ += 1
            iters += used
            idx = _nearest_solution(p, x)
            key = idx if idx is not None else "unknown"
            per_sol[key] = per_sol.get(key, 0) + 1
    return succ, iters, per_sol


def _bench_chunk_star(args):
    return _bench_chunk(*args)


def _nearest_solution(p: ProblemSystem, x) -> Optional[int]:
    best = None
    best_d = 1e-4
    for i, sol in enumerate(p.known_solutions):
        d = max(abs(a - b) for a, b in zip(x, sol))
        if d <= best_d:
            best = i
            best_d = d
    return best


def run_bench(p: ProblemSystem, s: Generalizer, domain: Box, samples: int,
              seed: int, cfg: SolveConfig = DEFAULT_CONFIG,
              workers: int = 1) -> BenchReport:
    """Solve from ``samples`` seeded uniform starts over the box.

    success_rate counts runs converged in fewer than max_iter updates;
    avg_iterations averages over successes.  Identical (seed, samples)
    produce identical reports for any worker count.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if len(domain) != p.n:
        raise DimensionMismatch(f"domain has {len(domain)} ranges for n={p.n}")
    tasks = []
    if workers > 1 and p.source is not None and samples >= workers:
        chunk = math.ceil(samples / (workers * 4))
        for lo in range(0, samples, chunk):
            tasks.append((p.source, s.name, domain, seed, lo, min(lo + chunk, samples), cfg))
        succ = 0
        iters = 0
        per_sol: dict = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for c_succ, c_iters, c_sol in pool.map(_bench_chunk_star, tasks):
                succ += c_succ
                iters += c_iters
                for k, v in c_sol.items():
                    per_sol[k] = per_sol.get(k, 0) + v
    else:
        succ = 0
        iters = 0
        per_sol = {}
        for i in range(samples):
            x0 = sample_point(seed, i, domain)
            status, used, x = run_counted(p, s, x0, cfg)
            if is_success(status, used, cfg):
                succ += 1
                iters += used
                idx = _nearest_solution(p, x)
                key = idx if idx is not None else "unknown"
                per_sol[key] = per_sol.get(key, 0) + 1
    return BenchReport(
        problem=p.name, generalizer=s.name,
        domain=tuple(tuple(d) for d in domain),
        samples=samples, seed=seed,
        success_rate=succ / samples,
        avg_iterations=(iters / succ) if succ else None,
        cpu_per_iteration=None, time_to_solution=None,
        per_solution_counts=per_sol,
        config={"tol": cfg.tol, "max_iter": cfg.max_iter,
                "domain": [list(d) for d in domain], "seed": seed, "samples": samples},
    )


def time_iterations(p: ProblemSystem, s: Generalizer, starts: Sequence,
                    repeats: int, cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """Wall-clock seconds per iteration over repeated successful runs.

    Only starts whose run succeeds are timed (unsuccessful ones are filtered
    first); single-threaded on purpose.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    good = []
    for x0 in starts:
        status, used, _ = run_counted(p, s, x0, cfg)
        if is_success(status, used, cfg):
            good.append(x0)
    if not good:
        raise NoSuccessfulStarts(f"none of {len(list(starts))} starts succeeded")
    total_iters = 0
    t0 = time.perf_counter()
    for _ in range(repeats):
        for x0 in good:
            _, used, _ = run_counted(p, s, x0, cfg)
            total_iters += used
    elapsed = time.perf_counter() - t0
    return elapsed / max(total_iters, 1)


def time_to_solution(report: BenchReport) -> float:
    """Expected seconds to obtain one solution: cpu/iter * avg iters / rate."""
    if report.success_rate == 0.0:
        raise ZeroSuccessRate("no successful runs to extrapolate from")
    if report.cpu_per_iteration is None or report.avg_iterations is None:
        raise ValueError("report carries no timing data; run time_iterations first")
    return report.cpu_per_iteration * report.avg_iterations / report.success_rate


def with_timing(p: ProblemSystem, s: Generalizer, report: BenchReport,
                cfg: SolveConfig = DEFAULT_CONFIG, starts_count: int = 100,
                repeats: int = 20, timing_seed: Optional[int] = None) -> BenchReport:
    """Fill cpu_per_iteration/time_to_solution on a copy of the report."""
    seed = report.seed ^ 0x5DEECE66D if timing_seed is None else timing_seed
    starts = random_starts(report.domain, starts_count, seed)
    cpu = time_iterations(p, s, starts, repeats, cfg)
    out = BenchReport(**{**report.__dict__, "cpu_per_iteration": cpu})
    out.time_to_solution = time_to_solution(out)
    return out


# --------------------------------------------------------------------------
# 17-significant-digit JSON


def _json_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if x != x or x in (float("inf"), float("-inf")):
        return "null"
    return format(x, ".17g")


def to_json_text(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, bool) or isinstance(obj, (int, float)):
        return _json_number(obj)
    if isinstance(obj, complex):
        return f'{{"re": {_json_number(obj.real)}, "im": {_json_number(obj.imag)}}}'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{inner}{json.dumps(str(k))}: {to_json_text(v, indent + 2)}"
                for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{to_json_text(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj)!r}")
