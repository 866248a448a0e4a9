"""Separation benchmark.

Times the polynomial global minimum-reason algorithm on FBDDs against the
exact local minimum-reason search on the same diagrams, plus local and
global sufficiency on perceptrons.  Each point runs in a child process so
that a point exceeding its budget can be stopped and recorded as a
timeout.  Growth exponents come from a least-squares fit of log time
against log model size.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing as mp
import random
import statistics
import time
from typing import Callable

from globex import fbdd_solver, linear_solver
from globex.core import FeatureSubset, Instance
from globex.models import Fbdd, Perceptron, validate_fbdd

MIN_SAMPLE_SECONDS = 0.02
PERCEPTRON_SIZES = (100, 1000, 10_000)


def two_block_tree(n: int) -> Fbdd:
    """Decision tree for (x_1 & ... & x_m) | (x_{m+1} & ... & x_n), m = n // 2.

    The first block is a chain; each of its 0-branches gets its own copy of
    the second block's chain, so the tree has m * (n - m + 1) + 1 leaves.
    At the all-ones instance no feature is necessary while every sufficient
    reason contains a whole block, which makes local minimum search
    exponential.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    m = n // 2
    nodes = []
    FALSE, TRUE = 0, 1

    def fresh():
        return len(nodes) + 2

    def block_b():
        # chain over x_{m+1}..x_n, built bottom-up
        nxt = TRUE
        for var in range(n, m, -1):
            nid = fresh()
            nodes.append((nid, var, FALSE, nxt))
            nxt = nid
        return nxt

    nxt = TRUE
    for var in range(m, 0, -1):
        lo = block_b()
        nid = fresh()
        nodes.append((nid, var, lo, nxt))
        nxt = nid
    return validate_fbdd(n, nxt, nodes, [(FALSE, False), (TRUE, True)])


def _timed(fn: Callable[[], object], reset: Callable[[], None]) -> float:
    """Mean seconds per call, repeating short calls for a stable sample."""
    reps = 0
    total = 0.0
    while total < MIN_SAMPLE_SECONDS or reps == 0:
        reset()
        t0 = time.perf_counter()
        fn()
        total += time.perf_counter() - t0
        reps += 1
    return total / reps


def _child(conn, fn, reset):
    conn.send(_timed(fn, reset))
    conn.close()


def time_point(fn: Callable[[], object], timeout: float,
               reset: Callable[[], None] = lambda: None) -> float | None:
    """Seconds per call, or None if the point exceeds ``timeout``."""
    ctx = mp.get_context("fork")
    parent, child = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(child, fn, reset))
    proc.start()
    child.close()
    ready = parent.poll(timeout)
    if not ready:
        proc.terminate()
        proc.join()
        return None
    seconds = parent.recv()
    proc.join()
    return seconds


def _clear_paths():
    fbdd_solver._paths.cache_clear()


def _row(column, n, size, seconds):
    return {"column": column, "n": n, "size": size,
            "seconds": seconds, "status": "ok" if seconds is not None else "timeout"}


def run_separation(max_n: int = 20, timeout: float = 10.0, seed: int = 0,
                   min_n: int = 4) -> dict:
    rows = []
    stopped = set()
    for n in range(min_n, max_n + 1):
        f = two_block_tree(n)
        ones = Instance((1,) * n)
        size = f.size
        cols = {
            "fbdd_g_msr": lambda: fbdd_solver.fbdd_g_msr(f, n),
            "fbdd_msr": lambda: fbdd_solver.fbdd_msr(f, ones, n, limit=max(n, 24)),
        }
        for name, fn in cols.items():
            if name in stopped:
                rows.append(_row(name, n, size, None))
                continue
            seconds = time_point(fn, timeout, _clear_paths)
            if seconds is None:
                stopped.add(name)
            rows.append(_row(name, n, size, seconds))

    rng = random.Random(seed)
    for n in PERCEPTRON_SIZES:
        p = Perceptron(tuple(rng.randint(-9, 9) for _ in range(n)), rng.randint(-9, 9))
        x = Instance(tuple(rng.randint(0, 1) for _ in range(n)))
        S = FeatureSubset.of(n, range(1, n // 2 + 1))
        p.scaled  # integer form is built once per model, outside the timing
        rows.append(_row("perc_csr", n, n, time_point(lambda: linear_solver.perc_csr(p, x, S),
                                                      timeout)))
    for n in range(min_n, max_n + 1):
        if "perc_g_csr_enum" in stopped:
            rows.append(_row("perc_g_csr_enum", n, n, None))
            continue
        p = Perceptron(tuple(rng.randint(-9, 9) for _ in range(n)), rng.randint(-9, 9))
        S = FeatureSubset.of(n, range(1, n))
        seconds = time_point(
            lambda: linear_solver.perc_g_csr(p, S, method="enum", limit=max(n, 24)), timeout)
        if seconds is None:
            stopped.add("perc_g_csr_enum")
        rows.append(_row("perc_g_csr_enum", n, n, seconds))
    return {"rows": rows, "timeout_seconds": timeout, "max_n": max_n, "seed": seed,
            "exponents": fit_exponents(rows)}


def fit_exponents(rows: list[dict]) -> dict:
    """Slope of log(seconds) against log(size), per column, over completed points."""
    out = {}
    for column in sorted({r["column"] for r in rows}):
        pts = [(math.log(r["size"]), math.log(r["seconds"]))
               for r in rows if r["column"] == column and r["seconds"]]
        if len({a for a, _ in pts}) < 2:
            out[column] = None
            continue
        xs, ys = zip(*pts)
        out[column] = statistics.linear_regression(xs, ys).slope
    return out


def summarize(report: dict) -> dict:
    rows = report["rows"]
    cols = sorted({r["column"] for r in rows})
    completed = {c: max((r["n"] for r in rows if r["column"] == c and r["status"] == "ok"),
                        default=None) for c in cols}
    timeouts = {c: sum(1 for r in rows if r["column"] == c and r["status"] == "timeout")
                for c in cols}
    return {"exponents": report["exponents"], "largest_completed_n": completed,
            "timeouts": timeouts, "timeout_seconds": report["timeout_seconds"]}


def write_report(report: dict, path: str) -> None:
    if path.endswith(".csv"):
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["column", "n", "size", "seconds", "status"])
            w.writeheader()
            for r in report["rows"]:
                w.writerow(r)
    else:
        with open(path, "w") as fh:
            json.dump(report, fh, sort_keys=True)
            fh.write("\n")
