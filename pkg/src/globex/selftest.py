"""Randomised invariant suites, run by ``globex selftest``.

Each suite draws small random models from a seeded generator and checks
the solvers against the brute-force oracle or a structural law.  Solvers
are looked up on their modules at call time so that a patched solver is
what gets tested.  On failure the smallest failing model is reported in
serialized form.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Optional

from globex import duality, fbdd_solver, generic_solver, linear_solver, oracle, reductions
from globex.core import FeatureSubset, Instance, compose
from globex.models import (evaluate, model_to_json, parse_formula, parse_model, random_fbdd,
                           random_mlp, random_perceptron, serialize_model)


class Failure(Exception):
    def __init__(self, what: str, model=None, detail: Optional[dict] = None):
        super().__init__(what)
        self.what = what
        self.model = model
        self.detail = detail or {}


def _expect(ok: bool, what: str, model, **detail):
    if not ok:
        raise Failure(what, model, {k: str(v) for k, v in detail.items()})


def _model(kind: str, rng: random.Random, max_n: int):
    n = rng.randint(1, max_n)
    seed = rng.randrange(1 << 30)
    if kind == "fbdd":
        return random_fbdd(n, 3 * n, seed)
    if kind == "perceptron":
        return random_perceptron(n, 5, seed)
    return random_mlp([n, rng.randint(1, 3), 1], 3, seed)


def _args(f, rng):
    n = f.num_features
    return (Instance.from_mask(rng.randrange(1 << n), n),
            FeatureSubset.from_mask(rng.randrange(1 << n), n),
            rng.randint(1, n))


def suite_fbdd(rng):
    s = fbdd_solver
    f = _model("fbdd", rng, 7)
    x, S, i = _args(f, rng)
    _expect(s.fbdd_csr(f, x, S) == oracle.suff_local(f, x, S), "fbdd_csr", f, x=x, S=S)
    _expect(s.fbdd_g_csr(f, S) == oracle.suff_global(f, S), "fbdd_g_csr", f, S=S)
    _expect(s.fbdd_cc(f, x, S) == oracle.count_local(f, x, S), "fbdd_cc", f, x=x, S=S)
    _expect(s.fbdd_g_cc(f, S) == oracle.count_global(f, S), "fbdd_g_cc", f, S=S)
    _expect(s.fbdd_g_fn(f, i) == oracle.is_necessary_global(f, i), "fbdd_g_fn", f, i=i)
    _expect(s.fbdd_g_fr(f, i) == oracle.is_redundant_global(f, i), "fbdd_g_fr", f, i=i)
    _expect(s.fbdd_g_msr(f, f.num_features)[1] == oracle.min_suff_global_brute(f),
            "fbdd_g_msr", f)
    return 7


def suite_perceptron(rng):
    s = linear_solver
    f = _model("perceptron", rng, 8)
    x, S, i = _args(f, rng)
    _expect(s.perc_csr(f, x, S) == oracle.suff_local(f, x, S), "perc_csr", f, x=x, S=S)
    _expect(s.perc_g_fn(f, i) == oracle.is_necessary_global(f, i), "perc_g_fn", f, i=i)
    ok, T = s.perc_msr(f, x, f.num_features)
    _expect(oracle.suff_local(f, x, T) and len(T) == len(oracle.min_suff_local_brute(f, x)),
            "perc_msr", f, x=x)
    for m in ("enum", "dp"):
        _expect(s.perc_g_csr(f, S, m) == oracle.suff_global(f, S), f"perc_g_csr[{m}]", f, S=S)
        _expect(s.perc_g_fr(f, i, m) == oracle.is_redundant_global(f, i),
                f"perc_g_fr[{m}]", f, i=i)
        _expect(s.perc_cc(f, x, S, m) == oracle.count_local(f, x, S),
                f"perc_cc[{m}]", f, x=x, S=S)
        _expect(s.perc_g_cc(f, S, m) == oracle.count_global(f, S), f"perc_g_cc[{m}]", f, S=S)
    _expect(s.gcc_reduction_identity(f, x, S), "gcc_reduction_identity", f, x=x, S=S)
    return 11


def suite_mlp(rng):
    g = generic_solver
    f = _model("mlp", rng, 6)
    x, S, i = _args(f, rng)
    _expect(g.mlp_csr(f, x, S) == oracle.suff_local(f, x, S), "mlp_csr", f, x=x, S=S)
    _expect(g.mlp_g_csr(f, S) == oracle.suff_global(f, S), "mlp_g_csr", f, S=S)
    _expect(g.mlp_g_fn(f, i) == oracle.is_necessary_global(f, i), "mlp_g_fn", f, i=i)
    _expect(g.mlp_cc(f, x, S) == oracle.count_local(f, x, S), "mlp_cc", f, x=x, S=S)
    return 4


def suite_necessity(rng):
    f = _model(rng.choice(("fbdd", "perceptron", "mlp")), rng, 6)
    n = f.num_features
    for m in range(1 << n):
        x = Instance.from_mask(m, n)
        for i in range(1, n + 1):
            _expect(generic_solver.fn_local(f, x, i) == oracle.is_necessary_local(f, x, i),
                    "fn_local", f, x=x, i=i)
    return (1 << n) * n


def suite_uniqueness(rng):
    f = _model(rng.choice(("fbdd", "perceptron", "mlp")), rng, 6)
    expected = oracle.min_suff_global_brute(f)
    order = list(range(1, f.num_features + 1))
    for _ in range(5):
        rng.shuffle(order)
        got = generic_solver.subset_minimal_global(f, order)
        _expect(got == expected, "subset_minimal_global", f, order=order)
    return 5


def suite_duality(rng):
    f = _model(rng.choice(("fbdd", "perceptron", "mlp")), rng, 5)
    _expect(duality.g_msr_via_duality(f) == oracle.min_suff_global_brute(f),
            "g_msr_via_duality", f)
    _expect(duality.check_intersection_duality(f), "check_intersection_duality", f)
    return 2


def suite_partition(rng):
    f = _model(rng.choice(("fbdd", "perceptron", "mlp")), rng, 6)
    n = f.num_features
    somewhere = [i for i in range(1, n + 1)
                 if any(oracle.is_necessary_local(f, Instance.from_mask(m, n), i)
                        for m in range(1 << n))]
    for i in range(1, n + 1):
        _expect((i in somewhere) != oracle.is_redundant_global(f, i), "partition", f, i=i)
    _expect(FeatureSubset.of(n, somewhere) == generic_solver.subset_minimal_global(f),
            "necessary-somewhere", f)
    return n + 1


def suite_reductions(rng):
    ssp = reductions.random_ssp(rng.randint(1, 8), 20, rng)
    f = reductions.ssp_gadget(ssp)
    exp = reductions.ssp_expectations(ssp)
    n = len(ssp.values)
    _expect(linear_solver.perc_g_csr(f, FeatureSubset.of(n + 1, range(1, n + 1)))
            == exp["g-csr"], "ssp g-csr", f)
    _expect(linear_solver.perc_g_msr(f, n)[0] == exp["g-msr"], "ssp g-msr", f)
    k = rng.randint(1, 3)
    c = parse_formula(reductions.random_taut_candidate(k, 3, rng), k)
    m, exp = reductions.taut_gadget(c)
    _expect(generic_solver.mlp_g_fn(m, k + 1) == exp["g-fn"], "taut g-fn", m)
    return 3


def suite_serialization(rng):
    f = _model(rng.choice(("fbdd", "perceptron", "mlp")), rng, 6)
    data = serialize_model(f)
    g = parse_model(data)
    _expect(serialize_model(g) == data, "serialization round trip", f)
    x, S, _ = _args(f, rng)
    _expect(evaluate(f, x) == evaluate(g, x), "evaluation after round trip", f, x=x)
    z = Instance.from_mask(rng.randrange(1 << f.num_features), f.num_features)
    r = compose(x, z, S)
    _expect(all(r.bits[i - 1] == (x if i in S else z).bits[i - 1]
                for i in range(1, f.num_features + 1)), "compose", f, x=x, z=z, S=S)
    return 3


SUITES: dict[str, Callable[[random.Random], int]] = {
    "fbdd": suite_fbdd,
    "perceptron": suite_perceptron,
    "mlp": suite_mlp,
    "necessity": suite_necessity,
    "uniqueness": suite_uniqueness,
    "duality": suite_duality,
    "partition": suite_partition,
    "reductions": suite_reductions,
    "serialization": suite_serialization,
}


def _model_key(f):
    return (f.num_features, len(serialize_model(f)))


def run_suite(name: str, seed: int, trials: int) -> dict:
    fn = SUITES[name]
    checks = 0
    failures = []
    for t in range(trials):
        rng = random.Random(f"{seed}:{name}:{t}")
        try:
            checks += fn(rng)
        except Failure as e:
            failures.append((e, t))
    out = {"trials": trials, "checks": checks, "failures": len(failures)}
    if failures:
        # smallest failing model, earliest trial among equals
        e, t = min(failures, key=lambda p: (_model_key(p[0].model) if p[0].model else (0, 0),
                                            p[1]))
        out["counterexample"] = {"check": e.what, "trial": t, "detail": e.detail,
                                 "model": model_to_json(e.model) if e.model else None}
    return out


def run(seed: int = 0, trials: int = 20, threads: int = 1) -> dict:
    """Run every suite; the report does not depend on ``threads``."""
    if trials < 0:
        raise ValueError("trials must be non-negative")
    names = list(SUITES)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_suite, names, [seed] * len(names),
                                    [trials] * len(names)))
    else:
        results = [run_suite(name, seed, trials) for name in names]
    suites = dict(zip(names, results))
    failed = [name for name, r in suites.items() if r["failures"]]
    report = {"passed": not failed, "seed": seed, "trials": trials, "suites": {}}
    for name, r in suites.items():
        report["suites"][name] = {k: r[k] for k in ("trials", "checks", "failures")}
    if failed:
        report["counterexample"] = dict(suite=failed[0], **suites[failed[0]]["counterexample"])
    return report
