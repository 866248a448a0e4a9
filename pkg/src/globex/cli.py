"""Command-line harness.

Every subcommand prints one line of JSON (sorted keys) on stdout; messages
go to stderr.  Exit codes: 0 success, 1 self-test failure, 2 bad arguments
or model file, 3 refusal because an exhaustive step exceeds the desk-scale
limit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from globex import fbdd_solver, generic_solver, linear_solver, reductions
from globex.core import (DeskScaleError, FeatureSubset, Instance, compose, parse_instance,
                         parse_subset)
from globex.models import (Model, evaluate, evaluation_count, model_kind, model_to_json,
                           parse_formula, parse_model, random_fbdd, random_mlp,
                           random_perceptron, serialize_model)

QUERIES = ("csr", "g-csr", "msr", "g-msr", "fn", "g-fn", "fr", "g-fr", "cc", "g-cc")
METHODS = ("auto", "poly", "bruteforce", "dp")

# (model kind, query) pairs with a polynomial-time algorithm
PTIME = {
    "fbdd": {"csr", "g-csr", "g-msr", "cc", "g-cc", "fn", "g-fn", "g-fr"},
    "perceptron": {"csr", "msr", "fn", "g-fn"},
    "mlp": {"fn"},
}
# perceptron queries answered through subset-sum tables
DP_QUERIES = {"g-csr", "g-msr", "g-fr", "cc", "g-cc"}


class UsageError(ValueError):
    pass


@dataclass
class QueryRequest:
    query: str
    model: Model
    instance: Optional[Instance] = None
    subset: Optional[FeatureSubset] = None
    feature: Optional[int] = None
    k: Optional[int] = None
    method: str = "auto"
    limit_n: int = generic_solver.SEARCH_LIMIT
    ordering: Optional[list[int]] = None

    def __post_init__(self):
        q = self.query
        if q not in QUERIES:
            raise UsageError(f"unknown query {q!r}")
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        local = not q.startswith("g-")
        base = q[2:] if q.startswith("g-") else q
        if local and self.instance is None:
            raise UsageError(f"{q} needs --instance")
        if base in ("csr", "cc") and self.subset is None:
            raise UsageError(f"{q} needs --subset")
        if base == "msr" and self.k is None:
            raise UsageError(f"{q} needs --k")
        if base in ("fn", "fr") and self.feature is None:
            raise UsageError(f"{q} needs --feature")
        n = self.model.num_features
        if self.instance is not None and len(self.instance) != n:
            raise UsageError(f"instance has {len(self.instance)} bits, model has {n} features")
        if self.feature is not None and not 1 <= self.feature <= n:
            raise UsageError(f"feature {self.feature} outside 1..{n}")
        if self.k is not None and self.k < 0:
            raise UsageError("k must be non-negative")
        if self.ordering is not None:
            if q != "g-msr":
                raise UsageError("a feature ordering applies to g-msr only")
            if sorted(self.ordering) != list(range(1, n + 1)):
                raise UsageError(f"ordering must be a permutation of 1..{n}")


@dataclass
class QueryResult:
    answer: str
    witness: object = None
    count: Optional[int] = None
    fraction: Optional[Fraction] = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"answer": self.answer, "witness": self.witness, "stats": self.stats}
        if self.fraction is not None:
            out["count"] = self.count
            out["count_num"] = self.fraction.numerator
            out["count_den"] = self.fraction.denominator
        return out


def _members(S: FeatureSubset) -> list[int]:
    return list(S.members)


def _pair(x: Instance, z: Instance, S: FeatureSubset) -> dict:
    return {"x": str(x), "z": str(z), "composed": str(compose(x, z, S))}


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _method_used(req: QueryRequest, kind: str) -> str:
    if req.method == "bruteforce":
        return "bruteforce"
    if req.method == "dp":
        if kind != "perceptron" or req.query not in DP_QUERIES:
            raise UsageError(f"method dp applies to perceptron {sorted(DP_QUERIES)} only")
        return "dp"
    ptime = req.query in PTIME[kind]
    if req.method == "poly" and not ptime:
        raise UsageError(f"no polynomial-time algorithm for {req.query} on {kind} models")
    return "poly" if ptime else "exact-search"


def _bruteforce(req: QueryRequest) -> QueryResult:
    f, x, S, i, lim = req.model, req.instance, req.subset, req.feature, req.limit_n
    g = generic_solver
    q = req.query
    if q == "csr":
        z = g.mlp_csr_counterexample(f, x, S, lim)
        return QueryResult(_yes(z is None), None if z is None else _pair(x, z, S))
    if q == "g-csr":
        w = g.mlp_g_csr_counterexample(f, S, lim)
        return QueryResult(_yes(w is None), None if w is None else _pair(w[0], w[1], S))
    if q == "msr":
        check = lambda h, y, T: g.mlp_csr(h, y, T, lim)
        ok, T = g.msr_search(f, x, req.k, check, lim)
        if not ok:
            _, T = g.msr_search(f, x, f.num_features, check, lim)
        return QueryResult(_yes(ok), _members(T))
    if q == "g-msr":
        if req.ordering is not None:
            U = g.subset_minimal_global(f, req.ordering, lambda h, T: g.mlp_g_csr(h, T, lim))
            return QueryResult(_yes(len(U) <= req.k), _members(U))
        ok, U = g.mlp_g_msr(f, req.k, lim)
        return QueryResult(_yes(ok), _members(U))
    if q == "fn":
        ok = g.fn_local(f, x, i)
        return QueryResult(_yes(ok), None if ok else str(x.flip(i)))
    if q == "g-fn":
        w = g.flip_witness(f, i, changes=False, limit=lim)
        return QueryResult(_yes(w is None), None if w is None else str(w))
    if q == "fr":
        w = g.mlp_fr_witness(f, x, i, limit=lim)
        return QueryResult(_yes(w is None), None if w is None else _members(w))
    if q == "g-fr":
        w = g.flip_witness(f, i, changes=True, limit=lim)
        return QueryResult(_yes(w is None), None if w is None else str(w))
    if q == "cc":
        c, frac = g.mlp_cc(f, x, S, lim)
        return QueryResult("count", None, c, frac)
    c, frac = g.mlp_g_cc(f, S, lim)
    return QueryResult("count", None, c, frac)


def _fbdd(req: QueryRequest) -> QueryResult:
    f, x, S, i, lim = req.model, req.instance, req.subset, req.feature, req.limit_n
    s = fbdd_solver
    q = req.query
    if q == "csr":
        z = s.fbdd_csr_counterexample(f, x, S)
        return QueryResult(_yes(z is None), None if z is None else _pair(x, z, S))
    if q == "g-csr":
        w = s.fbdd_g_csr_counterexample(f, S)
        return QueryResult(_yes(w is None), None if w is None else _pair(w[0], w[1], S))
    if q == "msr":
        ok, T = s.fbdd_msr(f, x, req.k, lim)
        if not ok:
            _, T = s.fbdd_msr(f, x, f.num_features, lim)
        return QueryResult(_yes(ok), _members(T))
    if q == "g-msr":
        ok, U = s.fbdd_g_msr(f, req.k, req.ordering)
        return QueryResult(_yes(ok), _members(U))
    if q == "fn":
        ok = generic_solver.fn_local(f, x, i)
        return QueryResult(_yes(ok), None if ok else str(x.flip(i)))
    if q == "g-fn":
        w = s.fbdd_g_fn_witness(f, i)
        return QueryResult(_yes(w is None), None if w is None else str(w))
    if q == "fr":
        w = s.fbdd_fr_witness(f, x, i, lim)
        return QueryResult(_yes(w is None), None if w is None else _members(w))
    if q == "g-fr":
        w = s.fbdd_g_fr_witness(f, i)
        return QueryResult(_yes(w is None), None if w is None else str(w))
    if q == "cc":
        c, frac = s.fbdd_cc(f, x, S)
        return QueryResult("count", None, c, frac)
    c, frac = s.fbdd_g_cc(f, S)
    return QueryResult("count", None, c, frac)


def _perceptron(req: QueryRequest) -> QueryResult:
    f, x, S, i, lim = req.model, req.instance, req.subset, req.feature, req.limit_n
    s = linear_solver
    m = "dp" if req.method == "dp" else "auto"
    q = req.query
    if q == "csr":
        z = s.perc_csr_counterexample(f, x, S)
        return QueryResult(_yes(z is None), None if z is None else _pair(x, z, S))
    if q == "g-csr":
        w = s.perc_g_csr_counterexample(f, S, m, lim)
        return QueryResult(_yes(w is None), None if w is None else _pair(w[0], w[1], S))
    if q == "msr":
        ok, T = s.perc_msr(f, x, req.k)
        return QueryResult(_yes(ok), _members(T))
    if q == "g-msr":
        if req.ordering is not None:
            U = generic_solver.subset_minimal_global(
                f, req.ordering, lambda h, T: s.perc_g_csr(h, T, m, lim))
            return QueryResult(_yes(len(U) <= req.k), _members(U))
        ok, U = s.perc_g_msr(f, req.k, m, lim)
        return QueryResult(_yes(ok), _members(U))
    if q == "fn":
        ok = generic_solver.fn_local(f, x, i)
        return QueryResult(_yes(ok), None if ok else str(x.flip(i)))
    if q == "g-fn":
        w = s.perc_g_fn_witness(f, i)
        return QueryResult(_yes(w is None), None if w is None else str(w))
    if q == "fr":
        w = s.perc_fr_witness(f, x, i, lim)
        return QueryResult(_yes(w is None), None if w is None else _members(w))
    if q == "g-fr":
        w = s.perc_flip_witness(f, i, m, lim)
        return QueryResult(_yes(w is None), None if w is None else str(w))
    if q == "cc":
        c, frac = s.perc_cc(f, x, S, m, lim)
        return QueryResult("count", None, c, frac)
    c, frac = s.perc_g_cc(f, S, m, lim)
    return QueryResult("count", None, c, frac)


def _mlp(req: QueryRequest) -> QueryResult:
    # every MLP query other than FN is hard; exhaustive search is the method
    return _bruteforce(req)


def run_query(req: QueryRequest) -> QueryResult:
    kind = model_kind(req.model)
    used = _method_used(req, kind)
    start_evals = evaluation_count()
    t0 = time.perf_counter()
    if used == "bruteforce":
        res = _bruteforce(req)
    elif kind == "fbdd":
        res = _fbdd(req)
    elif kind == "perceptron":
        res = _perceptron(req)
    else:
        res = _mlp(req)
    res.stats = {"model_evals": evaluation_count() - start_evals,
                 "elapsed_ms": round((time.perf_counter() - t0) * 1000, 3),
                 "method_used": used}
    return res


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _load_model(path: str) -> Model:
    try:
        with open(path, "rb") as fh:
            return parse_model(fh.read())
    except OSError as e:
        raise UsageError(f"cannot read model {path}: {e.strerror}")


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _write(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def cmd_eval(args) -> int:
    f = _load_model(args.model)
    if args.instance is None:
        raise UsageError("eval needs --instance")
    x = parse_instance(args.instance)
    if len(x) != f.num_features:
        raise UsageError(f"instance has {len(x)} bits, model has {f.num_features} features")
    _emit({"instance": str(x), "label": int(evaluate(f, x)), "model_type": model_kind(f)})
    return 0


def cmd_query(args) -> int:
    f = _load_model(args.model)
    n = f.num_features
    req = QueryRequest(
        query=args.query, model=f,
        instance=parse_instance(args.instance) if args.instance is not None else None,
        subset=parse_subset(args.subset, n) if args.subset is not None else None,
        feature=args.feature, k=args.k, method=args.method,
        limit_n=generic_solver.SEARCH_LIMIT if args.limit_n is None else args.limit_n)
    if args.shuffle_order:
        req.ordering = list(range(1, n + 1))
        random.Random(args.seed).shuffle(req.ordering)
        req.__post_init__()
    res = run_query(req)
    out = res.to_json()
    out["query"] = req.query
    if req.ordering is not None:
        out["ordering"] = req.ordering
    _emit(out)
    return 0


def cmd_gen(args) -> int:
    if args.kind == "fbdd":
        f = random_fbdd(args.n, args.max_nodes, args.seed)
    elif args.kind == "perceptron":
        f = random_perceptron(args.n, args.weight_bound, args.seed)
    else:
        widths = [args.n] + (_int_list(args.hidden) if args.hidden else []) + [1]
        f = random_mlp(widths, args.weight_bound, args.seed)
    data = serialize_model(f)
    if args.out:
        _write(args.out, data)
        _emit({"model_type": model_kind(f), "num_features": f.num_features, "out": args.out})
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def cmd_reduce(args) -> int:
    if args.problem == "ssp":
        if args.values is None or args.target is None:
            raise UsageError("reduce ssp needs --values and --target")
        ssp = reductions.SspInstance(tuple(_int_list(args.values)), args.target)
        f = reductions.ssp_gadget(ssp)
        exp = reductions.ssp_expectations(ssp)
        n = len(ssp.values)
        queries = {"g-csr": {"subset": ",".join(map(str, range(1, n + 1)))},
                   "g-msr": {"k": n}}
    else:
        if args.formula is None:
            raise UsageError("reduce taut needs --formula")
        c = parse_formula(args.formula)
        limit = reductions.TAUT_LIMIT if args.limit_n is None else args.limit_n
        f, exp = reductions.taut_gadget(c, limit)
        queries = {"g-fn": {"feature": c.num_inputs + 1}}
    if args.out:
        _write(args.out, serialize_model(f))
    _emit({"problem": args.problem, "model": model_to_json(f),
           "expected": {q: _yes(v) for q, v in exp.items()}, "queries": queries})
    return 0


def cmd_bench(args) -> int:
    from globex import bench
    report = bench.run_separation(args.max_n, args.timeout_ms / 1000.0, args.seed)
    if args.out:
        bench.write_report(report, args.out)
    summary = bench.summarize(report)
    if args.out:
        summary["out"] = args.out
    _emit(summary)
    return 0


def cmd_selftest(args) -> int:
    from globex import selftest
    report = selftest.run(args.seed, args.trials, args.threads)
    if args.out:
        _write(args.out, (json.dumps(report, sort_keys=True) + "\n").encode("utf-8"))
    _emit(report)
    if not report["passed"]:
        print("self-test failed; counterexample included in the report", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model")
    common.add_argument("--instance")
    common.add_argument("--subset", help="comma-separated 1-based features, or 'none'")
    common.add_argument("--feature", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--method", choices=METHODS, default="auto")
    common.add_argument("--limit-n", type=int,
                        help="largest feature count for exhaustive steps "
                             f"(default {generic_solver.SEARCH_LIMIT}; "
                             f"{reductions.TAUT_LIMIT} for reduce taut)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out")

    p = argparse.ArgumentParser(prog="globex", description="exact explanation queries")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="classify one instance")
    e.set_defaults(run=cmd_eval)

    q = sub.add_parser("query", parents=[common], help="answer an explanation query")
    q.add_argument("query", choices=QUERIES)
    q.add_argument("--shuffle-order", action="store_true",
                   help="g-msr: run the deletion pass in a seed-shuffled feature order")
    q.set_defaults(run=cmd_query)

    g = sub.add_parser("gen", parents=[common], help="generate a random model")
    g.add_argument("kind", choices=("fbdd", "perceptron", "mlp"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--max-nodes", type=int, default=32)
    g.add_argument("--weight-bound", type=int, default=5)
    g.add_argument("--hidden", help="hidden layer widths, e.g. 4,3")
    g.set_defaults(run=cmd_gen)

    r = sub.add_parser("reduce", parents=[common], help="emit a hardness-reduction gadget")
    r.add_argument("problem", choices=("ssp", "taut"))
    r.add_argument("--values")
    r.add_argument("--target", type=int)
    r.add_argument("--formula")
    r.set_defaults(run=cmd_reduce)

    b = sub.add_parser("bench", parents=[common], help="separation benchmark")
    b.add_argument("--suite", choices=("separation",), default="separation")
    b.add_argument("--max-n", type=int, default=20)
    b.add_argument("--timeout-ms", type=int, default=10_000)
    b.set_defaults(run=cmd_bench)

    s = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    s.add_argument("--trials", type=int, default=20)
    s.set_defaults(run=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if args.limit_n is not None and args.limit_n < 0:
        parser.error("--limit-n must be non-negative")
    try:
        return args.run(args)
    except DeskScaleError as e:
        print(f"refused: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        # covers usage, parse, schema, validation and dimension errors
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
