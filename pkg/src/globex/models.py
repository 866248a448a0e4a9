"""Boolean classifiers over {0,1}^n: FBDDs, perceptrons and ReLU MLPs.

Every model classifies exactly.  A perceptron (and the final step unit of an
MLP) outputs 1 only when its pre-activation is strictly positive; a score of
exactly zero is class 0.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from globex.core import (DimensionError, Instance, ParseError, format_rational,
                         parse_rational)


class SchemaError(ValueError):
    """Model JSON does not follow the documented format."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(ValueError):
    """A model is structurally invalid (cycle, dangling id, read-once, ...)."""


_evaluations = 0


def evaluation_count() -> int:
    """Number of model evaluations performed by this process so far."""
    return _evaluations


# ---------------------------------------------------------------------------
# FBDD
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FbddNode:
    id: int
    var: int
    lo: int
    hi: int


@dataclass(frozen=True)
class FbddLeaf:
    id: int
    label: bool


@dataclass(frozen=True)
class Fbdd:
    """A free BDD; build instances through :func:`validate_fbdd`."""

    num_features: int
    root: int
    nodes: tuple[FbddNode, ...]
    leaves: tuple[FbddLeaf, ...]
    _node: dict = field(default=None, compare=False, repr=False, hash=False)
    _leaf: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_node", {v.id: v for v in self.nodes})
        object.__setattr__(self, "_leaf", {v.id: v.label for v in self.leaves})

    def node(self, nid: int) -> FbddNode:
        return self._node[nid]

    def is_leaf(self, nid: int) -> bool:
        return nid in self._leaf

    def label(self, nid: int) -> bool:
        return self._leaf[nid]

    def evaluate(self, x: Instance) -> bool:
        _check_width(self.num_features, x)
        nid = self.root
        while nid not in self._leaf:
            v = self._node[nid]
            nid = v.hi if x.bits[v.var - 1] else v.lo
        return self._leaf[nid]

    @property
    def size(self) -> int:
        """Number of edges."""
        return 2 * len(self.nodes)


def validate_fbdd(num_features: int, root: int, nodes, leaves) -> Fbdd:
    """Check a raw graph and return it as an :class:`Fbdd`.

    ``nodes`` holds ``(id, var, lo, hi)`` tuples or :class:`FbddNode` objects
    and ``leaves`` holds ``(id, label)`` pairs or :class:`FbddLeaf` objects.
    """
    nodes = tuple(v if isinstance(v, FbddNode) else FbddNode(*map(int, v))
                  for v in nodes)
    leaves = tuple(v if isinstance(v, FbddLeaf) else FbddLeaf(int(v[0]), bool(v[1]))
                   for v in leaves)
    if num_features < 1:
        raise ValidationError("an FBDD needs at least one feature")
    ids = [v.id for v in nodes] + [v.id for v in leaves]
    seen = set()
    for i in ids:
        if i in seen:
            raise ValidationError(f"duplicate node id {i}")
        seen.add(i)
    if root not in seen:
        raise ValidationError(f"dangling id: root {root} does not exist")
    table = {v.id: v for v in nodes}
    for v in nodes:
        if not 1 <= v.var <= num_features:
            raise ValidationError(
                f"node {v.id}: var {v.var} outside 1..{num_features}")
        for child in (v.lo, v.hi):
            if child not in seen:
                raise ValidationError(
                    f"dangling id: node {v.id} references missing id {child}")

    # cycle detection, iterative three-colour DFS
    colour = dict.fromkeys(table, 0)
    order = []
    for start in table:
        if colour[start]:
            continue
        stack = [(start, iter((table[start].lo, table[start].hi)))]
        colour[start] = 1
        trail = [start]
        while stack:
            nid, children = stack[-1]
            for c in children:
                if c not in table:
                    continue
                if colour[c] == 1:
                    cyc = trail[trail.index(c):] + [c]
                    raise ValidationError(
                        "cycle detected: " + " -> ".join(map(str, cyc)))
                if colour[c] == 0:
                    colour[c] = 1
                    trail.append(c)
                    stack.append((c, iter((table[c].lo, table[c].hi))))
                    break
            else:
                colour[nid] = 2
                order.append(nid)
                trail.pop()
                stack.pop()

    # read-once: no descendant of v tests var(v); children finish first
    below: dict[int, frozenset] = {}
    for nid in order:
        v = table[nid]
        sub = below.get(v.lo, frozenset()) | below.get(v.hi, frozenset())
        if v.var in sub:
            path = _path_to_var(table, nid, v.var)
            raise ValidationError(
                f"read-once violation: var {v.var} repeats on path "
                + " -> ".join(map(str, path)))
        below[nid] = sub | {v.var}
    return Fbdd(num_features, int(root), nodes, leaves)


def _path_to_var(table, start, var):
    # depth-first search for a descendant of start testing var
    stack = [(table[start].lo, [start]), (table[start].hi, [start])]
    while stack:
        nid, path = stack.pop()
        if nid not in table:
            continue
        if table[nid].var == var:
            return path + [nid]
        stack.append((table[nid].lo, path + [nid]))
        stack.append((table[nid].hi, path + [nid]))
    return [start]


# ---------------------------------------------------------------------------
# Perceptron and MLP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Perceptron:
    weights: tuple[Fraction, ...]
    bias: Fraction
    _scaled: tuple = field(default=None, compare=False, repr=False, hash=False)
    _range: tuple = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        w = tuple(Fraction(v) for v in self.weights)
        b = Fraction(self.bias)
        if not w:
            raise ValidationError("a perceptron needs at least one weight")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        d = math.lcm(*(q.denominator for q in w), b.denominator)
        W = tuple(int(q * d) for q in w)
        object.__setattr__(self, "_scaled", (W, int(b * d), d))
        object.__setattr__(self, "_range", (sum(v for v in W if v < 0),
                                            sum(v for v in W if v > 0)))

    @property
    def num_features(self) -> int:
        return len(self.weights)

    @property
    def scaled(self) -> tuple[tuple[int, ...], int, int]:
        """``(W, B, D)`` with integer W = D*w and B = D*b for some D > 0."""
        return self._scaled

    @property
    def scaled_range(self) -> tuple[int, int]:
        """Smallest and largest value of sum_i W_i y_i over all y."""
        return self._range

    def score(self, x: Instance) -> Fraction:
        _check_width(self.num_features, x)
        return sum((w for w, b in zip(self.weights, x.bits) if b), Fraction(0)) + self.bias

    def evaluate(self, x: Instance) -> bool:
        _check_width(self.num_features, x)
        W, B, _ = self._scaled
        return sum(w for w, b in zip(W, x.bits) if b) + B > 0


RELU = "relu"
STEP = "step"


@dataclass(frozen=True)
class Layer:
    """``weights[r][c]`` connects input unit r to output unit c."""

    weights: tuple[tuple[Fraction, ...], ...]
    bias: tuple[Fraction, ...]
    activation: str

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(tuple(Fraction(v) for v in row)
                                                  for row in self.weights))
        object.__setattr__(self, "bias", tuple(Fraction(v) for v in self.bias))

    @property
    def in_width(self) -> int:
        return len(self.weights)

    @property
    def out_width(self) -> int:
        return len(self.bias)


@dataclass(frozen=True)
class Mlp:
    input_width: int
    layers: tuple[Layer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.input_width < 1:
            raise ValidationError("input_width must be at least 1")
        if not self.layers:
            raise ValidationError("an MLP needs at least one layer")
        width = self.input_width
        for j, layer in enumerate(self.layers):
            last = j == len(self.layers) - 1
            if layer.in_width != width:
                raise ValidationError(
                    f"layer {j}: expects {layer.in_width} inputs, previous width is {width}")
            if any(len(row) != layer.out_width for row in layer.weights):
                raise ValidationError(
                    f"layer {j}: weight rows must have {layer.out_width} columns")
            if layer.activation != (STEP if last else RELU):
                raise ValidationError(
                    f"layer {j}: activation must be {'step' if last else 'relu'}")
            width = layer.out_width
        if width != 1:
            raise ValidationError("the output layer must have width 1")

    @property
    def num_features(self) -> int:
        return self.input_width

    def forward(self, x: Instance) -> list[list[Fraction]]:
        """Return every layer's pre-activation vector."""
        _check_width(self.input_width, x)
        g = [Fraction(b) for b in x.bits]
        pre = []
        for layer in self.layers:
            z = list(layer.bias)
            for r, gr in enumerate(g):
                if gr:
                    row = layer.weights[r]
                    for c in range(len(z)):
                        z[c] += gr * row[c]
            pre.append(z)
            if layer.activation == RELU:
                g = [v if v > 0 else Fraction(0) for v in z]
        return pre

    def evaluate(self, x: Instance) -> bool:
        return self.forward(x)[-1][0] > 0


Model = Union[Fbdd, Perceptron, Mlp]


def _check_width(n: int, x: Instance) -> None:
    if len(x) != n:
        raise DimensionError(f"instance has {len(x)} features, model expects {n}")


def evaluate(f: Model, x: Instance) -> bool:
    global _evaluations
    _evaluations += 1
    return f.evaluate(x)


def model_kind(f: Model) -> str:
    if isinstance(f, Fbdd):
        return "fbdd"
    if isinstance(f, Perceptron):
        return "perceptron"
    if isinstance(f, Mlp):
        return "mlp"
    raise TypeError(f"not a model: {type(f).__name__}")


# ---------------------------------------------------------------------------
# Boolean circuits and their compilation to MLPs
# ---------------------------------------------------------------------------

INPUT, NOT, AND, OR = "INPUT", "NOT", "AND", "OR"
_ARITY = {INPUT: 0, NOT: 1, AND: 2, OR: 2}


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    operands: tuple[int, ...] = ()
    var: int | None = None  # feature read by an INPUT gate


@dataclass(frozen=True)
class BoolCircuit:
    num_inputs: int
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        seen = set()
        for g in gates:
            if g.kind not in _ARITY:
                raise ValidationError(f"gate {g.id}: unknown kind {g.kind!r}")
            if len(g.operands) != _ARITY[g.kind]:
                raise ValidationError(
                    f"gate {g.id}: {g.kind} takes {_ARITY[g.kind]} operands")
            if g.kind == INPUT and not (g.var and 1 <= g.var <= self.num_inputs):
                raise ValidationError(f"gate {g.id}: input var out of range")
            for o in g.operands:
                if o not in seen:
                    raise ValidationError(
                        f"gate {g.id}: operand {o} is not an earlier gate")
            if g.id in seen:
                raise ValidationError(f"duplicate gate id {g.id}")
            seen.add(g.id)
        if self.output not in seen:
            raise ValidationError(f"output {self.output} is not a gate")

    def evaluate(self, x: Instance) -> bool:
        _check_width(self.num_inputs, x)
        val = {}
        for g in self.gates:
            if g.kind == INPUT:
                val[g.id] = bool(x.bits[g.var - 1])
            elif g.kind == NOT:
                val[g.id] = not val[g.operands[0]]
            elif g.kind == AND:
                val[g.id] = val[g.operands[0]] and val[g.operands[1]]
            else:
                val[g.id] = val[g.operands[0]] or val[g.operands[1]]
        return val[self.output]


class CircuitBuilder:
    """Small helper for assembling circuits gate by gate."""

    def __init__(self, num_inputs: int):
        self.num_inputs = num_inputs
        self.gates: list[Gate] = []
        self._inputs: dict[int, int] = {}

    def _add(self, kind, operands=(), var=None) -> int:
        gid = len(self.gates)
        self.gates.append(Gate(gid, kind, tuple(operands), var))
        return gid

    def input(self, var: int) -> int:
        if var not in self._inputs:
            self._inputs[var] = self._add(INPUT, var=var)
        return self._inputs[var]

    def neg(self, a: int) -> int:
        return self._add(NOT, (a,))

    def conj(self, a: int, b: int) -> int:
        return self._add(AND, (a, b))

    def disj(self, a: int, b: int) -> int:
        return self._add(OR, (a, b))

    def build(self, output: int) -> BoolCircuit:
        return BoolCircuit(self.num_inputs, tuple(self.gates), output)


_TOKEN = re.compile(r"\s*(?:(x)(\d+)|([()~!&|])|(\S))")


def parse_formula(text: str, num_inputs: int | None = None) -> BoolCircuit:
    """Parse e.g. ``"(x1 | x2) | (~x1 & ~x2)"``; ``&`` binds tighter than ``|``."""
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(4):
            raise ParseError(f"unexpected character {m.group(4)!r} in formula")
        tokens.append(("var", int(m.group(2))) if m.group(1) else ("op", m.group(3)))
    if not tokens:
        raise ParseError("empty formula")
    used = [v for kind, v in tokens if kind == "var"]
    if any(v < 1 for v in used):
        raise ParseError("variables are numbered from x1")
    n = num_inputs if num_inputs is not None else max(used, default=1)
    b = CircuitBuilder(n)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expect(op):
        nonlocal pos
        if peek() != ("op", op):
            raise ParseError(f"expected {op!r} in formula {text!r}")
        pos += 1

    def disjunction():
        nonlocal pos
        a = conjunction()
        while peek() == ("op", "|"):
            pos += 1
            a = b.disj(a, conjunction())
        return a

    def conjunction():
        nonlocal pos
        a = unary()
        while peek() == ("op", "&"):
            pos += 1
            a = b.conj(a, unary())
        return a

    def unary():
        nonlocal pos
        tok = peek()
        if tok in (("op", "~"), ("op", "!")):
            pos += 1
            return b.neg(unary())
        if tok == ("op", "("):
            pos += 1
            a = disjunction()
            expect(")")
            return a
        if tok and tok[0] == "var":
            pos += 1
            if tok[1] > n:
                raise ParseError(f"x{tok[1]} exceeds {n} inputs")
            return b.input(tok[1])
        raise ParseError(f"malformed formula {text!r}")

    out = disjunction()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens in formula {text!r}")
    return b.build(out)


def circuit_to_mlp(c: BoolCircuit) -> Mlp:
    """Compile a circuit into a ReLU network computing the same function.

    Every wire carries 0 or 1.  A wire is kept as an affine form over the
    units of the layer at which it is available: NOT is affine (1 - v), AND
    is one unit relu(u + v - 1), OR is 1 - relu(1 - u - v).  Wires needed
    later are copied forward by relu(v) = v.
    """
    level: dict[int, int] = {}
    for g in c.gates:
        if g.kind == INPUT:
            level[g.id] = 0
        elif g.kind == NOT:
            level[g.id] = level[g.operands[0]]
        else:
            level[g.id] = 1 + max(level[o] for o in g.operands)
    gates = {g.id: g for g in c.gates}

    # last level at which a wire is read, as input to the layer above it
    needed_until: dict[int, int] = {}
    for g in c.gates:
        if g.kind in (AND, OR):
            for o in g.operands:
                needed_until[o] = max(needed_until.get(o, -1), level[g.id] - 1)
        elif g.kind == NOT:
            o = g.operands[0]
            needed_until[o] = max(needed_until.get(o, -1), level[g.id])
    depth = level[c.output]
    needed_until[c.output] = max(needed_until.get(c.output, -1), depth)

    # forms[w] = (coefficients by unit index, constant) at the wire's current layer
    forms: dict[int, tuple[dict[int, Fraction], Fraction]] = {}
    one = Fraction(1)

    def add(f1, f2, k=one, const=Fraction(0)):
        coef = dict(f1[0])
        for u, a in f2[0].items():
            coef[u] = coef.get(u, 0) + k * a
        return coef, f1[1] + k * f2[1] + const

    def scale(f1, k, const):
        return {u: k * a for u, a in f1[0].items()}, k * f1[1] + const

    def settle(lvl):
        # NOT gates at this level become affine forms once their operand is known
        for g in c.gates:
            if level[g.id] == lvl and g.kind == NOT and g.id not in forms:
                forms[g.id] = scale(forms[g.operands[0]], -one, one)

    for g in c.gates:
        if g.kind == INPUT:
            forms[g.id] = ({g.var - 1: one}, Fraction(0))
    settle(0)

    layers = []
    width = c.num_inputs
    for lvl in range(1, depth + 1):
        units: list[tuple[dict, Fraction]] = []
        new_forms = {}
        for g in c.gates:
            if level[g.id] != lvl or g.kind == NOT:
                continue
            u, v = forms[g.operands[0]], forms[g.operands[1]]
            idx = len(units)
            if g.kind == AND:
                units.append(add(u, v, const=-one))
                new_forms[g.id] = ({idx: one}, Fraction(0))
            else:
                units.append(scale(add(u, v), -one, one))
                new_forms[g.id] = ({idx: -one}, one)
        for w, form in forms.items():
            if level[w] < lvl and needed_until.get(w, -1) >= lvl:
                idx = len(units)
                units.append(form)
                new_forms[w] = ({idx: one}, Fraction(0))
        if not units:
            units.append(({}, Fraction(0)))
        weights = [[Fraction(0)] * len(units) for _ in range(width)]
        for col, (coef, _) in enumerate(units):
            for r, a in coef.items():
                weights[r][col] = a
        layers.append(Layer(tuple(map(tuple, weights)),
                            tuple(const for _, const in units), RELU))
        forms = new_forms
        width = len(units)
        settle(lvl)

    coef, const = forms[c.output]
    # the output wire is 0/1 and step(z) = 1 iff z > 0, so step(v) = v
    out = [[coef.get(r, Fraction(0))] for r in range(width)]
    layers.append(Layer(tuple(map(tuple, out)), (const,), STEP))
    return Mlp(c.num_inputs, tuple(layers))


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------

def _random_rational(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_perceptron(n: int, weight_bound: int, seed: int) -> Perceptron:
    if n < 1 or weight_bound < 1:
        raise ValueError("need n >= 1 and weight_bound >= 1")
    rng = random.Random(seed)
    weights = tuple(_random_rational(rng, weight_bound) for _ in range(n))
    return Perceptron(weights, _random_rational(rng, weight_bound))


def random_mlp(layer_widths: list[int], weight_bound: int, seed: int) -> Mlp:
    if len(layer_widths) < 2 or layer_widths[-1] != 1 or min(layer_widths) < 1:
        raise ValueError("layer widths must be [n, ..., 1] with positive entries")
    if weight_bound < 1:
        raise ValueError("weight_bound must be >= 1")
    rng = random.Random(seed)
    layers = []
    for j, (a, b) in enumerate(zip(layer_widths, layer_widths[1:])):
        last = j == len(layer_widths) - 2
        weights = tuple(tuple(_random_rational(rng, weight_bound) for _ in range(b))
                        for _ in range(a))
        bias = tuple(_random_rational(rng, weight_bound) for _ in range(b))
        layers.append(Layer(weights, bias, STEP if last else RELU))
    return Mlp(layer_widths[0], tuple(layers))


def random_fbdd(n: int, max_nodes: int, seed: int, share: float = 0.3,
                retries: int = 8) -> Fbdd:
    """Random read-once diagram with per-path variable orders.

    Subgraphs are reused whenever their variables are disjoint from the
    current path, which yields DAGs rather than only trees.
    """
    if n < 1 or max_nodes < 1:
        raise ValueError("need n >= 1 and max_nodes >= 1")
    for attempt in range(retries):
        rng = random.Random(seed if attempt == 0 else hash((seed, attempt)))
        try:
            return _random_fbdd_once(n, max_nodes, rng, share)
        except ValidationError:
            continue
    raise ValidationError(f"could not generate a valid FBDD after {retries} attempts")


def _random_fbdd_once(n, max_nodes, rng, share):
    leaves = [(0, False), (1, True)]
    nodes = []
    subvars = {0: frozenset(), 1: frozenset()}

    def build(used, depth):
        free = [v for v in range(1, n + 1) if v not in used]
        if not free or len(nodes) >= max_nodes or (
                depth > 0 and rng.random() < 0.15 + 0.1 * depth):
            return rng.randint(0, 1)
        # unfinished nodes (None) are ancestors of this position
        reusable = [v[0] for v in nodes
                    if v is not None and not (subvars[v[0]] & used)]
        if depth > 0 and reusable and rng.random() < share:
            return rng.choice(reusable)
        var = rng.choice(free)
        nid = len(nodes) + 2
        nodes.append(None)
        lo = build(used | {var}, depth + 1)
        hi = build(used | {var}, depth + 1)
        nodes[nid - 2] = (nid, var, lo, hi)
        subvars[nid] = subvars[lo] | subvars[hi] | {var}
        return nid

    root = build(frozenset(), 0)
    return validate_fbdd(n, root, nodes, leaves)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def model_to_json(f: Model) -> dict:
    if isinstance(f, Fbdd):
        return {
            "type": "fbdd",
            "num_features": f.num_features,
            "root": f.root,
            "nodes": [{"id": v.id, "var": v.var, "lo": v.lo, "hi": v.hi}
                      for v in sorted(f.nodes, key=lambda v: v.id)],
            "leaves": [{"id": v.id, "label": v.label}
                       for v in sorted(f.leaves, key=lambda v: v.id)],
        }
    if isinstance(f, Perceptron):
        return {"type": "perceptron",
                "weights": [format_rational(w) for w in f.weights],
                "bias": format_rational(f.bias)}
    if isinstance(f, Mlp):
        return {"type": "mlp", "input_width": f.input_width,
                "layers": [{"weights": [[format_rational(v) for v in row]
                                        for row in layer.weights],
                            "bias": [format_rational(v) for v in layer.bias],
                            "activation": layer.activation}
                           for layer in f.layers]}
    raise TypeError(f"not a model: {type(f).__name__}")


def serialize_model(f: Model) -> bytes:
    return (json.dumps(model_to_json(f), sort_keys=True) + "\n").encode("utf-8")


def _get(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    value = obj[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise SchemaError(f"{path}.{key}", "expected an integer")
    if kind is list and not isinstance(value, list):
        raise SchemaError(f"{path}.{key}", "expected an array")
    return value


def _rational(value, path):
    try:
        return parse_rational(value)
    except ParseError as e:
        raise SchemaError(path, str(e))


def model_from_json(obj) -> Model:
    kind = _get(obj, "type", "$")
    if kind == "fbdd":
        n = _get(obj, "num_features", "$", int)
        root = _get(obj, "root", "$", int)
        nodes = []
        for k, v in enumerate(_get(obj, "nodes", "$", list)):
            p = f"$.nodes[{k}]"
            nodes.append(tuple(_get(v, key, p, int) for key in ("id", "var", "lo", "hi")))
        leaves = []
        for k, v in enumerate(_get(obj, "leaves", "$", list)):
            p = f"$.leaves[{k}]"
            label = _get(v, "label", p)
            if not isinstance(label, bool):
                raise SchemaError(f"{p}.label", "expected a boolean")
            leaves.append((_get(v, "id", p, int), label))
        return validate_fbdd(n, root, nodes, leaves)
    if kind == "perceptron":
        weights = [_rational(w, f"$.weights[{k}]")
                   for k, w in enumerate(_get(obj, "weights", "$", list))]
        bias = _rational(_get(obj, "bias", "$"), "$.bias")
        try:
            return Perceptron(tuple(weights), bias)
        except ValidationError as e:
            raise SchemaError("$.weights", str(e))
    if kind == "mlp":
        width = _get(obj, "input_width", "$", int)
        layers = []
        for j, layer in enumerate(_get(obj, "layers", "$", list)):
            p = f"$.layers[{j}]"
            rows = _get(layer, "weights", p, list)
            weights = []
            for r, row in enumerate(rows):
                if not isinstance(row, list):
                    raise SchemaError(f"{p}.weights[{r}]", "expected an array")
                weights.append(tuple(_rational(v, f"{p}.weights[{r}][{c}]")
                                     for c, v in enumerate(row)))
            bias = tuple(_rational(v, f"{p}.bias[{c}]")
                         for c, v in enumerate(_get(layer, "bias", p, list)))
            act = _get(layer, "activation", p)
            if act not in (RELU, STEP):
                raise SchemaError(f"{p}.activation", "expected 'relu' or 'step'")
            layers.append(Layer(tuple(weights), bias, act))
        return Mlp(width, tuple(layers))
    raise SchemaError("$.type", f"unknown model type {kind!r}")


def parse_model(data: bytes | str) -> Model:
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise SchemaError("$", f"invalid JSON: {e}")
    return model_from_json(obj)
