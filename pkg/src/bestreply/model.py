"""Instances, polynomial cost functions, allocation vectors and total cost.

Two instance modes exist. In explicit mode every request lists its feasible
allocations as sets of resource ids. In network mode the resources are the
edges of a directed graph and a request is a source/target pair whose feasible
allocations are the source-target paths.

Allocations are stored as tuples of resource ids. The tuple order matters only
for floating point summation order; semantically they are sets.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

EXPLICIT = "explicit"
NETWORK = "network"

MAX_DEGREE = 50


class InstanceError(ValueError):
    """Base class for instance parsing and validation failures."""


class InstanceSyntaxError(InstanceError):
    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class ValidationError(InstanceError):
    pass


@dataclass(frozen=True)
class PolyCost:
    """Cost function ``c(x) = sum_k coeffs[k] * x**k`` with non-negative coefficients."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        for a in coeffs:
            if isinstance(a, bool) or not isinstance(a, (int, float)):
                raise ValidationError(f"coefficient {a!r} is not a number")
            if not math.isfinite(a):
                raise ValidationError(f"non-finite coefficient {a!r}")
            if a < 0:
                raise ValidationError(f"negative coefficient {a!r}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k] != 0:
                return k
        return 0

    def __call__(self, load):
        return eval_cost(self, load)


def eval_cost(poly: PolyCost, load):
    # Horner; keeps the operation order fixed so results are reproducible
    acc = 0.0
    for a in reversed(poly.coeffs):
        acc = acc * load + a
    return acc


def marginal_request_cost(poly: PolyCost, current_load, w):
    """Cost a request of weight ``w`` pays on a resource it joins."""
    return w * eval_cost(poly, current_load + w)


@dataclass(frozen=True)
class Request:
    weight: float = 1
    allocations: tuple[tuple[str, ...], ...] = ()
    source: str | None = None
    target: str | None = None


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Instance:
    mode: str
    resources: Mapping[str, PolyCost]
    requests: tuple[Request, ...]
    nodes: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()
    _order: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "requests", tuple(self.requests))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_order", tuple(sorted(self.resources)))
        validate_instance(self)

    @property
    def n(self) -> int:
        return len(self.requests)

    @property
    def resource_order(self) -> tuple[str, ...]:
        """Resource ids in canonical (code point) order."""
        return self._order

    @property
    def unweighted(self) -> bool:
        return all(req.weight == 1 for req in self.requests)

    @property
    def max_degree(self) -> int:
        return max((c.degree for c in self.resources.values()), default=0)

    def out_edges(self) -> dict[str, list[Edge]]:
        adj: dict[str, list[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            adj[e.tail].append(e)
        return adj

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)


def _reachable(adj: Mapping[str, list[Edge]], source: str) -> set[str]:
    seen = {source}
    stack = [source]
    while stack:
        u = stack.pop()
        for e in adj[u]:
            if e.head not in seen:
                seen.add(e.head)
                stack.append(e.head)
    return seen


def validate_instance(inst: Instance) -> None:
    if inst.mode not in (EXPLICIT, NETWORK):
        raise ValidationError(f"unknown mode {inst.mode!r}")
    for rid, cost in inst.resources.items():
        if not isinstance(cost, PolyCost):
            raise ValidationError(f"resource {rid!r} has no polynomial cost")
        if cost.degree > MAX_DEGREE:
            raise ValidationError(f"resource {rid!r}: degree {cost.degree} exceeds {MAX_DEGREE}")
    for i, req in enumerate(inst.requests):
        if isinstance(req.weight, bool) or not isinstance(req.weight, (int, float)):
            raise ValidationError(f"request {i}: weight must be a number")
        if not (req.weight > 0 and math.isfinite(req.weight)):
            raise ValidationError(f"request {i}: weight must be positive")

    if inst.mode == EXPLICIT:
        for i, req in enumerate(inst.requests):
            if not req.allocations:
                raise ValidationError(f"request {i}: empty allocation list")
            for alloc in req.allocations:
                if not alloc:
                    raise ValidationError(f"request {i}: empty allocation")
                if len(set(alloc)) != len(alloc):
                    raise ValidationError(f"request {i}: duplicate resource in allocation {list(alloc)}")
                for r in alloc:
                    if r not in inst.resources:
                        raise ValidationError(f"request {i}: unknown resource {r!r}")
        return

    node_set = set(inst.nodes)
    if len(node_set) != len(inst.nodes):
        raise ValidationError("duplicate node id")
    edge_ids = [e.id for e in inst.edges]
    if len(set(edge_ids)) != len(edge_ids):
        raise ValidationError("duplicate edge id")
    if set(edge_ids) != set(inst.resources):
        raise ValidationError("network resources must be exactly the edges")
    for e in inst.edges:
        if e.tail not in node_set or e.head not in node_set:
            raise ValidationError(f"edge {e.id!r}: unknown endpoint")
        if e.tail == e.head:
            raise ValidationError(f"edge {e.id!r}: self loop")
    adj = inst.out_edges()
    for i, req in enumerate(inst.requests):
        if req.source not in node_set or req.target not in node_set:
            raise ValidationError(f"request {i}: unknown source or target node")
        if req.source == req.target:
            raise ValidationError(f"request {i}: source equals target")
        if req.target not in _reachable(adj, req.source):
            raise ValidationError(f"request {i}: no path from {req.source!r} to {req.target!r}")


def is_path(inst: Instance, req: Request, edge_ids: Sequence[str]) -> bool:
    """True if ``edge_ids`` is a simple source-target path for ``req``."""
    if not edge_ids:
        return False
    at = req.source
    visited = {at}
    for eid in edge_ids:
        try:
            e = inst.edge(eid)
        except KeyError:
            return False
        if e.tail != at or e.head in visited:
            return False
        at = e.head
        visited.add(at)
    return at == req.target


# -- allocation vectors -------------------------------------------------------


def compute_loads(inst: Instance, choices: Iterable[Sequence[str]]) -> dict:
    """Per-resource load; integers for unweighted instances."""
    unit = inst.unweighted
    loads = {r: (0 if unit else 0.0) for r in inst.resource_order}
    for req, choice in zip(inst.requests, choices):
        w = 1 if unit else req.weight
        for r in choice:
            loads[r] += w
    return loads


@dataclass(frozen=True)
class AllocationVector:
    choices: tuple[tuple[str, ...], ...]
    loads: Mapping[str, float]

    @classmethod
    def build(cls, inst: Instance, choices: Iterable[Sequence[str]]) -> "AllocationVector":
        choices = tuple(tuple(c) for c in choices)
        if len(choices) > inst.n:
            raise ValidationError("more choices than requests")
        return cls(choices, compute_loads(inst, choices))

    @classmethod
    def empty(cls, inst: Instance) -> "AllocationVector":
        return cls.build(inst, ())

    def extend(self, inst: Instance, choice: Sequence[str]) -> "AllocationVector":
        i = len(self.choices)
        if i >= inst.n:
            raise ValidationError("allocation vector already complete")
        w = 1 if inst.unweighted else inst.requests[i].weight
        loads = dict(self.loads)
        for r in choice:
            loads[r] += w
        return AllocationVector(self.choices + (tuple(choice),), loads)


def check_allocation(inst: Instance, alloc: AllocationVector, complete: bool = True) -> None:
    if complete and len(alloc.choices) != inst.n:
        raise ValidationError(f"allocation covers {len(alloc.choices)} of {inst.n} requests")
    if len(alloc.choices) > inst.n:
        raise ValidationError("more choices than requests")
    for i, choice in enumerate(alloc.choices):
        req = inst.requests[i]
        if inst.mode == EXPLICIT:
            if not any(set(choice) == set(a) and len(choice) == len(a) for a in req.allocations):
                raise ValidationError(f"request {i}: {list(choice)} is not a feasible allocation")
        elif not is_path(inst, req, choice):
            raise ValidationError(f"request {i}: {list(choice)} is not a source-target path")
    expected = compute_loads(inst, alloc.choices)
    if set(expected) != set(alloc.loads):
        raise ValidationError("load map does not match the resource set")
    for r, load in expected.items():
        stored = alloc.loads[r]
        if inst.unweighted:
            if stored != load:
                raise ValidationError(f"resource {r!r}: stored load {stored} != {load}")
        elif abs(stored - load) > 1e-12 * max(1.0, abs(load)):
            raise ValidationError(f"resource {r!r}: stored load {stored} != {load}")


def resource_cost(inst: Instance, r: str, load) -> float:
    return load * eval_cost(inst.resources[r], load) if load else 0.0


def cost_of_loads(inst: Instance, loads: Mapping[str, float]) -> float:
    total = 0.0
    for r in inst.resource_order:
        total += resource_cost(inst, r, loads[r])
    return total


def total_cost(inst: Instance, alloc: AllocationVector, check: bool = True) -> float:
    """Sum over resources of ``load * c_r(load)``."""
    if check:
        check_allocation(inst, alloc)
    return cost_of_loads(inst, alloc.loads)


def total_cost_by_request(inst: Instance, alloc: AllocationVector) -> float:
    """The same total, summed request by request."""
    check_allocation(inst, alloc)
    total = 0.0
    for req, choice in zip(inst.requests, alloc.choices):
        for r in choice:
            total += req.weight * eval_cost(inst.resources[r], alloc.loads[r])
    return total


# -- file format --------------------------------------------------------------

_TOP_KEYS = {
    EXPLICIT: {"mode", "resources", "requests"},
    NETWORK: {"mode", "nodes", "edges", "requests"},
}
_REQUEST_KEYS = {
    EXPLICIT: {"weight", "allocations"},
    NETWORK: {"weight", "source", "target"},
}


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ValidationError(f"unknown key {key!r} in {where}")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ValidationError(f"missing key {key!r} in {where}")
    return obj[key]


def _expect(value, kind, what: str):
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ValidationError(f"{what} has the wrong type")
    return value


def _coeffs(raw, where: str) -> PolyCost:
    _expect(raw, list, f"coeffs of {where}")
    for a in raw:
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise ValidationError(f"non-numeric coefficient in {where}")
        if a < 0:
            raise ValidationError(f"negative coefficient {a} in {where}")
    try:
        return PolyCost(tuple(raw))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def instance_from_dict(doc) -> Instance:
    _expect(doc, dict, "document")
    mode = _require(doc, "mode", "document")
    if mode not in _TOP_KEYS:
        raise ValidationError(f"unknown mode {mode!r}")
    _reject_unknown(doc, _TOP_KEYS[mode], "document")
    requests = []
    for i, raw in enumerate(_expect(_require(doc, "requests", "document"), list, "requests")):
        where = f"request {i}"
        _expect(raw, dict, where)
        _reject_unknown(raw, _REQUEST_KEYS[mode], where)
        weight = raw.get("weight", 1)
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise ValidationError(f"{where}: weight must be a number")
        if mode == EXPLICIT:
            allocs = _expect(_require(raw, "allocations", where), list, f"allocations of {where}")
            if not allocs:
                raise ValidationError(f"{where}: empty allocation list")
            parsed = []
            for a in allocs:
                _expect(a, list, f"allocation of {where}")
                for r in a:
                    _expect(r, str, f"resource id in {where}")
                parsed.append(tuple(a))
            requests.append(Request(weight=weight, allocations=tuple(parsed)))
        else:
            src = _expect(_require(raw, "source", where), str, f"source of {where}")
            dst = _expect(_require(raw, "target", where), str, f"target of {where}")
            requests.append(Request(weight=weight, source=src, target=dst))

    if mode == EXPLICIT:
        resources = {}
        for i, raw in enumerate(_expect(_require(doc, "resources", "document"), list, "resources")):
            where = f"resource {i}"
            _expect(raw, dict, where)
            _reject_unknown(raw, {"id", "coeffs"}, where)
            rid = _expect(_require(raw, "id", where), str, f"id of {where}")
            if rid in resources:
                raise ValidationError(f"duplicate resource id {rid!r}")
            resources[rid] = _coeffs(_require(raw, "coeffs", where), f"resource {rid!r}")
        return Instance(EXPLICIT, resources, tuple(requests))

    nodes = _expect(_require(doc, "nodes", "document"), list, "nodes")
    for v in nodes:
        _expect(v, str, "node id")
    edges, resources = [], {}
    for i, raw in enumerate(_expect(_require(doc, "edges", "document"), list, "edges")):
        where = f"edge {i}"
        _expect(raw, dict, where)
        _reject_unknown(raw, {"id", "from", "to", "coeffs"}, where)
        eid = _expect(_require(raw, "id", where), str, f"id of {where}")
        tail = _expect(_require(raw, "from", where), str, f"from of {where}")
        head = _expect(_require(raw, "to", where), str, f"to of {where}")
        if eid in resources:
            raise ValidationError(f"duplicate edge id {eid!r}")
        resources[eid] = _coeffs(_require(raw, "coeffs", where), f"edge {eid!r}")
        edges.append(Edge(eid, tail, head))
    return Instance(NETWORK, resources, tuple(requests), tuple(nodes), tuple(edges))


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return instance_from_dict(doc)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def instance_to_dict(inst: Instance) -> dict:
    def num(x):
        return int(x) if isinstance(x, int) or (isinstance(x, float) and x.is_integer() and abs(x) < 2**53) else x

    def coeffs(rid):
        return [num(a) for a in inst.resources[rid].coeffs]

    if inst.mode == EXPLICIT:
        return {
            "mode": EXPLICIT,
            "resources": [{"id": r, "coeffs": coeffs(r)} for r in inst.resources],
            "requests": [
                {"weight": num(q.weight), "allocations": [list(a) for a in q.allocations]}
                for q in inst.requests
            ],
        }
    return {
        "mode": NETWORK,
        "nodes": list(inst.nodes),
        "edges": [{"id": e.id, "from": e.tail, "to": e.head, "coeffs": coeffs(e.id)} for e in inst.edges],
        "requests": [{"weight": num(q.weight), "source": q.source, "target": q.target} for q in inst.requests],
    }


def serialize(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


# -- random instances ---------------------------------------------------------


def _random_poly(rng: random.Random, max_degree: int) -> PolyCost:
    deg = rng.randint(0, max_degree)
    coeffs = [rng.randint(0, 3) for _ in range(deg)] + [rng.randint(1, 3)]
    return PolyCost(tuple(coeffs))


def _random_weight(rng: random.Random, weighted: bool):
    # two decimals keep weights exactly reproducible through the file format
    return round(rng.uniform(0.1, 4.0), 2) if weighted else 1


def generate_random(
    mode: str = EXPLICIT,
    num_resources: int = 3,
    num_requests: int = 3,
    max_degree: int = 1,
    max_allocations: int = 2,
    weighted: bool = False,
    seed: int = 0,
) -> Instance:
    """Seeded random instance.

    Randomness comes from ``random.Random(seed)`` (MT19937). Coefficients are
    integers in 0..3 with a leading coefficient in 1..3; the degree of every
    resource is uniform in ``0..max_degree``. Weights are uniform in
    [0.1, 4.0] rounded to two decimals when ``weighted``.

    In network mode ``num_resources`` is the number of nodes of a random DAG
    (a backbone chain plus random forward and parallel edges) and
    ``max_allocations`` is unused.
    """
    if min(num_resources, num_requests, max_allocations) < 1 or max_degree < 0:
        raise ValueError("counts must be >= 1 and max_degree >= 0")
    rng = random.Random(seed)
    if mode == EXPLICIT:
        ids = [f"r{k + 1}" for k in range(num_resources)]
        resources = {r: _random_poly(rng, max_degree) for r in ids}
        requests = []
        for _ in range(num_requests):
            allocs: list[tuple[str, ...]] = []
            for _ in range(rng.randint(1, max_allocations)):
                size = rng.randint(1, num_resources)
                cand = tuple(sorted(rng.sample(ids, size)))
                if cand not in allocs:
                    allocs.append(cand)
            requests.append(Request(weight=_random_weight(rng, weighted), allocations=tuple(allocs)))
        return Instance(EXPLICIT, resources, tuple(requests))
    if mode != NETWORK:
        raise ValueError(f"unknown mode {mode!r}")
    k = max(2, num_resources)
    nodes = [f"v{j}" for j in range(k)]
    pairs = [(j, j + 1) for j in range(k - 1)]
    for _ in range(k):
        a, b = sorted(rng.sample(range(k), 2))
        pairs.append((a, b))
    edges, resources = [], {}
    for idx, (a, b) in enumerate(pairs):
        eid = f"e{idx + 1}"
        edges.append(Edge(eid, nodes[a], nodes[b]))
        resources[eid] = _random_poly(rng, max_degree)
    requests = []
    for _ in range(num_requests):
        a, b = sorted(rng.sample(range(k), 2))
        requests.append(Request(weight=_random_weight(rng, weighted), source=nodes[a], target=nodes[b]))
    return Instance(NETWORK, resources, tuple(requests), tuple(nodes), tuple(edges))
