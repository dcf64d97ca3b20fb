"""Exact offline optimum by enumeration or depth-first branch and bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    EXPLICIT,
    AllocationVector,
    Instance,
    Request,
    cost_of_loads,
    total_cost,
)
from .online import TieBreakPolicy, run_online

EXHAUSTIVE_CAP = 10**7
PATH_CAP = 10**4
_CHUNK = 1 << 15


class SearchSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    opt_cost: float
    opt_alloc: AllocationVector
    nodes_explored: int
    proven_optimal: bool


def simple_paths(inst: Instance, source: str, target: str, cap: int = PATH_CAP) -> list[tuple[str, ...]]:
    """All simple source-target paths as edge-id tuples, in DFS order by edge id."""
    adj = {v: sorted(es, key=lambda e: e.id) for v, es in inst.out_edges().items()}
    paths: list[tuple[str, ...]] = []

    def walk(u, on_path, edges):
        if u == target:
            paths.append(tuple(edges))
            if len(paths) > cap:
                raise SearchSpaceTooLarge(f"more than {cap} paths from {source!r} to {target!r}")
            return
        for e in adj[u]:
            if e.head not in on_path:
                on_path.add(e.head)
                edges.append(e.id)
                walk(e.head, on_path, edges)
                edges.pop()
                on_path.discard(e.head)

    walk(source, {source}, [])
    return paths


def as_explicit(inst: Instance, path_cap: int = PATH_CAP) -> Instance:
    """Explicit-mode copy of a network instance (one allocation per simple path)."""
    if inst.mode == EXPLICIT:
        return inst
    requests = tuple(
        Request(weight=q.weight, allocations=tuple(simple_paths(inst, q.source, q.target, path_cap)))
        for q in inst.requests
    )
    return Instance(EXPLICIT, dict(inst.resources), requests)


def search_space_size(inst: Instance) -> int:
    return math.prod(len(q.allocations) for q in inst.requests)


def _finish(inst: Instance, choices, nodes: int, proven: bool) -> OptResult:
    alloc = AllocationVector.build(inst, choices)
    return OptResult(total_cost(inst, alloc), alloc, nodes, proven)


def _vector_cost(inst: Instance, loads: np.ndarray) -> np.ndarray:
    # same Horner order and resource order as model.cost_of_loads
    total = np.zeros(loads.shape[0])
    for k, r in enumerate(inst.resource_order):
        x = loads[:, k]
        acc = np.zeros_like(x)
        for a in reversed(inst.resources[r].coeffs):
            acc = acc * x + a
        total = total + x * acc
    return total


def optimal_exhaustive(inst: Instance, cap: int = EXHAUSTIVE_CAP, path_cap: int = PATH_CAP) -> OptResult:
    """Minimum total cost over the full product of allocation lists."""
    ex = as_explicit(inst, path_cap)
    size = search_space_size(ex)
    if size > cap:
        raise SearchSpaceTooLarge(f"{size} allocation vectors exceed the cap {cap}; use optimal_bnb")
    if ex.n == 0:
        return _finish(ex, (), 0, True)
    col = {r: k for k, r in enumerate(ex.resource_order)}
    unit = ex.unweighted
    dtype = np.int64 if unit else np.float64
    # contribution of each (request, allocation) to the load vector
    rows = []
    for q in ex.requests:
        m = np.zeros((len(q.allocations), len(col)), dtype=dtype)
        for j, a in enumerate(q.allocations):
            for r in a:
                m[j, col[r]] += 1 if unit else q.weight
        rows.append(m)
    radices = [len(q.allocations) for q in ex.requests]
    best_cost, best_index = math.inf, -1
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(size, start + _CHUNK), dtype=np.int64)
        loads = np.zeros((idx.size, len(col)), dtype=dtype)
        rem = idx.copy()
        # mixed radix, last request varies fastest (itertools.product order)
        digits = []
        for base in reversed(radices):
            digits.append(rem % base)
            rem //= base
        digits.reverse()
        for m, dig in zip(rows, digits):
            loads = loads + m[dig]
        costs = _vector_cost(ex, loads.astype(np.float64))
        k = int(np.argmin(costs))
        if costs[k] < best_cost:
            best_cost, best_index = float(costs[k]), start + k
    choices = []
    rem = best_index
    for base, q in zip(reversed(radices), reversed(ex.requests)):
        choices.append(q.allocations[rem % base])
        rem //= base
    choices.reverse()
    return _finish(ex, choices, size, True)


def optimal_bnb(inst: Instance, node_budget: int | None = None, path_cap: int = PATH_CAP) -> OptResult:
    """Depth-first branch and bound over requests in arrival order.

    The bound is the cost of the partial allocation itself, which never
    exceeds the cost of any completion because costs are non-decreasing in the
    load. Children are visited cheapest first, so the first leaf is the greedy
    dive. A node is one (request, allocation) extension. ``node_budget=None``
    means unlimited.
    """
    if node_budget is not None and node_budget < 1:
        raise ValueError("node_budget must be >= 1")
    ex = as_explicit(inst, path_cap)
    n = ex.n
    unit = ex.unweighted
    weights = [1 if unit else q.weight for q in ex.requests]
    loads = {r: (0 if unit else 0.0) for r in ex.resource_order}
    best = {"cost": math.inf, "choices": None}
    nodes = 0
    exhausted = False
    choices: list[tuple[str, ...]] = []

    def child_cost(a, w):
        saved = _push(loads, a, w)
        c = cost_of_loads(ex, loads)
        loads.update(saved)
        return c

    def dfs(i):
        nonlocal nodes, exhausted
        if i == n:
            c = cost_of_loads(ex, loads)
            if c < best["cost"]:
                best["cost"], best["choices"] = c, list(choices)
            return
        w = weights[i]
        kids = sorted(
            ((child_cost(a, w), j, a) for j, a in enumerate(ex.requests[i].allocations)),
            key=lambda t: (t[0], t[1]),
        )
        for c, _, a in kids:
            if node_budget is not None and nodes >= node_budget:
                exhausted = True
                return
            nodes += 1
            if c >= best["cost"]:
                continue
            saved = _push(loads, a, w)
            choices.append(a)
            dfs(i + 1)
            choices.pop()
            loads.update(saved)
            if exhausted:
                return

    if n == 0:
        return _finish(ex, (), 0, True)
    dfs(0)
    if best["choices"] is None:
        best["choices"] = greedy_dive(ex)
    return _finish(ex, best["choices"], nodes, not exhausted)


def _push(loads, alloc, w) -> dict:
    # restoring saved values avoids drift from subtracting float weights
    saved = {r: loads[r] for r in alloc}
    for r in alloc:
        loads[r] += w
    return saved


def greedy_dive(inst: Instance) -> list[tuple[str, ...]]:
    """Complete allocation picking, request by request, the cheapest partial total."""
    unit = inst.unweighted
    loads = {r: (0 if unit else 0.0) for r in inst.resource_order}
    out = []
    for q in inst.requests:
        w = 1 if unit else q.weight
        best = None
        for a in q.allocations:
            saved = _push(loads, a, w)
            c = cost_of_loads(inst, loads)
            loads.update(saved)
            if best is None or c < best[0]:
                best = (c, a)
        for r in best[1]:
            loads[r] += w
        out.append(best[1])
    return out


@dataclass(frozen=True)
class RatioResult:
    alg: float
    opt: float
    ratio: float | None  # None when opt == 0 < alg


def empirical_ratio(
    inst: Instance,
    policy: TieBreakPolicy = TieBreakPolicy.FIRST,
    exact: str = "bnb",
) -> RatioResult:
    alg = run_online(inst, policy).alg_cost
    if exact == "exhaustive":
        opt = optimal_exhaustive(inst).opt_cost
    elif exact == "bnb":
        opt = optimal_bnb(inst).opt_cost
    else:
        raise ValueError(f"unknown exact method {exact!r}")
    if opt > 0:
        return RatioResult(alg, opt, alg / opt)
    if alg == 0:
        return RatioResult(alg, opt, 1.0)
    return RatioResult(alg, opt, None)

