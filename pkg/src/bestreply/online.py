"""The online best reply algorithm.

Each arriving request takes the feasible allocation that minimizes its own
cost given the loads left by earlier requests; earlier choices are never
revised.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass

from .model import (
    EXPLICIT,
    AllocationVector,
    Instance,
    ValidationError,
    eval_cost,
    total_cost,
)

# relative tolerance under which two weighted marginal costs count as tied
WEIGHTED_TIE_RTOL = 1e-12


class TieBreakPolicy(enum.Enum):
    FIRST = "first"  # first minimizer in the request's allocation list
    LEX = "lex"  # minimizer with the smallest sorted resource-id tuple


@dataclass(frozen=True)
class OnlineRun:
    allocation: AllocationVector
    alg_cost: float
    per_step_marginals: tuple[float, ...]


def _weight(inst: Instance, i: int):
    return 1 if inst.unweighted else inst.requests[i].weight


def allocation_cost(inst: Instance, loads, alloc, w) -> float:
    """Cost of ``alloc`` to a request of weight ``w`` joining ``loads``."""
    total = 0.0
    for r in alloc:
        total += w * eval_cost(inst.resources[r], loads[r] + w)
    return total


def _check_partial(inst: Instance, partial: AllocationVector, i: int) -> None:
    if len(partial.choices) != i:
        raise ValidationError(f"partial allocation covers {len(partial.choices)} requests, expected {i}")


def best_reply_step(
    inst: Instance,
    partial: AllocationVector,
    i: int,
    policy: TieBreakPolicy = TieBreakPolicy.FIRST,
) -> tuple[str, ...]:
    """Allocation chosen for request ``i`` (0-based) given the first ``i`` choices."""
    _check_partial(inst, partial, i)
    if inst.mode != EXPLICIT:
        return shortest_path_best_reply(inst, partial, i)
    allocs = inst.requests[i].allocations
    if not allocs:
        raise ValidationError(f"request {i}: empty allocation list")
    w = _weight(inst, i)
    costs = [allocation_cost(inst, partial.loads, a, w) for a in allocs]
    best = min(costs)
    tol = 0.0 if inst.unweighted else WEIGHTED_TIE_RTOL * best
    tied = [a for a, c in zip(allocs, costs) if c <= best + tol]
    if policy is TieBreakPolicy.LEX:
        return min(tied, key=lambda a: tuple(sorted(a)))
    return tied[0]


def shortest_path_best_reply(inst: Instance, partial: AllocationVector, i: int) -> tuple[str, ...]:
    """Cheapest source-target path for request ``i`` in a network instance.

    Dijkstra over edge prices ``w * c_e(load_e + w)``, which are non-negative.
    Among equally cheap paths the one with the lexicographically smallest node
    sequence wins, then the smallest edge-id sequence (parallel edges).
    Distances accumulate in path order, so the result equals a left-to-right
    sum over the returned path bit for bit.
    """
    _check_partial(inst, partial, i)
    req = inst.requests[i]
    w = _weight(inst, i)
    adj = inst.out_edges()
    heap = [(0.0, (req.source,), (), req.source)]
    settled = set()
    while heap:
        dist, nodes, path, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        if u == req.target:
            return path
        for e in adj[u]:
            if e.head in settled:
                continue
            price = w * eval_cost(inst.resources[e.id], partial.loads[e.id] + w)
            heapq.heappush(heap, (dist + price, nodes + (e.head,), path + (e.id,), e.head))
    raise ValidationError(f"request {i}: target {req.target!r} unreachable from {req.source!r}")


def run_online(inst: Instance, policy: TieBreakPolicy = TieBreakPolicy.FIRST) -> OnlineRun:
    alloc = AllocationVector.empty(inst)
    marginals = []
    for i in range(inst.n):
        choice = best_reply_step(inst, alloc, i, policy)
        marginals.append(allocation_cost(inst, alloc.loads, choice, _weight(inst, i)))
        alloc = alloc.extend(inst, choice)
    return OnlineRun(alloc, total_cost(inst, alloc), tuple(marginals))
