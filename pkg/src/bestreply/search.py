"""Seeded local search for instances with a large online/offline cost ratio."""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, replace

from .model import EXPLICIT, Instance, Request, generate_random
from .offline import empirical_ratio
from .online import TieBreakPolicy

TRACE_COLUMNS = ("iteration", "event", "ratio", "current_ratio", "best_ratio")


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    iterations: int = 1000
    d: int = 1
    num_resources: int = 4
    num_requests: int = 3
    max_allocations: int = 2
    weighted: bool = False
    mutation_rate: float = 0.3
    patience: int = 200  # iterations without improvement before a restart
    policy: TieBreakPolicy = TieBreakPolicy.FIRST

    def __post_init__(self):
        counts = (self.iterations, self.num_resources, self.num_requests, self.max_allocations, self.patience)
        if min(counts) < 1:
            raise ValueError("iterations and instance sizes must be >= 1")
        if self.d < 0:
            raise ValueError("d must be >= 0")
        if not 0 < self.mutation_rate <= 1:
            raise ValueError("mutation_rate must be in (0, 1]")


@dataclass
class SearchResult:
    best_instance: Instance
    best_ratio: float
    trace: list[tuple]

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for it, event, ratio, cur, best in self.trace:
            w.writerow([it, event, repr(ratio), repr(cur), repr(best)])
        return buf.getvalue()


def _fresh(cfg: SearchConfig, rng: random.Random) -> Instance:
    return generate_random(
        mode=EXPLICIT,
        num_resources=cfg.num_resources,
        num_requests=cfg.num_requests,
        max_degree=cfg.d,
        max_allocations=cfg.max_allocations,
        weighted=cfg.weighted,
        seed=rng.getrandbits(32),
    )


def _mutate_once(inst: Instance, rng: random.Random, weighted: bool) -> Instance:
    requests = list(inst.requests)
    ops = ["add", "remove", "swap"] + (["weight"] if weighted else [])
    op = rng.choice(ops)
    if op == "swap":
        if len(requests) > 1:
            a, b = rng.sample(range(len(requests)), 2)
            requests[a], requests[b] = requests[b], requests[a]
    elif op == "weight":
        i = rng.randrange(len(requests))
        w = max(0.01, round(requests[i].weight * rng.uniform(0.5, 2.0), 2))
        requests[i] = replace(requests[i], weight=w)
    else:
        i = rng.randrange(len(requests))
        allocs = list(requests[i].allocations)
        j = rng.randrange(len(allocs))
        alloc = list(allocs[j])
        if op == "add":
            free = [r for r in inst.resource_order if r not in alloc]
            if free:
                alloc.append(rng.choice(free))
        elif len(alloc) > 1:
            alloc.pop(rng.randrange(len(alloc)))
        allocs[j] = tuple(sorted(alloc))
        requests[i] = Request(weight=requests[i].weight, allocations=tuple(allocs))
    return Instance(EXPLICIT, inst.resources, tuple(requests))


def mutate(inst: Instance, rng: random.Random, cfg: SearchConfig) -> Instance:
    steps = 1 + sum(rng.random() < cfg.mutation_rate for _ in range(inst.n - 1))
    for _ in range(steps):
        inst = _mutate_once(inst, rng, cfg.weighted)
    return inst


def _score(inst: Instance, cfg: SearchConfig) -> float:
    r = empirical_ratio(inst, cfg.policy, exact="bnb").ratio
    # opt == 0 < alg cannot happen for these costs; treat it as uninformative
    return -math.inf if r is None else r


def run_search(cfg: SearchConfig) -> SearchResult:
    """Hill climbing with random restarts; deterministic in ``cfg.seed``.

    A mutated candidate replaces the current instance when its ratio is at
    least as large. After ``cfg.patience`` iterations without a new best the
    search restarts from a fresh random instance.
    """
    rng = random.Random(cfg.seed)
    current = _fresh(cfg, rng)
    cur_ratio = _score(current, cfg)
    best, best_ratio = current, cur_ratio
    trace = [(0, "start", cur_ratio, cur_ratio, best_ratio)]
    stale = 0
    for it in range(1, cfg.iterations + 1):
        if stale >= cfg.patience:
            cand, event, stale = _fresh(cfg, rng), "restart", 0
            ratio = _score(cand, cfg)
            current, cur_ratio = cand, ratio
        else:
            cand, event = mutate(current, rng, cfg), "mutate"
            ratio = _score(cand, cfg)
            if ratio >= cur_ratio:
                current, cur_ratio = cand, ratio
        if ratio > best_ratio:
            best, best_ratio, stale = cand, ratio, 0
        else:
            stale += 1
        trace.append((it, event, ratio, cur_ratio, best_ratio))
    return SearchResult(best, best_ratio, trace)
