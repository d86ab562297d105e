"""Random enumerable HTN domains and a brute-force enumeration oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from radiozone.htn import Domain

MODULUS = 10


@dataclass
class ToyDomain:
    domain: Domain
    # name -> (applicable states, (a, b)) for primitives
    prims: dict
    # name -> [(applicable states, subtasks)] for compound tasks
    compounds: dict
    todo: list


def make_toy(seed: int, max_trees: int = 10_000) -> ToyDomain:
    """Layered domain over integer states mod 10; compound tasks only refer to lower
    layers, so the decomposition space is finite. Redrawn until it has at most
    ``max_trees`` trees."""
    rng = np.random.default_rng(seed)
    while True:
        prims = {}
        for i in range(int(rng.integers(2, 5))):
            ok = frozenset(int(s) for s in range(MODULUS) if rng.random() < 0.7)
            prims[f"p{i}"] = (ok, (int(rng.integers(1, 4)), int(rng.integers(0, MODULUS))))
        names = list(prims)
        compounds = {}
        for j in range(int(rng.integers(1, 4))):
            methods = []
            for _ in range(int(rng.integers(1, 4))):
                ok = frozenset(int(s) for s in range(MODULUS) if rng.random() < 0.6)
                subs = [names[int(rng.integers(len(names)))] for _ in range(int(rng.integers(1, 4)))]
                methods.append((ok, subs))
            compounds[f"c{j}"] = methods
            names.append(f"c{j}")
        todo = [names[int(rng.integers(len(names)))] for _ in range(int(rng.integers(1, 3)))]
        toy = ToyDomain(_build(prims, compounds), prims, compounds, todo)
        if count_trees(toy, toy.todo) <= max_trees:
            return toy


def _build(prims, compounds) -> Domain:
    d = Domain("toy", copy_state=lambda s: s)
    for name, (ok, (a, b)) in prims.items():
        d.declare_action(name, lambda s, a=a, b=b: (a * s + b) % MODULUS, lambda s, ok=ok: s in ok)
    for name, methods in compounds.items():
        for k, (ok, subs) in enumerate(methods):
            d.declare_method(name, lambda s, subs=subs: list(subs), lambda s, ok=ok: s in ok,
                             name=f"{name}.m{k}")
    return d


def trees(toy: ToyDomain, task: str) -> list[list[tuple]]:
    """Every decomposition tree of ``task``, flattened to events in pre-order,
    ordered by method choice with earlier subtasks varying slowest."""
    if task in toy.prims:
        return [[("act", task)]]
    out = []
    for k, (_, subs) in enumerate(toy.compounds[task]):
        for combo in itertools.product(*(trees(toy, s) for s in subs)):
            out.append([("meth", task, k)] + [e for t in combo for e in t])
    return out


def all_trees(toy: ToyDomain, todo: list[str]) -> list[list[tuple]]:
    return [[e for t in combo for e in t] for combo in itertools.product(*(trees(toy, t) for t in todo))]


def count_trees(toy: ToyDomain, todo: list[str]) -> int:
    memo: dict = {}

    def n(task):
        if task in toy.prims:
            return 1
        if task not in memo:
            memo[task] = sum(int(np.prod([n(s) for s in subs])) for _, subs in toy.compounds[task])
        return memo[task]

    return int(np.prod([n(t) for t in todo]))


def simulate(toy: ToyDomain, events: list[tuple], state: int) -> list[str] | None:
    """Actions of a tree if every method and action is applicable when reached."""
    actions = []
    for ev in events:
        if ev[0] == "meth":
            if state not in toy.compounds[ev[1]][ev[2]][0]:
                return None
        else:
            ok, (a, b) = toy.prims[ev[1]]
            if state not in ok:
                return None
            state = (a * state + b) % MODULUS
            actions.append(ev[1])
    return actions


def oracle_first_plan(toy: ToyDomain, state: int) -> list[str] | None:
    for events in all_trees(toy, toy.todo):
        acts = simulate(toy, events, state)
        if acts is not None:
            return acts
    return None
