"""Random instances for experiments and tests.

`random_safe_net` synchronizes state machines, one token each, so every
net it returns is safe by construction.
"""

from __future__ import annotations

import random
from itertools import combinations

from .concurrency import ConcurrencyRelation
from .net import PetriNet, Transition


def place_names(k: int) -> list[str]:
    return [f"p{i}" for i in range(1, k + 1)]


def all_graphs(k: int):
    """Every labelled conflict graph on places p1..pk (2^(k(k-1)/2) of them)."""
    places = place_names(k)
    edges = list(combinations(places, 2))
    for mask in range(1 << len(edges)):
        yield places, ConcurrencyRelation(e for i, e in enumerate(edges) if mask >> i & 1)


def random_graph(rng: random.Random, k: int, density: float | None = None):
    places = place_names(k)
    if density is None:
        density = rng.random()
    rel = ConcurrencyRelation(e for e in combinations(places, 2) if rng.random() < density)
    return places, rel


def random_safe_net(
    rng: random.Random,
    components: int = 3,
    places_per_component: int = 3,
    transitions: int = 6,
    name: str = "rand",
) -> PetriNet:
    comps = [
        [f"c{c}_{i}" for i in range(places_per_component)] for c in range(components)
    ]
    places = tuple(p for comp in comps for p in comp)
    ts = []
    for t in range(transitions):
        k = rng.randint(1, components)
        involved = rng.sample(range(components), k)
        ins, outs = set(), set()
        for c in involved:
            ins.add(rng.choice(comps[c]))
            outs.add(rng.choice(comps[c]))
        ts.append(Transition(f"t{t}", frozenset(ins), frozenset(outs)))
    marking = frozenset(rng.choice(comp) for comp in comps)
    return PetriNet(name, places, tuple(ts), marking)
