"""Reachability, the concurrency relation between places, and coloring bounds."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from itertools import combinations

from .errors import BudgetExceeded, NotSafe, StateLimitExceeded, UnknownPlaceInArc
from .net import PetriNet

Marking = frozenset  # set of marked places; safe nets never need counts


class ConcurrencyRelation:
    """Symmetric, irreflexive relation over places, stored as unordered pairs."""

    __slots__ = ("_pairs", "_adj")

    def __init__(self, pairs: Iterable[Iterable[str]] = ()):
        normalized = set()
        for pair in pairs:
            pair = frozenset(pair)
            if len(pair) == 2:
                normalized.add(pair)
            elif len(pair) != 1:
                raise ValueError(f"not a pair: {sorted(pair)}")
        self._pairs = frozenset(normalized)
        adj: dict[str, set[str]] = {}
        for a, b in (tuple(p) for p in self._pairs):
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        self._adj = {p: frozenset(q) for p, q in adj.items()}

    def __contains__(self, pair) -> bool:
        return frozenset(pair) in self._pairs

    def __iter__(self):
        return iter(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConcurrencyRelation) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        shown = sorted(tuple(sorted(p)) for p in self._pairs)
        return f"ConcurrencyRelation({shown})"

    def concurrent(self, p: str, q: str) -> bool:
        return p != q and frozenset((p, q)) in self._pairs

    def neighbors(self, p: str) -> frozenset[str]:
        return self._adj.get(p, frozenset())

    def degree(self, p: str) -> int:
        return len(self._adj.get(p, ()))

    def places(self) -> frozenset[str]:
        return frozenset(self._adj)

    def ordered_pairs(self, num: dict[str, int]) -> list[tuple[str, str]]:
        """Pairs as (p1, p2) with #p1 < #p2, sorted by (#p1, #p2)."""
        out = []
        for pair in self._pairs:
            a, b = sorted(pair, key=num.__getitem__)
            out.append((a, b))
        out.sort(key=lambda ab: (num[ab[0]], num[ab[1]]))
        return out


def explore_reachable(net: PetriNet, state_limit: int = 1_000_000) -> set[Marking]:
    """Breadth-first enumeration of all reachable markings (interleaving semantics)."""
    if state_limit < 1:
        raise ValueError("state_limit must be >= 1")
    start = Marking(net.initial_marking)
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for t in net.transitions:
            if not t.inputs <= m:
                continue
            rest = m - t.inputs
            clash = rest & t.outputs
            if clash:
                raise NotSafe(
                    f"firing {t.id} from {sorted(m)} puts a second token in {sorted(clash)[0]}"
                )
            succ = rest | t.outputs
            if succ not in seen:
                if len(seen) >= state_limit:
                    raise StateLimitExceeded(f"more than {state_limit} reachable markings")
                seen.add(succ)
                queue.append(succ)
    return seen


def concurrency_relation(markings: Iterable[Marking]) -> ConcurrencyRelation:
    pairs = set()
    for m in markings:
        pairs.update(combinations(sorted(m), 2))
    return ConcurrencyRelation(pairs)


def net_relation(net: PetriNet, state_limit: int = 1_000_000) -> ConcurrencyRelation:
    return concurrency_relation(explore_reachable(net, state_limit))


def parse_conc(text: str, places: Sequence[str] | None = None) -> ConcurrencyRelation:
    """Read a ``.conc`` file: one whitespace-separated pair per line."""
    known = set(places) if places is not None else None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2 or toks[0] == toks[1]:
            raise ValueError(f"line {lineno}: expected two distinct places, got {line!r}")
        if known is not None:
            for tok in toks:
                if tok not in known:
                    raise UnknownPlaceInArc(f"unknown place {tok}", lineno)
        pairs.append(toks)
    return ConcurrencyRelation(pairs)


def format_conc(rel: ConcurrencyRelation, num: dict[str, int]) -> str:
    return "".join(f"{a} {b}\n" for a, b in rel.ordered_pairs(num))


def greedy_coloring(places: Sequence[str], rel: ConcurrencyRelation) -> dict[str, int]:
    """Largest-degree-first greedy coloring, colors numbered from 1."""
    rank = {p: i for i, p in enumerate(places)}
    order = sorted(places, key=lambda p: (-rel.degree(p), rank[p]))
    color: dict[str, int] = {}
    for p in order:
        used = {color[q] for q in rel.neighbors(p) if q in color}
        c = 1
        while c in used:
            c += 1
        color[p] = c
    return color


def chromatic_number(
    places: Sequence[str], rel: ConcurrencyRelation, budget: int = 10_000_000
) -> int:
    """Exact chromatic number of the conflict graph by branch and bound.

    Vertices are colored in a fixed largest-degree-first order; a new color
    is only ever opened as the next unused one, and branches that cannot
    beat the best coloring found so far are cut. `budget` bounds the number
    of search nodes.
    """
    if not places:
        return 0
    index = {p: i for i, p in enumerate(places)}
    adj = [[index[q] for q in rel.neighbors(p) if q in index] for p in places]
    order = sorted(range(len(places)), key=lambda v: -len(adj[v]))
    best = max(greedy_coloring(places, rel).values())
    colors = [0] * len(places)
    nodes = 0

    def search(depth, used):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"chromatic number search exceeded {budget} nodes")
        if used >= best:
            return
        if depth == len(order):
            best = used
            return
        v = order[depth]
        taken = {colors[w] for w in adj[v]}
        for c in range(1, used + 1):
            if c not in taken:
                colors[v] = c
                search(depth + 1, used)
        if used + 1 < best:
            colors[v] = used + 1
            search(depth + 1, used + 1)
        colors[v] = 0

    search(0, 0)
    return best
