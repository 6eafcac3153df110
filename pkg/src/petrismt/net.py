"""Ordinary safe place/transition nets and the line-oriented ``.pnet`` format.

Grammar (UTF-8, ``#`` starts a comment)::

    net <name>
    places <id> <id> ...              # cumulative, may repeat
    transition <id>: <ids> -> <ids>
    marking <id> <id> ...             # cumulative, may repeat

Arcs are sets, so every parsed net is ordinary by construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DuplicateIdentifier,
    EmptyNet,
    NetSyntaxError,
    UnknownPlaceInArc,
)

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")


@dataclass(frozen=True)
class Transition:
    id: str
    inputs: frozenset[str]
    outputs: frozenset[str]


@dataclass(frozen=True)
class PetriNet:
    name: str
    places: tuple[str, ...]
    transitions: tuple[Transition, ...] = ()
    initial_marking: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.places:
            raise EmptyNet("net has no places")
        if len(set(self.places)) != len(self.places):
            raise DuplicateIdentifier("duplicate place identifier")
        known = set(self.places)
        for t in self.transitions:
            unknown = (t.inputs | t.outputs) - known
            if unknown:
                raise UnknownPlaceInArc(
                    f"transition {t.id} uses undeclared place {sorted(unknown)[0]}"
                )
        if not self.initial_marking <= known:
            raise UnknownPlaceInArc(
                f"marking uses undeclared place {sorted(self.initial_marking - known)[0]}"
            )


def _check_ident(token, lineno):
    if not IDENT.match(token):
        raise NetSyntaxError(f"invalid identifier {token!r}", lineno)
    return token


def parse_net(text: str, default_name: str = "net") -> PetriNet:
    name = None
    places: list[str] = []
    place_lines: dict[str, int] = {}
    transitions: list[tuple[Transition, int]] = []
    seen_transitions: set[str] = set()
    marking: list[tuple[str, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "net":
            if name is not None:
                raise NetSyntaxError("net name given twice", lineno)
            if not rest or len(rest.split()) != 1:
                raise NetSyntaxError("expected 'net <name>'", lineno)
            name = _check_ident(rest, lineno)
        elif keyword == "places":
            if not rest:
                raise NetSyntaxError("'places' needs at least one identifier", lineno)
            for tok in rest.split():
                _check_ident(tok, lineno)
                if tok in place_lines:
                    raise DuplicateIdentifier(f"place {tok} declared twice", lineno)
                place_lines[tok] = lineno
                places.append(tok)
        elif keyword == "transition":
            head, colon, arcs = rest.partition(":")
            if not colon or "->" not in arcs:
                raise NetSyntaxError("expected 'transition <id>: <ins> -> <outs>'", lineno)
            tid = _check_ident(head.strip(), lineno)
            if tid in seen_transitions:
                raise DuplicateIdentifier(f"transition {tid} declared twice", lineno)
            seen_transitions.add(tid)
            lhs, _, rhs = arcs.partition("->")
            ins = [_check_ident(t, lineno) for t in lhs.split()]
            outs = [_check_ident(t, lineno) for t in rhs.split()]
            if len(set(ins)) != len(ins) or len(set(outs)) != len(outs):
                raise NetSyntaxError(f"repeated arc in transition {tid}", lineno)
            transitions.append((Transition(tid, frozenset(ins), frozenset(outs)), lineno))
        elif keyword == "marking":
            for tok in rest.split():
                marking.append((_check_ident(tok, lineno), lineno))
        else:
            raise NetSyntaxError(f"unknown keyword {keyword!r}", lineno)

    if not places:
        raise EmptyNet("net has no places")
    # Arc checks happen after the whole file is read so places may follow transitions.
    for t, lineno in transitions:
        for p in sorted(t.inputs | t.outputs):
            if p not in place_lines:
                raise UnknownPlaceInArc(f"transition {t.id} uses undeclared place {p}", lineno)
    seen_marked = set()
    for p, lineno in marking:
        if p not in place_lines:
            raise UnknownPlaceInArc(f"marking uses undeclared place {p}", lineno)
        if p in seen_marked:
            raise NetSyntaxError(f"place {p} marked twice", lineno)
        seen_marked.add(p)

    return PetriNet(
        name=name or default_name,
        places=tuple(places),
        transitions=tuple(t for t, _ in transitions),
        initial_marking=frozenset(seen_marked),
    )


def format_net(net: PetriNet) -> str:
    """Print `net` in the ``.pnet`` format; `parse_net` inverts this exactly."""
    order = {p: i for i, p in enumerate(net.places)}

    def ids(ps):
        return " ".join(sorted(ps, key=order.__getitem__))

    lines = [f"net {net.name}", "places " + " ".join(net.places)]
    for t in net.transitions:
        lhs, rhs = ids(t.inputs), ids(t.outputs)
        lines.append(f"transition {t.id}: {lhs} -> {rhs}".replace("  ", " ").rstrip())
    lines.append(("marking " + ids(net.initial_marking)).rstrip())
    return "\n".join(lines) + "\n"


def numbering(net_or_places) -> dict[str, int]:
    """Map each place to its 1-based position in declaration order."""
    places = net_or_places.places if isinstance(net_or_places, PetriNet) else net_or_places
    return {p: i for i, p in enumerate(places, start=1)}
