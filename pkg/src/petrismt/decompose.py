"""From solver models to flat, unit-safe NUPN decompositions."""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

from .concurrency import ConcurrencyRelation, greedy_coloring
from .encoder import EncodingConfig, oracle_sat
from .errors import ConflictDetected, InvalidPartition, SolverInconclusive, ValueOutOfRange
from .net import PetriNet

UnitAssignment = dict[str, frozenset[int]]
Partition = dict[str, int]


def assignment_from_model(
    model: Mapping[str, object],
    cfg: EncodingConfig,
    num: Mapping[str, int],
) -> UnitAssignment:
    """Allowed units of every place, read off the parsed model.

    `model` is keyed as `solver.parse_model` returns it: by variable name
    (``b_pK``/``x_pK``) for fragments without a function, by place otherwise.
    """
    n = cfg.num_units
    out: UnitAssignment = {}
    for p, k in num.items():
        prefix = "b_p" if cfg.theory == "BV" else "x_p"
        key = p if cfg.uses_uf else f"{prefix}{k}"
        value = model[key]
        if cfg.theory == "BV":
            if not isinstance(value, int) or value <= 0 or value >= 1 << n:
                raise ValueOutOfRange(f"{p}: bitvector {value!r} selects no unit in 1..{n}")
            out[p] = frozenset(u for u in range(1, n + 1) if value >> (u - 1) & 1)
        elif cfg.theory == "DT":
            if not (isinstance(value, str) and value[:1] == "u" and value[1:].isdigit()):
                raise ValueOutOfRange(f"{p}: {value!r} is not a unit constructor")
            unit = int(value[1:])
            if not 1 <= unit <= n:
                raise ValueOutOfRange(f"{p}: unit {unit} outside 1..{n}")
            out[p] = frozenset([unit])
        else:
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= n:
                raise ValueOutOfRange(f"{p}: integer {value!r} outside 1..{n}")
            out[p] = frozenset([value])
    return out


def ffd_repair(
    assign: Mapping[str, frozenset[int]],
    rel: ConcurrencyRelation,
    num: Mapping[str, int] | None = None,
) -> Partition:
    """Collapse multi-unit assignments into a partition, first-fit-decreasing.

    Places are taken by decreasing conflict degree (ties by place number)
    and each goes to the first allowed unit not already holding a
    concurrent place. When concurrent places have disjoint unit sets, as
    any model of the encoding guarantees, that is the smallest allowed unit.
    """
    if num is None:
        num = {p: i for i, p in enumerate(assign, start=1)}
    order = sorted(assign, key=lambda p: (-rel.degree(p), num[p]))
    part: Partition = {}
    for p in order:
        allowed = sorted(assign[p])
        if not allowed:
            raise ConflictDetected(f"{p} has no allowed unit")
        busy = {part[q] for q in rel.neighbors(p) if q in part}
        fits = [u for u in allowed if u not in busy]
        if not fits:
            raise ConflictDetected(
                f"every allowed unit of {p} already holds a concurrent place; "
                "the assignment does not come from a valid model"
            )
        part[p] = fits[0]
    return part


@dataclass(frozen=True)
class Violation:
    kind: str  # "unmapped", "range" or "conflict"
    places: tuple[str, ...]
    unit: int | None = None

    def __str__(self):
        where = "" if self.unit is None else f" (unit {self.unit})"
        return f"{self.kind}: {' '.join(self.places)}{where}"


def validate_partition(
    part: Mapping[str, int],
    rel: ConcurrencyRelation,
    n: int,
    places: Sequence[str] | None = None,
) -> list[Violation]:
    """Every problem with `part`; an empty list means it is a valid partition."""
    problems = []
    for p in places if places is not None else ():
        if p not in part:
            problems.append(Violation("unmapped", (p,)))
    for p, u in part.items():
        if not 1 <= u <= n:
            problems.append(Violation("range", (p,), u))
    for pair in sorted(tuple(sorted(p)) for p in rel):
        a, b = pair
        if a in part and b in part and part[a] == part[b]:
            problems.append(Violation("conflict", pair, part[a]))
    return problems


@dataclass(frozen=True)
class Nupn:
    root: str
    units: tuple[tuple[str, tuple[str, ...]], ...]
    drops_empty_units: bool = True

    def unit_of(self) -> dict[str, str]:
        return {p: uid for uid, ps in self.units for p in ps}


def build_nupn(part: Mapping[str, int], net: PetriNet, rel: ConcurrencyRelation, n: int | None = None) -> Nupn:
    if n is None:
        n = max(part.values(), default=1)
    problems = validate_partition(part, rel, n, net.places)
    if problems:
        raise InvalidPartition("; ".join(map(str, problems)))
    used = sorted(set(part.values()))
    dense = {u: i for i, u in enumerate(used, start=1)}
    members: dict[int, list[str]] = {i: [] for i in dense.values()}
    for p in net.places:
        members[dense[part[p]]].append(p)
    return Nupn("root", tuple((f"u{i}", tuple(members[i])) for i in sorted(members)))


def format_nupn(nupn: Nupn) -> str:
    lines = [nupn.root] + [f"unit {uid}: {' '.join(ps)}" for uid, ps in nupn.units]
    return "\n".join(lines) + "\n"


def emit_nupn(part: Mapping[str, int], net: PetriNet, rel: ConcurrencyRelation, n: int | None = None) -> str:
    """Text of the flat NUPN: a root line, then one ``unit uK:`` line per leaf.

    Empty units are dropped and the rest renumbered densely; places are
    listed in declaration order.
    """
    return format_nupn(build_nupn(part, net, rel, n))


def parse_nupn(text: str) -> Nupn:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "root":
        raise ValueError("NUPN text must start with a 'root' line")
    units = []
    for ln in lines[1:]:
        head, colon, rest = ln.partition(":")
        kw, _, uid = head.partition(" ")
        if kw != "unit" or not colon:
            raise ValueError(f"bad unit line {ln!r}")
        units.append((uid.strip(), tuple(rest.split())))
    return Nupn("root", tuple(units))


def unit_safety_violations(nupn: Nupn, rel: ConcurrencyRelation) -> list[tuple[str, str, str]]:
    """(unit, p, q) for every pair of concurrent places sharing a leaf unit."""
    bad = []
    for uid, ps in nupn.units:
        for i, p in enumerate(ps):
            for q in ps[i + 1 :]:
                if rel.concurrent(p, q):
                    bad.append((uid, p, q))
    return bad


def find_min_units(
    places: Sequence[str],
    rel: ConcurrencyRelation,
    decide: Callable[[int], str],
) -> int:
    """Smallest n for which `decide(n)` answers "sat".

    Binary search over ``[1, greedy bound]``; the greedy coloring bound is
    always satisfiable so it is never queried. Any answer other than
    "sat"/"unsat" aborts the search.
    """
    lo = 1
    hi = max(greedy_coloring(places, rel).values(), default=1)
    while lo < hi:
        mid = (lo + hi) // 2
        verdict = decide(mid)
        if verdict == "sat":
            hi = mid
        elif verdict == "unsat":
            lo = mid + 1
        else:
            raise SolverInconclusive(f"decision procedure answered {verdict!r} at n={mid}")
    return lo


def oracle_decider(
    places: Sequence[str],
    rel: ConcurrencyRelation,
    num: Mapping[str, int],
    fragment: str = "QF_DT",
) -> Callable[[int], str]:
    return lambda n: oracle_sat(places, rel, num, EncodingConfig(fragment, n))


def solver_decider(
    places: Sequence[str],
    rel: ConcurrencyRelation,
    num: Mapping[str, int],
    fragment: str,
    spec,
    workdir,
) -> Callable[[int], str]:
    """Decide each n by encoding it to a file under `workdir` and running `spec`."""
    from pathlib import Path

    from .encoder import encode, print_smtlib
    from .solver import run_solver

    def decide(n: int) -> str:
        script = encode(places, rel, num, EncodingConfig(fragment, n))
        path = Path(workdir) / f"min_{fragment}_n{n}.smt2"
        path.write_text(print_smtlib(script))
        return run_solver(spec, path).status

    return decide
