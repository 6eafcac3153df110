"""SMT-LIB 2.6 encodings of "partition the places into n conflict-free units".

Six logic fragments are supported. All of them share the same constraint
shape: concurrent places must land in different units, and place number k
may only use units ``1..min(k, n)`` (which removes the n! relabelings of
any solution without changing satisfiability).

Conventions fixed here so generated files are byte-stable:

* bit 1 of a unit bitvector is its least significant bit, so the prefix
  ``[1:u]`` is ``((_ extract u-1 0) b)``;
* the uninterpreted-function argument for place number k is ``k - 1``
  written in binary over ``max(1, ceil(log2 |P|))`` bits;
* pair constraints come first, ordered by ascending place numbers, then
  per-place constraints in place order.
"""

from __future__ import annotations

import math
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

from . import sexpr
from .concurrency import ConcurrencyRelation
from .errors import BudgetExceeded, SExprSyntaxError, SortError, WidthOverflow

FRAGMENTS = ("QF_BV", "QF_DT", "QF_IDL", "QF_UFBV", "QF_UFDT", "QF_UFIDL")
INFINITE = math.inf
SAT, UNSAT = "sat", "unsat"

BOOL, INT = "Bool", "Int"
UNIT_SORT, PLACE_SORT, UF_NAME = "Unit", "Place", "u"

# Symbols a place constructor must never shadow in the QF_UFDT encoding.
_RESERVED = {
    "_", "!", "as", "let", "exists", "forall", "match", "par",
    "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL",
    "true", "false", "not", "and", "or", "xor", "ite", "distinct",
    "Bool", "Int", UNIT_SORT, PLACE_SORT, UF_NAME,
}
_BV_SORT = re.compile(r"\(_ BitVec (\d+)\)\Z")


def bv_sort(width: int) -> str:
    return f"(_ BitVec {width})"


def bv_width(sort: str) -> int | None:
    m = _BV_SORT.match(sort)
    return int(m.group(1)) if m else None


# -- terms ---------------------------------------------------------------


@dataclass(frozen=True)
class Sym:
    """A declared constant, a datatype constructor, or a bound variable."""

    name: str


@dataclass(frozen=True)
class BvLit:
    value: int
    width: int


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class App:
    op: str
    args: tuple
    indices: tuple[int, ...] = ()


Term = Union[Sym, BvLit, IntLit, App]


def term_to_sexpr(t: Term):
    if isinstance(t, Sym):
        return t.name
    if isinstance(t, BvLit):
        return "#b" + format(t.value, f"0{t.width}b")
    if isinstance(t, IntLit):
        return str(t.value) if t.value >= 0 else ["-", str(-t.value)]
    head = ["_", t.op, *map(str, t.indices)] if t.indices else t.op
    return [head, *(term_to_sexpr(a) for a in t.args)]


def term_from_sexpr(e) -> Term:
    if isinstance(e, str):
        if e.startswith("#b"):
            return BvLit(int(e[2:], 2), len(e) - 2)
        if e.startswith("#x"):
            return BvLit(int(e[2:], 16), 4 * (len(e) - 2))
        if e.isdigit():
            return IntLit(int(e))
        return Sym(e)
    if not e:
        raise SExprSyntaxError("empty application")
    head, args = e[0], e[1:]
    if head == "-" and len(args) == 1 and isinstance(args[0], str) and args[0].isdigit():
        return IntLit(-int(args[0]))
    if head == "as" and len(args) == 2 and isinstance(args[0], str):
        return Sym(args[0])
    if isinstance(head, list):
        if len(head) < 2 or head[0] != "_":
            raise SExprSyntaxError(f"unsupported head {sexpr.dumps(head)}")
        return App(head[1], tuple(map(term_from_sexpr, args)), tuple(int(i) for i in head[2:]))
    return App(head, tuple(map(term_from_sexpr, args)))


def walk(t: Term):
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from walk(a)


def count_ops(t: Term) -> int:
    return sum(isinstance(s, App) for s in walk(t))


def _disjunction(terms: list[Term]) -> Term:
    return terms[0] if len(terms) == 1 else App("or", tuple(terms))


# -- scripts -------------------------------------------------------------


@dataclass(frozen=True)
class EncodingConfig:
    fragment: str
    num_units: int
    emit_status_hint: bool = False
    max_width: int = 4096

    def __post_init__(self):
        frag = self.fragment.upper()
        if frag not in FRAGMENTS:
            raise ValueError(f"unknown fragment {self.fragment!r}; expected one of {FRAGMENTS}")
        object.__setattr__(self, "fragment", frag)
        if self.num_units < 1:
            raise ValueError("num_units must be >= 1")

    @property
    def uses_uf(self) -> bool:
        return self.fragment.startswith("QF_UF")

    @property
    def theory(self) -> str:
        """'BV', 'DT' or 'IDL' with the uninterpreted-function prefix removed."""
        return self.fragment[5:] if self.uses_uf else self.fragment[3:]


@dataclass(frozen=True)
class SmtScript:
    logic: str
    datatypes: tuple[tuple[str, tuple[str, ...]], ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    functions: tuple[tuple[str, tuple[str, ...], str], ...] = ()
    assertions: tuple[Term, ...] = ()
    info: tuple[tuple[str, str], ...] = ()

    def constructors(self) -> dict[str, str]:
        return {c: name for name, ctors in self.datatypes for c in ctors}

    def status(self) -> str | None:
        return dict(self.info).get(":status")


@dataclass(frozen=True)
class PlaceVars:
    """How each place's unit value is addressed inside one script."""

    terms: dict[str, Term] = field(default_factory=dict)
    # UF fragments: the argument value fed to the function for each place
    keys: dict[str, object] = field(default_factory=dict)
    ctor_names: dict[str, str] = field(default_factory=dict)


def uf_domain_width(place_count: int) -> int:
    return max(1, (place_count - 1).bit_length())


def place_constructors(places: Sequence[str], num_units: int) -> dict[str, str]:
    """Constructor symbol for each place of the ``Place`` datatype.

    Place identifiers are used verbatim unless they would collide with a
    reserved word or another symbol of the script, in which case the quoted
    form ``|p:<id>|`` is used (``:`` never occurs in a place identifier).
    """
    taken = _RESERVED | {f"u{i}" for i in range(1, num_units + 1)}
    return {p: (p if p not in taken else f"|p:{p}|") for p in places}


def place_vars(places: Sequence[str], num: Mapping[str, int], cfg: EncodingConfig) -> PlaceVars:
    n, theory = cfg.num_units, cfg.theory
    if not cfg.uses_uf:
        prefix = "b_p" if theory == "BV" else "x_p"
        return PlaceVars(terms={p: Sym(f"{prefix}{num[p]}") for p in places})
    if theory == "BV":
        w = uf_domain_width(len(places))
        keys = {p: num[p] - 1 for p in places}
        return PlaceVars({p: App(UF_NAME, (BvLit(keys[p], w),)) for p in places}, keys)
    if theory == "DT":
        ctors = place_constructors(places, n)
        return PlaceVars({p: App(UF_NAME, (Sym(ctors[p]),)) for p in places}, dict(ctors), ctors)
    keys = {p: num[p] for p in places}
    return PlaceVars({p: App(UF_NAME, (IntLit(keys[p]),)) for p in places}, keys)


def encode(
    places: Sequence[str],
    rel: ConcurrencyRelation,
    num: Mapping[str, int],
    cfg: EncodingConfig,
) -> SmtScript:
    """Build the SMT script for `cfg.fragment` with `cfg.num_units` units."""
    places = sorted(places, key=num.__getitem__)
    n, theory = cfg.num_units, cfg.theory
    if theory == "BV" and n > cfg.max_width:
        raise WidthOverflow(f"unit bitvector width {n} exceeds maximum {cfg.max_width}")
    if cfg.fragment == "QF_UFBV" and uf_domain_width(len(places)) > cfg.max_width:
        raise WidthOverflow("function domain width exceeds maximum")

    pv = place_vars(places, num, cfg)
    x = pv.terms
    datatypes, constants, functions = [], [], []
    asserts: list[Term] = []
    units = [Sym(f"u{i}") for i in range(1, n + 1)]

    if theory == "BV":
        value_sort = bv_sort(n)
    elif theory == "DT":
        value_sort = UNIT_SORT
        datatypes.append((UNIT_SORT, tuple(u.name for u in units)))
    else:
        value_sort = INT

    if not cfg.uses_uf:
        constants = [(x[p].name, value_sort) for p in places]
    elif theory == "BV":
        functions = [(UF_NAME, (bv_sort(uf_domain_width(len(places))),), value_sort)]
    elif theory == "DT":
        datatypes.append((PLACE_SORT, tuple(pv.ctor_names[p] for p in places)))
        functions = [(UF_NAME, (PLACE_SORT,), value_sort)]
    else:
        functions = [(UF_NAME, (INT,), INT)]

    for p1, p2 in rel.ordered_pairs(num):
        if p1 not in x or p2 not in x:
            continue
        if theory == "BV":
            asserts.append(App("=", (App("bvand", (x[p1], x[p2])), BvLit(0, n))))
        else:
            asserts.append(App("distinct", (x[p1], x[p2])))

    for p in places:
        k = num[p]
        if theory == "BV":
            prefixes = [
                App("distinct", (App("extract", (x[p],), (u - 1, 0)), BvLit(0, u)))
                for u in range(1, min(k, n) + 1)
            ]
            asserts.append(_disjunction(prefixes))
        elif theory == "DT":
            # the Unit datatype already bounds places numbered n and above
            if k < n:
                asserts.append(_disjunction([App("=", (x[p], units[u])) for u in range(k)]))
        else:
            # integers are unbounded: places numbered n and above get 1..n
            top = k if k < n else n
            asserts.append(_disjunction([App("=", (x[p], IntLit(u))) for u in range(1, top + 1)]))

    info = [(":smt-lib-version", "2.6")]
    if cfg.emit_status_hint:
        info.append((":status", oracle_sat(places, rel, num, cfg)))
    return SmtScript(
        logic=cfg.fragment,
        datatypes=tuple(datatypes),
        constants=tuple(constants),
        functions=tuple(functions),
        assertions=tuple(asserts),
        info=tuple(info),
    )


def print_smtlib(script: SmtScript) -> str:
    lines = [f"(set-info {k} {v})" for k, v in script.info]
    lines.append(f"(set-logic {script.logic})")
    for name, ctors in script.datatypes:
        body = " ".join(f"({c})" for c in ctors)
        lines.append(f"(declare-datatypes (({name} 0)) (({body})))")
    for name, sort in script.constants:
        lines.append(f"(declare-fun {name} () {sort})")
    for name, args, result in script.functions:
        lines.append(f"(declare-fun {name} ({' '.join(args)}) {result})")
    for t in script.assertions:
        lines.append(f"(assert {sexpr.dumps(term_to_sexpr(t))})")
    lines += ["(check-sat)", "(exit)"]
    return "\n".join(lines) + "\n"


def parse_smtlib(text: str) -> SmtScript:
    """Read back a script in the subset `print_smtlib` produces."""
    logic = None
    info, datatypes, constants, functions, asserts = [], [], [], [], []
    for cmd in sexpr.parse_all(text):
        if not isinstance(cmd, list) or not cmd or not isinstance(cmd[0], str):
            raise SExprSyntaxError(f"not a command: {sexpr.dumps(cmd)}")
        head, args = cmd[0], cmd[1:]
        if head == "set-info":
            info.append((args[0], sexpr.dumps(args[1]) if len(args) > 1 else ""))
        elif head == "set-logic":
            logic = args[0]
        elif head == "declare-datatypes":
            heads, bodies = args
            for (name, _arity), body in zip(heads, bodies):
                ctors = []
                for ctor in body:
                    if not isinstance(ctor, list) or len(ctor) != 1:
                        raise SExprSyntaxError("only nullary constructors are supported")
                    ctors.append(ctor[0])
                datatypes.append((name, tuple(ctors)))
        elif head == "declare-fun":
            name, arg_sorts, result = args
            arg_sorts = tuple(sexpr.dumps(s) for s in arg_sorts)
            if arg_sorts:
                functions.append((name, arg_sorts, sexpr.dumps(result)))
            else:
                constants.append((name, sexpr.dumps(result)))
        elif head == "declare-const":
            constants.append((args[0], sexpr.dumps(args[1])))
        elif head == "assert":
            asserts.append(term_from_sexpr(args[0]))
        elif head in ("check-sat", "exit", "get-model", "set-option"):
            pass
        else:
            raise SExprSyntaxError(f"unsupported command {head}")
    if logic is None:
        raise SExprSyntaxError("missing set-logic")
    return SmtScript(
        logic=logic,
        datatypes=tuple(datatypes),
        constants=tuple(constants),
        functions=tuple(functions),
        assertions=tuple(asserts),
        info=tuple(info),
    )


# -- structural checks -----------------------------------------------------


def sort_of(t: Term, script: SmtScript, _env=None) -> str:
    env = _env if _env is not None else _sort_env(script)
    consts, ctors, funcs = env
    if isinstance(t, Sym):
        if t.name in consts:
            return consts[t.name]
        if t.name in ctors:
            return ctors[t.name]
        raise SortError(f"undeclared symbol {t.name}")
    if isinstance(t, BvLit):
        if t.width < 1 or not 0 <= t.value < 2**t.width:
            raise SortError(f"bad bitvector literal {t}")
        return bv_sort(t.width)
    if isinstance(t, IntLit):
        return INT
    arg_sorts = [sort_of(a, script, env) for a in t.args]
    if t.op in ("=", "distinct"):
        if len(arg_sorts) < 2 or len(set(arg_sorts)) != 1:
            raise SortError(f"{t.op} over mismatched sorts {arg_sorts}")
        return BOOL
    if t.op in ("or", "and"):
        if any(s != BOOL for s in arg_sorts):
            raise SortError(f"{t.op} over non-Boolean arguments")
        return BOOL
    if t.op == "bvand":
        if len(set(arg_sorts)) != 1 or bv_width(arg_sorts[0]) is None:
            raise SortError(f"bvand over {arg_sorts}")
        return arg_sorts[0]
    if t.op == "extract":
        (s,) = arg_sorts
        w = bv_width(s)
        hi, lo = t.indices
        if w is None or not (w > hi >= lo >= 0):
            raise SortError(f"extract {hi} {lo} from {s}")
        return bv_sort(hi - lo + 1)
    if t.op in funcs:
        params, result = funcs[t.op]
        if tuple(arg_sorts) != params:
            raise SortError(f"{t.op} applied to {arg_sorts}, expects {list(params)}")
        return result
    raise SortError(f"undeclared operator {t.op}")


def _sort_env(script: SmtScript):
    consts = dict(script.constants)
    funcs = {name: (tuple(args), result) for name, args, result in script.functions}
    return consts, script.constructors(), funcs


def check_script(script: SmtScript) -> list[str]:
    """Problems with declarations or sorts; an empty list means well-formed."""
    problems = []
    known_sorts = {BOOL, INT} | {name for name, _ in script.datatypes}

    def sort_ok(s):
        return s in known_sorts or (bv_width(s) or 0) >= 1

    seen = set()
    symbols = [c for _, ctors in script.datatypes for c in ctors]
    symbols += [name for name, _ in script.constants] + [f[0] for f in script.functions]
    for s in symbols:
        if s in seen:
            problems.append(f"symbol {s} declared twice")
        seen.add(s)
    for name, sort in script.constants:
        if not sort_ok(sort):
            problems.append(f"constant {name} has unknown sort {sort}")
    for name, args, result in script.functions:
        for s in (*args, result):
            if not sort_ok(s):
                problems.append(f"function {name} uses unknown sort {s}")
    env = _sort_env(script)
    for i, t in enumerate(script.assertions):
        try:
            s = sort_of(t, script, env)
        except SortError as exc:
            problems.append(f"assertion {i}: {exc}")
            continue
        if s != BOOL:
            problems.append(f"assertion {i} has sort {s}, not Bool")
    return problems


# -- metrics -------------------------------------------------------------


@dataclass(frozen=True)
class FormulaStats:
    logic: str
    num_variables: int | None
    card: int | float | None
    card_in: int | float | None
    card_out: int | float | None
    num_asserts: int
    num_ops: int

    def row(self) -> dict[str, str]:
        def fmt(value, sort_is_bv):
            if value is None:
                return "-"
            if value == INFINITE:
                return "inf"
            if sort_is_bv:
                return f"2^{value.bit_length() - 1}"
            return str(value)

        bv = "BV" in self.logic
        return {
            "logic": self.logic,
            "#variables": "-" if self.num_variables is None else str(self.num_variables),
            "card": fmt(self.card, bv),
            "card_in": fmt(self.card_in, bv),
            "card_out": fmt(self.card_out, bv),
            "#asserts": str(self.num_asserts),
            "#ops": str(self.num_ops),
        }


def sort_cardinality(sort: str, script: SmtScript) -> int | float:
    w = bv_width(sort)
    if w is not None:
        return 2**w
    if sort == INT:
        return INFINITE
    for name, ctors in script.datatypes:
        if name == sort:
            return len(ctors)
    raise SortError(f"unknown sort {sort}")


def formula_stats(script: SmtScript) -> FormulaStats:
    """Column metrics of a generated formula.

    #variables/card describe the declared constants (fragments without an
    uninterpreted function); card_in/card_out describe the function's
    domain and codomain. #ops counts every application node in the
    assertions; constants and literals are leaves.
    """
    num_ops = sum(count_ops(t) for t in script.assertions)
    if script.functions:
        _, args, result = script.functions[0]
        return FormulaStats(
            script.logic, None, None,
            sort_cardinality(args[0], script), sort_cardinality(result, script),
            len(script.assertions), num_ops,
        )
    sorts = {s for _, s in script.constants}
    if len(sorts) > 1:
        raise SortError(f"constants of several sorts: {sorted(sorts)}")
    card = sort_cardinality(sorts.pop(), script) if sorts else None
    return FormulaStats(
        script.logic, len(script.constants), card, None, None, len(script.assertions), num_ops
    )


# -- semantics -----------------------------------------------------------


def evaluate(t: Term, script: SmtScript, values: Mapping[str, object]):
    """Evaluate `t` under `values`.

    `values` maps constant names to Python values (ints for bitvectors and
    integers, constructor names for datatypes) and the function name to a
    mapping from argument value to result.
    """
    if isinstance(t, Sym):
        if t.name in values:
            return values[t.name]
        if t.name in script.constructors():
            return t.name
        raise KeyError(t.name)
    if isinstance(t, (BvLit, IntLit)):
        return t.value
    args = [evaluate(a, script, values) for a in t.args]
    if t.op == "=":
        return all(a == args[0] for a in args)
    if t.op == "distinct":
        return len(set(args)) == len(args)
    if t.op == "or":
        return any(args)
    if t.op == "and":
        return all(args)
    if t.op == "bvand":
        return args[0] & args[1]
    if t.op == "extract":
        hi, lo = t.indices
        return (args[0] >> lo) & ((1 << (hi - lo + 1)) - 1)
    return values[t.op][args[0]]


def satisfies(script: SmtScript, values: Mapping[str, object]) -> bool:
    return all(evaluate(t, script, values) for t in script.assertions)


def unit_domains(
    places: Sequence[str], num: Mapping[str, int], cfg: EncodingConfig
) -> dict[str, range]:
    """Units each place may take under the fragment's constraint set.

    For the bitvector fragments a place may hold a set of units, but only
    the prefix rule constrains it, and shrinking every set to its smallest
    member keeps concurrent sets disjoint; so the lowest unit, which the
    prefix rule puts in ``1..min(#p, n)``, is a complete witness.
    """
    n = cfg.num_units
    out = {}
    for p in places:
        k = num[p]
        if cfg.theory == "BV":
            out[p] = range(1, min(k, n) + 1)
        elif cfg.theory == "DT":
            out[p] = range(1, k + 1) if k < n else range(1, n + 1)
        else:
            out[p] = range(1, (k if k < n else n) + 1)
    return out


def oracle_coloring(
    places: Sequence[str],
    rel: ConcurrencyRelation,
    num: Mapping[str, int],
    cfg: EncodingConfig,
    budget: int = 5_000_000,
    break_symmetry: bool = True,
) -> dict[str, int] | None:
    """Exhaustive backtracking search for a unit per place, or None."""
    order = sorted(places, key=num.__getitem__)
    if break_symmetry:
        domains = unit_domains(order, num, cfg)
    else:
        domains = {p: range(1, cfg.num_units + 1) for p in order}
    earlier = {p: [q for q in rel.neighbors(p) if q in num and num[q] < num[p]] for p in order}
    color: dict[str, int] = {}
    nodes = 0

    def search(i):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"oracle search exceeded {budget} nodes")
        if i == len(order):
            return True
        p = order[i]
        taken = {color[q] for q in earlier[p]}
        for c in domains[p]:
            if c not in taken:
                color[p] = c
                if search(i + 1):
                    return True
        color.pop(p, None)
        return False

    return dict(color) if search(0) else None


def oracle_sat(
    places: Sequence[str],
    rel: ConcurrencyRelation,
    num: Mapping[str, int],
    cfg: EncodingConfig,
    budget: int = 5_000_000,
    break_symmetry: bool = True,
) -> str:
    found = oracle_coloring(places, rel, num, cfg, budget, break_symmetry)
    return SAT if found is not None else UNSAT


def witness_values(
    places: Sequence[str],
    num: Mapping[str, int],
    cfg: EncodingConfig,
    coloring: Mapping[str, int],
) -> dict[str, object]:
    """Model values (in `evaluate`'s format) realizing a unit coloring."""
    pv = place_vars(places, num, cfg)

    def value(c):
        if cfg.theory == "BV":
            return 1 << (c - 1)
        if cfg.theory == "DT":
            return f"u{c}"
        return c

    if not cfg.uses_uf:
        return {pv.terms[p].name: value(coloring[p]) for p in places}
    return {UF_NAME: {pv.keys[p]: value(coloring[p]) for p in places}}
