import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_colorable, rel_of
from petrismt import sexpr
from petrismt.concurrency import ConcurrencyRelation, chromatic_number
from petrismt.encoder import (
    FRAGMENTS,
    INFINITE,
    App,
    BvLit,
    EncodingConfig,
    IntLit,
    SmtScript,
    Sym,
    check_script,
    encode,
    evaluate,
    formula_stats,
    oracle_coloring,
    oracle_sat,
    parse_smtlib,
    print_smtlib,
    satisfies,
    witness_values,
)
from petrismt.errors import BudgetExceeded, WidthOverflow
from petrismt.generators import random_graph

PAIR = (["p1", "p2"], rel_of(("p1", "p2")), {"p1": 1, "p2": 2})


def b(name):
    return Sym(name)


def test_qf_dt_pair_example():
    s = encode(*PAIR, EncodingConfig("QF_DT", 2))
    assert s.datatypes == (("Unit", ("u1", "u2")),)
    assert s.constants == (("x_p1", "Unit"), ("x_p2", "Unit"))
    assert s.assertions == (
        App("distinct", (b("x_p1"), b("x_p2"))),
        App("=", (b("x_p1"), b("u1"))),
    )


def test_qf_bv_pair_example():
    s = encode(*PAIR, EncodingConfig("QF_BV", 2))
    ext = lambda v, hi: App("extract", (b(v),), (hi, 0))
    assert s.constants == (("b_p1", "(_ BitVec 2)"), ("b_p2", "(_ BitVec 2)"))
    assert s.assertions == (
        App("=", (App("bvand", (b("b_p1"), b("b_p2"))), BvLit(0, 2))),
        App("distinct", (ext("b_p1", 0), BvLit(0, 1))),
        App("or", (
            App("distinct", (ext("b_p2", 0), BvLit(0, 1))),
            App("distinct", (ext("b_p2", 1), BvLit(0, 2))),
        )),
    )


def test_qf_bv_text():
    text = print_smtlib(encode(*PAIR, EncodingConfig("QF_BV", 2)))
    assert text.splitlines() == [
        "(set-info :smt-lib-version 2.6)",
        "(set-logic QF_BV)",
        "(declare-fun b_p1 () (_ BitVec 2))",
        "(declare-fun b_p2 () (_ BitVec 2))",
        "(assert (= (bvand b_p1 b_p2) #b00))",
        "(assert (distinct ((_ extract 0 0) b_p1) #b0))",
        "(assert (or (distinct ((_ extract 0 0) b_p2) #b0) (distinct ((_ extract 1 0) b_p2) #b00)))",
        "(check-sat)",
        "(exit)",
    ]


def test_uf_encodings_replace_place_terms():
    places, rel = ["p1", "p2", "p3"], rel_of(("p1", "p3"))
    num = {"p1": 1, "p2": 2, "p3": 3}
    bv = encode(places, rel, num, EncodingConfig("QF_UFBV", 2))
    # ceil(log2 3) = 2 argument bits, place k -> k - 1
    assert bv.functions == (("u", ("(_ BitVec 2)",), "(_ BitVec 2)"),)
    assert bv.assertions[0] == App(
        "=", (App("bvand", (App("u", (BvLit(0, 2),)), App("u", (BvLit(2, 2),)))), BvLit(0, 2))
    )
    dt = encode(places, rel, num, EncodingConfig("QF_UFDT", 2))
    assert dt.datatypes == (("Unit", ("u1", "u2")), ("Place", ("p1", "p2", "p3")))
    assert dt.assertions[0] == App("distinct", (App("u", (b("p1"),)), App("u", (b("p3"),))))
    idl = encode(places, rel, num, EncodingConfig("QF_UFIDL", 2))
    assert idl.functions == (("u", ("Int",), "Int"),)
    assert idl.assertions[1] == App("=", (App("u", (IntLit(1),)), IntLit(1)))


def test_qf_idl_bounds_every_place():
    places = ["a", "b", "c"]
    num = {"a": 1, "b": 2, "c": 3}
    s = encode(places, ConcurrencyRelation(), num, EncodingConfig("QF_IDL", 2))
    x = lambda k, u: App("=", (b(f"x_p{k}"), IntLit(u)))
    assert s.assertions == (
        x(1, 1),
        App("or", (x(2, 1), x(2, 2))),
        App("or", (x(3, 1), x(3, 2))),
    )


def test_place_constructor_collisions_are_quoted():
    places = ["u1", "or", "Place", "q"]
    num = {p: i for i, p in enumerate(places, start=1)}
    s = encode(places, ConcurrencyRelation(), num, EncodingConfig("QF_UFDT", 2))
    assert dict(s.datatypes)["Place"] == ("|p:u1|", "|p:or|", "|p:Place|", "q")
    assert not check_script(s)
    assert parse_smtlib(print_smtlib(s)) == s


def test_empty_assertions_print():
    text = print_smtlib(SmtScript("QF_IDL"))
    assert text.count("(set-logic QF_IDL)") == 1
    assert "(check-sat)" in text


@pytest.mark.parametrize("fragment", FRAGMENTS)
def test_print_is_deterministic_and_round_trips(fragment):
    places, rel = random_graph(random.Random(4), 7, 0.4)
    num = {p: i for i, p in enumerate(places, start=1)}
    s = encode(places, rel, num, EncodingConfig(fragment, 3, emit_status_hint=True))
    text = print_smtlib(s)
    assert text == print_smtlib(encode(places, rel, num, EncodingConfig(fragment, 3, True)))
    assert parse_smtlib(text) == s
    assert all(isinstance(e, list) for e in sexpr.parse_all(text))


def test_qf_dt_round_trip_declares_unit():
    text = print_smtlib(encode(*PAIR, EncodingConfig("QF_DT", 2)))
    decls = [e for e in sexpr.parse_all(text) if e[0] == "declare-datatypes"]
    assert decls == [["declare-datatypes", [["Unit", "0"]], [[["u1"], ["u2"]]]]]


def test_status_hint_uses_oracle(triangle):
    places, rel = triangle
    num = {p: i for i, p in enumerate(places, start=1)}
    for fragment in FRAGMENTS:
        assert encode(places, rel, num, EncodingConfig(fragment, 2, True)).status() == "unsat"
        assert encode(places, rel, num, EncodingConfig(fragment, 3, True)).status() == "sat"


def test_width_overflow():
    with pytest.raises(WidthOverflow):
        encode(*PAIR, EncodingConfig("QF_BV", 9, max_width=8))
    places = [f"p{i}" for i in range(1, 300)]
    num = {p: i for i, p in enumerate(places, start=1)}
    with pytest.raises(WidthOverflow):
        encode(places, ConcurrencyRelation(), num, EncodingConfig("QF_UFBV", 2, max_width=8))


def test_config_validation():
    assert EncodingConfig("qf_ufidl", 1).fragment == "QF_UFIDL"
    with pytest.raises(ValueError):
        EncodingConfig("QF_LIA", 2)
    with pytest.raises(ValueError):
        EncodingConfig("QF_BV", 0)


# -- stats ---------------------------------------------------------------


def test_stats_bv_example():
    st_ = formula_stats(encode(*PAIR, EncodingConfig("QF_BV", 2)))
    # ops by hand: (= (bvand ..) ..) -> 2; (distinct (extract ..) ..) -> 2; or + 2 * 2 -> 5
    assert (st_.num_variables, st_.card, st_.num_asserts, st_.num_ops) == (2, 4, 3, 9)
    assert st_.card_in is None and st_.card_out is None
    assert st_.row()["card"] == "2^2"


def test_stats_dt_example():
    st_ = formula_stats(encode(*PAIR, EncodingConfig("QF_DT", 2)))
    assert (st_.num_variables, st_.card, st_.num_asserts, st_.num_ops) == (2, 2, 2, 2)


@pytest.mark.parametrize("count, width", [(2, 1), (56, 6), (64, 6), (65, 7), (80, 7), (128, 7), (129, 8)])
def test_ufbv_domain_card(count, width):
    places = [f"p{i}" for i in range(1, count + 1)]
    num = {p: i for i, p in enumerate(places, start=1)}
    st_ = formula_stats(encode(places, ConcurrencyRelation(), num, EncodingConfig("QF_UFBV", 3)))
    assert st_.card_in == 2**width
    assert st_.card_out == 8
    assert st_.num_variables is None and st_.card is None


def test_idl_cards_infinite():
    st_ = formula_stats(encode(*PAIR, EncodingConfig("QF_IDL", 2)))
    assert st_.card == INFINITE and st_.row()["card"] == "inf"
    uf = formula_stats(encode(*PAIR, EncodingConfig("QF_UFIDL", 2)))
    assert uf.card_in == uf.card_out == INFINITE


# -- well-formedness and semantics ------------------------------------------


def test_check_script_flags_problems():
    s = SmtScript(
        "QF_BV",
        constants=(("a", "(_ BitVec 2)"), ("c", "(_ BitVec 3)")),
        assertions=(
            App("=", (Sym("a"), Sym("c"))),
            App("=", (Sym("zz"), Sym("a"))),
            App("bvand", (Sym("a"), Sym("a"))),
            App("distinct", (App("extract", (Sym("a"),), (2, 0)), BvLit(0, 3))),
        ),
    )
    problems = check_script(s)
    assert len(problems) == 4
    assert "undeclared symbol zz" in problems[1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8), st.integers(1, 5), st.sampled_from(FRAGMENTS))
def test_generated_scripts_are_well_formed(seed, k, n, fragment):
    places, rel = random_graph(random.Random(seed), k)
    num = {p: i for i, p in enumerate(places, start=1)}
    s = encode(places, rel, num, EncodingConfig(fragment, n))
    assert check_script(s) == []
    assert parse_smtlib(print_smtlib(s)) == s


def _candidate_values(cfg, width):
    n = cfg.num_units
    if cfg.theory == "BV":
        return range(1 << n)
    if cfg.theory == "DT":
        return [f"u{i}" for i in range(1, n + 1)]
    return range(-1, n + 2)


def brute_script_sat(places, num, cfg, script):
    """Exhaustive model search straight over the script's variables."""
    dom = list(_candidate_values(cfg, None))
    for combo in itertools.product(dom, repeat=len(places)):
        if cfg.uses_uf:
            if cfg.theory == "BV":
                keys = [num[p] - 1 for p in places]
            elif cfg.theory == "DT":
                keys = [p for p in places]
            else:
                keys = [num[p] for p in places]
            values = {"u": dict(zip(keys, combo))}
        else:
            prefix = "b_p" if cfg.theory == "BV" else "x_p"
            values = {f"{prefix}{num[p]}": v for p, v in zip(places, combo)}
        if satisfies(script, values):
            return True
    return False


@pytest.mark.parametrize("fragment", FRAGMENTS)
def test_script_semantics_match_oracle_exhaustively(fragment):
    """On all graphs with 3 places, brute-force models of the script itself agree with oracle_sat."""
    from petrismt.generators import all_graphs

    for places, rel in all_graphs(3):
        num = {p: i for i, p in enumerate(places, start=1)}
        for n in (1, 2, 3):
            cfg = EncodingConfig(fragment, n)
            script = encode(places, rel, num, cfg)
            expected = brute_colorable(places, rel, n)
            assert brute_script_sat(places, num, cfg, script) == expected
            assert oracle_sat(places, rel, num, cfg) == ("sat" if expected else "unsat")


def test_bv_set_models_need_not_be_partitions():
    # p2 isolated may hold both units in a QF_BV model
    places, rel = ["p1", "p2"], ConcurrencyRelation()
    num = {"p1": 1, "p2": 2}
    s = encode(places, rel, num, EncodingConfig("QF_BV", 2))
    assert satisfies(s, {"b_p1": 0b01, "b_p2": 0b11})
    assert not satisfies(s, {"b_p1": 0b10, "b_p2": 0b11})


@pytest.mark.parametrize("n", range(1, 7))
def test_prefix_disjunction_equals_collapsed_form(n):
    for k in range(1, n + 2):
        m = min(k, n)
        term = encode(["p"], ConcurrencyRelation(), {"p": k}, EncodingConfig("QF_BV", n)).assertions[-1]
        for v in range(1 << n):
            expanded = evaluate(term, SmtScript("QF_BV"), {f"b_p{k}": v})
            assert expanded == (v & ((1 << m) - 1) != 0)


# -- oracle --------------------------------------------------------------


def test_oracle_examples(triangle):
    places, rel = triangle
    num = {p: i for i, p in enumerate(places, start=1)}
    assert oracle_sat(places, rel, num, EncodingConfig("QF_DT", 3)) == "sat"
    assert oracle_sat(places, rel, num, EncodingConfig("QF_DT", 2)) == "unsat"
    assert oracle_sat(places, ConcurrencyRelation(), num, EncodingConfig("QF_BV", 1)) == "sat"


def test_oracle_witness_satisfies_script():
    places, rel = random_graph(random.Random(11), 8, 0.5)
    num = {p: i for i, p in enumerate(places, start=1)}
    n = chromatic_number(places, rel)
    for fragment in FRAGMENTS:
        cfg = EncodingConfig(fragment, n)
        coloring = oracle_coloring(places, rel, num, cfg)
        assert all(coloring[p] <= min(num[p], n) for p in places)
        script = encode(places, rel, num, cfg)
        assert satisfies(script, witness_values(places, num, cfg, coloring))


def test_oracle_budget():
    places, rel = random_graph(random.Random(5), 14, 0.3)
    num = {p: i for i, p in enumerate(places, start=1)}
    with pytest.raises(BudgetExceeded):
        oracle_sat(places, rel, num, EncodingConfig("QF_DT", 4), budget=5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 9))
def test_symmetry_breaking_never_changes_verdict(seed, k):
    places, rel = random_graph(random.Random(seed), k)
    num = {p: i for i, p in enumerate(places, start=1)}
    for n in range(1, k + 2):
        for fragment in ("QF_BV", "QF_DT", "QF_IDL"):
            cfg = EncodingConfig(fragment, n)
            assert oracle_sat(places, rel, num, cfg) == oracle_sat(
                places, rel, num, cfg, break_symmetry=False
            )
