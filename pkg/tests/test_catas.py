import itertools

import pytest

from catafuse.catas import (
    AnalysisError, QueryValidationError, check_schema, classify_predicates,
    eval_cata, io_split, validate_problem, validate_query,
)
from catafuse.parser import parse_problem
from catafuse.syntax import Atom, BOOL, PRED_CATA, PRED_PROGRAM, Var, list_sort, INT


def test_classify_insertion_sort(insertion_sort):
    kinds = classify_predicates(insertion_sort)
    assert {n for n, k in kinds.items() if k == PRED_PROGRAM} == \
        {"ins_sort", "ord_ins", "append", "snoc", "empty_list"}
    assert {n for n, k in kinds.items() if k == PRED_CATA} == \
        {"ordered", "first", "last"}


def test_classify_all_program_without_catas():
    p = parse_problem("pred p(int).\np(X) :- X > 0.\n")
    assert set(classify_predicates(p).values()) == {PRED_PROGRAM}


def test_property_predicate_in_program_clause_rejected():
    p = parse_problem(
        "pred p(list(int)).\n"
        "cata len(in:, adt: list(int), out: int).\n"
        "len([], N) :- N = 0.\n"
        "len([H|T], N) :- N = N1 + 1, len(T, N1).\n"
        "p(Xs) :- len(Xs, N).\n")
    with pytest.raises(AnalysisError, match="program clause"):
        classify_predicates(p)


def test_schema_ordered_has_inner_first(insertion_sort):
    s = check_schema("ordered", insertion_sort)
    assert s.shape == "list"
    assert s.inner_preds == ("first",)
    assert s.output_sorts == (BOOL,)


def test_schema_last_degenerate_self(insertion_sort):
    s = check_schema("last", insertion_sort)
    assert s.inner_preds == ()


def test_schema_two_base_clauses_rejected():
    p = parse_problem(
        "cata len(in:, adt: list(int), out: int).\n"
        "len([], N) :- N = 0.\n"
        "len([], N) :- N = 1.\n")
    with pytest.raises(AnalysisError, match="base|recursive"):
        check_schema("len", p)


def test_schema_missing_base_rejected():
    p = parse_problem(
        "cata len(in:, adt: list(int), out: int).\n"
        "len([H|T], N) :- N = N1 + 1, len(T, N1).\n")
    with pytest.raises(AnalysisError):
        check_schema("len", p)


def test_schema_call_on_non_substructure_rejected():
    p = parse_problem(
        "cata bad(in:, adt: list(int), out: int).\n"
        "pred q(list(int)).\n"
        "bad([], N) :- N = 0.\n"
        "bad([H|T], N) :- N = N1, bad(Zs, N1).\n")
    with pytest.raises(AnalysisError, match="structural"):
        check_schema("bad", p)


def test_schema_tree_catamorphism():
    p = parse_problem(
        "cata size(in:, adt: tree(int), out: int).\n"
        "size(leaf, N) :- N = 0.\n"
        "size(node(L, X, R), N) :- N = NL + NR + 1, size(L, NL), size(R, NR).\n")
    s = check_schema("size", p)
    assert s.shape == "tree"


def test_io_split(insertion_sort):
    d = insertion_sort.preds["last"]
    xs_b = Var("Xs", list_sort(INT))
    b = Var("B", BOOL)
    l = Var("L", INT)
    a = Atom("last", (xs_b, b, l))
    xs, t, ys = io_split(a, d)
    assert xs == () and t == xs_b and ys == (b, l)

    p2 = parse_problem("cata mem(in: int, adt: list(int), out: bool).\n"
                       "mem(X, [], B) :- ~B.\n"
                       "mem(X, [H|T], B) :- B <=> (X = H \\/ B1), mem(X, T, B1).\n")
    d2 = p2.preds["mem"]
    n = Var("N", INT)
    a2 = Atom("mem", (n, xs_b, b))
    xs, t, ys = io_split(a2, d2)
    assert xs == (n,) and t == xs_b and ys == (b,)


# ---------------------------------------------------------------------------
# query validation
# ---------------------------------------------------------------------------

def test_validate_q1_and_q4(insertion_sort):
    q1 = insertion_sort.queries[0]
    spec = validate_query(q1, insertion_sort)
    assert spec.program_atom.pred == "ins_sort"
    assert [a.pred for a, *_ in spec.cata_atoms] == ["ordered", "ordered"]

    q4 = insertion_sort.queries[3]
    spec4 = validate_query(q4, insertion_sort)
    assert spec4.program_atom.pred == "snoc"
    assert len(spec4.cata_atoms) == 3


def test_validate_query_roundtrip(insertion_sort):
    for q in insertion_sort.queries:
        spec = validate_query(q, insertion_sort)
        reassembled = set(a for a, *_ in spec.cata_atoms) | {spec.program_atom}
        assert reassembled == set(q.body)
        assert spec.constraint == q.constraint


def test_validate_query_output_in_z_rejected():
    p = parse_problem(
        "pred p(list(int), int).\n"
        "cata len(in:, adt: list(int), out: int).\n"
        "len([], N) :- N = 0.\n"
        "len([H|T], N) :- N = N1 + 1, len(T, N1).\n"
        "false :- ~(N = 0), len(Xs, N), p(Xs, N).\n")
    with pytest.raises(QueryValidationError) as e:
        validate_query(p.queries[0], p)
    assert any("(iv)" in c for c in e.value.conditions)


def test_validate_query_t_not_in_z_rejected():
    p = parse_problem(
        "pred p(list(int)).\n"
        "cata len(in:, adt: list(int), out: int).\n"
        "len([], N) :- N = 0.\n"
        "len([H|T], N) :- N = N1 + 1, len(T, N1).\n"
        "false :- ~(N = 0), len(Ys, N), p(Xs).\n")
    with pytest.raises(QueryValidationError) as e:
        validate_query(p.queries[0], p)
    assert any("(v)" in c for c in e.value.conditions)


def test_validate_query_two_program_atoms_rejected():
    p = parse_problem(
        "pred p(list(int)).\npred q(list(int)).\n"
        "cata len(in:, adt: list(int), out: int).\n"
        "len([], N) :- N = 0.\n"
        "len([H|T], N) :- N = N1 + 1, len(T, N1).\n"
        "false :- ~(N = 0), len(Xs, N), p(Xs), q(Xs).\n")
    with pytest.raises(QueryValidationError) as e:
        validate_query(p.queries[0], p)
    assert any("(i)" in c for c in e.value.conditions)


def test_validate_problem_whole_fixture(insertion_sort):
    specs = validate_problem(insertion_sort)
    assert sorted(specs) == ["append", "ins_sort", "ord_ins", "snoc"]


# ---------------------------------------------------------------------------
# desk-scale brute force: functionality and totality
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("pred", ["ordered", "first", "last"])
def test_functionality_totality_lists_up_to_4(insertion_sort, pred):
    for n in range(5):
        for xs in itertools.product((0, 1), repeat=n):
            outs = eval_cata(insertion_sort, pred, xs)
            assert len(outs) == 1, (pred, xs, outs)


def test_eval_cata_values(insertion_sort):
    assert eval_cata(insertion_sort, "ordered", (0, 1)) == [(True,)]
    assert eval_cata(insertion_sort, "ordered", (1, 0)) == [(False,)]
    assert eval_cata(insertion_sort, "first", ()) == [(False, 0)]
    assert eval_cata(insertion_sort, "last", (0, 1)) == [(True, 1)]


def test_eval_cata_with_input():
    p = parse_problem("cata mem(in: int, adt: list(int), out: bool).\n"
                      "mem(X, [], B) :- ~B.\n"
                      "mem(X, [H|T], B) :- B <=> (X = H \\/ B1), mem(X, T, B1).\n")
    assert eval_cata(p, "mem", (0, 1), inputs=(1,)) == [(True,)]
    assert eval_cata(p, "mem", (0, 0), inputs=(1,)) == [(False,)]
