import pytest

from catafuse.parser import ParseError, parse_problem
from catafuse.syntax import FEq, PRED_CATA, PRED_PROGRAM, Var, conjuncts


def test_fixture_counts(insertion_sort):
    assert len(insertion_sort.program) == 10
    assert len(insertion_sort.properties) == 6
    assert len(insertion_sort.queries) == 4
    kinds = {n: d.kind for n, d in insertion_sort.preds.items()}
    assert kinds["ins_sort"] == PRED_PROGRAM
    assert kinds["ordered"] == PRED_CATA


def test_declarations_only():
    p = parse_problem("pred p(int).\ncata c(in:, adt: list(int), out: bool).\n")
    assert p.program == [] and p.queries == []


def test_body_atom_normalization_duplicate_var():
    p = parse_problem(
        "pred snoc(list(int), int, list(int)).\n"
        "pred q(list(int)).\n"
        "q(Xs1) :- snoc(Xs1, Y, Xs1).\n")
    (clause,) = p.program
    (atom,) = clause.body
    args = atom.args
    assert len(set(args)) == 3, "arguments must be distinct variables"
    eqs = [f for f in conjuncts(clause.constraint) if isinstance(f, FEq)]
    assert len(eqs) == 1, "displaced duplicate becomes a term equality"


def test_body_atom_normalization_pattern_arg():
    p = parse_problem(
        "pred p(list(int)).\n"
        "pred q(int).\n"
        "q(X) :- p([X]).\n")
    (clause,) = p.program
    assert all(isinstance(t, Var) for t in clause.body[0].args)
    assert any(isinstance(f, FEq) for f in conjuncts(clause.constraint))


def test_heads_keep_patterns(insertion_sort):
    heads = [c.head for c in insertion_sort.program if c.head.pred == "snoc"]
    assert any(not isinstance(t, Var) for h in heads for t in h.args)


def test_normalization_is_invertible():
    """Substituting the introduced equalities back reconstructs the raw atom,
    so the normalized clause is equivalent modulo the fresh variables."""
    from catafuse.syntax import Subst
    p = parse_problem(
        "pred p(list(int), int).\n"
        "pred q(int).\n"
        "q(X) :- p([X], X + 1).\n")
    (clause,) = p.program
    mapping = {}
    for f in conjuncts(clause.constraint):
        mapping[f.lhs] = f.rhs
    restored = Subst(mapping).atom(clause.body[0])
    # structural inversion: the first argument is the singleton list of X,
    # the second the incremented variable
    a0, a1 = restored.args
    from catafuse.syntax import Ctor, lin
    assert isinstance(a0, Ctor) and a0.ctor == "cons"
    assert a0.args[0] == clause.head.args[0]
    assert a1 == lin({clause.head.args[0]: 1}, 1)


def test_equality_resolved_by_sort():
    p = parse_problem(
        "pred p(int, bool, list(int)).\n"
        "p(X, B, L) :- X = 3, B = (X > 2), L = [X].\n")
    fs = conjuncts(p.program[0].constraint)
    kinds = sorted(type(f).__name__ for f in fs)
    assert kinds == ["FComp", "FEq", "FIff"]


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_problem("pred p(int).\np(X) :- .\n")
    assert e.value.line == 2


def test_undeclared_predicate():
    with pytest.raises(ParseError, match="undeclared predicate"):
        parse_problem("q(X).\n")


def test_sort_mismatch():
    with pytest.raises(ParseError, match="sort mismatch|sorts"):
        parse_problem("pred p(int).\npred q(list(int)).\n"
                      "p(X) :- q(X).\n")


def test_duplicate_query_rejected():
    with pytest.raises(ParseError, match="duplicate query"):
        parse_problem(
            "pred p(list(int)).\n"
            "cata len(in:, adt: list(int), out: int).\n"
            "len([], N) :- N = 0.\n"
            "len([H|T], N) :- N = N1 + 1, len(T, N1).\n"
            "false :- ~(N = 0), len(Xs, N), p(Xs).\n"
            "false :- ~(N > 0), len(Xs, N), p(Xs).\n")


def test_reserved_true_namespace():
    with pytest.raises(ParseError, match="reserved"):
        parse_problem("pred true_list_int(list(int)).\n")


def test_custom_adt_declaration():
    p = parse_problem(
        "sort pair = mk(int, int).\n"
        "pred p(pair).\n"
        "p(mk(A, B)) :- A =< B.\n")
    assert p.sorts.known(next(iter({d.arg_sorts[0] for d in p.preds.values()})))


def test_comments_and_ite():
    p = parse_problem(
        "% a comment\n"
        "pred p(int, int).\n"
        "p(X, Y) :- Y = ite(X > 0, X, 0 - X).  % abs\n")
    assert len(p.program) == 1
