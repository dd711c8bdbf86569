import pytest

from nln.logic import (
    UNDEFINED,
    Atom,
    Clause,
    Const,
    Fn,
    ProgramParseError,
    Var,
    crisp_forward_chain,
    eval_fn_term,
    format_clause,
    ground_atom,
    parse_atom,
    parse_clause,
    parse_program,
    resolve_term,
    verify_program,
)
from nln.ilp_core import PredicateSignature, TaskSpec


def test_eval_fn_term_list_decomposition():
    assert eval_fn_term("h", ("a", "b", "c")) == ("a", "b")
    assert eval_fn_term("t", ("a", "b", "c")) == "c"
    assert eval_fn_term("h", ("a",)) == ()
    assert eval_fn_term("t", ("a",)) == "a"


def test_eval_fn_term_undefined_cases():
    assert eval_fn_term("h", ()) is UNDEFINED
    assert eval_fn_term("t", ()) is UNDEFINED
    assert eval_fn_term("h", "symbol") is UNDEFINED


def test_fn_rejects_unknown_function():
    with pytest.raises(ValueError):
        Fn("g", "X")


def test_resolve_term():
    binding = {"A": ("a", "b")}
    assert resolve_term(Var("A"), binding) == ("a", "b")
    assert resolve_term(Var("B"), binding) is UNDEFINED
    assert resolve_term(Const("x"), {}) == "x"
    assert resolve_term(Fn("t", "A"), binding) == "b"
    assert resolve_term(Fn("t", "B"), binding) is UNDEFINED


def test_ground_atom_undefined_becomes_none():
    atom = Atom("p", (Fn("h", "A"),))
    assert ground_atom(atom, {"A": ()}) is None
    assert ground_atom(atom, {"A": ("a", "b")}) == ("p", (("a",),))


def test_parse_atom_variants():
    assert parse_atom("lt(A,B)") == Atom("lt", (Var("A"), Var("B")))
    assert parse_atom("member(A, h(B))") == Atom("member", (Var("A"), Fn("h", "B")))
    assert parse_atom("sorted([a,b], c)") == Atom("sorted", (Const(("a", "b")), Const("c")))
    assert parse_atom("empty([])") == Atom("empty", (Const(()),))


def test_parse_clause_and_fact():
    clause = parse_clause("lt(A,B) :- lt(A,C), inc(C,B).")
    assert clause.head.pred == "lt"
    assert len(clause.body) == 2
    fact = parse_clause("zero(0).")
    assert fact.body == ()


def test_parse_errors():
    with pytest.raises(ProgramParseError):
        parse_atom("Broken(")
    with pytest.raises(ProgramParseError):
        parse_atom("p(%)")


def test_format_parse_round_trip():
    texts = [
        "lt(A,B) :- inc(A,B).",
        "lt(A,B) :- lt(A,C), inc(C,B).",
        "member(A,B) :- eq(t(B),A).",
        "sort(A,B) :- sort(h(A),C), lte(t(C),t(A)), eq(h(B),C), eq(t(A),t(B)).",
        "mul(A,B,C) :- zero(B), zero(C).",
    ]
    for text in texts:
        assert format_clause(parse_clause(text)) == text


def test_comments_and_blank_lines_ignored():
    prog = parse_program("% a comment\n\nlt(A,B) :- inc(A,B). % trailing\n")
    assert len(prog.clauses) == 1


def test_free_head_vars():
    clause = parse_clause("mul(A,B,C) :- zero(B), zero(C).")
    assert clause.free_head_vars() == ["A"]
    assert parse_clause("lt(A,B) :- inc(A,B).").free_head_vars() == []


def _chain_task():
    return TaskSpec(
        name="t",
        constants=("0", "1", "2", "3"),
        predicates=(
            PredicateSignature("succ", 2, "extensional"),
            PredicateSignature("gt", 2, "intensional", num_vars=3),
        ),
        facts=frozenset({("succ", (str(i), str(i + 1))) for i in range(3)}),
        target="gt",
        positive=frozenset({("1", "0"), ("2", "0"), ("3", "0"), ("2", "1"), ("3", "1"), ("3", "2")}),
        negative=None,
        t_max=3,
    )


def test_crisp_forward_chain_transitive_closure():
    task = _chain_task()
    prog = parse_program("gt(A,B) :- succ(B,A).\ngt(A,B) :- gt(A,C), gt(C,B).")
    facts = crisp_forward_chain(prog, task)
    derived = {args for p, args in facts if p == "gt"}
    assert derived == set(task.positive)


def test_crisp_forward_chain_respects_t_max():
    task = _chain_task()
    prog = parse_program("gt(A,B) :- succ(B,A).\ngt(A,B) :- gt(A,C), succ(B,C).")
    step1 = crisp_forward_chain(prog, task, t_max=1)
    assert ("gt", ("2", "0")) not in step1
    step2 = crisp_forward_chain(prog, task, t_max=2)
    assert ("gt", ("2", "0")) in step2


def test_free_head_var_enumeration_in_chain():
    task = _chain_task()
    prog = parse_program("gt(A,B) :- succ(B,C).")  # A unconstrained
    facts = crisp_forward_chain(prog, task, t_max=1)
    derived = {args for p, args in facts if p == "gt"}
    # every constant appears as A, every B with a successor appears
    assert derived == {(a, b) for a in task.constants for b in ("0", "1", "2")}


def test_verify_program_rejects_wrong_program():
    task = _chain_task()
    wrong = parse_program("gt(A,B) :- succ(A,B).")
    report = verify_program(wrong, task)
    assert not report["entails_all_positives"]
    assert not report["rejects_all_negatives"]


def test_verify_program_accepts_reference():
    task = _chain_task()
    prog = parse_program("gt(A,B) :- succ(B,A).\ngt(A,B) :- gt(A,C), gt(C,B).")
    report = verify_program(prog, task)
    assert report == {"entails_all_positives": True, "rejects_all_negatives": True}
