import numpy as np
import pytest

from nln import autodiff as ad
from nln import layers as ll
from nln.ilp_core import (
    IlpModel,
    PredicateSignature,
    TaskSpec,
    TrainConfig,
    ValuationLayout,
    build_grounding_index,
    build_input_list,
    canonical_vars,
    extract_program,
    perm,
    terms,
    train_ilp,
    wire_program,
)
from nln.logic import format_atom, parse_program, verify_program


def less_than_task(n=4, t_max=4):
    return TaskSpec(
        name="less-than",
        constants=tuple(str(i) for i in range(n + 1)),
        predicates=(
            PredicateSignature("inc", 2, "extensional"),
            PredicateSignature("lt", 2, "intensional", num_vars=3),
        ),
        facts=frozenset({("inc", (str(i), str(i + 1))) for i in range(n)}),
        target="lt",
        positive=frozenset(
            (str(a), str(b)) for a in range(n + 1) for b in range(n + 1) if a < b
        ),
        negative=None,
        t_max=t_max,
    )


LT_PROGRAM = "lt(A,B) :- inc(A,B).\nlt(A,B) :- lt(A,C), inc(C,B)."


def test_perm_is_lexicographic():
    got = perm(["a", "b"], 2)
    assert got == [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert len(perm(range(3), 4)) == 81


def test_terms_counts():
    sig = PredicateSignature("p", 2, "extensional")
    vs = canonical_vars(3)
    assert len(terms(sig, vs)) == 9
    # with functions each variable contributes itself plus h and t
    assert len(terms(sig, vs, use_functions=True)) == 81


def test_input_list_order_extensional_first():
    task = less_than_task()
    atoms = build_input_list(task.signature("lt"), task)
    assert [a.pred for a in atoms[:9]] == ["inc"] * 9
    assert [a.pred for a in atoms[9:]] == ["lt"] * 9


def test_valuation_layout_positions():
    task = less_than_task()
    layout = ValuationLayout(task)
    assert layout.position("inc", ("0", "1")) == 1
    assert layout.position("lt", ("1", "0")) == 25 + 5
    # out-of-domain extensional atoms fall back to the constant slots
    assert layout.position("inc", ("9", "9")) == layout.zero_slot
    from nln.logic import UNDEFINED

    assert layout.position("lt", (UNDEFINED, "0")) == layout.zero_slot
    vec = layout.extensional_vector()
    assert vec[layout.one_slot] == 1.0 and vec[layout.zero_slot] == 0.0
    assert vec[1] == 1.0 and vec[0] == 0.0


def test_grounding_index_shape():
    task = less_than_task()
    gi = build_grounding_index(task.signature("lt"), task)
    assert gi.indices.shape == (125, 18)
    assert gi.n_head == 25 and gi.n_rest == 5


def test_wired_chain_reproduces_reference_sequence():
    task = less_than_task()
    model = IlpModel(task)
    model.networks = wire_program(parse_program(LT_PROGRAM), task)
    _, history = model.run_forward_chain_np()

    def atoms(y):
        on = np.flatnonzero(y > 0.5)
        return {(str(i // 5), str(i % 5)) for i in on}

    seq = [atoms(h["lt"]) for h in history]
    assert seq[0] == set()
    assert seq[1] == {("0", "1"), ("1", "2"), ("2", "3"), ("3", "4")}
    assert seq[2] - seq[1] == {("0", "2"), ("1", "3"), ("2", "4")}
    assert seq[3] - seq[2] == {("0", "3"), ("1", "4")}
    assert seq[4] - seq[3] == {("0", "4")}
    assert seq[4] == set(task.positive)


def test_in_place_chain_reaches_same_fixpoint():
    task = less_than_task()
    model = IlpModel(task)
    model.networks = wire_program(parse_program(LT_PROGRAM), task)
    snap, _ = model.run_forward_chain_np()
    inplace, _ = model.run_forward_chain_np(in_place=True)
    assert np.array_equal(snap["lt"] > 0.5, inplace["lt"] > 0.5)


def test_graph_and_numpy_chain_agree_on_random_weights():
    task = less_than_task(t_max=2)
    model = IlpModel(task, seed=3)
    loss = model.build_loss()
    ad.forward_eval(loss)
    graph_y = model._final_y["lt"].value
    np_y = model.run_forward_chain_np()[0]["lt"]
    np.testing.assert_allclose(graph_y, np_y, rtol=1e-12, atol=1e-12)


def test_loss_np_matches_graph_loss():
    task = less_than_task(t_max=2)
    model = IlpModel(task, seed=5)
    graph_loss = float(ad.forward_eval(model.build_loss()))
    assert abs(graph_loss - model.loss_np()) < 1e-10


def test_wired_program_has_near_zero_loss():
    task = less_than_task()
    model = IlpModel(task)
    model.networks = wire_program(parse_program(LT_PROGRAM), task)
    assert model.loss_np() < 1e-5


def test_extract_round_trip_from_wired():
    task = less_than_task()
    networks = wire_program(parse_program(LT_PROGRAM), task)
    program = extract_program(networks, task)
    report = verify_program(program, task)
    assert report == {"entails_all_positives": True, "rejects_all_negatives": True}
    bodies = {tuple(sorted(format_atom(a) for a in c.body)) for c in program.clauses}
    assert ("inc(A,B)",) in bodies


def test_train_ilp_solves_predecessor_quickly():
    task = TaskSpec(
        name="predecessor",
        constants=("0", "1", "2", "3"),
        predicates=(
            PredicateSignature("succ", 2, "extensional"),
            PredicateSignature("pred", 2, "intensional", num_vars=2),
        ),
        facts=frozenset({("succ", (str(i), str(i + 1))) for i in range(3)}),
        target="pred",
        positive=frozenset({("1", "0"), ("2", "1"), ("3", "2")}),
        negative=None,
        t_max=1,
    )
    result = train_ilp(task, TrainConfig(seed=0, max_steps=400, restarts=3))
    assert result.success
    assert verify_program(result.program, task) == {
        "entails_all_positives": True,
        "rejects_all_negatives": True,
    }
    assert result.restarts_used <= 3


def test_task_spec_validation():
    with pytest.raises(ValueError):
        PredicateSignature("p", 2, "intensional", num_vars=1)
    with pytest.raises(ValueError):
        less_than_task(t_max=0)
    task = less_than_task()
    with pytest.raises(ValueError):
        TaskSpec(
            name="bad",
            constants=task.constants,
            predicates=task.predicates,
            facts=task.facts,
            target="inc",  # extensional target
            positive=task.positive,
            negative=None,
            t_max=1,
        )


def test_negative_examples_closed_world():
    task = less_than_task()
    negs = task.negative_examples()
    assert len(negs) == 25 - len(task.positive)
    assert not negs & task.positive
