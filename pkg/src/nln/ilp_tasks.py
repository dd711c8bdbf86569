"""Builtin ILP task registry plus the JSON task-file format.

Constants are strings (symbols, decimal digits) or tuples of strings (lists).
The registry covers four domains -- arithmetic, lists, family trees, graphs --
plus recursive decimal addition/multiplication and list sorting.  Task
formulations here are standard textbook encodings sized to small constant
domains (at most 10 constants except for sorting); each factory documents its
background knowledge and examples inline.
"""

from __future__ import annotations

import itertools
import json

import jsonschema

from .ilp_core import PredicateSignature, TaskSpec

TASK_SCHEMA = {
    "type": "object",
    "required": ["schema", "name", "constants", "predicates", "facts", "target", "positive", "t_max"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": 1},
        "name": {"type": "string"},
        "constants": {"type": "array", "items": {"$ref": "#/$defs/const"}},
        "predicates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "arity", "kind"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "arity": {"type": "integer", "minimum": 1},
                    "kind": {"enum": ["extensional", "intensional"]},
                    "num_vars": {"type": "integer", "minimum": 0},
                    "form": {"enum": ["dnf", "cnf", "xor"]},
                    "hidden": {"type": "integer", "minimum": 1},
                },
            },
        },
        "facts": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "string"}],
                "minItems": 2,
            },
        },
        "target": {"type": "string"},
        "positive": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/const"}}},
        "negative": {
            "type": ["array", "null"],
            "items": {"type": "array", "items": {"$ref": "#/$defs/const"}},
        },
        "t_max": {"type": "integer", "minimum": 1},
        "use_functions": {"type": "boolean"},
    },
    "$defs": {
        "const": {
            "oneOf": [
                {"type": "string"},
                {"type": "array", "items": {"type": "string"}},
            ]
        }
    },
}


def _const_to_json(c):
    return list(c) if isinstance(c, tuple) else c


def _const_from_json(c):
    return tuple(c) if isinstance(c, list) else c


def task_to_json(task):
    """Serialize a TaskSpec to the versioned task-file format."""
    doc = {
        "schema": 1,
        "name": task.name,
        "constants": [_const_to_json(c) for c in task.constants],
        "predicates": [
            {k: v for k, v in (
                ("name", p.name), ("arity", p.arity), ("kind", p.kind),
                ("num_vars", p.num_vars), ("form", p.form), ("hidden", p.hidden),
            )}
            for p in task.predicates
        ],
        "facts": sorted(
            ([pred] + [_const_to_json(a) for a in args] for pred, args in task.facts),
            key=json.dumps,
        ),
        "target": task.target,
        "positive": sorted(
            ([_const_to_json(a) for a in args] for args in task.positive), key=json.dumps
        ),
        "negative": None if task.negative is None
        else sorted(
            ([_const_to_json(a) for a in args] for args in task.negative), key=json.dumps
        ),
        "t_max": task.t_max,
        "use_functions": task.use_functions,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def task_from_json(text):
    doc = json.loads(text)
    jsonschema.validate(doc, TASK_SCHEMA)
    return TaskSpec(
        name=doc["name"],
        constants=tuple(_const_from_json(c) for c in doc["constants"]),
        predicates=tuple(
            PredicateSignature(
                p["name"], p["arity"], p["kind"],
                num_vars=p.get("num_vars", 0),
                form=p.get("form", "dnf"),
                hidden=p.get("hidden", 4),
            )
            for p in doc["predicates"]
        ),
        facts=frozenset(
            (f[0], tuple(_const_from_json(a) for a in f[1:])) for f in doc["facts"]
        ),
        target=doc["target"],
        positive=frozenset(tuple(_const_from_json(a) for a in args) for args in doc["positive"]),
        negative=None if doc.get("negative") is None
        else frozenset(tuple(_const_from_json(a) for a in args) for args in doc["negative"]),
        t_max=doc["t_max"],
        use_functions=doc.get("use_functions", False),
    )


# ---------------------------------------------------------------------------
# Shared background generators


def number_constants(n):
    return tuple(str(i) for i in range(n + 1))


def succ_facts(n):
    return {("succ", (str(i), str(i + 1))) for i in range(n)}


def inc_facts(n):
    return {("inc", (str(i), str(i + 1))) for i in range(n)}


def gen_arith_background(n):
    """zero/succ background over {0..n}."""
    return {("zero", ("0",))} | succ_facts(n)


def gen_list_domain(symbols, max_len, with_empty=True, distinct=True):
    """All lists over the symbols up to max_len, as tuples.

    With distinct=True only permutations of distinct symbols are produced
    (the sorting domain); otherwise all words (the member/length domains).
    """
    lists = [()] if with_empty else []
    for k in range(1, max_len + 1):
        gen = itertools.permutations(symbols, k) if distinct else itertools.product(symbols, repeat=k)
        lists.extend(gen)
    return tuple(lists)


def _ext(name, arity):
    return PredicateSignature(name, arity, "extensional")


def _intens(name, arity, num_vars, hidden=4):
    return PredicateSignature(name, arity, "intensional", num_vars=num_vars, hidden=hidden)


# ---------------------------------------------------------------------------
# Arithmetic domain


def make_predecessor():
    n = 5
    return TaskSpec(
        name="predecessor",
        constants=number_constants(n),
        predicates=(_ext("succ", 2), _intens("pred", 2, 2)),
        facts=frozenset(succ_facts(n)),
        target="pred",
        positive=frozenset((str(i + 1), str(i)) for i in range(n)),
        negative=None,
        t_max=1,
    )


def make_even():
    n = 6
    return TaskSpec(
        name="even",
        constants=number_constants(n),
        predicates=(_ext("zero", 1), _ext("succ", 2), _intens("even", 1, 3)),
        facts=frozenset(gen_arith_background(n)),
        target="even",
        positive=frozenset((str(i),) for i in range(0, n + 1, 2)),
        negative=None,
        t_max=4,
    )


def make_even_odd():
    """Even via an invented auxiliary odd/1 predicate (one-step recursion)."""
    n = 6
    return TaskSpec(
        name="even-odd",
        constants=number_constants(n),
        predicates=(
            _ext("zero", 1),
            _ext("succ", 2),
            _intens("odd", 1, 2),
            _intens("even", 1, 2),
        ),
        facts=frozenset(gen_arith_background(n)),
        target="even",
        positive=frozenset((str(i),) for i in range(0, n + 1, 2)),
        negative=None,
        t_max=8,
    )


def make_less_than():
    n = 4
    return TaskSpec(
        name="less-than",
        constants=number_constants(n),
        predicates=(_ext("inc", 2), _intens("lt", 2, 3)),
        facts=frozenset(inc_facts(n)),
        target="lt",
        positive=frozenset((str(a), str(b)) for a in range(n + 1) for b in range(n + 1) if a < b),
        negative=None,
        t_max=n,
    )


def make_fizz():
    """Multiples of three, learnable as a double-successor recursion."""
    n = 6
    return TaskSpec(
        name="fizz",
        constants=number_constants(n),
        predicates=(_ext("zero", 1), _ext("succ", 2), _intens("fizz", 1, 4)),
        facts=frozenset(gen_arith_background(n)),
        target="fizz",
        positive=frozenset((str(i),) for i in range(0, n + 1, 3)),
        negative=None,
        t_max=3,
    )


def make_buzz():
    """Multiples of five; an auxiliary plus-two predicate keeps var counts low."""
    n = 6
    return TaskSpec(
        name="buzz",
        constants=number_constants(n),
        predicates=(
            _ext("zero", 1),
            _ext("succ", 2),
            _intens("aux", 2, 3),
            _intens("buzz", 1, 4),
        ),
        facts=frozenset(gen_arith_background(n)),
        target="buzz",
        positive=frozenset((str(i),) for i in range(0, n + 1, 5)),
        negative=None,
        t_max=3,
    )


# ---------------------------------------------------------------------------
# List domain


def make_member():
    symbols = ("a", "b")
    lists = gen_list_domain(symbols, 2, with_empty=False, distinct=False)
    constants = symbols + lists
    eq = {("eq", (c, c)) for c in constants}
    positive = {(x, lst) for lst in lists for x in lst}
    return TaskSpec(
        name="member",
        constants=constants,
        predicates=(_ext("eq", 2), _intens("member", 2, 2)),
        facts=frozenset(eq),
        target="member",
        positive=frozenset(positive),
        negative=None,
        t_max=2,
        use_functions=True,
    )


def make_length():
    symbols = ("a", "b")
    lists = gen_list_domain(symbols, 2, with_empty=True, distinct=False)
    numbers = ("0", "1", "2")
    constants = lists + numbers
    facts = {("zero", ("0",)), ("succ", ("0", "1")), ("succ", ("1", "2")), ("empty", ((),))}
    positive = {(lst, str(len(lst))) for lst in lists}
    return TaskSpec(
        name="length",
        constants=constants,
        predicates=(
            _ext("zero", 1),
            _ext("succ", 2),
            _ext("empty", 1),
            _intens("length", 2, 3),
        ),
        facts=frozenset(facts),
        target="length",
        positive=frozenset(positive),
        negative=None,
        t_max=3,
        use_functions=True,
    )


# ---------------------------------------------------------------------------
# Family-tree domain


_FAMILY_PARENT = {
    ("parent", ("ann", "bob")),
    ("parent", ("ann", "cara")),
    ("parent", ("bob", "dan")),
    ("parent", ("dan", "eve")),
    ("parent", ("eve", "finn")),
}
_FAMILY_MALE = {("male", (m,)) for m in ("bob", "dan", "finn")}
_FAMILY_CONSTANTS = ("ann", "bob", "cara", "dan", "eve", "finn")


def make_son():
    return TaskSpec(
        name="son",
        constants=_FAMILY_CONSTANTS,
        predicates=(_ext("parent", 2), _ext("male", 1), _intens("son", 2, 2)),
        facts=frozenset(_FAMILY_PARENT | _FAMILY_MALE),
        target="son",
        positive=frozenset({("bob", "ann"), ("dan", "bob"), ("finn", "eve")}),
        negative=None,
        t_max=1,
    )


def make_father():
    return TaskSpec(
        name="father",
        constants=_FAMILY_CONSTANTS,
        predicates=(_ext("parent", 2), _ext("male", 1), _intens("father", 2, 2)),
        facts=frozenset(_FAMILY_PARENT | _FAMILY_MALE),
        target="father",
        positive=frozenset({("bob", "dan"), ("dan", "eve")}),
        negative=None,
        t_max=1,
    )


def make_grandparent():
    return TaskSpec(
        name="grandparent",
        constants=_FAMILY_CONSTANTS,
        predicates=(_ext("parent", 2), _intens("gp", 2, 3)),
        facts=frozenset(_FAMILY_PARENT),
        target="gp",
        positive=frozenset({("ann", "dan"), ("bob", "eve"), ("dan", "finn")}),
        negative=None,
        t_max=1,
    )


def make_husband():
    facts = {
        ("father", ("bob", "cara")),
        ("father", ("dan", "finn")),
        ("mother", ("ann", "cara")),
        ("mother", ("eve", "finn")),
    }
    return TaskSpec(
        name="husband",
        constants=_FAMILY_CONSTANTS,
        predicates=(_ext("father", 2), _ext("mother", 2), _intens("husband", 2, 3)),
        facts=frozenset(facts),
        target="husband",
        positive=frozenset({("bob", "ann"), ("dan", "eve")}),
        negative=None,
        t_max=1,
    )


def make_uncle():
    facts = {
        ("brother", ("bob", "ann")),
        ("brother", ("finn", "eve")),
        ("parent", ("ann", "cara")),
        ("parent", ("eve", "dan")),
    }
    return TaskSpec(
        name="uncle",
        constants=_FAMILY_CONSTANTS,
        predicates=(_ext("brother", 2), _ext("parent", 2), _intens("uncle", 2, 3)),
        facts=frozenset(facts),
        target="uncle",
        positive=frozenset({("bob", "cara"), ("finn", "dan")}),
        negative=None,
        t_max=1,
    )


def make_relatedness():
    """Two disconnected families; explicit negatives are the cross pairs.

    Positives are the distinct within-component pairs.  Reflexive pairs are
    left unlabeled: the symmetric-transitive closure may or may not derive
    them, and labeling them either way over-constrains the solution.
    """
    comp1 = ("a1", "b1", "c1", "d1")
    comp2 = ("a2", "b2", "c2")
    facts = {
        ("parent", ("a1", "b1")),
        ("parent", ("a1", "c1")),
        ("parent", ("c1", "d1")),
        ("parent", ("a2", "b2")),
        ("parent", ("b2", "c2")),
    }
    positive = {(x, y) for x in comp1 for y in comp1 if x != y}
    positive |= {(x, y) for x in comp2 for y in comp2 if x != y}
    negative = {(x, y) for x in comp1 for y in comp2} | {(x, y) for x in comp2 for y in comp1}
    return TaskSpec(
        name="relatedness",
        constants=comp1 + comp2,
        predicates=(_ext("parent", 2), _intens("related", 2, 3)),
        facts=frozenset(facts),
        target="related",
        positive=frozenset(positive),
        negative=frozenset(negative),
        t_max=4,
    )


# ---------------------------------------------------------------------------
# Graph domain


def _sym(edges):
    return {("edge", (a, b)) for a, b in edges} | {("edge", (b, a)) for a, b in edges}


def make_undirected_edge():
    edges = {("n1", "n2"), ("n3", "n2"), ("n3", "n4")}
    positive = {(a, b) for a, b in edges} | {(b, a) for a, b in edges}
    return TaskSpec(
        name="undirected-edge",
        constants=("n1", "n2", "n3", "n4"),
        predicates=(_ext("edge", 2), _intens("uedge", 2, 2)),
        facts=frozenset({("edge", e) for e in edges}),
        target="uedge",
        positive=frozenset(positive),
        negative=None,
        t_max=1,
    )


def make_adjacent_to_red():
    nodes = ("n1", "n2", "n3", "n4", "n5")
    facts = _sym({("n1", "n2"), ("n2", "n3"), ("n3", "n4"), ("n4", "n5")})
    facts |= {("red", ("n2",)), ("red", ("n5",))}
    return TaskSpec(
        name="adjacent-to-red",
        constants=nodes,
        predicates=(_ext("edge", 2), _ext("red", 1), _intens("adjred", 1, 2)),
        facts=frozenset(facts),
        target="adjred",
        positive=frozenset({("n1",), ("n3",), ("n4",)}),
        negative=None,
        t_max=1,
    )


def make_two_children():
    nodes = ("n1", "n2", "n3", "n4")
    edges = {("n1", "n2"), ("n1", "n3"), ("n3", "n4"), ("n3", "n1")}
    neq = {("neq", (a, b)) for a in nodes for b in nodes if a != b}
    return TaskSpec(
        name="two-children",
        constants=nodes,
        predicates=(_ext("edge", 2), _ext("neq", 2), _intens("tc", 1, 3)),
        facts=frozenset({("edge", e) for e in edges} | neq),
        target="tc",
        positive=frozenset({("n1",), ("n3",)}),
        negative=None,
        t_max=1,
    )


def make_graph_colouring():
    """Detect nodes that share a colour with a neighbour (a bad colouring)."""
    nodes = ("n1", "n2", "n3", "n4")
    facts = _sym({("n1", "n2"), ("n2", "n3"), ("n3", "n4")})
    facts |= {
        ("colour", ("n1", "red")),
        ("colour", ("n2", "green")),
        ("colour", ("n3", "red")),
        ("colour", ("n4", "red")),
    }
    return TaskSpec(
        name="graph-colouring",
        constants=nodes + ("red", "green"),
        predicates=(_ext("edge", 2), _ext("colour", 2), _intens("bad", 1, 3)),
        facts=frozenset(facts),
        target="bad",
        positive=frozenset({("n3",), ("n4",)}),
        negative=None,
        t_max=1,
    )


def _closure(edges, nodes):
    reach = {n: {b for a, b in edges if a == n} for n in nodes}
    changed = True
    while changed:
        changed = False
        for n in nodes:
            extra = set().union(*(reach[m] for m in reach[n])) - reach[n] if reach[n] else set()
            if extra:
                reach[n] |= extra
                changed = True
    return {(a, b) for a in nodes for b in reach[a]}


def make_connectedness():
    nodes = ("n1", "n2", "n3", "n4", "n5")
    edges = {("n1", "n2"), ("n2", "n3"), ("n3", "n4"), ("n1", "n5")}
    return TaskSpec(
        name="connectedness",
        constants=nodes,
        predicates=(_ext("edge", 2), _intens("conn", 2, 3)),
        facts=frozenset({("edge", e) for e in edges}),
        target="conn",
        positive=frozenset(_closure(edges, nodes)),
        negative=None,
        t_max=4,
    )


def make_cyclic():
    nodes = ("n1", "n2", "n3", "n4", "n5")
    edges = {("n1", "n2"), ("n2", "n3"), ("n3", "n1"), ("n4", "n5")}
    return TaskSpec(
        name="cyclic",
        constants=nodes,
        predicates=(
            _ext("edge", 2),
            _intens("conn", 2, 3),
            _intens("cyclic", 1, 1),
        ),
        facts=frozenset({("edge", e) for e in edges}),
        target="cyclic",
        positive=frozenset({("n1",), ("n2",), ("n3",)}),
        negative=None,
        t_max=5,
    )


# ---------------------------------------------------------------------------
# Recursive decimal arithmetic


def make_add():
    n = 5
    consts = number_constants(n)
    facts = {("zero", ("0",))} | inc_facts(n) | {("eq", (c, c)) for c in consts}
    positive = {
        (str(a), str(b), str(a + b))
        for a in range(n + 1)
        for b in range(n + 1)
        if a + b <= n
    }
    return TaskSpec(
        name="add",
        constants=consts,
        predicates=(
            _ext("zero", 1),
            _ext("inc", 2),
            _ext("eq", 2),
            _intens("add", 3, 5, hidden=4),
        ),
        facts=frozenset(facts),
        target="add",
        positive=frozenset(positive),
        negative=None,
        t_max=n + 1,
    )


def make_mul():
    """Multiplication with the addition relation in the background."""
    n = 3
    consts = number_constants(n)
    facts = {("zero", ("0",))} | inc_facts(n)
    facts |= {
        ("plus", (str(a), str(b), str(a + b)))
        for a in range(n + 1)
        for b in range(n + 1)
        if a + b <= n
    }
    positive = {
        (str(a), str(b), str(a * b))
        for a in range(n + 1)
        for b in range(n + 1)
        if a * b <= n
    }
    return TaskSpec(
        name="mul",
        constants=consts,
        predicates=(
            _ext("zero", 1),
            _ext("inc", 2),
            _ext("plus", 3),
            _intens("mul", 3, 5, hidden=4),
        ),
        facts=frozenset(facts),
        target="mul",
        positive=frozenset(positive),
        negative=None,
        t_max=2 * n + 2,
    )


# ---------------------------------------------------------------------------
# Sorting


SORT_SYMBOLS = ("a", "b", "c", "d")


def _sort_facts(constants, symbols):
    order = {s: i for i, s in enumerate(symbols)}
    facts = {("empty", ((),))}
    facts |= {("eq", (c, c)) for c in constants}
    # symbol-level ordering lives outside the constant domain; ground atoms
    # over symbols resolve through the fact set directly
    facts |= {("eq", (s, s)) for s in symbols}
    facts |= {("gt", (x, y)) for x in symbols for y in symbols if order[x] > order[y]}
    facts |= {("lte", (x, y)) for x in symbols for y in symbols if order[x] <= order[y]}
    return facts


def _make_sort(symbols, max_len, name):
    lists = gen_list_domain(symbols, max_len, with_empty=True, distinct=True)
    positive = {(lst, tuple(sorted(lst))) for lst in lists}
    return TaskSpec(
        name=name,
        constants=lists,
        predicates=(
            _ext("empty", 1),
            _ext("eq", 2),
            _ext("gt", 2),
            _ext("lte", 2),
            _intens("sort", 2, 4, hidden=6),
        ),
        facts=frozenset(_sort_facts(lists, symbols)),
        target="sort",
        positive=frozenset(positive),
        negative=None,
        t_max=max_len + 1,
        use_functions=True,
    )


def make_sort():
    """Full 41-constant domain: permutations of up to 3 of 4 ordered symbols."""
    return _make_sort(SORT_SYMBOLS, 3, "sort")


def make_sort_small():
    """Reduced domain for gradient training: lists up to length 2."""
    return _make_sort(("a", "b", "c"), 2, "sort-small")


# ---------------------------------------------------------------------------
# Registry


BUILTIN_TASKS = {
    "predecessor": make_predecessor,
    "even": make_even,
    "even-odd": make_even_odd,
    "less-than": make_less_than,
    "fizz": make_fizz,
    "buzz": make_buzz,
    "member": make_member,
    "length": make_length,
    "son": make_son,
    "father": make_father,
    "grandparent": make_grandparent,
    "husband": make_husband,
    "uncle": make_uncle,
    "relatedness": make_relatedness,
    "undirected-edge": make_undirected_edge,
    "adjacent-to-red": make_adjacent_to_red,
    "two-children": make_two_children,
    "graph-colouring": make_graph_colouring,
    "connectedness": make_connectedness,
    "cyclic": make_cyclic,
    "add": make_add,
    "mul": make_mul,
    "sort": make_sort,
    "sort-small": make_sort_small,
}


def get_task(name):
    if name not in BUILTIN_TASKS:
        raise KeyError(f"unknown task {name!r}; known: {', '.join(sorted(BUILTIN_TASKS))}")
    return BUILTIN_TASKS[name]()


# Reference solutions, used as fixtures and wiring oracles.
REFERENCE_PROGRAMS = {
    "predecessor": "pred(A,B) :- succ(B,A).",
    "even": "even(A) :- zero(A).\neven(A) :- even(B), succ(B,C), succ(C,A).",
    "even-odd": (
        "even(A) :- zero(A).\n"
        "even(A) :- odd(B), succ(B,A).\n"
        "odd(A) :- even(B), succ(B,A)."
    ),
    "less-than": "lt(A,B) :- inc(A,B).\nlt(A,B) :- lt(A,C), inc(C,B).",
    "fizz": "fizz(A) :- zero(A).\nfizz(A) :- fizz(B), succ(B,C), succ(C,D), succ(D,A).",
    "buzz": (
        "aux(A,B) :- succ(A,C), succ(C,B).\n"
        "buzz(A) :- zero(A).\n"
        "buzz(A) :- buzz(B), aux(B,C), aux(C,D), succ(D,A)."
    ),
    "member": "member(A,B) :- eq(t(B),A).\nmember(A,B) :- member(A,h(B)).",
    "length": "length(A,B) :- empty(A), zero(B).\nlength(A,B) :- length(h(A),C), succ(C,B).",
    "son": "son(A,B) :- parent(B,A), male(A).",
    "father": "father(A,B) :- parent(A,B), male(A).",
    "grandparent": "gp(A,B) :- parent(A,C), parent(C,B).",
    "husband": "husband(A,B) :- father(A,C), mother(B,C).",
    "uncle": "uncle(A,B) :- brother(A,C), parent(C,B).",
    "relatedness": (
        "related(A,B) :- parent(A,B).\n"
        "related(A,B) :- parent(B,A).\n"
        "related(A,B) :- related(A,C), related(C,B)."
    ),
    "undirected-edge": "uedge(A,B) :- edge(A,B).\nuedge(A,B) :- edge(B,A).",
    "adjacent-to-red": "adjred(A) :- edge(A,B), red(B).",
    "two-children": "tc(A) :- edge(A,B), edge(A,C), neq(B,C).",
    "graph-colouring": "bad(A) :- edge(A,B), colour(A,C), colour(B,C).",
    "connectedness": "conn(A,B) :- edge(A,B).\nconn(A,B) :- conn(A,C), edge(C,B).",
    "cyclic": (
        "conn(A,B) :- edge(A,B).\n"
        "conn(A,B) :- conn(A,C), edge(C,B).\n"
        "cyclic(A) :- conn(A,A)."
    ),
    "add": (
        "add(A,B,C) :- zero(B), eq(A,C).\n"
        "add(A,B,C) :- add(A,D,E), inc(D,B), inc(E,C)."
    ),
    "mul": (
        "mul(A,B,C) :- zero(B), zero(C).\n"
        "mul(A,B,C) :- mul(B,A,C).\n"
        "mul(A,B,C) :- mul(A,D,E), inc(D,B), plus(E,A,C)."
    ),
    # insertion-sort over the ordered symbols; the two base clauses cover the
    # empty and single-element lists the recursive clauses cannot reach
    "sort": (
        "sort(A,B) :- empty(A), empty(B).\n"
        "sort(A,B) :- empty(h(A)), eq(A,B).\n"
        "sort(A,B) :- sort(h(A),C), lte(t(C),t(A)), eq(h(B),C), eq(t(A),t(B)).\n"
        "sort(A,B) :- sort(h(A),C), gt(t(C),t(A)), eq(t(B),t(C)), eq(h(D),h(C)),"
        " eq(t(A),t(D)), sort(D,h(B))."
    ),
}
REFERENCE_PROGRAMS["sort-small"] = REFERENCE_PROGRAMS["sort"]
