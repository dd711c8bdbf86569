"""First-order clause programs and the crisp entailment oracle.

Constants are either plain symbols (strings) or lists (tuples of symbols).
For list constants two functions are available inside clause bodies:
``h(X)`` is the leading sublist of X (all but the last element) and ``t(X)``
is the last element, so X = h(X) + [t(X)].  Both are undefined on the empty
list; an atom containing an undefined term is simply false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

UNDEFINED = object()

VARIABLE_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: object  # str symbol, or tuple of str for a list


@dataclass(frozen=True)
class Fn:
    fn: str  # "h" or "t"
    var: str

    def __post_init__(self):
        if self.fn not in ("h", "t"):
            raise ValueError(f"unknown function {self.fn!r}")


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def variables(self):
        out = []
        for a in self.args:
            if isinstance(a, Var):
                out.append(a.name)
            elif isinstance(a, Fn):
                out.append(a.var)
        return out


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple

    def free_head_vars(self):
        """Head variables not constrained by the body; they range over all
        constants (e.g. A in mul(A,B,C) :- zero(B), zero(C))."""
        body_vars = set()
        for atom in self.body:
            body_vars.update(atom.variables())
        return [v for v in self.head.variables() if v not in body_vars]


@dataclass
class LearnedProgram:
    clauses: list
    metadata: dict = field(default_factory=dict)

    def __str__(self):
        return "\n".join(format_clause(c) for c in self.clauses)


def eval_fn_term(fn, value):
    """Apply h/t to a constant value; UNDEFINED on symbols and empty lists."""
    if not isinstance(value, tuple) or len(value) == 0:
        return UNDEFINED
    return value[:-1] if fn == "h" else value[-1]


def resolve_term(term, binding):
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        return binding.get(term.name, UNDEFINED)
    val = binding.get(term.var, UNDEFINED)
    if val is UNDEFINED:
        return UNDEFINED
    return eval_fn_term(term.fn, val)


def ground_atom(atom, binding):
    """(pred, args) tuple, or None if any term is undefined."""
    args = []
    for term in atom.args:
        val = resolve_term(term, binding)
        if val is UNDEFINED:
            return None
        args.append(val)
    return (atom.pred, tuple(args))


# ---------------------------------------------------------------------------
# Text format


def format_const(value):
    if isinstance(value, tuple):
        return "[" + ",".join(value) + "]"
    return str(value)


def format_term(term):
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Fn):
        return f"{term.fn}({term.var})"
    return format_const(term.value)


def format_atom(atom):
    return f"{atom.pred}({','.join(format_term(t) for t in atom.args)})"


def format_clause(clause):
    if not clause.body:
        return f"{format_atom(clause.head)}."
    body = ", ".join(format_atom(a) for a in clause.body)
    return f"{format_atom(clause.head)} :- {body}."


class ProgramParseError(ValueError):
    pass


_ATOM_RE = re.compile(r"\s*([a-z][A-Za-z0-9_]*)\s*\(([^()\[\]]*(?:\[[^\]]*\][^()\[\]]*)*)\)\s*")


def _parse_term(text):
    text = text.strip()
    if re.fullmatch(r"[A-Z][0-9]*", text):
        return Var(text)
    m = re.fullmatch(r"([ht])\(\s*([A-Z][0-9]*)\s*\)", text)
    if m:
        return Fn(m.group(1), m.group(2))
    m = re.fullmatch(r"\[([^\]]*)\]", text)
    if m:
        items = [s.strip() for s in m.group(1).split(",") if s.strip()]
        return Const(tuple(items))
    if re.fullmatch(r"[a-z0-9][A-Za-z0-9_]*", text):
        return Const(text)
    raise ProgramParseError(f"cannot parse term {text!r}")


def _split_args(text):
    args, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            args.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        args.append(cur)
    return args


def parse_atom(text):
    m = _ATOM_RE.fullmatch(text)
    if not m:
        # allow nested parens for h(X)/t(X) args
        m = re.fullmatch(r"\s*([a-z][A-Za-z0-9_]*)\s*\((.*)\)\s*", text.strip())
    if not m:
        raise ProgramParseError(f"cannot parse atom {text!r}")
    pred, argtext = m.group(1), m.group(2)
    args = tuple(_parse_term(a) for a in _split_args(argtext))
    return Atom(pred, args)


def _split_body(text):
    atoms, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            atoms.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        atoms.append(cur)
    return atoms


def parse_clause(line):
    line = line.strip()
    if line.endswith("."):
        line = line[:-1]
    if ":-" in line:
        head_text, body_text = line.split(":-", 1)
        body = tuple(parse_atom(a) for a in _split_body(body_text))
    else:
        head_text, body = line, ()
    return Clause(parse_atom(head_text), body)


def parse_program(text):
    clauses = []
    for line in text.splitlines():
        line = line.split("%")[0].strip()
        if line:
            clauses.append(parse_clause(line))
    return LearnedProgram(clauses)


# ---------------------------------------------------------------------------
# Crisp forward chaining


def _satisfy(body, facts, constants):
    """All variable bindings under which every body atom holds."""
    bindings = [{}]
    remaining = list(body)
    while remaining and bindings:
        # pick the atom with the fewest unbound variables to keep joins small
        def unbound(atom):
            bound = bindings[0].keys()
            return len(set(atom.variables()) - set(bound))

        atom = min(remaining, key=unbound)
        remaining.remove(atom)
        new_bindings = []
        for binding in bindings:
            free = sorted(set(atom.variables()) - set(binding))
            if not free:
                if ground_atom(atom, binding) in facts:
                    new_bindings.append(binding)
                continue
            stack = [binding]
            for v in free:
                stack = [dict(b, **{v: c}) for b in stack for c in constants]
            for b in stack:
                if ground_atom(atom, b) in facts:
                    new_bindings.append(b)
        bindings = new_bindings
    return bindings


def crisp_forward_chain(program, task, t_max=None):
    """Exact discrete forward chaining from the background facts.

    Returns the set of ground atoms derivable within t_max steps (or to the
    fixpoint when t_max is None).
    """
    facts = set(task.facts)
    constants = list(task.constants)
    step = 0
    while t_max is None or step < t_max:
        step += 1
        new = set()
        for clause in program.clauses:
            free = clause.free_head_vars()
            for binding in _satisfy(clause.body, facts, constants):
                expansions = [binding]
                for v in free:
                    expansions = [dict(b, **{v: c}) for b in expansions for c in constants]
                for b in expansions:
                    head = ground_atom(clause.head, b)
                    if head is not None and head not in facts:
                        new.add(head)
        if not new:
            break
        facts |= new
    return facts


def verify_program(program, task):
    """Check entailment of all positives and rejection of all negatives."""
    consequences = crisp_forward_chain(program, task)
    target_atoms = {(task.target, args) for args in task.positive}
    entails = all(a in consequences for a in target_atoms)
    negatives = task.negative_examples()
    rejects = all((task.target, args) not in consequences for args in negatives)
    return {"entails_all_positives": entails, "rejects_all_negatives": rejects}
