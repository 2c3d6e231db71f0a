"""Compilation of formulas to stratified logic programs.

Each subformula is represented by one auxiliary atom defined so that it is
equivalent to the subformula in every complete world; negation as failure
coincides with classical negation because all source atoms are assigned.
Structurally equal subformulas share a single auxiliary atom, flattened
conjunctions compile to one rule with k positive literals, and flattened
disjunctions to k single-literal rules.  Universal quantification compiles
through double negation of an existential, which keeps the program
stratified; auxiliary atoms carry exactly the free variables of their
subformula.

The least-model evaluator doubles as a correctness oracle: in every base
world the root atom must agree with direct evaluation of the source
formula.  The emitter renders programs as ProbLog text, prefixed by the
probability specification and default one-half facts for the remaining
source atoms.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import OpenFormulaError, UnknownAtomError, UnstratifiableError
from .formulas import (
    And,
    Atom,
    Const,
    Equiv,
    Exists,
    FalseConst,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    TrueConst,
    Var,
    Vocabulary,
    World,
    atom_block_mask,
    count_connectives,
    free_vars,
    ground_atom_name,
    is_propositional,
    vocabulary_of,
)
from .measure import ProbabilitySpec, format_probability
from .parsing import render

DOM = "dom"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"\\+ {self.atom}"


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(l) for l in self.body)}."


@dataclass
class StratifiedProgram:
    """Rules plus the auxiliary atom standing for the whole source formula."""

    rules: list[Rule]
    root: Atom
    aux_map: dict[Formula, Atom]
    strata: dict[str, int]
    vocabulary: Vocabulary
    uses_dom: bool = False

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)


def _slug(rendered: str) -> str:
    s = rendered.replace("<->", " equiv ").replace("->", " impl ")
    for sym, word in (("~", " not "), ("&", " and "), ("|", " or ")):
        s = s.replace(sym, word)
    for sym in "(),.":
        s = s.replace(sym, " ")
    out = "_".join(p.lower() for p in s.split())
    return out[:24].rstrip("_") or "f"


class _Compiler:
    def __init__(self):
        self.rules: list[Rule] = []
        self.aux_map: dict[Formula, Atom] = {}
        self.owners: dict[str, Formula] = {}
        self.uses_dom = False

    def aux(self, f: Formula, suffix: str = "") -> Atom:
        rendered = render(f)
        digest = hashlib.sha256(rendered.encode()).hexdigest()[:8]
        name = f"r_{_slug(rendered)}_{digest}{suffix}"
        owner = self.owners.setdefault(name, f)
        if owner != f:
            raise RuntimeError(f"auxiliary name collision on {name}")
        return Atom(name, tuple(Var(v) for v in free_vars(f)))

    def add(self, head: Atom, body: Sequence[Literal]) -> None:
        """Append a rule, guarding head variables that the body drops with
        domain literals (only n-ary disjunction branches need this)."""
        in_body = {t.name for lit in body for t in lit.atom.args if isinstance(t, Var)}
        guards = tuple(
            Literal(Atom(DOM, (t,)))
            for t in head.args
            if isinstance(t, Var) and t.name not in in_body
        )
        if guards:
            self.uses_dom = True
        self.rules.append(Rule(head, tuple(body) + guards))

    def visit(self, f: Formula) -> Atom:
        cached = self.aux_map.get(f)
        if cached is not None:
            return cached
        if isinstance(f, Atom):
            result = f
        elif isinstance(f, TrueConst):
            result = self.aux(f)
            self.add(result, ())
        elif isinstance(f, FalseConst):
            result = self.aux(f)  # no defining rule: never derivable
        elif isinstance(f, Not):
            child = self.visit(f.child)
            result = self.aux(f)
            self.add(result, (Literal(child, False),))
        elif isinstance(f, And):
            parts = [self.visit(c) for c in f.children]
            result = self.aux(f)
            self.add(result, tuple(Literal(p) for p in parts))
        elif isinstance(f, Or):
            parts = [self.visit(c) for c in f.children]
            result = self.aux(f)
            for p in parts:
                self.add(result, (Literal(p),))
        elif isinstance(f, Implies):
            lhs = self.visit(f.lhs)
            rhs = self.visit(f.rhs)
            result = self.aux(f)
            self.add(result, (Literal(lhs, False),))
            self.add(result, (Literal(rhs),))
        elif isinstance(f, Equiv):
            lhs = self.visit(f.lhs)
            rhs = self.visit(f.rhs)
            fwd = self.aux(f, "_1")
            bwd = self.aux(f, "_2")
            result = self.aux(f)
            self.add(fwd, (Literal(lhs, False),))
            self.add(fwd, (Literal(rhs),))
            self.add(bwd, (Literal(rhs, False),))
            self.add(bwd, (Literal(lhs),))
            self.add(result, (Literal(fwd), Literal(bwd)))
        elif isinstance(f, Exists):
            body = self.visit(f.body)
            result = self.aux(f)
            self.add(result, (Literal(body),))
        elif isinstance(f, Forall):
            # forall y B  ==  ~exists y ~B, keeping negation stratified
            negated = self.visit(Not(f.body))
            witness = self.aux(f, "_1")
            result = self.aux(f)
            self.add(witness, (Literal(negated),))
            self.add(result, (Literal(witness, False),))
        else:
            raise TypeError(f"unexpected node {f!r}")
        self.aux_map[f] = result
        return result


def _compile(f: Formula) -> StratifiedProgram:
    compiler = _Compiler()
    root = compiler.visit(f)
    program = StratifiedProgram(
        rules=compiler.rules,
        root=root,
        aux_map=compiler.aux_map,
        strata={},
        vocabulary=vocabulary_of(f),
        uses_dom=compiler.uses_dom,
    )
    program.strata = check_stratification(program)
    bound = 5 * count_connectives(f)
    if len(program.rules) > bound:
        raise RuntimeError(
            f"rule count {len(program.rules)} exceeds 5x connective bound {bound}"
        )
    return program


def compile_prop(f: Formula) -> StratifiedProgram:
    """Compile a propositional formula; the root atom is equivalent to the
    formula in every world over its vocabulary."""
    if not is_propositional(f):
        raise ValueError("compile_prop expects a propositional formula")
    return _compile(f)


def compile_fo(f: Formula) -> StratifiedProgram:
    """Compile a closed first-order formula over a finite domain."""
    fv = free_vars(f)
    if fv:
        raise OpenFormulaError(f"formula has free variables: {', '.join(fv)}")
    program = _compile(f)
    for rule in program.rules:
        head_vars = {t.name for t in rule.head.args if isinstance(t, Var)}
        body_vars = {
            t.name for lit in rule.body for t in lit.atom.args if isinstance(t, Var)
        }
        if not head_vars <= body_vars:
            raise RuntimeError(f"unsafe rule produced: {rule}")
    return program


# ---------------------------------------------------------------------------
# stratification


def check_stratification(program: StratifiedProgram) -> dict[str, int]:
    """Assign a stratum (>= 1) to every predicate or prove none exists.

    Positive premises may be defined in the same stratum, negated premises
    strictly below; a cycle through negation raises
    :class:`UnstratifiableError` naming the atoms on the cycle.
    """
    preds: set[str] = set()
    weight: dict[tuple[str, str], int] = {}
    deps: dict[str, set[str]] = {}
    for rule in program.rules:
        head = rule.head.name
        preds.add(head)
        for lit in rule.body:
            b = lit.atom.name
            preds.add(b)
            key = (b, head)
            weight[key] = max(weight.get(key, 0), 0 if lit.positive else 1)
            deps.setdefault(head, set()).add(b)
    stratum = {p: 1 for p in preds}
    limit = len(preds) + 1
    changed = True
    while changed:
        changed = False
        for (b, h), w in weight.items():
            need = stratum[b] + w
            if stratum[h] < need:
                if need > limit:
                    raise UnstratifiableError(
                        "cycle through negation: " + " -> ".join(_negative_cycle(deps, weight))
                    )
                stratum[h] = need
                changed = True
    return stratum


def _negative_cycle(deps: dict[str, set[str]], weight: dict[tuple[str, str], int]) -> list[str]:
    for (b, h), w in weight.items():
        if w != 1:
            continue
        # head h negatively depends on b; close the loop from b back to h
        stack = [(b, [b])]
        seen = {b}
        while stack:
            node, path = stack.pop()
            if node == h:
                return path + [b]
            for nxt in deps.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, path + [nxt]))
        if b == h:
            return [h, b]
    return ["<unknown>"]


# ---------------------------------------------------------------------------
# least-model evaluation


def _ground_atom(atom: Atom, env: dict[str, str]) -> str:
    if not atom.args:
        return atom.name
    names = [env[t.name] if isinstance(t, Var) else t.name for t in atom.args]
    return f"{atom.name}({','.join(names)})"


@dataclass(frozen=True)
class _Instance:
    head: str
    stratum: int
    positive: tuple[str, ...]
    negative: tuple[str, ...]


def ground_instances(program: StratifiedProgram, domain: Sequence[str]) -> list[_Instance]:
    """Instantiate every rule over the domain; ``dom`` literals reduce to
    membership checks and drop out."""
    instances: list[_Instance] = []
    for rule in program.rules:
        ordered: list[str] = []
        for atom in (rule.head, *(lit.atom for lit in rule.body)):
            for t in atom.args:
                if isinstance(t, Var) and t.name not in ordered:
                    ordered.append(t.name)
        stratum = program.strata.get(rule.head.name, 1)
        for combo in itertools.product(domain, repeat=len(ordered)):
            env = dict(zip(ordered, combo))
            positive: list[str] = []
            negative: list[str] = []
            alive = True
            for lit in rule.body:
                if lit.atom.name == DOM:
                    arg = lit.atom.args[0]
                    name = env[arg.name] if isinstance(arg, Var) else arg.name
                    if name not in domain:
                        alive = False
                        break
                    continue
                (positive if lit.positive else negative).append(_ground_atom(lit.atom, env))
            if alive:
                instances.append(
                    _Instance(_ground_atom(rule.head, env), stratum, tuple(positive), tuple(negative))
                )
    return instances


def least_model(program: StratifiedProgram, base: World) -> dict[str, bool]:
    """Truth of every atom, auxiliary ones included, in the least model of
    the program over one base world."""
    domain = base.vocabulary.constants
    instances = ground_instances(program, domain)
    defined = {inst.head for inst in instances}
    # an auxiliary atom without rules (a false constant) is legitimately
    # underivable, not a missing source atom
    auxiliary = {atom.name for atom in program.aux_map.values() if not atom.args}
    interp: dict[str, bool] = dict(base.as_dict())
    if not program.root.args:
        interp.setdefault(program.root.name, False)
    for inst in instances:
        for name in (*inst.positive, *inst.negative):
            if name not in defined and name not in auxiliary and name not in interp:
                raise UnknownAtomError(f"base world does not assign source atom {name!r}")
        interp.setdefault(inst.head, False)
    for level in sorted({inst.stratum for inst in instances}):
        layer = [inst for inst in instances if inst.stratum == level]
        changed = True
        while changed:
            changed = False
            for inst in layer:
                if interp.get(inst.head, False):
                    continue
                if all(interp.get(a, False) for a in inst.positive) and not any(
                    interp.get(a, False) for a in inst.negative
                ):
                    interp[inst.head] = True
                    changed = True
    return interp


def least_model_masks(program: StratifiedProgram, vocab: Vocabulary) -> dict[str, int]:
    """Bit-parallel least model over all worlds of ``vocab`` at once.

    Returns one mask per atom; bit ``w`` of ``masks[a]`` is the truth of
    ``a`` in world ``w``.  Intended for small vocabularies.
    """
    n = len(vocab.atoms)
    full = (1 << (1 << n)) - 1
    masks: dict[str, int] = {
        a: atom_block_mask(i, 0, n) for i, a in enumerate(vocab.atoms)
    }
    if not program.root.args:
        masks.setdefault(program.root.name, 0)
    instances = ground_instances(program, vocab.constants)
    for inst in instances:
        masks.setdefault(inst.head, 0)
        for name in (*inst.positive, *inst.negative):
            masks.setdefault(name, 0)
    for level in sorted({inst.stratum for inst in instances}):
        layer = [inst for inst in instances if inst.stratum == level]
        changed = True
        while changed:
            changed = False
            for inst in layer:
                m = full
                for a in inst.positive:
                    m &= masks[a]
                    if not m:
                        break
                for a in inst.negative:
                    m &= full ^ masks[a]
                    if not m:
                        break
                merged = masks[inst.head] | m
                if merged != masks[inst.head]:
                    masks[inst.head] = merged
                    changed = True
    return masks


# ---------------------------------------------------------------------------
# emission


def source_atom_names(program: StratifiedProgram, domain: Iterable[str] = ()) -> tuple[str, ...]:
    """All ground source atoms of the program: its propositional atoms plus
    every instantiation of its predicates over the constant domain."""
    vocab = program.vocabulary
    constants = sorted(set(vocab.constants) | set(domain))
    atoms = set(vocab.atoms)
    for pred, arity in vocab.predicates:
        for combo in itertools.product(constants, repeat=arity):
            atoms.add(ground_atom_name(Atom(pred, tuple(Const(c) for c in combo))))
    return tuple(sorted(atoms))


def emit_problog(program: StratifiedProgram, spec: Optional[ProbabilitySpec] = None,
                 queries: Iterable[Atom] = (), domain: Iterable[str] = ()) -> str:
    """Render the program as ProbLog text.

    Emission order: annotated disjunctions, probabilistic facts, default
    one-half facts for uncovered source atoms, domain facts when guards are
    present, rules in compile order, then queries.  Output is byte-stable.
    """
    spec = spec or ProbabilitySpec.uniform()
    lines: list[str] = []
    for ad in spec.disjunctions:
        lines.append("; ".join(f"{format_probability(w)}::{a}" for a, w in ad) + ".")
    for atom, w in spec.facts:
        lines.append(f"{format_probability(w)}::{atom}.")
    covered = set(spec.atoms())
    for atom in source_atom_names(program, domain):
        if atom not in covered:
            lines.append(f"0.5::{atom}.")
    if program.uses_dom:
        for c in sorted(set(program.vocabulary.constants) | set(domain)):
            lines.append(f"{DOM}({c}).")
    lines.extend(str(rule) for rule in program.rules)
    lines.extend(f"query({atom})." for atom in queries)
    return "\n".join(lines) + "\n"
