"""Formula syntax trees, worlds, and the core evaluation semantics.

Formulas are immutable tagged trees.  Propositional formulas are the
quantifier-free subset in which every atom has an empty argument list;
first-order formulas additionally allow quantifiers and atoms over
variables and constants (no function symbols).  Theories over finite
domains are reduced to propositional theories by :func:`ground`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import (
    CapacityError,
    EmptyDomainError,
    OpenFormulaError,
    UnknownAtomError,
)

DEFAULT_CAP = 30

# ---------------------------------------------------------------------------
# terms and formula nodes


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Const]


class Formula:
    """Base class for formula nodes; all subclasses are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class TrueConst(Formula):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseConst(Formula):
    def __str__(self) -> str:
        return "false"


TRUE = TrueConst()
FALSE = FalseConst()


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Equiv(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def conj(children: Iterable[Formula]) -> Formula:
    """n-ary conjunction, flattening nested conjunctions.

    Zero children give ``true``, one child is returned unchanged.
    """
    flat: list[Formula] = []
    for c in children:
        if isinstance(c, And):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(children: Iterable[Formula]) -> Formula:
    """n-ary disjunction, flattening nested disjunctions."""
    flat: list[Formula] = []
    for c in children:
        if isinstance(c, Or):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def subformulas(f: Formula) -> Iterator[Formula]:
    """All nodes of ``f``, parents before children."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, (And, Or)):
            stack.extend(node.children)
        elif isinstance(node, (Implies, Equiv)):
            stack.append(node.rhs)
            stack.append(node.lhs)
        elif isinstance(node, (Exists, Forall)):
            stack.append(node.body)


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variable names of ``f`` in order of first occurrence."""
    out: list[str] = []

    def walk(node: Formula, bound: frozenset[str]) -> None:
        if isinstance(node, Atom):
            for t in node.args:
                if isinstance(t, Var) and t.name not in bound and t.name not in out:
                    out.append(t.name)
        elif isinstance(node, Not):
            walk(node.child, bound)
        elif isinstance(node, (And, Or)):
            for c in node.children:
                walk(c, bound)
        elif isinstance(node, (Implies, Equiv)):
            walk(node.lhs, bound)
            walk(node.rhs, bound)
        elif isinstance(node, (Exists, Forall)):
            walk(node.body, bound | {node.var})

    walk(f, frozenset())
    return tuple(out)


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def is_propositional(f: Formula) -> bool:
    """True when ``f`` has no quantifiers and every atom is argument-free."""
    for node in subformulas(f):
        if isinstance(node, (Exists, Forall)):
            return False
        if isinstance(node, Atom) and node.args:
            return False
    return True


def is_first_order(f: Formula) -> bool:
    return not is_propositional(f)


def count_connectives(f: Formula) -> int:
    """Number of connective/quantifier occurrences, reading n-ary nodes as
    chains of binary ones.  Logical constants count as nullary connectives."""
    total = 0
    for node in subformulas(f):
        if isinstance(node, (And, Or)):
            total += len(node.children) - 1
        elif isinstance(node, (Not, Implies, Equiv, Exists, Forall, TrueConst, FalseConst)):
            total += 1
    return total


def ground_atom_name(a: Atom) -> str:
    """Propositional name of a ground atom, e.g. ``s(a,b)``."""
    if not a.args:
        return a.name
    parts = []
    for t in a.args:
        if isinstance(t, Var):
            raise OpenFormulaError(f"atom {a} is not ground")
        parts.append(t.name)
    return f"{a.name}({','.join(parts)})"


# ---------------------------------------------------------------------------
# theories, vocabularies, worlds


@dataclass(frozen=True)
class Theory:
    """A named, ordered list of closed formulas, read conjunctively."""

    name: str
    formulas: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        for f in self.formulas:
            fv = free_vars(f)
            if fv:
                raise OpenFormulaError(
                    f"theory {self.name!r} contains an open formula (free: {', '.join(fv)})"
                )

    def as_formula(self) -> Formula:
        return conj(self.formulas)


@dataclass(frozen=True)
class Vocabulary:
    """Symbols occurring in a theory.

    ``atoms`` lists propositional (argument-free) atom names in the fixed
    lexicographic order that defines world indexing everywhere.
    """

    atoms: tuple[str, ...]
    predicates: frozenset[tuple[str, int]] = frozenset()
    constants: tuple[str, ...] = ()

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownAtomError(f"atom {name!r} not in vocabulary") from None

    @property
    def _index(self) -> dict[str, int]:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {a: i for i, a in enumerate(self.atoms)}
            self.__dict__["_index_cache"] = idx
        return idx

    def __len__(self) -> int:
        return len(self.atoms)


def make_vocabulary(atoms: Iterable[str],
                    predicates: Iterable[tuple[str, int]] = (),
                    constants: Iterable[str] = ()) -> Vocabulary:
    return Vocabulary(tuple(sorted(set(atoms))),
                      frozenset(predicates),
                      tuple(sorted(set(constants))))


def vocabulary_of(obj: Union[Theory, Formula, Iterable[Formula]]) -> Vocabulary:
    """Symbols syntactically occurring in a formula or theory.

    Argument-free atoms are reported as propositional atoms; atoms with
    arguments contribute a predicate and their constants.
    """
    if isinstance(obj, Theory):
        formulas: Iterable[Formula] = obj.formulas
    elif isinstance(obj, Formula):
        formulas = (obj,)
    else:
        formulas = tuple(obj)
    atoms: set[str] = set()
    predicates: set[tuple[str, int]] = set()
    constants: set[str] = set()
    for f in formulas:
        for node in subformulas(f):
            if isinstance(node, Atom):
                if node.args:
                    predicates.add((node.name, len(node.args)))
                    constants.update(t.name for t in node.args if isinstance(t, Const))
                else:
                    atoms.add(node.name)
    return make_vocabulary(atoms, predicates, constants)


@dataclass(frozen=True)
class World:
    """Total truth assignment over a vocabulary; bit ``i`` holds atom ``i``."""

    vocabulary: Vocabulary
    bits: int

    def truth(self, atom: str) -> bool:
        return bool(self.bits >> self.vocabulary.index(atom) & 1)

    def as_dict(self) -> dict[str, bool]:
        return {a: bool(self.bits >> i & 1) for i, a in enumerate(self.vocabulary.atoms)}

    def __str__(self) -> str:
        parts = (f"{a}={'T' if self.truth(a) else 'F'}" for a in self.vocabulary.atoms)
        return "{" + ", ".join(parts) + "}"


def world_from_dict(vocab: Vocabulary, assignment: dict[str, bool]) -> World:
    bits = 0
    for name, value in assignment.items():
        if value:
            bits |= 1 << vocab.index(name)
    return World(vocab, bits)


def worlds(vocab: Vocabulary) -> Iterator[World]:
    for bits in range(1 << len(vocab.atoms)):
        yield World(vocab, bits)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f: Formula, w: World) -> bool:
    """Classical two-valued truth of a propositional formula in ``w``."""
    if isinstance(f, Atom):
        name = ground_atom_name(f)
        return w.truth(name)
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, Not):
        return not evaluate(f.child, w)
    if isinstance(f, And):
        return all(evaluate(c, w) for c in f.children)
    if isinstance(f, Or):
        return any(evaluate(c, w) for c in f.children)
    if isinstance(f, Implies):
        return not evaluate(f.lhs, w) or evaluate(f.rhs, w)
    if isinstance(f, Equiv):
        return evaluate(f.lhs, w) == evaluate(f.rhs, w)
    raise OpenFormulaError(f"cannot evaluate quantified formula {f!r} in a world")


def _tile(pattern: int, period: int, width: int) -> int:
    while period < width:
        pattern |= pattern << period
        period <<= 1
    return pattern & ((1 << width) - 1)


def atom_block_mask(index: int, lo: int, block_bits: int) -> int:
    """Truth pattern of atom ``index`` over worlds ``lo .. lo + 2**block_bits``.

    ``lo`` must be a multiple of the block size.  Bit ``w - lo`` of the
    result is set iff atom ``index`` is true in world ``w``.
    """
    size = 1 << block_bits
    if index >= block_bits:
        return (1 << size) - 1 if lo >> index & 1 else 0
    half = 1 << index
    return _tile(((1 << half) - 1) << half, half << 1, size)


def satisfying_block(f: Formula, vocab: Vocabulary, lo: int, block_bits: int,
                     _memo: dict | None = None) -> int:
    """Bit-parallel evaluation of ``f`` over one block of world indices."""
    size = 1 << block_bits
    full = (1 << size) - 1
    memo: dict[Formula, int] = {} if _memo is None else _memo

    def ev(node: Formula) -> int:
        got = memo.get(node)
        if got is not None:
            return got
        if isinstance(node, Atom):
            m = atom_block_mask(vocab.index(ground_atom_name(node)), lo, block_bits)
        elif isinstance(node, TrueConst):
            m = full
        elif isinstance(node, FalseConst):
            m = 0
        elif isinstance(node, Not):
            m = full ^ ev(node.child)
        elif isinstance(node, And):
            m = full
            for c in node.children:
                m &= ev(c)
                if not m:
                    break
        elif isinstance(node, Or):
            m = 0
            for c in node.children:
                m |= ev(c)
                if m == full:
                    break
        elif isinstance(node, Implies):
            m = (full ^ ev(node.lhs)) | ev(node.rhs)
        elif isinstance(node, Equiv):
            m = full ^ ev(node.lhs) ^ ev(node.rhs)
        else:
            raise OpenFormulaError(f"cannot sweep quantified formula {node!r}")
        memo[node] = m
        return m

    return ev(f)


BLOCK_BITS = 16


def sweep_blocks(vocab: Vocabulary, cap: int = DEFAULT_CAP) -> Iterator[tuple[int, int]]:
    """Yield ``(lo, block_bits)`` covering all world indices of ``vocab``."""
    n = len(vocab.atoms)
    if n > cap:
        raise CapacityError(
            f"vocabulary has {n} atoms, above the exact-enumeration cap of {cap}"
        )
    b = min(n, BLOCK_BITS)
    for lo in range(0, 1 << n, 1 << b):
        yield lo, b


def satisfying_count(f: Formula, vocab: Vocabulary, cap: int = DEFAULT_CAP) -> int:
    """Number of worlds of ``vocab`` satisfying ``f``."""
    return sum(
        satisfying_block(f, vocab, lo, b).bit_count() for lo, b in sweep_blocks(vocab, cap)
    )


def entails(a: Formula, b: Formula, cap: int = DEFAULT_CAP) -> bool:
    """Exhaustive entailment check over the combined vocabulary."""
    vocab = vocabulary_of([a, b])
    for lo, bb in sweep_blocks(vocab, cap):
        if satisfying_block(a, vocab, lo, bb) & ~satisfying_block(b, vocab, lo, bb):
            return False
    return True


def equivalent(a: Formula, b: Formula, cap: int = DEFAULT_CAP) -> bool:
    """Exhaustive equivalence check over the combined vocabulary."""
    vocab = vocabulary_of([a, b])
    for lo, bb in sweep_blocks(vocab, cap):
        if satisfying_block(a, vocab, lo, bb) != satisfying_block(b, vocab, lo, bb):
            return False
    return True


# ---------------------------------------------------------------------------
# substitution and simplification


def substitute_bool(f: Formula, atom: str, value: bool) -> Formula:
    """Replace every occurrence of a propositional atom by a truth constant."""
    repl = TRUE if value else FALSE

    def walk(node: Formula) -> Formula:
        if isinstance(node, Atom):
            return repl if not node.args and node.name == atom else node
        if isinstance(node, (TrueConst, FalseConst)):
            return node
        if isinstance(node, Not):
            return Not(walk(node.child))
        if isinstance(node, And):
            return And(tuple(walk(c) for c in node.children))
        if isinstance(node, Or):
            return Or(tuple(walk(c) for c in node.children))
        if isinstance(node, Implies):
            return Implies(walk(node.lhs), walk(node.rhs))
        if isinstance(node, Equiv):
            return Equiv(walk(node.lhs), walk(node.rhs))
        raise OpenFormulaError("substitute_bool expects a propositional formula")

    return walk(f)


def substitute_var(f: Formula, var: str, constant: str) -> Formula:
    """Replace free occurrences of a variable by a constant."""
    c = Const(constant)

    def walk(node: Formula) -> Formula:
        if isinstance(node, Atom):
            if not node.args:
                return node
            return Atom(node.name, tuple(
                c if isinstance(t, Var) and t.name == var else t for t in node.args
            ))
        if isinstance(node, (TrueConst, FalseConst)):
            return node
        if isinstance(node, Not):
            return Not(walk(node.child))
        if isinstance(node, And):
            return And(tuple(walk(x) for x in node.children))
        if isinstance(node, Or):
            return Or(tuple(walk(x) for x in node.children))
        if isinstance(node, Implies):
            return Implies(walk(node.lhs), walk(node.rhs))
        if isinstance(node, Equiv):
            return Equiv(walk(node.lhs), walk(node.rhs))
        if isinstance(node, (Exists, Forall)):
            if node.var == var:
                return node
            return type(node)(node.var, walk(node.body))
        raise TypeError(f"unexpected node {node!r}")

    return walk(f)


def _neg(f: Formula) -> Formula:
    if isinstance(f, TrueConst):
        return FALSE
    if isinstance(f, FalseConst):
        return TRUE
    if isinstance(f, Not):
        return f.child
    return Not(f)


def simplify(f: Formula) -> Formula:
    """Bounded equivalence-preserving rewriting of a quantifier-free formula.

    Folds constants, absorbs units of every connective, drops duplicate
    children of flattened conjunctions/disjunctions, and collapses a
    conjunction (disjunction) holding complementary children.  No constant
    survives unless the whole result is one.  This is not a canonical form;
    callers comparing results do so semantically.
    """
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return f
    if isinstance(f, Not):
        return _neg(simplify(f.child))
    if isinstance(f, And):
        kept: list[Formula] = []
        for c in f.children:
            c = simplify(c)
            if isinstance(c, FalseConst):
                return FALSE
            if isinstance(c, TrueConst):
                continue
            for x in c.children if isinstance(c, And) else (c,):
                if _neg(x) in kept:
                    return FALSE
                if x not in kept:
                    kept.append(x)
        return conj(kept)
    if isinstance(f, Or):
        kept = []
        for c in f.children:
            c = simplify(c)
            if isinstance(c, TrueConst):
                return TRUE
            if isinstance(c, FalseConst):
                continue
            for x in c.children if isinstance(c, Or) else (c,):
                if _neg(x) in kept:
                    return TRUE
                if x not in kept:
                    kept.append(x)
        return disj(kept)
    if isinstance(f, Implies):
        lhs = simplify(f.lhs)
        rhs = simplify(f.rhs)
        if isinstance(lhs, FalseConst) or isinstance(rhs, TrueConst):
            return TRUE
        if isinstance(lhs, TrueConst):
            return rhs
        if isinstance(rhs, FalseConst):
            return _neg(lhs)
        return Implies(lhs, rhs)
    if isinstance(f, Equiv):
        lhs = simplify(f.lhs)
        rhs = simplify(f.rhs)
        if isinstance(lhs, TrueConst):
            return rhs
        if isinstance(rhs, TrueConst):
            return lhs
        if isinstance(lhs, FalseConst):
            return _neg(rhs)
        if isinstance(rhs, FalseConst):
            return _neg(lhs)
        return Equiv(lhs, rhs)
    raise OpenFormulaError("simplify expects a quantifier-free formula")


# ---------------------------------------------------------------------------
# grounding


def theory_domain(t: Theory, declared: Iterable[str] = ()) -> tuple[str, ...]:
    """Grounding domain: declared constants plus constants occurring in ``t``."""
    return tuple(sorted(set(declared) | set(vocabulary_of(t).constants)))


def ground_vocabulary(t: Theory, declared: Iterable[str] = ()) -> Vocabulary:
    """World vocabulary of a first-order theory: every ground atom that the
    theory's predicates admit over the grounding domain."""
    domain = theory_domain(t, declared)
    vocab = vocabulary_of(t)
    atoms = set(vocab.atoms)
    for pred, arity in vocab.predicates:
        if arity and not domain:
            raise EmptyDomainError(
                f"predicate {pred}/{arity} needs a nonempty constant domain"
            )
        for combo in itertools.product(domain, repeat=arity):
            atoms.add(ground_atom_name(Atom(pred, tuple(Const(c) for c in combo))))
    return make_vocabulary(atoms, vocab.predicates, domain)


def _ground_formula(f: Formula, domain: tuple[str, ...]) -> Formula:
    if isinstance(f, Atom):
        return Atom(ground_atom_name(f))
    if isinstance(f, (TrueConst, FalseConst)):
        return f
    if isinstance(f, Not):
        return Not(_ground_formula(f.child, domain))
    if isinstance(f, And):
        return conj(_ground_formula(c, domain) for c in f.children)
    if isinstance(f, Or):
        return disj(_ground_formula(c, domain) for c in f.children)
    if isinstance(f, Implies):
        return Implies(_ground_formula(f.lhs, domain), _ground_formula(f.rhs, domain))
    if isinstance(f, Equiv):
        return Equiv(_ground_formula(f.lhs, domain), _ground_formula(f.rhs, domain))
    if isinstance(f, (Exists, Forall)):
        if not domain:
            raise EmptyDomainError("cannot ground a quantifier over an empty domain")
        expanded = (
            _ground_formula(substitute_var(f.body, f.var, c), domain) for c in domain
        )
        return disj(expanded) if isinstance(f, Exists) else conj(expanded)
    raise TypeError(f"unexpected node {f!r}")


def ground(t: Theory, declared: Iterable[str] = ()) -> Theory:
    """Expand quantifiers over the finite domain, yielding a propositional
    theory whose atoms are ground-atom names."""
    domain = theory_domain(t, declared)
    return Theory(t.name, tuple(_ground_formula(f, domain) for f in t.formulas))
