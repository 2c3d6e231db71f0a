"""Strong and weak forgetting via Boolean quantifier elimination.

Strong forgetting of atoms p̄ from a theory is the strongest necessary
condition over the remaining vocabulary and coincides with existential
Boolean quantification; weak forgetting is the weakest sufficient
condition and coincides with universal quantification.  Both are computed
by iterated Shannon expansion,

    exists p. A  ==  A[p:=false] | A[p:=true]
    forall p. A  ==  A[p:=false] & A[p:=true]

one atom at a time in ascending name order, simplifying after each step.
First-order theories are grounded over their finite domain first, with
predicate policies expanded to every ground atom of each predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .formulas import (
    Formula,
    Theory,
    conj,
    disj,
    ground,
    ground_vocabulary,
    simplify,
    substitute_bool,
    vocabulary_of,
)

STRONG = "strong"
WEAK = "weak"


@dataclass(frozen=True)
class ForgettingPolicy:
    """The symbols chosen for forgetting: propositional atom names, or
    predicate names for first-order theories."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("forgetting policy symbols must be distinct")


def _policy(pol: Union[ForgettingPolicy, Iterable[str]]) -> ForgettingPolicy:
    if isinstance(pol, ForgettingPolicy):
        return pol
    return ForgettingPolicy(tuple(pol))


def _as_formula(t: Union[Theory, Formula]) -> Formula:
    return t.as_formula() if isinstance(t, Theory) else t


def _eliminate(f: Formula, atoms: Iterable[str], combine) -> Formula:
    result = simplify(f)
    present = sorted(set(atoms) & set(vocabulary_of(result).atoms))
    for atom in present:
        result = simplify(
            combine([substitute_bool(result, atom, False), substitute_bool(result, atom, True)])
        )
    return result


def forget_strong(t: Union[Theory, Formula], pol: Union[ForgettingPolicy, Iterable[str]]) -> Formula:
    """Strong (standard) forgetting of propositional atoms.

    The result mentions no policy atom and is logically equivalent to the
    existential quantification of the theory over them.  Atoms absent from
    the theory are ignored.
    """
    return _eliminate(_as_formula(t), _policy(pol).symbols, disj)


def forget_weak(t: Union[Theory, Formula], pol: Union[ForgettingPolicy, Iterable[str]]) -> Formula:
    """Weak forgetting: the universal-quantification dual of
    :func:`forget_strong`."""
    return _eliminate(_as_formula(t), _policy(pol).symbols, conj)


def expand_policy(pol: Union[ForgettingPolicy, Iterable[str]], vocab) -> tuple[str, ...]:
    """Resolve policy symbols against a (ground) vocabulary.

    A symbol naming a predicate expands to all its ground atoms; a symbol
    naming a propositional atom stands for itself; anything else is a
    no-op and drops out.
    """
    predicates = {name for name, _ in vocab.predicates}
    expanded: list[str] = []
    for symbol in _policy(pol).symbols:
        if symbol in predicates:
            prefix = symbol + "("
            expanded.extend(a for a in vocab.atoms if a == symbol or a.startswith(prefix))
        elif symbol in vocab.atoms:
            expanded.append(symbol)
    return tuple(dict.fromkeys(expanded))


def forget_fo(t: Theory, pol: Union[ForgettingPolicy, Iterable[str]], op: str = STRONG,
              domain: Iterable[str] = ()) -> Formula:
    """Forgetting of predicates from a closed first-order theory.

    Grounds the theory over its finite domain (declared constants plus
    those occurring in it), expands the policy to every ground atom of
    each named predicate, and eliminates propositionally.
    """
    if op not in (STRONG, WEAK):
        raise ValueError(f"op must be {STRONG!r} or {WEAK!r}, got {op!r}")
    gvocab = ground_vocabulary(t, domain)
    grounded = ground(t, domain)
    atoms = expand_policy(pol, gvocab)
    forget = forget_strong if op == STRONG else forget_weak
    return forget(grounded, atoms)
