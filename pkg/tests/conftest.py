"""Shared generators and brute-force oracles for the test suite.

The oracles here deliberately avoid the production code paths they check:
satisfaction is decided by single-world recursive evaluation over
explicitly enumerated worlds, forgetting by projecting model sets, and
probabilities by summing per-world products.
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from floss import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Equiv,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    ProbabilitySpec,
    Var,
    World,
    conj,
    disj,
    evaluate,
    world_probability,
    worlds,
)
from floss.formulas import Vocabulary, make_vocabulary

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


# ---------------------------------------------------------------------------
# random formulas


def rand_prop(rng: random.Random, atoms: list[str], depth: int,
              constants: bool = True) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if constants and r < 0.04:
            return TRUE
        if constants and r < 0.08:
            return FALSE
        return Atom(rng.choice(atoms))
    shape = rng.choice(("not", "and", "or", "impl", "equiv"))
    if shape == "not":
        return Not(rand_prop(rng, atoms, depth - 1, constants))
    if shape == "and":
        return conj(rand_prop(rng, atoms, depth - 1, constants)
                    for _ in range(rng.randint(2, 3)))
    if shape == "or":
        return disj(rand_prop(rng, atoms, depth - 1, constants)
                    for _ in range(rng.randint(2, 3)))
    if shape == "impl":
        return Implies(rand_prop(rng, atoms, depth - 1, constants),
                       rand_prop(rng, atoms, depth - 1, constants))
    return Equiv(rand_prop(rng, atoms, depth - 1, constants),
                 rand_prop(rng, atoms, depth - 1, constants))


def rand_fo(rng: random.Random, predicates: list[tuple[str, int]],
            domain: list[str], depth: int, scope: tuple[str, ...] = ()) -> Formula:
    """Random first-order formula; closed when ``scope`` is empty and every
    branch quantifies before using variables."""
    def atom() -> Formula:
        name, arity = rng.choice(predicates)
        args = []
        for _ in range(arity):
            if scope and rng.random() < 0.7:
                args.append(Var(rng.choice(scope)))
            else:
                args.append(Const(rng.choice(domain)))
        return Atom(name, tuple(args))

    if depth == 0:
        return atom()
    r = rng.random()
    if r < 0.3:
        var = f"V{len(scope)}"
        body = rand_fo(rng, predicates, domain, depth - 1, scope + (var,))
        return Forall(var, body) if rng.random() < 0.5 else Exists(var, body)
    if r < 0.45:
        return Not(rand_fo(rng, predicates, domain, depth - 1, scope))
    if r < 0.6:
        return conj(rand_fo(rng, predicates, domain, depth - 1, scope) for _ in range(2))
    if r < 0.75:
        return disj(rand_fo(rng, predicates, domain, depth - 1, scope) for _ in range(2))
    if r < 0.9:
        return Implies(rand_fo(rng, predicates, domain, depth - 1, scope),
                       rand_fo(rng, predicates, domain, depth - 1, scope))
    return Equiv(rand_fo(rng, predicates, domain, depth - 1, scope),
                 rand_fo(rng, predicates, domain, depth - 1, scope))


# ---------------------------------------------------------------------------
# oracles


def oracle_models(f: Formula, vocab: Vocabulary) -> set[int]:
    """World bit patterns satisfying ``f``, by direct per-world evaluation."""
    return {w.bits for w in worlds(vocab) if evaluate(f, w)}


def oracle_entails(a: Formula, b: Formula, vocab: Vocabulary) -> bool:
    return oracle_models(a, vocab) <= oracle_models(b, vocab)


def oracle_forget_models(f: Formula, pol: set[str], vocab: Vocabulary,
                         strong: bool) -> set[int]:
    """Model set of strong/weak forgetting, computed by projection: a world
    is kept iff some (strong) or every (weak) reassignment of the policy
    atoms satisfies the theory."""
    pol_bits = [1 << i for i, a in enumerate(vocab.atoms) if a in pol]
    sat = oracle_models(f, vocab)
    out: set[int] = set()
    for w in range(1 << len(vocab.atoms)):
        variants = [w]
        for bit in pol_bits:
            variants = [v | bit for v in variants] + [v & ~bit for v in variants]
        hit = (any if strong else all)(v in sat for v in variants)
        if hit:
            out.add(w)
    return out


def oracle_probability(spec: ProbabilitySpec, f: Formula, vocab: Vocabulary) -> Fraction:
    """Definitional probability: sum of per-world products over models."""
    total = Fraction(0)
    for w in worlds(vocab):
        if evaluate(f, w):
            total += world_probability(spec, w)
    return total


def oracle_eval_fo(f: Formula, w: World, domain: tuple[str, ...],
                   env: dict[str, str] | None = None) -> bool:
    """First-order satisfaction with quantifiers ranging over the domain,
    independent of the grounding transformation."""
    env = env or {}
    if isinstance(f, Atom):
        parts = [env[t.name] if isinstance(t, Var) else t.name for t in f.args]
        name = f.name if not parts else f"{f.name}({','.join(parts)})"
        return w.truth(name)
    if isinstance(f, Not):
        return not oracle_eval_fo(f.child, w, domain, env)
    if isinstance(f, And):
        return all(oracle_eval_fo(c, w, domain, env) for c in f.children)
    if isinstance(f, Or):
        return any(oracle_eval_fo(c, w, domain, env) for c in f.children)
    if isinstance(f, Implies):
        return (not oracle_eval_fo(f.lhs, w, domain, env)
                or oracle_eval_fo(f.rhs, w, domain, env))
    if isinstance(f, Equiv):
        return oracle_eval_fo(f.lhs, w, domain, env) == oracle_eval_fo(f.rhs, w, domain, env)
    if isinstance(f, Exists):
        return any(oracle_eval_fo(f.body, w, domain, {**env, f.var: c}) for c in domain)
    if isinstance(f, Forall):
        return all(oracle_eval_fo(f.body, w, domain, {**env, f.var: c}) for c in domain)
    return isinstance(f, type(TRUE))


def rand_spec(rng: random.Random, atoms: list[str]) -> ProbabilitySpec:
    """Random specification over a few of the given atoms: possibly one
    annotated disjunction plus independent facts."""
    pool = list(atoms)
    rng.shuffle(pool)
    disjunctions = []
    if len(pool) >= 2 and rng.random() < 0.5:
        size = rng.randint(2, min(3, len(pool)))
        members = [pool.pop() for _ in range(size)]
        weights = [Fraction(rng.randint(0, 10), 30) for _ in members]
        disjunctions.append(tuple(zip(members, weights)))
    facts = []
    for _ in range(rng.randint(0, 2)):
        if not pool:
            break
        facts.append((pool.pop(), Fraction(rng.randint(0, 10), 10)))
    return ProbabilitySpec(tuple(facts), tuple(disjunctions))
