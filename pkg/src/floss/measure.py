"""Theory probability, model counting, sampling, and the loss measures.

A probability specification induces a product distribution over worlds:
independent probabilistic facts contribute ``u`` / ``1 - u`` factors, each
annotated disjunction selects at most one of its alternatives (a weight-sum
below one leaves a null choice), and every unmentioned atom defaults to
weight one half.  All exact arithmetic is done in rationals so printed
values are reproducible bit for bit.

The three loss numbers for a forgetting policy compare the probability of
the theory with the probabilities of its strong and weak forgettings, all
evaluated over the original theory's full (ground) vocabulary:

    loss_nc = P(strong) - P(theory)
    loss_sc = P(theory) - P(weak)
    loss_t  = P(strong) - P(weak)
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from .errors import UnknownAtomError
from .formulas import (
    DEFAULT_CAP,
    FALSE,
    TRUE,
    And,
    Atom,
    Equiv,
    FalseConst,
    Formula,
    Implies,
    Not,
    Or,
    Theory,
    TrueConst,
    Vocabulary,
    World,
    atom_block_mask,
    equivalent,
    evaluate,
    ground,
    ground_atom_name,
    ground_vocabulary,
    make_vocabulary,
    satisfying_block,
    sweep_blocks,
    vocabulary_of,
)
from .forgetting import ForgettingPolicy, expand_policy, forget_strong, forget_weak

RNG_ALGORITHM = "pcg64"

HALF = Fraction(1, 2)

WeightedAtom = tuple[str, Fraction]


@dataclass(frozen=True)
class ProbabilitySpec:
    """Probabilistic facts and annotated disjunctions over ground atoms."""

    facts: tuple[WeightedAtom, ...] = ()
    disjunctions: tuple[tuple[WeightedAtom, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(
            self, "disjunctions", tuple(tuple(ad) for ad in self.disjunctions)
        )
        seen: set[str] = set()
        for atom, weight in self.facts:
            if not 0 <= weight <= 1:
                raise ValueError(f"weight {weight} of {atom} outside [0,1]")
            if atom in seen:
                raise ValueError(f"atom {atom} declared twice")
            seen.add(atom)
        for ad in self.disjunctions:
            total = Fraction(0)
            for atom, weight in ad:
                if not 0 <= weight <= 1:
                    raise ValueError(f"weight {weight} of {atom} outside [0,1]")
                if atom in seen:
                    raise ValueError(f"atom {atom} declared twice")
                seen.add(atom)
                total += weight
            if total > 1:
                raise ValueError(f"annotated disjunction weights sum to {total} > 1")

    def atoms(self) -> tuple[str, ...]:
        names = [a for a, _ in self.facts]
        for ad in self.disjunctions:
            names.extend(a for a, _ in ad)
        return tuple(names)

    @staticmethod
    def uniform() -> "ProbabilitySpec":
        return ProbabilitySpec()


def format_probability(value: Fraction, max_digits: int = 10) -> str:
    """Decimal rendering of a probability in [0, 1].

    Exact when the exact decimal needs at most ``max_digits`` significant
    digits, otherwise rounded to that many; never uses exponent notation.
    """
    if value == 0:
        return "0"
    if value == 1:
        return "1"
    den = value.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den == 1:
        scale = 0
        power = 1
        while power % value.denominator:
            power *= 10
            scale += 1
        digits = value.numerator * power // value.denominator
        if len(str(digits)) <= max_digits:
            return "0." + format(digits, f"0{scale}d")
    with localcontext() as ctx:
        ctx.prec = max_digits
        approx = Decimal(value.numerator) / Decimal(value.denominator)
    text = format(approx, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


# ---------------------------------------------------------------------------
# exact evaluation


def _working_vocabulary(t: Union[Theory, Formula], spec: ProbabilitySpec,
                        vocab: Optional[Vocabulary]) -> Vocabulary:
    if vocab is None:
        vocab = vocabulary_of(t)
    return make_vocabulary(set(vocab.atoms) | set(spec.atoms()),
                           vocab.predicates, vocab.constants)


def world_probability(spec: ProbabilitySpec, w: World) -> Fraction:
    """Product-form probability of one world under the specification."""
    p = Fraction(1)
    mentioned: set[str] = set()
    for atom, weight in spec.facts:
        mentioned.add(atom)
        p *= weight if w.truth(atom) else 1 - weight
    for ad in spec.disjunctions:
        chosen: Optional[Fraction] = None
        total = Fraction(0)
        exclusive = True
        for atom, weight in ad:
            mentioned.add(atom)
            total += weight
            if w.truth(atom):
                if chosen is not None:
                    exclusive = False
                chosen = weight
        if not exclusive:
            return Fraction(0)
        p *= chosen if chosen is not None else 1 - total
    defaults = sum(1 for a in w.vocabulary.atoms if a not in mentioned)
    return p * HALF ** defaults


def _choice_groups(spec: ProbabilitySpec):
    """Independent choice groups with their weights and atom constraints.

    Facts at exactly one half are left to the default divisor; zero-weight
    branches are dropped.
    """
    groups: list[list[tuple[Fraction, tuple[tuple[str, bool], ...]]]] = []
    constrained: set[str] = set()
    for ad in spec.disjunctions:
        options = []
        total = sum((w for _, w in ad), Fraction(0))
        for atom, weight in ad:
            if weight:
                options.append(
                    (weight, tuple((a, a == atom) for a, _ in ad))
                )
        if total < 1:
            options.append((1 - total, tuple((a, False) for a, _ in ad)))
        groups.append(options)
        constrained.update(a for a, _ in ad)
    for atom, weight in spec.facts:
        if weight == HALF:
            continue
        options = []
        if weight:
            options.append((weight, ((atom, True),)))
        if weight != 1:
            options.append((1 - weight, ((atom, False),)))
        groups.append(options)
        constrained.add(atom)
    return groups, constrained


def theory_probability(spec: ProbabilitySpec, t: Union[Theory, Formula],
                       vocab: Optional[Vocabulary] = None,
                       cap: int = DEFAULT_CAP) -> Fraction:
    """Exact probability of a propositional theory under ``spec``.

    Worlds range over ``vocab`` (default: the theory's vocabulary extended
    with every atom the specification mentions).
    """
    f = t.as_formula() if isinstance(t, Theory) else t
    vocab = _working_vocabulary(f, spec, vocab)
    groups, constrained = _choice_groups(spec)
    missing = constrained - set(vocab.atoms)
    if missing:
        raise UnknownAtomError(
            f"specification atoms not covered by the world vocabulary: {sorted(missing)}"
        )
    defaults = len(vocab.atoms) - len(constrained)
    choices = [
        (math.prod((w for w, _ in combo), start=Fraction(1)),
         tuple(c for _, cs in combo for c in cs))
        for combo in itertools.product(*groups)
    ]
    counts = [0] * len(choices)
    for lo, bb in sweep_blocks(vocab, cap):
        full = (1 << (1 << bb)) - 1
        sat = satisfying_block(f, vocab, lo, bb)
        if not sat:
            continue
        atom_masks: dict[str, int] = {}
        for i, (weight, constraints) in enumerate(choices):
            m = sat
            for atom, value in constraints:
                am = atom_masks.get(atom)
                if am is None:
                    am = atom_block_mask(vocab.index(atom), lo, bb)
                    atom_masks[atom] = am
                m &= am if value else full ^ am
                if not m:
                    break
            counts[i] += m.bit_count()
    scale = HALF ** defaults
    return sum(
        (w * c * scale for (w, _), c in zip(choices, counts)), Fraction(0)
    )


def model_count(t: Union[Theory, Formula], vocab: Optional[Vocabulary] = None,
                cap: int = DEFAULT_CAP) -> int:
    """Number of satisfying worlds over the (given or inferred) vocabulary."""
    f = t.as_formula() if isinstance(t, Theory) else t
    if vocab is None:
        vocab = vocabulary_of(f)
    total = 0
    for lo, bb in sweep_blocks(vocab, cap):
        total += satisfying_block(f, vocab, lo, bb).bit_count()
    return total


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class RngInfo:
    seed: int
    samples: int
    algorithm: str = RNG_ALGORITHM


@dataclass(frozen=True)
class SampleEstimate:
    value: Fraction
    stderr: float
    samples: int
    seed: int
    algorithm: str = RNG_ALGORITHM


def _eval_array(f: Formula, env: dict[str, np.ndarray]) -> np.ndarray:
    if isinstance(f, Atom):
        return env[ground_atom_name(f)]
    if isinstance(f, TrueConst):
        return np.ones(len(next(iter(env.values()))), dtype=bool)
    if isinstance(f, FalseConst):
        return np.zeros(len(next(iter(env.values()))), dtype=bool)
    if isinstance(f, Not):
        return ~_eval_array(f.child, env)
    if isinstance(f, And):
        out = _eval_array(f.children[0], env)
        for c in f.children[1:]:
            out = out & _eval_array(c, env)
        return out
    if isinstance(f, Or):
        out = _eval_array(f.children[0], env)
        for c in f.children[1:]:
            out = out | _eval_array(c, env)
        return out
    if isinstance(f, Implies):
        return ~_eval_array(f.lhs, env) | _eval_array(f.rhs, env)
    if isinstance(f, Equiv):
        return _eval_array(f.lhs, env) == _eval_array(f.rhs, env)
    raise TypeError(f"cannot sample quantified formula {f!r}")


def sample_worlds(spec: ProbabilitySpec, vocab: Vocabulary, samples: int,
                  rng: np.random.Generator) -> dict[str, np.ndarray]:
    """One boolean column per atom; draw order is annotated disjunctions,
    then facts, then default atoms in vocabulary order."""
    env: dict[str, np.ndarray] = {}
    for ad in spec.disjunctions:
        u = rng.random(samples)
        low = Fraction(0)
        for atom, weight in ad:
            high = low + weight
            env[atom] = (u >= float(low)) & (u < float(high))
            low = high
    for atom, weight in spec.facts:
        env[atom] = rng.random(samples) < float(weight)
    for atom in vocab.atoms:
        if atom not in env:
            env[atom] = rng.random(samples) < 0.5
    return env


def estimate_probability(spec: ProbabilitySpec, t: Union[Theory, Formula],
                         samples: int, seed: int,
                         vocab: Optional[Vocabulary] = None) -> SampleEstimate:
    """Monte Carlo estimate of the theory probability.

    Deterministic for a fixed seed; the standard error is the binomial
    ``sqrt(p(1-p)/n)`` of the estimate.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    f = t.as_formula() if isinstance(t, Theory) else t
    vocab = _working_vocabulary(f, spec, vocab)
    rng = np.random.Generator(np.random.PCG64(seed))
    env = sample_worlds(spec, vocab, samples, rng)
    if env:
        hits = int(_eval_array(f, env).sum())
    else:
        hits = samples if _eval_const(f) else 0
    value = Fraction(hits, samples)
    stderr = math.sqrt(float(value) * (1.0 - float(value)) / samples)
    return SampleEstimate(value, stderr, samples, seed)


def _eval_const(f: Formula) -> bool:
    return evaluate(f, World(make_vocabulary(()), 0))


# ---------------------------------------------------------------------------
# loss measures


@dataclass(frozen=True)
class LossReport:
    """The three probabilities and three losses for one theory and policy."""

    theory: str
    policy: tuple[str, ...]
    mode: str
    world_count: int
    p_theory: Fraction
    p_strong: Fraction
    p_weak: Fraction
    loss_nc: Fraction
    loss_sc: Fraction
    loss_t: Fraction
    limiting_flags: tuple[str, ...] = ()
    rng: Optional[RngInfo] = None

    def to_json_dict(self) -> dict:
        out: dict = {
            "theory": self.theory,
            "policy": list(self.policy),
            "mode": self.mode,
            "world_count": self.world_count,
        }
        for name in ("p_theory", "p_strong", "p_weak", "loss_nc", "loss_sc", "loss_t"):
            value: Fraction = getattr(self, name)
            out[name] = format_probability(value)
            out[name + "_float"] = float(value)
        out["limiting_flags"] = list(self.limiting_flags)
        if self.rng is not None:
            out["rng"] = {
                "algorithm": self.rng.algorithm,
                "seed": self.rng.seed,
                "samples": self.rng.samples,
            }
        return out


def loss_measures(t: Union[Theory, Formula],
                  pol: Union[ForgettingPolicy, Iterable[str]],
                  spec: Optional[ProbabilitySpec] = None,
                  mode: str = "exact",
                  domain: Iterable[str] = (),
                  samples: int = 100_000,
                  seed: int = 0,
                  cap: int = DEFAULT_CAP) -> LossReport:
    """Full pipeline: ground, forget both ways, measure, difference.

    All three probabilities are taken over the original theory's ground
    vocabulary (extended with specification atoms), so forgetting results
    are weighed in the same world space as the theory itself.
    """
    if spec is None:
        spec = ProbabilitySpec.uniform()
    if isinstance(t, Formula):
        t = Theory("theory", (t,))
    if mode not in ("exact", "sampled"):
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")

    gvocab = ground_vocabulary(t, domain)
    grounded = ground(t, domain)
    atoms = expand_policy(pol, gvocab)
    strong = forget_strong(grounded, atoms)
    weak = forget_weak(grounded, atoms)
    working = _working_vocabulary(grounded.as_formula(), spec, gvocab)

    rng_info: Optional[RngInfo] = None
    if mode == "exact":
        p_theory = theory_probability(spec, grounded, working, cap)
        p_strong = theory_probability(spec, strong, working, cap)
        p_weak = theory_probability(spec, weak, working, cap)
    else:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        rng = np.random.Generator(np.random.PCG64(seed))
        env = sample_worlds(spec, working, samples, rng)
        results = []
        for f in (grounded.as_formula(), strong, weak):
            hits = int(_eval_array(f, env).sum()) if env else (samples if _eval_const(f) else 0)
            results.append(Fraction(hits, samples))
        p_theory, p_strong, p_weak = results
        rng_info = RngInfo(seed, samples)

    flags = []
    if equivalent(weak, FALSE, cap):
        flags.append("weak_inconsistent")
    if equivalent(strong, TRUE, cap):
        flags.append("strong_tautological")

    pol_symbols = pol.symbols if isinstance(pol, ForgettingPolicy) else tuple(pol)
    return LossReport(
        theory=t.name,
        policy=pol_symbols,
        mode=mode,
        world_count=1 << len(working.atoms),
        p_theory=p_theory,
        p_strong=p_strong,
        p_weak=p_weak,
        loss_nc=p_strong - p_theory,
        loss_sc=p_theory - p_weak,
        loss_t=p_strong - p_weak,
        limiting_flags=tuple(flags),
        rng=rng_info,
    )
