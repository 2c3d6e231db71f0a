import random
from fractions import Fraction

import pytest

from floss import (
    FALSE,
    TRUE,
    Atom,
    ProbabilitySpec,
    Rule,
    StratifiedProgram,
    Theory,
    check_stratification,
    compile_fo,
    compile_prop,
    emit_problog,
    evaluate,
    ground,
    ground_vocabulary,
    least_model,
    least_model_masks,
    parse_formula,
    vocabulary_of,
    world_from_dict,
    worlds,
)
from floss.errors import UnstratifiableError
from floss.formulas import count_connectives, is_closed, make_vocabulary, satisfying_block
from floss.programs import Literal

from conftest import rand_fo, rand_prop

EQUIV_FORMULA = parse_formula("q <-> (p & ~q & s)")

CARS = Theory("cars", (
    parse_formula("jcar -> (car & reliable & fcar)"),
    parse_formula("ecar -> (car & fast & fcar)"),
    parse_formula("fcar -> (ecar | jcar)"),
))


def _program(rules, root="r"):
    prog = StratifiedProgram(rules=list(rules), root=Atom(root), aux_map={},
                             strata={}, vocabulary=make_vocabulary(()))
    return prog


class TestCompileProp:
    def test_equiv_program_shape(self):
        prog = compile_prop(EQUIV_FORMULA)
        assert len(prog.rules) == 7
        bodies = [[(lit.atom.name, lit.positive) for lit in r.body] for r in prog.rules]
        # one negation rule, one 3-literal conjunction rule, four one-literal
        # direction rules, one final conjunction
        assert bodies[0] == [("q", False)]
        assert len(bodies[1]) == 3
        assert [len(b) for b in bodies] == [1, 3, 1, 1, 1, 1, 2]
        heads = [r.head.name for r in prog.rules]
        assert heads[2] == heads[3] and heads[4] == heads[5]
        assert heads[2].endswith("_1") and heads[4].endswith("_2")

    def test_single_atom(self):
        prog = compile_prop(Atom("p"))
        assert prog.rules == []
        assert prog.root == Atom("p")

    def test_cars_root_counts_models(self):
        prog = compile_prop(CARS.as_formula())
        vocab = vocabulary_of(CARS)
        masks = least_model_masks(prog, vocab)
        assert masks[prog.root.name].bit_count() == 13

    def test_sharing_single_aux(self):
        a = parse_formula("p & ~q")
        doubled = parse_formula("(p & ~q) | (p & ~q) | r")
        prog = compile_prop(doubled)
        aux_for_a = [atom for f, atom in prog.aux_map.items() if f == a]
        assert len(aux_for_a) == 1
        defining = {r.head.name for r in prog.rules}
        assert sum(name == aux_for_a[0].name for name in defining) == 1

    def test_rejects_first_order(self):
        with pytest.raises(ValueError):
            compile_prop(parse_formula("p(a)"))

    def test_constants_compile(self):
        prog = compile_prop(TRUE)
        vocab = make_vocabulary(())
        lm = least_model(prog, world_from_dict(vocab, {}))
        assert lm[prog.root.name] is True
        prog = compile_prop(FALSE)
        lm = least_model(prog, world_from_dict(vocab, {}))
        assert lm[prog.root.name] is False


class TestCompileFo:
    def test_forall_exists_shape(self):
        prog = compile_fo(parse_formula("forall X. exists Y. s(X,Y,a) & t(Y,b)"))
        assert len(prog.rules) == 5
        # conjunction, existential projection, inner negation, witness, root
        assert [len(r.head.args) for r in prog.rules] == [2, 1, 1, 0, 0]
        assert [lit.positive for lit in prog.rules[2].body] == [False]
        assert [lit.positive for lit in prog.rules[4].body] == [False]

    def test_belief_base_root(self):
        prog = compile_fo(BELIEF_FORMULA)
        gv = ground_vocabulary(Theory("b", (BELIEF_FORMULA,)), ["eve"])
        masks = least_model_masks(prog, gv)
        grounded = ground(Theory("b", (BELIEF_FORMULA,)), ["eve"]).as_formula()
        assert masks[prog.root.name] == satisfying_block(grounded, gv, 0, len(gv.atoms))

    def test_ground_atom_is_base_case(self):
        prog = compile_fo(parse_formula("ms(eve)"))
        assert prog.rules == []
        assert prog.root == parse_formula("ms(eve)")

    def test_open_formula_rejected(self):
        with pytest.raises(Exception):
            compile_fo(parse_formula("p(X)"))

    def test_disjoint_disjunction_gets_domain_guard(self):
        prog = compile_fo(parse_formula("forall X. forall Y. p(X) | q(Y)"))
        assert prog.uses_dom
        guarded = [r for r in prog.rules
                   if any(lit.atom.name == "dom" for lit in r.body)]
        assert guarded
        t = Theory("dj", (parse_formula("forall X. forall Y. p(X) | q(Y)"),))
        gv = ground_vocabulary(t, ["c1", "c2"])
        masks = least_model_masks(prog, gv)
        grounded = ground(t, ["c1", "c2"]).as_formula()
        assert masks[prog.root.name] == satisfying_block(grounded, gv, 0, len(gv.atoms))


BELIEF_FORMULA = Theory("belief", (
    parse_formula("forall X. ms(X) -> (h(X) & t(X))"),
    parse_formula("forall X. (ss(X) | t(X)) -> ich(X)"),
)).as_formula()


class TestStratification:
    def test_negative_self_loop(self):
        prog = _program([Rule(Atom("a"), (Literal(Atom("a"), False),))], root="a")
        with pytest.raises(UnstratifiableError) as err:
            check_stratification(prog)
        assert "a" in str(err.value)

    def test_positive_cycle_allowed(self):
        prog = _program([
            Rule(Atom("a"), (Literal(Atom("b")),)),
            Rule(Atom("b"), (Literal(Atom("a")),)),
        ], root="a")
        strata = check_stratification(prog)
        assert strata["a"] == strata["b"] == 1

    def test_two_strata(self):
        prog = _program([
            Rule(Atom("a"), (Literal(Atom("b"), False),)),
            Rule(Atom("b"), (Literal(Atom("c")),)),
        ], root="a")
        strata = check_stratification(prog)
        assert strata["b"] == strata["c"] == 1
        assert strata["a"] == 2

    def test_random_programs_always_stratifiable(self):
        rng = random.Random(97)
        for _ in range(300):
            f = rand_prop(rng, ["a", "b", "c", "d"], rng.randint(1, 5))
            prog = compile_prop(f)
            strata = prog.strata
            for rule in prog.rules:
                for lit in rule.body:
                    if lit.positive:
                        assert strata[lit.atom.name] <= strata[rule.head.name]
                    else:
                        assert strata[lit.atom.name] < strata[rule.head.name]


class TestLeastModel:
    def test_equiv_program_world(self):
        prog = compile_prop(EQUIV_FORMULA)
        w = world_from_dict(vocabulary_of(EQUIV_FORMULA),
                            {"p": True, "q": False, "s": True})
        assert least_model(prog, w)[prog.root.name] is False
        assert evaluate(EQUIV_FORMULA, w) is False

    def test_empty_program_keeps_base(self):
        prog = compile_prop(Atom("p"))
        w = world_from_dict(make_vocabulary(["p"]), {"p": True})
        assert least_model(prog, w) == {"p": True}

    def test_agrees_with_mask_evaluator(self):
        rng = random.Random(101)
        for _ in range(60):
            f = rand_prop(rng, ["a", "b", "c"], rng.randint(1, 4))
            prog = compile_prop(f)
            vocab = make_vocabulary(["a", "b", "c"])
            masks = least_model_masks(prog, vocab)
            for w in worlds(vocab):
                lm = least_model(prog, w)
                for name, mask in masks.items():
                    assert lm.get(name, False) == bool(mask >> w.bits & 1)


class TestSizeBound:
    def test_rule_count_within_bound(self):
        rng = random.Random(103)
        for _ in range(300):
            f = rand_prop(rng, ["a", "b", "c", "d", "e", "f"], rng.randint(1, 6))
            prog = compile_prop(f)
            assert len(prog.rules) <= 5 * count_connectives(f)

    def test_first_order_bound(self):
        rng = random.Random(104)
        for _ in range(100):
            f = rand_fo(rng, [("p", 1), ("q", 1)], ["c1", "c2"], rng.randint(1, 4))
            if not is_closed(f):
                continue
            prog = compile_fo(f)
            assert len(prog.rules) <= 5 * count_connectives(f)


class TestEmission:
    def test_trivial_fact_and_query(self):
        prog = compile_prop(Atom("p"))
        spec = ProbabilitySpec(facts=(("p", Fraction(1, 2)),))
        assert emit_problog(prog, spec, queries=[prog.root]) == "0.5::p.\nquery(p).\n"

    def test_defaults_cover_uncovered_atoms(self):
        prog = compile_prop(parse_formula("p & q"))
        spec = ProbabilitySpec(facts=(("p", Fraction(3, 10)),))
        text = emit_problog(prog, spec, queries=[prog.root])
        assert text.startswith("0.3::p.\n0.5::q.\n")
        assert text.count("query(") == 1

    def test_annotated_disjunction_first(self):
        prog = compile_prop(parse_formula("a | b"))
        spec = ProbabilitySpec(disjunctions=(((("a"), Fraction(1, 5)), (("b"), Fraction(3, 10))),))
        text = emit_problog(prog, spec, queries=[prog.root])
        assert text.splitlines()[0] == "0.2::a; 0.3::b."

    def test_byte_stable(self):
        prog1 = compile_prop(CARS.as_formula())
        prog2 = compile_prop(CARS.as_formula())
        assert emit_problog(prog1, queries=[prog1.root]) == emit_problog(prog2, queries=[prog2.root])

    def test_dom_facts_emitted_when_guarded(self):
        prog = compile_fo(parse_formula("forall X. forall Y. p(X) | q(Y)"))
        text = emit_problog(prog, domain=["c1", "c2"])
        assert "dom(c1).\ndom(c2)." in text
