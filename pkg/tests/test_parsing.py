import random
from fractions import Fraction

import pytest

from floss import (
    Atom,
    Equiv,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    And,
    Var,
    Const,
    parse_formula,
    parse_theory_file,
    render,
)
from floss.errors import ParseError

from conftest import rand_fo, rand_prop


class TestTheoryFiles:
    def test_minimal_file(self):
        tf = parse_theory_file("theory: (sp1 & sp2) | sp3. forget: sp1.")
        assert len(tf.formulas) == 1
        assert tf.policy == ("sp1",)
        assert tf.formulas[0] == parse_formula("(sp1 & sp2) | sp3")

    def test_annotated_disjunction(self):
        tf = parse_theory_file("prob 0.2::ecar ; 0.3::jcar.")
        assert tf.facts == []
        assert tf.disjunctions == [[("ecar", Fraction("0.2")), ("jcar", Fraction("0.3"))]]

    def test_fact_line(self):
        tf = parse_theory_file("prob 0.8::ich(eve).")
        assert tf.facts == [("ich(eve)", Fraction("0.8"))]
        assert tf.disjunctions == []

    def test_quantified_formula(self):
        tf = parse_theory_file("theory: forall X. ms(X) -> (h(X) & t(X)).")
        f = tf.formulas[0]
        assert f == Forall("X", Implies(
            Atom("ms", (Var("X"),)),
            And((Atom("h", (Var("X"),)), Atom("t", (Var("X"),)))),
        ))

    def test_sections_any_order(self):
        text = "forget: a.\ntheory: a | b.\ndomain: c1, c2.\nprob 0.5::a."
        tf = parse_theory_file(text)
        assert tf.domain == ("c1", "c2")
        assert tf.policy == ("a",)
        assert tf.facts == [("a", Fraction(1, 2))]

    def test_comments_ignored(self):
        tf = parse_theory_file("% a comment\ntheory: p. % trailing\n")
        assert tf.formulas == [Atom("p")]

    def test_duplicate_forget_rejected(self):
        with pytest.raises(ParseError):
            parse_theory_file("forget: a. forget: b.")

    def test_nonground_prob_atom_rejected(self):
        with pytest.raises(ParseError) as err:
            parse_theory_file("prob 0.5::p(X).")
        assert "ground" in str(err.value)

    def test_weight_range_checked(self):
        with pytest.raises(ParseError):
            parse_theory_file("prob 1.5::p.")

    def test_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_theory_file("theory:\n  p &&& q.")
        assert err.value.line == 2

    def test_empty_theory_section_rejected(self):
        with pytest.raises(ParseError):
            parse_theory_file("theory: forget: a.")


class TestFormulaSyntax:
    def test_precedence_chain(self):
        f = parse_formula("~a & b | c -> d <-> e")
        assert isinstance(f, Equiv)
        assert isinstance(f.lhs, Implies)
        assert isinstance(f.lhs.lhs, Or)
        assert f.lhs.lhs.children[0] == And((Not(Atom("a")), Atom("b")))

    def test_implies_right_associative(self):
        f = parse_formula("a -> b -> c")
        assert f == Implies(Atom("a"), Implies(Atom("b"), Atom("c")))

    def test_equiv_non_associative(self):
        with pytest.raises(ParseError):
            parse_formula("a <-> b <-> c")

    def test_quantifier_scope_maximal(self):
        f = parse_formula("forall X. p(X) -> q(X)")
        assert isinstance(f, Forall)
        assert isinstance(f.body, Implies)

    def test_nary_connectives_flattened(self):
        f = parse_formula("a & b & c")
        assert f == And((Atom("a"), Atom("b"), Atom("c")))
        g = parse_formula("(a | b) | c")
        assert g == Or((Atom("a"), Atom("b"), Atom("c")))

    def test_terms(self):
        f = parse_formula("s(X, b)")
        assert f == Atom("s", (Var("X"), Const("b")))


class TestRender:
    def test_implication_with_disjunction(self):
        f = Implies(Atom("fcar"), Or((
            And((Atom("car"), Atom("fast"))),
            And((Atom("car"), Atom("reliable"))),
        )))
        assert render(f) == "fcar -> ((car & fast) | (car & reliable))"

    def test_negated_atom(self):
        assert render(Not(Atom("p"))) == "~p"

    def test_quantifier_prefix(self):
        f = Forall("X", Exists("Y", Atom("s", (Var("X"), Var("Y")))))
        assert render(f) == "forall X. exists Y. s(X,Y)"

    def test_round_trip_random_propositional(self):
        rng = random.Random(87)
        for _ in range(700):
            f = rand_prop(rng, ["a", "b", "c", "d"], rng.randint(0, 5))
            assert parse_formula(render(f)) == f

    def test_round_trip_random_first_order(self):
        rng = random.Random(88)
        for _ in range(300):
            f = rand_fo(rng, [("p", 1), ("r", 2)], ["c1", "c2"], rng.randint(0, 3))
            assert parse_formula(render(f)) == f
