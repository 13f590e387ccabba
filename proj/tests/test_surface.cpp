#include "doctest.h"

#include "helpers.hpp"
#include "oracles.hpp"
#include "ratt/surface.hpp"

using namespace ratt;
using namespace ratt::tests;

TEST_CASE("parse accepts the basic definition forms") {
    SurfaceProgram p = parse("def zeros : Box (Str Nat) = fix s. 0 :: s");
    REQUIRE(p.defs.size() == 1);
    CHECK(p.defs[0].name == "zeros");
    CHECK_FALSE(p.defs[0].diamond);
    CHECK(p.defs[0].body->kind == SKind::Fix);

    CHECK(parse("").defs.empty());
    CHECK(parse("-- just a comment\n").defs.empty());

    SurfaceProgram q = parse("def from : Box (Nat -> Str Nat) $ n = n :: from <* (n + 1)");
    REQUIRE(q.defs.size() == 1);
    CHECK(q.defs[0].diamond);
    REQUIRE(q.defs[0].postpats.size() == 1);
    CHECK(q.defs[0].postpats[0].name == "n");
}

TEST_CASE("parse reports syntax errors with positions") {
    CHECK_THROWS_AS(parse("def x : Nat = ("), SyntaxError);
    CHECK_THROWS_AS(parse("def : Nat = 3"), SyntaxError);
    CHECK_THROWS_AS(parse("def x Nat = 3"), SyntaxError);
    try {
        parse("def x : Nat =\n  (");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.pos.line == 2);
    }
}

TEST_CASE("desugaring from matches the displayed core form") {
    auto defs = desugar(parse(
        "def from : Box (Nat -> Str Nat) $ n = n :: delay (adv from (progress (n + 1)))"));
    REQUIRE(defs.size() == 1);
    Term expected = t_fix(
        "f", t_lam("n", t_into(t_pair(
                 t_var("n"),
                 t_delay(t_app(t_adv(t_var("f")),
                               t_progress(t_add(t_var("n"), t_nat(Nat(1))))))))));
    CHECK(term_alpha_equal(defs[0].term, expected));
}

TEST_CASE("the applicative operators expand to their defining forms") {
    auto defs = desugar(parse(
        "def ap : Box (O (Nat -> Nat) -> O Nat -> O Nat) = box (\\t. \\u. t <*> u)"));
    // t <*> u  =  delay (adv t (adv u))
    Term lam = defs[0].term->a; // under box
    Term body = lam->a->a;      // under two lambdas
    Term expected = t_delay(t_app(t_adv(t_var("t")), t_adv(t_var("u"))));
    CHECK(term_alpha_equal(body, expected));

    auto defs2 = desugar(parse(
        "def ap : Box (O (Nat -> Nat) -> Nat -> O Nat) = box (\\t. \\u. t <* u)"));
    Term body2 = defs2[0].term->a->a->a;
    CHECK(term_alpha_equal(body2,
                           t_delay(t_app(t_adv(t_var("t")), t_progress(t_var("u"))))));

    auto defs3 = desugar(parse(
        "def ap : Box (Nat -> Nat) -> Nat -> Box Nat = \\t. \\u. t [*] u"));
    Term body3 = defs3[0].term->a->a;
    CHECK(term_alpha_equal(body3,
                           t_box(t_app(t_unbox(t_var("t")), t_promote(t_var("u"))))));

    auto defs4 = desugar(parse(
        "def ap : Box (Nat -> Nat) -> Box Nat -> Box Nat = \\t. \\u. t [*]> u"));
    Term body4 = defs4[0].term->a->a;
    CHECK(term_alpha_equal(body4,
                           t_box(t_app(t_unbox(t_var("t")), t_unbox(t_var("u"))))));
}

TEST_CASE("if desugars to a case with the true branch second") {
    auto defs = desugar(parse("def f : Bool -> Nat = \\b. if b then 1 else 2"));
    Term body = defs[0].term->a;
    REQUIRE(body->kind == TermKind::Case);
    // in1 () is false: branch 1 is the else branch.
    CHECK(term_identical(body->b, t_nat(Nat(2))));
    CHECK(term_identical(body->c, t_nat(Nat(1))));
}

TEST_CASE("desugar reports each documented error kind") {
    auto kind_of = [](const char* src) {
        try {
            desugar(parse(src));
        } catch (const DesugarError& e) {
            return e.kind;
        }
        throw std::runtime_error("expected a desugar error");
    };
    CHECK(kind_of("def f : Nat = undefined_name") == DesugarErrorKind::UnknownIdentifier);
    CHECK(kind_of("def f [A] : A -> A = \\x. x\n"
                  "def g : Nat = f [Nat, Nat] 3") == DesugarErrorKind::ArityMismatch);
    CHECK(kind_of("def f [A] : A -> A = \\x. x\n"
                  "def g : Nat -> Nat = (\\q. \\x. x) f") ==
          DesugarErrorKind::UninstantiableTypeParameter);
    CHECK(kind_of("def f [A stable] : A -> A = \\x. x\n"
                  "def g : O Nat -> O Nat = f") ==
          DesugarErrorKind::StabilityConstraintViolated);
    // A parameter used in a stability-demanding position must be declared stable.
    CHECK(kind_of("def f [A] : Box (A -> Str A) $ a = a :: (f <* a)") ==
          DesugarErrorKind::StabilityConstraintViolated);
    CHECK(kind_of("def f : Nat = 1 + ()") == DesugarErrorKind::TypeMismatch);
}

TEST_CASE("a diamond definition always lands on a fixpoint of box type") {
    for (const char* file : {"basics.ratt", "sum.ratt", "frp.ratt", "lustre.ratt"}) {
        auto program = parse(slurp(corpus_dir() + "/" + file));
        auto defs = desugar(program);
        for (std::size_t i = 0; i < program.defs.size(); ++i) {
            if (!program.defs[i].diamond) continue;
            Term t = defs[i].term;
            Type ty = defs[i].type;
            for (std::size_t k = 0; k < program.defs[i].prepats.size(); ++k) {
                REQUIRE(t->kind == TermKind::Lam);
                REQUIRE(ty->kind == TypeKind::Arrow);
                t = t->a;
                ty = ty->b;
            }
            CHECK(t->kind == TermKind::Fix);
            CHECK(ty->kind == TypeKind::Box);
        }
    }
}

TEST_CASE("desugaring never produces an open term") {
    for (const char* file :
         {"basics.ratt", "sum.ratt", "frp.ratt", "lustre.ratt", "leaky_nats.ratt",
          "leaky.ratt"}) {
        for (const auto& d : corpus_defs(file)) {
            CHECK_MESSAGE(is_closed(d.term), file, "/", d.name);
        }
    }
}

TEST_CASE("pretty round-trips every desugared corpus definition") {
    for (const char* file :
         {"basics.ratt", "sum.ratt", "frp.ratt", "lustre.ratt", "leaky_nats.ratt",
          "leaky.ratt"}) {
        for (const auto& d : corpus_defs(file)) {
            REQUIRE(location_free(d.term));
            std::string params;
            if (!d.params.empty()) {
                params = " [";
                for (std::size_t i = 0; i < d.params.size(); ++i) {
                    if (i) params += ", ";
                    params += d.params[i];
                    if (d.stable_params.count(d.params[i])) params += " stable";
                }
                params += "]";
            }
            std::string ty = pretty(d.type);
            std::string source = "def roundtrip" + params + " : " + ty + " = (" +
                                 pretty(d.term) + " : " + ty + ")";
            std::vector<CheckedDef> again;
            REQUIRE_NOTHROW(again = desugar(parse(source)));
            Term stripped = again[0].term;
            REQUIRE(stripped->kind == TermKind::Anno);
            CHECK_MESSAGE(term_alpha_equal(stripped->a, d.term), file, "/", d.name);
        }
    }
}

TEST_CASE("the parser survives arbitrary input without crashing") {
    Rng rng(7777);
    const char chars[] = "defabcxyz ()[],.:=$\\->+-*<>|0123456789\n\"'";
    for (int i = 0; i < 1000; ++i) {
        std::string s;
        std::size_t len = rng.below(60);
        for (std::size_t j = 0; j < len; ++j) s += chars[rng.below(sizeof chars - 2)];
        try {
            parse(s);
        } catch (const SyntaxError&) {
            // expected for almost every sample
        }
    }
    CHECK(true);
}

TEST_CASE("parse after pretty recovers the same core term") {
    // Core terms that need no definition environment round-trip through a
    // plain annotated definition.
    const char* sources[] = {
        "def t : Box (Str Nat) = fix s. 0 :: s",
        "def t : Box (Nat -> Str Nat) $ n = n :: delay (adv t (progress (n + 1)))",
        "def t : Nat -> Nat * Bool = \\x. (x + 2 * 3, if x < 4 then true else false)",
        "def t : Maybe Nat -> Nat = \\m. case m of in1 u -> 0 | in2 n -> n - 1",
        "def t : Box (Ev Nat -> Ev Nat) $ e = case out e of in1 a -> val a | in2 e2 -> wait (t <*> e2)",
    };
    for (const char* src : sources) {
        auto defs = desugar(parse(src));
        std::string shown = pretty(defs[0].term);
        std::string ty = pretty(defs[0].type);
        auto again = desugar(parse("def t : " + ty + " = (" + shown + " : " + ty + ")"));
        Term stripped = again[0].term;
        if (stripped->kind == TermKind::Anno) stripped = stripped->a;
        CHECK_MESSAGE(term_alpha_equal(stripped, defs[0].term), src, " printed as ", shown);
    }
}

TEST_CASE("pair and wildcard argument patterns compile to projections") {
    auto defs = desugar(parse(
        "def swapT : Box (Nat * Bool -> Bool * Nat) $ (a, b) = (b, a)\n"
        "def constT : Box (Nat -> Nat) $ _ = 7"));
    REQUIRE(defs.size() == 2);
    CHECK(check_program(defs).ok());

    // fix swapT. \p. (snd p, fst p)
    Term body = defs[0].term->a; // under fix
    REQUIRE(body->kind == TermKind::Lam);
    Term pair = body->a;
    REQUIRE(pair->kind == TermKind::Pair);
    CHECK(pair->a->kind == TermKind::Proj);
    CHECK(pair->a->idx == 2);
    CHECK(pair->b->idx == 1);

    // And it runs: unbox swapT (3, true) evaluates to (true, 3).
    EvalOutcome out = eval(t_app(t_unbox(defs[0].term),
                                 t_pair(t_nat(Nat(3)), t_true())),
                           Store::two({}, {}));
    CHECK(term_identical(out.value, t_pair(t_true(), t_nat(Nat(3)))));
}

TEST_CASE("pretty output for the documented notations") {
    Term cell = t_into(t_pair(t_nat(Nat(0)), t_loc(Location{7, false})));
    CHECK(pretty(cell) == "0 :: #7");
    CHECK(pretty(ty_stream(ty_nat())) == "Str Nat");
    CHECK(pretty(ty_maybe(ty_nat())) == "Maybe Nat");
    CHECK(pretty(ty_bool()) == "Bool");
    CHECK(pretty(ty_event(ty_box(ty_nat()))) == "Ev (Box Nat)");
    CHECK(pretty(ty_box(ty_stream(ty_nat()))) == "Box (Str Nat)");
    CHECK(pretty(t_loc(input_location())) == "#in");

    Store s = Store::two({{Location{1, false}, t_nat(Nat(3))}}, {});
    CHECK(pretty(s) == "lock {#1 |-> 3} tick {}");
    CHECK(pretty(Store::bottom()) == "bot");
}

TEST_CASE("alias expansion commutes with substitution") {
    Type param = ty_var("A");
    Type arg = ty_prod(ty_nat(), ty_bool());
    CHECK(type_equal(subst_type(ty_stream(param), "A", arg), ty_stream(arg)));
    CHECK(type_equal(subst_type(ty_event(param), "A", arg), ty_event(arg)));
    CHECK(type_equal(subst_type(ty_maybe(param), "A", arg), ty_maybe(arg)));
}

TEST_CASE("value literals parse and print") {
    const char* literals[] = {"0", "42", "()", "(1, 2)", "(1, (2, ()))",
                              "true", "false", "in1 5", "in2 (1, 2)", "in2 (in1 ())"};
    for (const char* lit : literals) {
        Term v = parse_value(lit);
        CHECK(is_value(v));
        CHECK(term_identical(parse_value(print_value(v)), v));
    }
    CHECK(term_identical(parse_value("true"), t_inj(2, t_unit())));
    CHECK(term_identical(parse_value("false"), t_inj(1, t_unit())));
    CHECK(print_value(t_inj(2, t_unit())) == "true");
    CHECK_THROWS_AS(parse_value("\\x. x"), SyntaxError);
    CHECK_THROWS_AS(parse_value("1 +"), SyntaxError);
}

TEST_CASE("random value print/parse round trip") {
    Rng rng(2024);
    Type ty = ty_prod(ty_maybe(ty_nat()), ty_sum(ty_bool(), ty_prod(ty_nat(), ty_unit())));
    for (int i = 0; i < 200; ++i) {
        Term v = random_value(ty, rng);
        CHECK(term_identical(parse_value(print_value(v)), v));
    }
}
