#include "doctest.h"

#include "helpers.hpp"
#include "ratt/syntax.hpp"

using namespace ratt;
using ratt::tests::Rng;

namespace {

Type str_nat() { return ty_stream(ty_nat()); }

// Random type with mu binders, for the alpha-equality properties.
Type random_type(Rng& rng, int depth, std::vector<std::string>& binders) {
    if (depth <= 0 || rng.below(6) == 0) {
        if (!binders.empty() && rng.below(2) == 0)
            return ty_var(binders[rng.below(binders.size())]);
        return rng.below(2) == 0 ? ty_nat() : ty_unit();
    }
    switch (rng.below(6)) {
        case 0: return ty_prod(random_type(rng, depth - 1, binders),
                               random_type(rng, depth - 1, binders));
        case 1: return ty_sum(random_type(rng, depth - 1, binders),
                              random_type(rng, depth - 1, binders));
        case 2: return ty_arrow(random_type(rng, depth - 1, binders),
                                random_type(rng, depth - 1, binders));
        case 3: return ty_delay(random_type(rng, depth - 1, binders));
        case 4: return ty_box(random_type(rng, depth - 1, binders));
        default: {
            std::string b = "v" + std::to_string(rng.below(4));
            binders.push_back(b);
            Type body = random_type(rng, depth - 1, binders);
            binders.pop_back();
            return ty_mu(b, body);
        }
    }
}

// Consistent renaming of every mu binder.
Type rename_binders(const Type& t, const std::string& suffix) {
    switch (t->kind) {
        case TypeKind::Mu: {
            std::string fresh = t->name + suffix;
            Type body = subst_type(t->a, t->name, ty_var(fresh));
            return ty_mu(fresh, rename_binders(body, suffix));
        }
        case TypeKind::Prod:
            return ty_prod(rename_binders(t->a, suffix), rename_binders(t->b, suffix));
        case TypeKind::Sum:
            return ty_sum(rename_binders(t->a, suffix), rename_binders(t->b, suffix));
        case TypeKind::Arrow:
            return ty_arrow(rename_binders(t->a, suffix), rename_binders(t->b, suffix));
        case TypeKind::Delay: return ty_delay(rename_binders(t->a, suffix));
        case TypeKind::Box: return ty_box(rename_binders(t->a, suffix));
        default: return t;
    }
}

} // namespace

TEST_CASE("well_formed_type") {
    CHECK(well_formed_type({}, ty_nat()));
    CHECK(well_formed_type({}, ty_mu("a", ty_prod(ty_nat(), ty_var("a")))));
    CHECK_FALSE(well_formed_type({}, ty_var("a")));
    CHECK(well_formed_type({"a"}, ty_var("a")));
    CHECK_FALSE(well_formed_type({}, ty_arrow(ty_var("b"), ty_nat())));
}

TEST_CASE("is_stable") {
    CHECK(is_stable(ty_nat()));
    CHECK(is_stable(ty_box(str_nat())));
    CHECK_FALSE(is_stable(ty_arrow(ty_nat(), ty_nat())));
    CHECK(is_stable(ty_prod(ty_nat(), ty_sum(ty_unit(), ty_nat()))));
    CHECK_FALSE(is_stable(ty_delay(ty_nat())));
    CHECK_FALSE(is_stable(str_nat()));
    CHECK(is_stable(ty_var("A"), {"A"}));
    CHECK_FALSE(is_stable(ty_var("A"), {}));
}

TEST_CASE("is_value_type") {
    CHECK(is_value_type(ty_prod(ty_nat(), ty_sum(ty_unit(), ty_nat()))));
    CHECK_FALSE(is_value_type(ty_delay(ty_nat())));
    CHECK_FALSE(is_value_type(ty_box(ty_nat())));
    CHECK_FALSE(is_value_type(ty_arrow(ty_nat(), ty_nat())));
}

TEST_CASE("subst_type") {
    Type mu = ty_mu("a", ty_prod(ty_nat(), ty_var("a")));
    Type expected = ty_prod(ty_nat(), ty_delay(mu));
    CHECK(type_equal(subst_type(ty_prod(ty_nat(), ty_var("a")), "a", ty_delay(mu)), expected));
    CHECK(type_equal(unfold_mu(mu), expected));

    CHECK(type_equal(subst_type(ty_nat(), "a", ty_box(ty_nat())), ty_nat()));

    Type shadow = ty_mu("a", ty_var("a"));
    CHECK(type_equal(subst_type(shadow, "a", ty_nat()), shadow));
}

TEST_CASE("subst_type avoids capture") {
    // (mu b. a * b)[a := b] must rename the binder rather than capture.
    Type t = ty_mu("b", ty_prod(ty_var("a"), ty_var("b")));
    Type r = subst_type(t, "a", ty_var("b"));
    CHECK(r->kind == TypeKind::Mu);
    CHECK(r->name != "b");
    CHECK(r->a->a->name == "b");
}

TEST_CASE("type equality is alpha-invariant and an equivalence") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> binders;
        Type t = random_type(rng, 5, binders);
        Type r1 = rename_binders(t, "_x");
        Type r2 = rename_binders(t, "_y");
        CHECK(type_equal(t, t));
        CHECK(type_equal(t, r1));
        CHECK(type_equal(r1, t));
        CHECK(type_equal(r1, r2));
    }
    CHECK_FALSE(type_equal(ty_nat(), ty_unit()));
    CHECK_FALSE(type_equal(ty_mu("a", ty_var("a")), ty_mu("a", ty_nat())));
}

TEST_CASE("stability and value types line up with well-formedness") {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> binders;
        Type t = random_type(rng, 4, binders);
        if (!well_formed_type({}, t)) continue;
        if (is_value_type(t)) CHECK(is_stable(t));
        if (is_stable(t)) CHECK(well_formed_type({}, t));
    }
}

TEST_CASE("subst_term basics") {
    Term three = t_nat(Nat(3));
    Term lam = t_lam("y", t_add(t_var("x"), t_var("y")));
    Term substituted = subst_term(lam, "x", three);
    CHECK(term_identical(substituted, t_lam("y", t_add(three, t_var("y")))));

    Term id = t_lam("x", t_var("x"));
    CHECK(term_identical(subst_term(id, "x", three), id));

    Term advx = t_adv(t_var("x"));
    Term loc = t_loc(Location{5, false});
    CHECK(term_identical(subst_term(advx, "x", loc), t_adv(loc)));
}

TEST_CASE("subst_term avoids capture") {
    // (\y. x)[x := y] must not capture the bound y.
    Term t = t_lam("y", t_var("x"));
    Term r = subst_term(t, "x", t_var("y"));
    CHECK(r->kind == TermKind::Lam);
    CHECK(r->name != "y");
    CHECK(r->a->kind == TermKind::Var);
    CHECK(r->a->name == "y");
}

TEST_CASE("substitution is idempotent on the eliminated variable") {
    Term body = t_pair(t_var("x"), t_lam("z", t_app(t_var("x"), t_var("z"))));
    Term v = t_lam("w", t_var("w")); // closed
    Term once = subst_term(body, "x", v);
    Term twice = subst_term(once, "x", t_nat(Nat(99)));
    CHECK(term_identical(once, twice));
}

TEST_CASE("closed values are fixed points of substitution") {
    std::vector<Term> values = {
        t_unit(),
        t_nat(Nat(17)),
        t_lam("x", t_var("x")),
        t_pair(t_nat(Nat(1)), t_inj(2, t_unit())),
        t_box(t_lam("x", t_add(t_var("x"), t_nat(Nat(1))))),
        t_into(t_pair(t_nat(Nat(0)), t_loc(Location{0, false}))),
        t_fix("s", t_into(t_pair(t_nat(Nat(0)), t_var("s")))),
    };
    for (const auto& v : values) {
        CHECK(is_value(v));
        CHECK(free_vars(v).empty());
        CHECK(term_identical(subst_term(v, "q", t_nat(Nat(5))), v));
    }
}

TEST_CASE("is_value distinguishes value shapes") {
    CHECK_FALSE(is_value(t_add(t_nat(Nat(1)), t_nat(Nat(2)))));
    CHECK_FALSE(is_value(t_pair(t_nat(Nat(1)), t_add(t_nat(Nat(1)), t_nat(Nat(1))))));
    CHECK(is_value(t_pair(t_nat(Nat(1)), t_nat(Nat(2)))));
    CHECK_FALSE(is_value(t_app(t_lam("x", t_var("x")), t_unit())));
    CHECK(is_value(t_box(t_add(t_var("x"), t_var("y"))))); // box of any term
}

TEST_CASE("arbitrary-precision naturals") {
    Nat big = Nat::from_string("340282366920938463463374607431768211456"); // 2^128
    CHECK(big.to_string() == "340282366920938463463374607431768211456");
    Nat two(2);
    Nat doubled = big * two;
    CHECK(doubled.to_string() == "680564733841876926926749214863536422912");
    CHECK(doubled.monus(big) == big);
    CHECK(big.monus(doubled).is_zero());
    CHECK(big < doubled);
    CHECK((big + big) == doubled);
}
