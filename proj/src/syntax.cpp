#include "ratt/syntax.hpp"

#include <atomic>
#include <map>
#include <optional>
#include <utility>

namespace ratt {

namespace {

Type mk_type(TypeNode n) { return std::make_shared<const TypeNode>(std::move(n)); }
Term mk_term(TermNode n) { return std::make_shared<const TermNode>(std::move(n)); }

} // namespace

Type ty_var(std::string name) { return mk_type({TypeKind::Var, std::move(name), nullptr, nullptr}); }
Type ty_unit() {
    static Type t = mk_type({TypeKind::Unit, "", nullptr, nullptr});
    return t;
}
Type ty_nat() {
    static Type t = mk_type({TypeKind::Nat, "", nullptr, nullptr});
    return t;
}
Type ty_prod(Type a, Type b) { return mk_type({TypeKind::Prod, "", std::move(a), std::move(b)}); }
Type ty_sum(Type a, Type b) { return mk_type({TypeKind::Sum, "", std::move(a), std::move(b)}); }
Type ty_arrow(Type a, Type b) { return mk_type({TypeKind::Arrow, "", std::move(a), std::move(b)}); }
Type ty_delay(Type a) { return mk_type({TypeKind::Delay, "", std::move(a), nullptr}); }
Type ty_box(Type a) { return mk_type({TypeKind::Box, "", std::move(a), nullptr}); }
Type ty_mu(std::string binder, Type body) {
    return mk_type({TypeKind::Mu, std::move(binder), std::move(body), nullptr});
}
Type ty_meta(int id) {
    TypeNode n{TypeKind::Meta, "", nullptr, nullptr};
    n.meta_id = id;
    return mk_type(std::move(n));
}

Type ty_bool() { return ty_sum(ty_unit(), ty_unit()); }
Type ty_maybe(Type a) { return ty_sum(ty_unit(), std::move(a)); }
Type ty_stream(Type a) { return ty_mu("a", ty_prod(std::move(a), ty_var("a"))); }
Type ty_event(Type a) { return ty_mu("a", ty_sum(std::move(a), ty_var("a"))); }

namespace {

bool type_equal_rec(const Type& a, const Type& b,
                    std::map<std::string, int>& la, std::map<std::string, int>& lb, int depth) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TypeKind::Var: {
            auto ia = la.find(a->name);
            auto ib = lb.find(b->name);
            if (ia != la.end() || ib != lb.end()) {
                return ia != la.end() && ib != lb.end() && ia->second == ib->second;
            }
            return a->name == b->name;
        }
        case TypeKind::Unit:
        case TypeKind::Nat:
            return true;
        case TypeKind::Meta:
            return a->meta_id == b->meta_id;
        case TypeKind::Delay:
        case TypeKind::Box:
            return type_equal_rec(a->a, b->a, la, lb, depth);
        case TypeKind::Prod:
        case TypeKind::Sum:
        case TypeKind::Arrow:
            return type_equal_rec(a->a, b->a, la, lb, depth) &&
                   type_equal_rec(a->b, b->b, la, lb, depth);
        case TypeKind::Mu: {
            auto olda = la.count(a->name) ? std::optional<int>(la[a->name]) : std::nullopt;
            auto oldb = lb.count(b->name) ? std::optional<int>(lb[b->name]) : std::nullopt;
            la[a->name] = depth;
            lb[b->name] = depth;
            bool r = type_equal_rec(a->a, b->a, la, lb, depth + 1);
            if (olda) la[a->name] = *olda; else la.erase(a->name);
            if (oldb) lb[b->name] = *oldb; else lb.erase(b->name);
            return r;
        }
    }
    return false;
}

} // namespace

bool type_equal(const Type& a, const Type& b) {
    std::map<std::string, int> la, lb;
    return type_equal_rec(a, b, la, lb, 0);
}

bool well_formed_type(const std::set<std::string>& theta, const Type& a) {
    switch (a->kind) {
        case TypeKind::Var: return theta.count(a->name) > 0;
        case TypeKind::Unit:
        case TypeKind::Nat: return true;
        case TypeKind::Meta: return false;
        case TypeKind::Delay:
        case TypeKind::Box: return well_formed_type(theta, a->a);
        case TypeKind::Prod:
        case TypeKind::Sum:
        case TypeKind::Arrow:
            return well_formed_type(theta, a->a) && well_formed_type(theta, a->b);
        case TypeKind::Mu: {
            std::set<std::string> inner = theta;
            inner.insert(a->name);
            return well_formed_type(inner, a->a);
        }
    }
    return false;
}

bool is_stable(const Type& a, const std::set<std::string>& stable_vars) {
    switch (a->kind) {
        case TypeKind::Unit:
        case TypeKind::Nat: return true;
        case TypeKind::Box: return true;
        case TypeKind::Var: return stable_vars.count(a->name) > 0;
        case TypeKind::Prod:
        case TypeKind::Sum:
            return is_stable(a->a, stable_vars) && is_stable(a->b, stable_vars);
        default: return false;
    }
}

bool is_stable(const Type& a) { return is_stable(a, {}); }

bool is_value_type(const Type& a) {
    switch (a->kind) {
        case TypeKind::Unit:
        case TypeKind::Nat: return true;
        case TypeKind::Prod:
        case TypeKind::Sum:
            return is_value_type(a->a) && is_value_type(a->b);
        default: return false;
    }
}

namespace {

void free_type_vars(const Type& a, std::set<std::string> bound, std::set<std::string>& out) {
    switch (a->kind) {
        case TypeKind::Var:
            if (!bound.count(a->name)) out.insert(a->name);
            return;
        case TypeKind::Mu:
            bound.insert(a->name);
            free_type_vars(a->a, std::move(bound), out);
            return;
        default:
            if (a->a) free_type_vars(a->a, bound, out);
            if (a->b) free_type_vars(a->b, std::move(bound), out);
            return;
    }
}

} // namespace

Type subst_type(const Type& a, const std::string& alpha, const Type& b) {
    switch (a->kind) {
        case TypeKind::Var:
            return a->name == alpha ? b : a;
        case TypeKind::Unit:
        case TypeKind::Nat:
        case TypeKind::Meta:
            return a;
        case TypeKind::Delay: return ty_delay(subst_type(a->a, alpha, b));
        case TypeKind::Box: return ty_box(subst_type(a->a, alpha, b));
        case TypeKind::Prod: return ty_prod(subst_type(a->a, alpha, b), subst_type(a->b, alpha, b));
        case TypeKind::Sum: return ty_sum(subst_type(a->a, alpha, b), subst_type(a->b, alpha, b));
        case TypeKind::Arrow:
            return ty_arrow(subst_type(a->a, alpha, b), subst_type(a->b, alpha, b));
        case TypeKind::Mu: {
            if (a->name == alpha) return a; // shadowed
            std::set<std::string> fv;
            free_type_vars(b, {}, fv);
            if (fv.count(a->name)) {
                std::string renamed = fresh_name(a->name);
                Type body = subst_type(a->a, a->name, ty_var(renamed));
                return ty_mu(renamed, subst_type(body, alpha, b));
            }
            return ty_mu(a->name, subst_type(a->a, alpha, b));
        }
    }
    return a;
}

Type unfold_mu(const Type& mu) {
    return subst_type(mu->a, mu->name, ty_delay(mu));
}

// ---------------------------------------------------------------------------

Term t_unit() {
    static Term t = mk_term({TermKind::Unit});
    return t;
}
Term t_nat(Nat n) {
    TermNode t{TermKind::NatLit};
    t.lit = std::move(n);
    return mk_term(std::move(t));
}
Term t_var(std::string x) {
    TermNode t{TermKind::Var};
    t.name = std::move(x);
    return mk_term(std::move(t));
}
Term t_lam(std::string x, Term body) {
    TermNode t{TermKind::Lam};
    t.name = std::move(x);
    t.a = std::move(body);
    return mk_term(std::move(t));
}
Term t_app(Term f, Term arg) {
    TermNode t{TermKind::App};
    t.a = std::move(f);
    t.b = std::move(arg);
    return mk_term(std::move(t));
}
Term t_add(Term a, Term b) {
    TermNode t{TermKind::Add};
    t.a = std::move(a);
    t.b = std::move(b);
    return mk_term(std::move(t));
}
Term t_prim(PrimTag tag, Term a, Term b) {
    TermNode t{TermKind::Prim};
    t.prim = tag;
    t.a = std::move(a);
    t.b = std::move(b);
    return mk_term(std::move(t));
}
Term t_pair(Term a, Term b) {
    TermNode t{TermKind::Pair};
    t.a = std::move(a);
    t.b = std::move(b);
    return mk_term(std::move(t));
}
Term t_proj(int i, Term x) {
    TermNode t{TermKind::Proj};
    t.idx = i;
    t.a = std::move(x);
    return mk_term(std::move(t));
}
Term t_inj(int i, Term x) {
    TermNode t{TermKind::Inj};
    t.idx = i;
    t.a = std::move(x);
    return mk_term(std::move(t));
}
Term t_case(Term scrut, std::string x1, Term b1, std::string x2, Term b2) {
    TermNode t{TermKind::Case};
    t.a = std::move(scrut);
    t.name = std::move(x1);
    t.b = std::move(b1);
    t.name2 = std::move(x2);
    t.c = std::move(b2);
    return mk_term(std::move(t));
}

namespace {
Term unary(TermKind k, Term x) {
    TermNode t{k};
    t.a = std::move(x);
    return mk_term(std::move(t));
}
} // namespace

Term t_delay(Term x) { return unary(TermKind::Delay, std::move(x)); }
Term t_adv(Term x) { return unary(TermKind::Adv, std::move(x)); }
Term t_box(Term x) { return unary(TermKind::Box, std::move(x)); }
Term t_unbox(Term x) { return unary(TermKind::Unbox, std::move(x)); }
Term t_progress(Term x) { return unary(TermKind::Progress, std::move(x)); }
Term t_promote(Term x) { return unary(TermKind::Promote, std::move(x)); }
Term t_into(Term x) { return unary(TermKind::Into, std::move(x)); }
Term t_out(Term x) { return unary(TermKind::Out, std::move(x)); }

Term t_fix(std::string x, Term body) {
    TermNode t{TermKind::Fix};
    t.name = std::move(x);
    t.a = std::move(body);
    return mk_term(std::move(t));
}
Term t_loc(Location l) {
    TermNode t{TermKind::Loc};
    t.loc = l;
    return mk_term(std::move(t));
}
Term t_anno(Term x, Type ty) {
    TermNode t{TermKind::Anno};
    t.a = std::move(x);
    t.anno = std::move(ty);
    return mk_term(std::move(t));
}

Term t_true() { return t_inj(2, t_unit()); }
Term t_false() { return t_inj(1, t_unit()); }

bool is_value(const Term& t) {
    switch (t->kind) {
        case TermKind::Unit:
        case TermKind::NatLit:
        case TermKind::Lam:
        case TermKind::Box:
        case TermKind::Fix:
        case TermKind::Loc:
            return true;
        case TermKind::Pair:
            return is_value(t->a) && is_value(t->b);
        case TermKind::Inj:
        case TermKind::Into:
            return is_value(t->a);
        default:
            return false;
    }
}

namespace {

void free_vars_rec(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
        case TermKind::Var:
            if (!bound.count(t->name)) out.insert(t->name);
            return;
        case TermKind::Lam:
        case TermKind::Fix: {
            bool added = bound.insert(t->name).second;
            free_vars_rec(t->a, bound, out);
            if (added) bound.erase(t->name);
            return;
        }
        case TermKind::Case: {
            free_vars_rec(t->a, bound, out);
            bool a1 = bound.insert(t->name).second;
            free_vars_rec(t->b, bound, out);
            if (a1) bound.erase(t->name);
            bool a2 = bound.insert(t->name2).second;
            free_vars_rec(t->c, bound, out);
            if (a2) bound.erase(t->name2);
            return;
        }
        default:
            if (t->a) free_vars_rec(t->a, bound, out);
            if (t->b) free_vars_rec(t->b, bound, out);
            if (t->c) free_vars_rec(t->c, bound, out);
            return;
    }
}

} // namespace

std::set<std::string> free_vars(const Term& t) {
    std::set<std::string> bound, out;
    free_vars_rec(t, bound, out);
    return out;
}

bool is_closed(const Term& t) { return free_vars(t).empty(); }

bool location_free(const Term& t) {
    if (t->kind == TermKind::Loc) return false;
    if (t->a && !location_free(t->a)) return false;
    if (t->b && !location_free(t->b)) return false;
    if (t->c && !location_free(t->c)) return false;
    return true;
}

std::string fresh_name(const std::string& base) {
    static std::atomic<std::uint64_t> counter{0};
    std::string stem = base;
    auto cut = stem.find('%');
    if (cut != std::string::npos) stem.resize(cut);
    return stem + "%" + std::to_string(++counter);
}

namespace {

// Rebuild a binder node with the binder renamed when it would capture.
std::pair<std::string, Term> avoid_capture(const std::string& binder, const Term& body,
                                           const std::string& x, const std::set<std::string>& fv_v) {
    if (!fv_v.count(binder)) return {binder, body};
    std::string renamed = fresh_name(binder);
    return {renamed, subst_term(body, binder, t_var(renamed))};
}

Term subst_rec(const Term& t, const std::string& x, const Term& v, const std::set<std::string>& fv_v) {
    switch (t->kind) {
        case TermKind::Var:
            return t->name == x ? v : t;
        case TermKind::Unit:
        case TermKind::NatLit:
        case TermKind::Loc:
            return t;
        case TermKind::Lam: {
            if (t->name == x) return t;
            auto [b, body] = avoid_capture(t->name, t->a, x, fv_v);
            return t_lam(b, subst_rec(body, x, v, fv_v));
        }
        case TermKind::Fix: {
            if (t->name == x) return t;
            auto [b, body] = avoid_capture(t->name, t->a, x, fv_v);
            return t_fix(b, subst_rec(body, x, v, fv_v));
        }
        case TermKind::Case: {
            Term scrut = subst_rec(t->a, x, v, fv_v);
            Term b1 = t->b;
            std::string n1 = t->name;
            if (n1 != x) {
                auto [nb, body] = avoid_capture(n1, b1, x, fv_v);
                n1 = nb;
                b1 = subst_rec(body, x, v, fv_v);
            }
            Term b2 = t->c;
            std::string n2 = t->name2;
            if (n2 != x) {
                auto [nb, body] = avoid_capture(n2, b2, x, fv_v);
                n2 = nb;
                b2 = subst_rec(body, x, v, fv_v);
            }
            return t_case(scrut, n1, b1, n2, b2);
        }
        default: {
            TermNode n = *t;
            if (t->a) n.a = subst_rec(t->a, x, v, fv_v);
            if (t->b) n.b = subst_rec(t->b, x, v, fv_v);
            if (t->c) n.c = subst_rec(t->c, x, v, fv_v);
            return mk_term(std::move(n));
        }
    }
}

} // namespace

Term subst_term(const Term& t, const std::string& x, const Term& v) {
    return subst_rec(t, x, v, free_vars(v));
}

namespace {

bool term_eq_rec(const Term& a, const Term& b, bool alpha,
                 std::map<std::string, int>& la, std::map<std::string, int>& lb, int depth) {
    if (a->kind != b->kind) return false;
    auto var_eq = [&](const std::string& x, const std::string& y) {
        if (!alpha) return x == y;
        auto ia = la.find(x);
        auto ib = lb.find(y);
        if (ia != la.end() || ib != lb.end()) {
            return ia != la.end() && ib != lb.end() && ia->second == ib->second;
        }
        return x == y;
    };
    auto with_binder = [&](const std::string& x, const std::string& y, const Term& ba,
                           const Term& bb) {
        if (!alpha) return x == y && term_eq_rec(ba, bb, alpha, la, lb, depth);
        auto olda = la.count(x) ? std::optional<int>(la[x]) : std::nullopt;
        auto oldb = lb.count(y) ? std::optional<int>(lb[y]) : std::nullopt;
        la[x] = depth;
        lb[y] = depth;
        bool r = term_eq_rec(ba, bb, alpha, la, lb, depth + 1);
        if (olda) la[x] = *olda; else la.erase(x);
        if (oldb) lb[y] = *oldb; else lb.erase(y);
        return r;
    };
    switch (a->kind) {
        case TermKind::Unit: return true;
        case TermKind::NatLit: return a->lit == b->lit;
        case TermKind::Var: return var_eq(a->name, b->name);
        case TermKind::Loc: return a->loc == b->loc;
        case TermKind::Lam:
        case TermKind::Fix:
            return with_binder(a->name, b->name, a->a, b->a);
        case TermKind::Case:
            return term_eq_rec(a->a, b->a, alpha, la, lb, depth) &&
                   with_binder(a->name, b->name, a->b, b->b) &&
                   with_binder(a->name2, b->name2, a->c, b->c);
        case TermKind::Proj:
        case TermKind::Inj:
            return a->idx == b->idx && term_eq_rec(a->a, b->a, alpha, la, lb, depth);
        case TermKind::Prim:
            if (a->prim != b->prim) return false;
            [[fallthrough]];
        case TermKind::App:
        case TermKind::Add:
        case TermKind::Pair:
            return term_eq_rec(a->a, b->a, alpha, la, lb, depth) &&
                   term_eq_rec(a->b, b->b, alpha, la, lb, depth);
        case TermKind::Anno:
            return type_equal(a->anno, b->anno) && term_eq_rec(a->a, b->a, alpha, la, lb, depth);
        default:
            return term_eq_rec(a->a, b->a, alpha, la, lb, depth);
    }
}

} // namespace

bool term_alpha_equal(const Term& a, const Term& b) {
    std::map<std::string, int> la, lb;
    return term_eq_rec(a, b, true, la, lb, 0);
}

bool term_identical(const Term& a, const Term& b) {
    if (a == b) return true;
    std::map<std::string, int> la, lb;
    return term_eq_rec(a, b, false, la, lb, 0);
}

} // namespace ratt
