#include "ratt/machine.hpp"

namespace ratt {

bool heap_equal(const Heap& a, const Heap& b) {
    if (a.size() != b.size()) return false;
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end(); ++ia, ++ib) {
        if (!(ia->first == ib->first)) return false;
        if (!term_identical(ia->second, ib->second)) return false;
    }
    return true;
}

bool heap_extends(const Heap& smaller, const Heap& larger) {
    for (const auto& [l, t] : smaller) {
        auto it = larger.find(l);
        if (it == larger.end() || !term_identical(t, it->second)) return false;
    }
    return true;
}

bool store_equal(const Store& a, const Store& b) {
    return a.shape == b.shape && heap_equal(a.now, b.now) && heap_equal(a.later, b.later);
}

bool store_extends(const Store& before, const Store& after) {
    return before.shape == after.shape && heap_extends(before.now, after.now) &&
           heap_extends(before.later, after.later);
}

Store trim(const Store& s) {
    switch (s.shape) {
        case StoreShape::Bottom: return Store::bottom();
        case StoreShape::One: return Store::one(s.later);
        case StoreShape::Two: return Store::one(s.later);
    }
    return Store::bottom();
}

std::string to_string(EvalErrorKind k) {
    switch (k) {
        case EvalErrorKind::StuckNoStore: return "StuckNoStore";
        case EvalErrorKind::StuckNoTick: return "StuckNoTick";
        case EvalErrorKind::DanglingLocation: return "DanglingLocation";
        case EvalErrorKind::NotAFunction: return "NotAFunction";
        case EvalErrorKind::NotAPair: return "NotAPair";
        case EvalErrorKind::NotAnInj: return "NotAnInj";
        case EvalErrorKind::NotABox: return "NotABox";
        case EvalErrorKind::NotANat: return "NotANat";
        case EvalErrorKind::FuelExhausted: return "FuelExhausted";
    }
    return "?";
}

Location alloc(const Store& s, AllocMode mode) {
    std::uint64_t i = 0;
    for (;;) {
        Location cand{i, false};
        if (!s.later.count(cand) &&
            (mode == AllocMode::LaterOnly || !s.now.count(cand))) {
            return cand;
        }
        ++i;
    }
}

namespace {

class Engine {
public:
    Engine(const EvalOptions& opts) : opts_(opts), fuel_(opts.fuel) {}

    Term go(const Term& t, Store& s) {
        if (fuel_ == 0) fail(EvalErrorKind::FuelExhausted, t, s, "fuel exhausted");
        --fuel_;
        DepthGuard depth(this, t, s);
        switch (t->kind) {
            case TermKind::Var:
                // Closed-term precondition; open terms cannot arise from the drivers.
                throw std::logic_error("eval: unbound variable '" + t->name + "'");
            case TermKind::Anno:
                trace("anno", t, s);
                return go(t->a, s);
            default:
                break;
        }
        if (is_value(t)) {
            trace("value", t, s);
            return t;
        }
        switch (t->kind) {
            case TermKind::Pair: {
                trace("pair", t, s);
                Term u = go(t->a, s);
                Term u2 = go(t->b, s);
                return t_pair(u, u2);
            }
            case TermKind::Proj: {
                trace("proj", t, s);
                Term v = go(t->a, s);
                if (v->kind != TermKind::Pair)
                    fail(EvalErrorKind::NotAPair, t, s, "projection of a non-pair");
                return t->idx == 1 ? v->a : v->b;
            }
            case TermKind::Inj: {
                trace("inj", t, s);
                return t_inj(t->idx, go(t->a, s));
            }
            case TermKind::Case: {
                trace("case", t, s);
                Term v = go(t->a, s);
                if (v->kind != TermKind::Inj)
                    fail(EvalErrorKind::NotAnInj, t, s, "case scrutinee is not an injection");
                if (v->idx == 1) return go(subst_term(t->b, t->name, v->a), s);
                return go(subst_term(t->c, t->name2, v->a), s);
            }
            case TermKind::App: {
                trace("app", t, s);
                Term f = go(t->a, s);
                if (f->kind != TermKind::Lam)
                    fail(EvalErrorKind::NotAFunction, t, s, "application of a non-function");
                Term v = go(t->b, s);
                return go(subst_term(f->a, f->name, v), s);
            }
            case TermKind::Add:
            case TermKind::Prim: {
                trace(t->kind == TermKind::Add ? "add" : "prim", t, s);
                Term m = go(t->a, s);
                Term n = go(t->b, s);
                if (m->kind != TermKind::NatLit || n->kind != TermKind::NatLit)
                    fail(EvalErrorKind::NotANat, t, s, "arithmetic on a non-numeral");
                if (t->kind == TermKind::Add) return t_nat(m->lit + n->lit);
                switch (t->prim) {
                    case PrimTag::Eq: return m->lit == n->lit ? t_true() : t_false();
                    case PrimTag::Lt: return m->lit < n->lit ? t_true() : t_false();
                    case PrimTag::Mul: return t_nat(m->lit * n->lit);
                    case PrimTag::Monus: return t_nat(m->lit.monus(n->lit));
                }
                return t; // unreachable
            }
            case TermKind::Delay: {
                trace("delay", t, s);
                if (s.is_bottom())
                    fail(EvalErrorKind::StuckNoStore, t, s, "delay with no store");
                Location l = do_alloc(s);
                s.later.emplace(l, t->a); // stored unevaluated
                return t_loc(l);
            }
            case TermKind::Adv: {
                trace("adv", t, s);
                if (!s.has_tick())
                    fail(EvalErrorKind::StuckNoTick, t, s, "adv without a tick-shaped store");
                Store inner = Store::one(std::move(s.now));
                Term lv = go(t->a, inner);
                if (lv->kind != TermKind::Loc) {
                    s.now = std::move(inner.later);
                    fail(EvalErrorKind::DanglingLocation, t, s,
                         "adv did not produce a heap location");
                }
                auto it = inner.later.find(lv->loc);
                if (it == inner.later.end()) {
                    s.now = std::move(inner.later);
                    fail(EvalErrorKind::DanglingLocation, t, s,
                         "lookup of undefined heap location");
                }
                Term stored = it->second;
                s.now = std::move(inner.later);
                return go(stored, s);
            }
            case TermKind::Progress: {
                trace("progress", t, s);
                if (!s.has_tick())
                    fail(EvalErrorKind::StuckNoTick, t, s, "progress without a tick-shaped store");
                Store inner = Store::one(std::move(s.now));
                Term v = go(t->a, inner);
                s.now = std::move(inner.later);
                return v;
            }
            case TermKind::Promote: {
                trace("promote", t, s);
                if (s.is_bottom())
                    fail(EvalErrorKind::StuckNoStore, t, s, "promote with no store");
                Store inner = Store::bottom();
                return go(t->a, inner);
            }
            case TermKind::Unbox: {
                trace("unbox", t, s);
                Store inner = Store::bottom();
                Term u = go(t->a, inner);
                if (s.is_bottom())
                    fail(EvalErrorKind::StuckNoStore, t, s, "unbox with no store");
                if (u->kind == TermKind::Box) return go(u->a, s);
                if (u->kind == TermKind::Fix) {
                    Location l = do_alloc(s);
                    s.later.emplace(l, t_unbox(u));
                    return go(subst_term(u->a, u->name, t_loc(l)), s);
                }
                fail(EvalErrorKind::NotABox, t, s, "unbox of a non-box value");
            }
            case TermKind::Into: {
                trace("into", t, s);
                return t_into(go(t->a, s));
            }
            case TermKind::Out: {
                trace("out", t, s);
                Term v = go(t->a, s);
                if (v->kind != TermKind::Into)
                    fail(EvalErrorKind::NotAnInj, t, s, "out of a non-into value");
                return v->a;
            }
            default:
                throw std::logic_error("eval: unhandled term form");
        }
    }

    std::uint64_t fuel_used() const { return opts_.fuel - fuel_; }
    std::uint64_t allocs() const { return allocs_; }

private:
    const EvalOptions& opts_;
    std::uint64_t fuel_;
    std::uint64_t allocs_ = 0;
    std::uint64_t depth_ = 0;

    // Evaluation is recursive; ill-typed inputs can nest linearly in the
    // step count, so cap the depth well below the process stack and report
    // the overflow as resource exhaustion rather than crashing. Well-typed
    // programs evaluate in bounded depth per step and never come close.
    // Sanitizer builds carry much larger frames and get a lower cap.
#if defined(__SANITIZE_ADDRESS__)
    static constexpr std::uint64_t kMaxDepth = 1'500;
#elif defined(__has_feature)
#if __has_feature(address_sanitizer)
    static constexpr std::uint64_t kMaxDepth = 1'500;
#else
    static constexpr std::uint64_t kMaxDepth = 8'000;
#endif
#else
    static constexpr std::uint64_t kMaxDepth = 8'000;
#endif

    struct DepthGuard {
        Engine* engine;
        DepthGuard(Engine* e, const Term& t, const Store& s) : engine(e) {
            if (++engine->depth_ > kMaxDepth) {
                --engine->depth_;
                engine->fail(EvalErrorKind::FuelExhausted, t, s,
                             "evaluation nested too deeply");
            }
        }
        ~DepthGuard() { --engine->depth_; }
    };

    Location do_alloc(const Store& s) {
        ++allocs_;
        return alloc(s, opts_.alloc_mode);
    }

    void trace(const char* rule, const Term& t, const Store& s) {
        if (opts_.trace) opts_.trace(rule, t, s);
    }

    [[noreturn]] void fail(EvalErrorKind k, const Term& t, const Store& s, std::string msg) {
        throw EvalFailure(EvalError{k, t, s, std::move(msg)});
    }
};

} // namespace

EvalOutcome eval(const Term& t, Store store, const EvalOptions& opts) {
    Engine engine(opts);
    Term v = engine.go(t, store);
    return EvalOutcome{std::move(v), std::move(store), engine.fuel_used(), engine.allocs()};
}

EvalOutcome eval_unsafe(const Term& t, Store store, const EvalOptions& opts) {
    return eval(t, std::move(store), opts);
}

} // namespace ratt
