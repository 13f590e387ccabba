#include "ratt/typecheck.hpp"

#include <algorithm>

namespace ratt {

std::string to_string(TypeErrorKind k) {
    switch (k) {
        case TypeErrorKind::VarBehindToken: return "VarBehindToken";
        case TypeErrorKind::LambdaUnderTick: return "LambdaUnderTick";
        case TypeErrorKind::AdvOutsideLater: return "AdvOutsideLater";
        case TypeErrorKind::DelayOutsideNow: return "DelayOutsideNow";
        case TypeErrorKind::UnboxUnderTick: return "UnboxUnderTick";
        case TypeErrorKind::UnboxWithoutLock: return "UnboxWithoutLock";
        case TypeErrorKind::ProgressNotStable: return "ProgressNotStable";
        case TypeErrorKind::PromoteNotStable: return "PromoteNotStable";
        case TypeErrorKind::ProgressOutsideLater: return "ProgressOutsideLater";
        case TypeErrorKind::PromoteOutsideTemporal: return "PromoteOutsideTemporal";
        case TypeErrorKind::FixWithTokens: return "FixWithTokens";
        case TypeErrorKind::Mismatch: return "Mismatch";
        case TypeErrorKind::CannotInfer: return "CannotInfer";
    }
    return "?";
}

namespace {

bool has_lock(const Context& ctx) {
    return std::any_of(ctx.begin(), ctx.end(),
                       [](const CtxEntry& e) { return e.kind == CtxEntry::Kind::Lock; });
}

bool has_tick(const Context& ctx) {
    return std::any_of(ctx.begin(), ctx.end(),
                       [](const CtxEntry& e) { return e.kind == CtxEntry::Kind::Tick; });
}

bool token_free(const Context& ctx, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i)
        if (ctx[i].kind != CtxEntry::Kind::Bind) return false;
    return true;
}

// Index of the unique lock/tick, or npos.
std::size_t find_token(const Context& ctx, CtxEntry::Kind k) {
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (ctx[i].kind == k) return i;
    return static_cast<std::size_t>(-1);
}

} // namespace

bool check_wf(const Context& ctx) {
    bool seen_lock = false, seen_tick = false;
    for (const auto& e : ctx) {
        switch (e.kind) {
            case CtxEntry::Kind::Bind:
                break;
            case CtxEntry::Kind::Lock:
                if (seen_lock || seen_tick) return false;
                seen_lock = true;
                break;
            case CtxEntry::Kind::Tick:
                if (seen_tick || !seen_lock) return false;
                seen_tick = true;
                break;
        }
    }
    return true;
}

namespace {

class Checker {
public:
    explicit Checker(const CheckOptions& opts) : opts_(opts) {}

    Type infer(const Context& ctx, const Term& t) {
        switch (t->kind) {
            case TermKind::Var: {
                // Rightmost binding; the suffix after it must be token-free.
                for (std::size_t i = ctx.size(); i-- > 0;) {
                    if (ctx[i].kind == CtxEntry::Kind::Bind && ctx[i].name == t->name) {
                        if (!token_free(ctx, i + 1, ctx.size()))
                            fail(TypeErrorKind::VarBehindToken, ctx, t,
                                 "variable '" + t->name + "' is separated from its use by a token");
                        return ctx[i].type;
                    }
                }
                fail(TypeErrorKind::VarBehindToken, ctx, t,
                     "variable '" + t->name + "' is not in scope");
            }
            case TermKind::Unit:
                return ty_unit();
            case TermKind::NatLit:
                return ty_nat();
            case TermKind::Add: {
                check(ctx, t->a, ty_nat());
                check(ctx, t->b, ty_nat());
                return ty_nat();
            }
            case TermKind::Prim: {
                check(ctx, t->a, ty_nat());
                check(ctx, t->b, ty_nat());
                switch (t->prim) {
                    case PrimTag::Eq:
                    case PrimTag::Lt: return ty_bool();
                    case PrimTag::Mul:
                    case PrimTag::Monus: return ty_nat();
                }
                return ty_nat();
            }
            case TermKind::App: {
                Type f = infer(ctx, t->a);
                if (f->kind != TypeKind::Arrow)
                    fail(TypeErrorKind::Mismatch, ctx, t, "application of a non-function type");
                check(ctx, t->b, f->a);
                return f->b;
            }
            case TermKind::Pair:
                return ty_prod(infer(ctx, t->a), infer(ctx, t->b));
            case TermKind::Proj: {
                Type p = infer(ctx, t->a);
                if (p->kind != TypeKind::Prod)
                    fail(TypeErrorKind::Mismatch, ctx, t, "projection of a non-product type");
                return t->idx == 1 ? p->a : p->b;
            }
            case TermKind::Case: {
                Type s = scrutinee(ctx, t);
                Context c1 = ctx;
                c1.push_back(CtxEntry::bind(t->name, s->a));
                Type b1 = infer(c1, t->b);
                Context c2 = ctx;
                c2.push_back(CtxEntry::bind(t->name2, s->b));
                Type b2 = infer(c2, t->c);
                if (!type_equal(b1, b2))
                    fail(TypeErrorKind::Mismatch, ctx, t, "case branches have different types");
                return b1;
            }
            case TermKind::Delay: {
                Context inner = delay_context(ctx, t);
                return ty_delay(infer(inner, t->a));
            }
            case TermKind::Adv: {
                std::size_t tick = find_token(ctx, CtxEntry::Kind::Tick);
                if (tick == static_cast<std::size_t>(-1))
                    fail(TypeErrorKind::AdvOutsideLater, ctx, t,
                         "adv requires a later judgement (no tick in context)");
                Context prefix(ctx.begin(), ctx.begin() + tick);
                Type d = infer(prefix, t->a);
                if (d->kind != TypeKind::Delay)
                    fail(TypeErrorKind::Mismatch, ctx, t, "adv of a non-delayed type");
                return d->a;
            }
            case TermKind::Unbox: {
                std::size_t lock = find_token(ctx, CtxEntry::Kind::Lock);
                if (lock == static_cast<std::size_t>(-1))
                    fail(TypeErrorKind::UnboxWithoutLock, ctx, t,
                         "unbox requires a temporal judgement (no lock in context)");
                if (!token_free(ctx, lock + 1, ctx.size()))
                    fail(TypeErrorKind::UnboxUnderTick, ctx, t,
                         "unbox is not permitted under a tick");
                Context prefix(ctx.begin(), ctx.begin() + lock);
                Type b = infer(prefix, t->a);
                if (b->kind != TypeKind::Box)
                    fail(TypeErrorKind::Mismatch, ctx, t, "unbox of a non-boxed type");
                return b->a;
            }
            case TermKind::Progress: {
                std::size_t tick = find_token(ctx, CtxEntry::Kind::Tick);
                if (tick == static_cast<std::size_t>(-1))
                    fail(TypeErrorKind::ProgressOutsideLater, ctx, t,
                         "progress requires a later judgement (no tick in context)");
                Context prefix(ctx.begin(), ctx.begin() + tick);
                Type a = infer(prefix, t->a);
                if (!stable(a))
                    fail(TypeErrorKind::ProgressNotStable, ctx, t,
                         "progress requires a stable type");
                return a;
            }
            case TermKind::Promote: {
                std::size_t lock = find_token(ctx, CtxEntry::Kind::Lock);
                if (lock == static_cast<std::size_t>(-1))
                    fail(TypeErrorKind::PromoteOutsideTemporal, ctx, t,
                         "promote requires a temporal judgement (no lock in context)");
                Context prefix(ctx.begin(), ctx.begin() + lock);
                Type a = infer(prefix, t->a);
                if (!stable(a))
                    fail(TypeErrorKind::PromoteNotStable, ctx, t,
                         "promote requires a stable type");
                return a;
            }
            case TermKind::Out: {
                Type m = infer(ctx, t->a);
                if (m->kind != TypeKind::Mu)
                    fail(TypeErrorKind::Mismatch, ctx, t, "out of a non-recursive type");
                return unfold_mu(m);
            }
            case TermKind::Anno: {
                check(ctx, t->a, t->anno);
                return t->anno;
            }
            case TermKind::Lam:
                if (has_tick(ctx))
                    fail(TypeErrorKind::LambdaUnderTick, ctx, t,
                         "functions may not be constructed in a later judgement");
                fail(TypeErrorKind::CannotInfer, ctx, t,
                     "unannotated lambda in inference position");
            case TermKind::Inj:
                fail(TypeErrorKind::CannotInfer, ctx, t,
                     "injection in inference position");
            case TermKind::Into:
                fail(TypeErrorKind::CannotInfer, ctx, t, "into in inference position");
            case TermKind::Box:
                fail(TypeErrorKind::CannotInfer, ctx, t, "box in inference position");
            case TermKind::Fix:
                fail(TypeErrorKind::CannotInfer, ctx, t, "fix in inference position");
            case TermKind::Loc:
                fail(TypeErrorKind::CannotInfer, ctx, t,
                     "heap locations do not occur in source programs");
        }
        fail(TypeErrorKind::CannotInfer, ctx, t, "unhandled term form");
    }

    void check(const Context& ctx, const Term& t, const Type& a) {
        switch (t->kind) {
            case TermKind::Lam: {
                if (has_tick(ctx))
                    fail(TypeErrorKind::LambdaUnderTick, ctx, t,
                         "functions may not be constructed in a later judgement");
                if (a->kind != TypeKind::Arrow)
                    fail(TypeErrorKind::Mismatch, ctx, t, "lambda checked against a non-arrow type");
                Context inner = ctx;
                inner.push_back(CtxEntry::bind(t->name, a->a));
                check(inner, t->a, a->b);
                return;
            }
            case TermKind::Pair: {
                if (a->kind != TypeKind::Prod)
                    fail(TypeErrorKind::Mismatch, ctx, t, "pair checked against a non-product type");
                check(ctx, t->a, a->a);
                check(ctx, t->b, a->b);
                return;
            }
            case TermKind::Inj: {
                if (a->kind != TypeKind::Sum)
                    fail(TypeErrorKind::Mismatch, ctx, t,
                         "injection checked against a non-sum type");
                check(ctx, t->a, t->idx == 1 ? a->a : a->b);
                return;
            }
            case TermKind::Into: {
                if (a->kind != TypeKind::Mu)
                    fail(TypeErrorKind::Mismatch, ctx, t,
                         "into checked against a non-recursive type");
                check(ctx, t->a, unfold_mu(a));
                return;
            }
            case TermKind::Box: {
                if (a->kind != TypeKind::Box)
                    fail(TypeErrorKind::Mismatch, ctx, t, "box checked against a non-box type");
                if (has_lock(ctx) || has_tick(ctx))
                    fail(TypeErrorKind::FixWithTokens, ctx, t,
                         "box requires a token-free context");
                Context inner = ctx;
                inner.push_back(CtxEntry::lock());
                check(inner, t->a, a->a);
                return;
            }
            case TermKind::Fix: {
                if (a->kind != TypeKind::Box)
                    fail(TypeErrorKind::Mismatch, ctx, t, "fix checked against a non-box type");
                if (has_lock(ctx) || has_tick(ctx))
                    fail(TypeErrorKind::FixWithTokens, ctx, t,
                         "fix requires a token-free context");
                Context inner = ctx;
                inner.push_back(CtxEntry::lock());
                inner.push_back(CtxEntry::bind(t->name, ty_delay(a->a)));
                check(inner, t->a, a->a);
                return;
            }
            case TermKind::Case: {
                Type s = scrutinee(ctx, t);
                Context c1 = ctx;
                c1.push_back(CtxEntry::bind(t->name, s->a));
                check(c1, t->b, a);
                Context c2 = ctx;
                c2.push_back(CtxEntry::bind(t->name2, s->b));
                check(c2, t->c, a);
                return;
            }
            case TermKind::Delay: {
                if (a->kind != TypeKind::Delay)
                    fail(TypeErrorKind::Mismatch, ctx, t,
                         "delay checked against a non-delay type");
                Context inner = delay_context(ctx, t);
                check(inner, t->a, a->a);
                return;
            }
            case TermKind::Progress:
            case TermKind::Promote: {
                // Transparent in checking mode; the token and stability side
                // conditions live in infer.
                Type got = infer(ctx, t);
                require_equal(ctx, t, got, a);
                return;
            }
            default: {
                Type got = infer(ctx, t);
                require_equal(ctx, t, got, a);
                return;
            }
        }
    }

private:
    const CheckOptions& opts_;

    bool stable(const Type& a) { return is_stable(a, opts_.stable_params); }

    Type scrutinee(const Context& ctx, const Term& t) {
        Type s = infer(ctx, t->a);
        if (s->kind != TypeKind::Sum)
            fail(TypeErrorKind::Mismatch, ctx, t, "case scrutinee has a non-sum type");
        return s;
    }

    // Context for the body of delay t: ctx,tick — well-formed only for a
    // now judgement (lock present, no tick yet).
    Context delay_context(const Context& ctx, const Term& t) {
        if (has_tick(ctx) || !has_lock(ctx))
            fail(TypeErrorKind::DelayOutsideNow, ctx, t,
                 "delay requires a now judgement");
        Context inner = ctx;
        inner.push_back(CtxEntry::tick());
        return inner;
    }

    void require_equal(const Context& ctx, const Term& t, const Type& got, const Type& want) {
        if (!type_equal(got, want))
            fail(TypeErrorKind::Mismatch, ctx, t, "type mismatch");
    }

    [[noreturn]] void fail(TypeErrorKind k, const Context& ctx, const Term& t, std::string msg) {
        throw TypeCheckFailure(TypeError{k, t, ctx, std::move(msg)});
    }
};

} // namespace

Type infer(const Context& ctx, const Term& t, const CheckOptions& opts) {
    Checker c(opts);
    return c.infer(ctx, t);
}

void check(const Context& ctx, const Term& t, const Type& a, const CheckOptions& opts) {
    Checker c(opts);
    c.check(ctx, t, a);
}

ProgramReport check_program(const std::vector<CheckedDef>& defs) {
    ProgramReport report;
    for (const auto& def : defs) {
        DefReport r{def.name, std::nullopt};
        CheckOptions opts;
        opts.type_params.insert(def.params.begin(), def.params.end());
        opts.stable_params = def.stable_params;
        std::set<std::string> theta(def.params.begin(), def.params.end());
        try {
            if (!well_formed_type(theta, def.type)) {
                throw TypeCheckFailure(TypeError{
                    TypeErrorKind::Mismatch, def.term, {},
                    "declared type of '" + def.name + "' is not well formed"});
            }
            check({}, def.term, def.type, opts);
        } catch (const TypeCheckFailure& f) {
            r.error = f.error;
        }
        report.defs.push_back(std::move(r));
    }
    return report;
}

} // namespace ratt
