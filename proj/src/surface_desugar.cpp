#include "ratt/surface.hpp"

#include <map>
#include <optional>

namespace ratt {

namespace {

// Substitute a type for a type variable inside every annotation of a term.
// Core terms carry types only in Anno nodes, so monomorphising an inlined
// definition is exactly this walk.
Term term_subst_type(const Term& t, const std::string& alpha, const Type& ty) {
    TermNode n = *t;
    bool changed = false;
    if (t->anno) {
        n.anno = subst_type(t->anno, alpha, ty);
        changed = changed || n.anno != t->anno;
    }
    if (t->a) {
        n.a = term_subst_type(t->a, alpha, ty);
        changed = changed || n.a != t->a;
    }
    if (t->b) {
        n.b = term_subst_type(t->b, alpha, ty);
        changed = changed || n.b != t->b;
    }
    if (t->c) {
        n.c = term_subst_type(t->c, alpha, ty);
        changed = changed || n.c != t->c;
    }
    return changed ? std::make_shared<const TermNode>(std::move(n)) : t;
}

void free_tvars(const Type& t, std::set<std::string> bound, std::set<std::string>& out) {
    switch (t->kind) {
        case TypeKind::Var:
            if (!bound.count(t->name)) out.insert(t->name);
            return;
        case TypeKind::Mu:
            bound.insert(t->name);
            free_tvars(t->a, std::move(bound), out);
            return;
        default:
            if (t->a) free_tvars(t->a, bound, out);
            if (t->b) free_tvars(t->b, std::move(bound), out);
            return;
    }
}

bool contains_meta(const Type& t) {
    if (t->kind == TypeKind::Meta) return true;
    if (t->a && contains_meta(t->a)) return true;
    if (t->b && contains_meta(t->b)) return true;
    return false;
}

// Whether the core checker can infer a type for this term, i.e. no
// introduction form sits in an inference position at its spine.
bool is_core_inferable(const Term& t) {
    switch (t->kind) {
        case TermKind::Lam:
        case TermKind::Fix:
        case TermKind::Box:
        case TermKind::Inj:
        case TermKind::Into:
        case TermKind::Loc:
            return false;
        case TermKind::Pair:
            return is_core_inferable(t->a) && is_core_inferable(t->b);
        case TermKind::Case:
            return is_core_inferable(t->a) && is_core_inferable(t->b) &&
                   is_core_inferable(t->c);
        case TermKind::App:
        case TermKind::Proj:
        case TermKind::Out:
        case TermKind::Adv:
        case TermKind::Unbox:
        case TermKind::Progress:
        case TermKind::Promote:
        case TermKind::Delay:
            return is_core_inferable(t->a);
        default:
            return true;
    }
}

struct DefTemplate {
    std::string name;
    std::vector<std::pair<std::string, bool>> params;
    Type type;
    Term core;
};

struct EnvEntry {
    std::string name;
    Type type;
    bool is_rec = false;
};

class Desugarer {
public:
    std::vector<CheckedDef> run(const SurfaceProgram& program) {
        std::vector<CheckedDef> out;
        for (const auto& d : program.defs) {
            for (const auto& t : templates_) {
                if (t.name == d.name)
                    throw DesugarError(DesugarErrorKind::TypeMismatch, d.pos, d.name,
                                       "duplicate definition name '" + d.name + "'");
            }
            CheckedDef cd = do_def(d);
            out.push_back(cd);
            templates_.push_back(DefTemplate{cd.name, def_->params, cd.type, cd.term});
        }
        return out;
    }

private:
    std::vector<DefTemplate> templates_;

    // Per-definition state.
    const Definition* def_ = nullptr;
    std::set<std::string> params_;
    std::set<std::string> stable_params_;
    std::vector<std::optional<Type>> metas_;
    std::vector<EnvEntry> env_;
    std::vector<Type> rec_prepat_types_;
    Type rec_type_; // Delay(T) of the recursion variable

    struct PendingInst {
        SExpr* expr;
        int def_index;
        std::vector<Type> metas;
    };
    std::vector<PendingInst> pending_;
    struct StabilityObligation {
        Type type;
        SrcPos pos;
        std::string what;
    };
    std::vector<StabilityObligation> stability_;
    int pair_binder_counter_ = 0;

    [[noreturn]] void err(DesugarErrorKind k, SrcPos pos, const std::string& msg) {
        throw DesugarError(k, pos, def_ ? def_->name : "", msg);
    }

    // ------------------------------------------------------------- unifier

    Type new_meta() {
        metas_.emplace_back(std::nullopt);
        return ty_meta(static_cast<int>(metas_.size() - 1));
    }

    Type resolve(Type t) {
        while (t->kind == TypeKind::Meta && metas_[t->meta_id]) t = *metas_[t->meta_id];
        return t;
    }

    Type zonk(const Type& t0) {
        Type t = resolve(t0);
        switch (t->kind) {
            case TypeKind::Prod: return ty_prod(zonk(t->a), zonk(t->b));
            case TypeKind::Sum: return ty_sum(zonk(t->a), zonk(t->b));
            case TypeKind::Arrow: return ty_arrow(zonk(t->a), zonk(t->b));
            case TypeKind::Delay: return ty_delay(zonk(t->a));
            case TypeKind::Box: return ty_box(zonk(t->a));
            case TypeKind::Mu: return ty_mu(t->name, zonk(t->a));
            default: return t;
        }
    }

    bool occurs(int id, const Type& t0) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Meta) return t->meta_id == id;
        if (t->a && occurs(id, t->a)) return true;
        if (t->b && occurs(id, t->b)) return true;
        return false;
    }

    bool unify(const Type& a, const Type& b) {
        std::map<std::string, int> la, lb;
        return unify_rec(a, b, la, lb, 0);
    }

    bool unify_rec(Type a, Type b, std::map<std::string, int>& la,
                   std::map<std::string, int>& lb, int depth) {
        a = resolve(a);
        b = resolve(b);
        if (a->kind == TypeKind::Meta && b->kind == TypeKind::Meta &&
            a->meta_id == b->meta_id) {
            return true;
        }
        if (a->kind == TypeKind::Meta) return bind_meta(a->meta_id, b, lb);
        if (b->kind == TypeKind::Meta) return bind_meta(b->meta_id, a, la);
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case TypeKind::Unit:
            case TypeKind::Nat:
                return true;
            case TypeKind::Var: {
                auto ia = la.find(a->name);
                auto ib = lb.find(b->name);
                if (ia != la.end() || ib != lb.end())
                    return ia != la.end() && ib != lb.end() && ia->second == ib->second;
                return a->name == b->name;
            }
            case TypeKind::Delay:
            case TypeKind::Box:
                return unify_rec(a->a, b->a, la, lb, depth);
            case TypeKind::Prod:
            case TypeKind::Sum:
            case TypeKind::Arrow:
                return unify_rec(a->a, b->a, la, lb, depth) &&
                       unify_rec(a->b, b->b, la, lb, depth);
            case TypeKind::Mu: {
                auto olda = la.count(a->name) ? std::optional<int>(la[a->name]) : std::nullopt;
                auto oldb = lb.count(b->name) ? std::optional<int>(lb[b->name]) : std::nullopt;
                la[a->name] = depth;
                lb[b->name] = depth;
                bool r = unify_rec(a->a, b->a, la, lb, depth + 1);
                if (olda) la[a->name] = *olda; else la.erase(a->name);
                if (oldb) lb[b->name] = *oldb; else lb.erase(b->name);
                return r;
            }
            default:
                return false;
        }
    }

    bool bind_meta(int id, const Type& sol, const std::map<std::string, int>& bound_sol_side) {
        if (occurs(id, sol)) return false;
        // A solution may not capture a mu-bound variable of the traversal.
        if (!bound_sol_side.empty()) {
            std::set<std::string> fv;
            free_tvars(zonk(sol), {}, fv);
            for (const auto& [name, lvl] : bound_sol_side) {
                (void)lvl;
                if (fv.count(name)) return false;
            }
        }
        metas_[id] = sol;
        return true;
    }

    // ------------------------------------------------------- type utilities

    Type force_delay(const Type& t0, SrcPos pos) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Delay) return t->a;
        if (t->kind == TypeKind::Meta) {
            Type inner = new_meta();
            metas_[t->meta_id] = ty_delay(inner);
            return inner;
        }
        err(DesugarErrorKind::TypeMismatch, pos,
            "expected a delayed type, found " + pretty(zonk(t)));
    }

    Type force_box(const Type& t0, SrcPos pos) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Box) return t->a;
        if (t->kind == TypeKind::Meta) {
            Type inner = new_meta();
            metas_[t->meta_id] = ty_box(inner);
            return inner;
        }
        err(DesugarErrorKind::TypeMismatch, pos,
            "expected a boxed type, found " + pretty(zonk(t)));
    }

    std::pair<Type, Type> force_arrow(const Type& t0, SrcPos pos) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Arrow) return {t->a, t->b};
        if (t->kind == TypeKind::Meta) {
            Type d = new_meta(), c = new_meta();
            metas_[t->meta_id] = ty_arrow(d, c);
            return {d, c};
        }
        err(DesugarErrorKind::TypeMismatch, pos,
            "expected a function type, found " + pretty(zonk(t)));
    }

    std::pair<Type, Type> force_prod(const Type& t0, SrcPos pos) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Prod) return {t->a, t->b};
        if (t->kind == TypeKind::Meta) {
            Type x = new_meta(), y = new_meta();
            metas_[t->meta_id] = ty_prod(x, y);
            return {x, y};
        }
        err(DesugarErrorKind::TypeMismatch, pos,
            "expected a product type, found " + pretty(zonk(t)));
    }

    std::pair<Type, Type> force_sum(const Type& t0, SrcPos pos) {
        Type t = resolve(t0);
        if (t->kind == TypeKind::Sum) return {t->a, t->b};
        if (t->kind == TypeKind::Meta) {
            Type x = new_meta(), y = new_meta();
            metas_[t->meta_id] = ty_sum(x, y);
            return {x, y};
        }
        err(DesugarErrorKind::TypeMismatch, pos,
            "expected a sum type, found " + pretty(zonk(t)));
    }

    Type require_mu(const Type& t0, SrcPos pos) {
        Type t = zonk(t0);
        if (t->kind != TypeKind::Mu)
            err(DesugarErrorKind::TypeMismatch, pos,
                "expected a recursive type, found " + pretty(t));
        return t;
    }

    void require(bool ok, SrcPos pos, const std::string& msg) {
        if (!ok) err(DesugarErrorKind::TypeMismatch, pos, msg);
    }

    void check_type_scope(const Type& t, SrcPos pos) {
        std::set<std::string> fv;
        free_tvars(t, {}, fv);
        for (const auto& v : fv) {
            if (!params_.count(v))
                err(DesugarErrorKind::UnknownIdentifier, pos,
                    "unknown type variable '" + v + "'");
        }
    }

    // ------------------------------------------------------------ definition

    CheckedDef do_def(const Definition& d) {
        def_ = &d;
        params_.clear();
        stable_params_.clear();
        metas_.clear();
        env_.clear();
        rec_prepat_types_.clear();
        pending_.clear();
        stability_.clear();
        pair_binder_counter_ = 0;

        for (const auto& [p, stable] : d.params) {
            if (!params_.insert(p).second)
                err(DesugarErrorKind::TypeMismatch, d.pos,
                    "duplicate type parameter '" + p + "'");
            if (stable) stable_params_.insert(p);
        }
        check_type_scope(d.declared, d.pos);

        Type body_type = d.declared;
        if (!d.diamond) {
            check(*d.body, body_type);
        } else {
            for (const auto& p : d.prepats) {
                if (p.kind != Pattern::Kind::Var)
                    err(DesugarErrorKind::TypeMismatch, p.pos,
                        "arguments before '$' must be plain variables");
                require(body_type->kind == TypeKind::Arrow, p.pos,
                        "more argument patterns than arrows in the declared type");
                rec_prepat_types_.push_back(body_type->a);
                env_.push_back({p.name, body_type->a, false});
                body_type = body_type->b;
            }
            require(body_type->kind == TypeKind::Box, d.pos,
                    "a '$' definition must have a boxed type after its leading arguments");
            Type t_rec = body_type->a;
            rec_type_ = ty_delay(t_rec);
            env_.push_back({d.name, rec_type_, true});
            Type tb = t_rec;
            for (const auto& p : d.postpats) {
                require(tb->kind == TypeKind::Arrow, p.pos,
                        "more argument patterns than arrows in the declared type");
                bind_pattern(p, tb->a);
                tb = tb->b;
            }
            check(*d.body, tb);
        }

        finish_pending();

        Term core = emit(*d.body);
        if (d.diamond) {
            for (auto it = d.postpats.rbegin(); it != d.postpats.rend(); ++it)
                core = wrap_lambda(*it, core);
            core = t_fix(d.name, core);
            for (auto it = d.prepats.rbegin(); it != d.prepats.rend(); ++it)
                core = wrap_lambda(*it, core);
        }
        if (!free_vars(core).empty())
            throw std::logic_error("desugar produced an open term for '" + d.name + "'");

        CheckedDef cd;
        cd.name = d.name;
        for (const auto& [p, stable] : d.params) {
            cd.params.push_back(p);
            if (stable) cd.stable_params.insert(p);
        }
        cd.type = d.declared;
        cd.term = core;
        return cd;
    }

    void bind_pattern(const Pattern& p, const Type& ty) {
        switch (p.kind) {
            case Pattern::Kind::Var:
                env_.push_back({p.name, ty, false});
                return;
            case Pattern::Kind::Wild:
                return;
            case Pattern::Kind::Pair: {
                require(ty->kind == TypeKind::Prod, p.pos,
                        "pair pattern against a non-product type " + pretty(zonk(ty)));
                bind_pattern(*p.a, ty->a);
                bind_pattern(*p.b, ty->b);
                return;
            }
        }
    }

    Term wrap_lambda(const Pattern& p, Term core) {
        switch (p.kind) {
            case Pattern::Kind::Var:
                return t_lam(p.name, core);
            case Pattern::Kind::Wild:
                return t_lam("_", core);
            case Pattern::Kind::Pair: {
                std::string binder = "_p" + std::to_string(pair_binder_counter_++);
                core = apply_pattern_substs(p, t_var(binder), core);
                return t_lam(binder, core);
            }
        }
        return core;
    }

    Term apply_pattern_substs(const Pattern& p, const Term& path, Term core) {
        switch (p.kind) {
            case Pattern::Kind::Var:
                return subst_term(core, p.name, path);
            case Pattern::Kind::Wild:
                return core;
            case Pattern::Kind::Pair:
                core = apply_pattern_substs(*p.a, t_proj(1, path), core);
                return apply_pattern_substs(*p.b, t_proj(2, path), core);
        }
        return core;
    }

    void finish_pending() {
        for (auto& pend : pending_) {
            const DefTemplate& tmpl = templates_[pend.def_index];
            std::vector<Type> sols;
            for (std::size_t i = 0; i < pend.metas.size(); ++i) {
                Type sol = zonk(pend.metas[i]);
                if (contains_meta(sol))
                    err(DesugarErrorKind::UninstantiableTypeParameter, pend.expr->pos,
                        "cannot determine type parameter '" + tmpl.params[i].first +
                            "' of '" + tmpl.name + "'");
                check_type_scope(sol, pend.expr->pos);
                if (tmpl.params[i].second && !is_stable(sol, stable_params_))
                    err(DesugarErrorKind::StabilityConstraintViolated, pend.expr->pos,
                        "type parameter '" + tmpl.params[i].first + "' of '" + tmpl.name +
                            "' requires a stable type, got " + pretty(sol));
                sols.push_back(sol);
            }
            pend.expr->solved_targs = sols;
        }
        for (const auto& ob : stability_) {
            Type t = zonk(ob.type);
            if (!is_stable(t, stable_params_))
                err(DesugarErrorKind::StabilityConstraintViolated, ob.pos,
                    ob.what + " requires a stable type, got " + pretty(t));
        }
    }

    // ------------------------------------------------------------ elaborate

    int lookup_env(const std::string& name) {
        for (int i = static_cast<int>(env_.size()) - 1; i >= 0; --i)
            if (env_[i].name == name) return i;
        return -1;
    }

    int lookup_def(const std::string& name) {
        for (int i = static_cast<int>(templates_.size()) - 1; i >= 0; --i)
            if (templates_[i].name == name) return i;
        return -1;
    }

    Type instantiate_ref(SExpr& e, int def_index) {
        const DefTemplate& tmpl = templates_[def_index];
        e.ref_def = def_index;
        if (!e.targs.empty()) {
            if (e.targs.size() != tmpl.params.size())
                err(DesugarErrorKind::ArityMismatch, e.pos,
                    "'" + tmpl.name + "' expects " + std::to_string(tmpl.params.size()) +
                        " type arguments");
            Type ty = tmpl.type;
            for (std::size_t i = 0; i < e.targs.size(); ++i) {
                check_type_scope(e.targs[i], e.pos);
                if (tmpl.params[i].second && !is_stable(e.targs[i], stable_params_))
                    err(DesugarErrorKind::StabilityConstraintViolated, e.pos,
                        "type parameter '" + tmpl.params[i].first + "' of '" + tmpl.name +
                            "' requires a stable type");
                ty = subst_type(ty, tmpl.params[i].first, e.targs[i]);
            }
            e.solved_targs = e.targs;
            return ty;
        }
        if (tmpl.params.empty()) return tmpl.type;
        PendingInst pend{&e, def_index, {}};
        Type ty = tmpl.type;
        for (const auto& [p, stable] : tmpl.params) {
            (void)stable;
            Type m = new_meta();
            pend.metas.push_back(m);
            ty = subst_type(ty, p, m);
        }
        pending_.push_back(std::move(pend));
        return ty;
    }

    Type recursion_var_type(SExpr& e) {
        e.is_recursion = true;
        if (!e.targs.empty())
            err(DesugarErrorKind::ArityMismatch, e.pos,
                "recursive references take no type arguments");
        Type ty = rec_type_;
        for (auto it = rec_prepat_types_.rbegin(); it != rec_prepat_types_.rend(); ++it)
            ty = ty_arrow(*it, ty);
        return ty;
    }

    Type infer(SExpr& e) {
        Type t = infer_impl(e);
        e.etype = t;
        return t;
    }

    Type infer_impl(SExpr& e) {
        switch (e.kind) {
            case SKind::Unit: return ty_unit();
            case SKind::NatLit: return ty_nat();
            case SKind::BoolLit: return ty_bool();
            case SKind::NothingLit: return ty_maybe(new_meta());
            case SKind::Var: {
                int i = lookup_env(e.name);
                if (i >= 0) {
                    if (env_[i].is_rec) return recursion_var_type(e);
                    if (!e.targs.empty())
                        err(DesugarErrorKind::ArityMismatch, e.pos,
                            "local variable '" + e.name + "' takes no type arguments");
                    return env_[i].type;
                }
                int di = lookup_def(e.name);
                if (di >= 0) return instantiate_ref(e, di);
                err(DesugarErrorKind::UnknownIdentifier, e.pos,
                    "unknown identifier '" + e.name + "'");
            }
            case SKind::Lam: {
                std::size_t depth = env_.size();
                std::vector<Type> doms;
                for (const auto& b : e.binders) {
                    Type m = new_meta();
                    doms.push_back(m);
                    env_.push_back({b, m, false});
                }
                Type body = infer(*e.a);
                env_.resize(depth);
                for (auto it = doms.rbegin(); it != doms.rend(); ++it)
                    body = ty_arrow(*it, body);
                return body;
            }
            case SKind::App: {
                Type ft = infer(*e.a);
                // Recursive-call spines get the derived stable-application
                // treatment instead of plain application.
                bool head_rec = (e.a->kind == SKind::Var && e.a->is_recursion) ||
                                (e.a->kind == SKind::App && e.a->rec_spine);
                if (head_rec) {
                    int consumed = e.a->kind == SKind::Var ? 0 : e.a->rec_prepats;
                    e.rec_spine = true;
                    e.rec_prepats = consumed + 1;
                    if (consumed < static_cast<int>(def_->prepats.size())) {
                        const auto& expect = def_->prepats[consumed].name;
                        if (e.b->kind != SKind::Var || e.b->name != expect)
                            err(DesugarErrorKind::ArityMismatch, e.pos,
                                "recursive call to '" + def_->name +
                                    "' must repeat leading argument '" + expect + "'");
                        e.rec_prepat_step = true;
                        auto [dom, cod] = force_arrow(ft, e.pos);
                        check(*e.b, dom);
                        return cod;
                    }
                    Type inner = force_delay(ft, e.pos);
                    if (resolve(inner)->kind != TypeKind::Arrow)
                        err(DesugarErrorKind::ArityMismatch, e.pos,
                            "too many arguments in recursive call to '" + def_->name + "'");
                    auto [dom, cod] = force_arrow(inner, e.pos);
                    check(*e.b, dom);
                    stability_.push_back({dom, e.b->pos, "recursive call argument"});
                    return ty_delay(cod);
                }
                auto [dom, cod] = force_arrow(ft, e.a->pos);
                check(*e.b, dom);
                return cod;
            }
            case SKind::BinOp:
                return infer_binop(e);
            case SKind::Pair:
                return ty_prod(infer(*e.a), infer(*e.b));
            case SKind::Anno: {
                check_type_scope(e.anno, e.pos);
                check(*e.a, e.anno);
                return e.anno;
            }
            case SKind::If: {
                check(*e.a, ty_bool());
                Type tb = infer(*e.b);
                Type tc = infer(*e.c);
                if (!unify(tb, tc))
                    err(DesugarErrorKind::TypeMismatch, e.pos,
                        "branches of 'if' have different types");
                return tb;
            }
            case SKind::Case: {
                auto [ta, tb] = force_sum(infer(*e.a), e.a->pos);
                std::size_t depth = env_.size();
                env_.push_back({e.cx1, ta, false});
                Type t1 = infer(*e.b);
                env_.resize(depth);
                env_.push_back({e.cx2, tb, false});
                Type t2 = infer(*e.c);
                env_.resize(depth);
                if (!unify(t1, t2))
                    err(DesugarErrorKind::TypeMismatch, e.pos,
                        "branches of 'case' have different types");
                return t1;
            }
            case SKind::Fix:
                err(DesugarErrorKind::TypeMismatch, e.pos,
                    "cannot infer the type of 'fix'; add an annotation");
            case SKind::Prefix:
                return infer_prefix(e);
        }
        err(DesugarErrorKind::TypeMismatch, e.pos, "unhandled expression form");
    }

    Type infer_binop(SExpr& e) {
        switch (e.btag) {
            case BinTag::Add:
            case BinTag::Monus:
            case BinTag::Mul:
                check(*e.a, ty_nat());
                check(*e.b, ty_nat());
                return ty_nat();
            case BinTag::Eq:
            case BinTag::Lt:
                check(*e.a, ty_nat());
                check(*e.b, ty_nat());
                return ty_bool();
            case BinTag::Cons: {
                Type ta = infer(*e.a);
                Type tb = zonk(infer(*e.b));
                if (tb->kind == TypeKind::Delay && resolve(tb->a)->kind == TypeKind::Mu) {
                    Type mu = resolve(tb->a);
                    Type un = unfold_mu(mu);
                    require(un->kind == TypeKind::Prod, e.pos,
                            "'::' requires a stream-shaped recursive type");
                    if (!unify(ta, un->a))
                        err(DesugarErrorKind::TypeMismatch, e.pos,
                            "head type does not match the stream element type");
                    return mu;
                }
                err(DesugarErrorKind::TypeMismatch, e.pos,
                    "cannot infer the type of '::' here; annotate the expression");
            }
            case BinTag::ApDelay: {
                Type inner = force_delay(infer(*e.a), e.a->pos);
                auto [dom, cod] = force_arrow(inner, e.a->pos);
                check(*e.b, ty_delay(dom));
                return ty_delay(cod);
            }
            case BinTag::ApStable: {
                Type inner = force_delay(infer(*e.a), e.a->pos);
                auto [dom, cod] = force_arrow(inner, e.a->pos);
                check(*e.b, dom);
                stability_.push_back({dom, e.b->pos, "the '<*' argument"});
                return ty_delay(cod);
            }
            case BinTag::ApBox: {
                Type inner = force_box(infer(*e.a), e.a->pos);
                auto [dom, cod] = force_arrow(inner, e.a->pos);
                check(*e.b, dom);
                stability_.push_back({dom, e.b->pos, "the '[*]' argument"});
                return ty_box(cod);
            }
            case BinTag::ApBoxBox: {
                Type inner = force_box(infer(*e.a), e.a->pos);
                auto [dom, cod] = force_arrow(inner, e.a->pos);
                check(*e.b, ty_box(dom));
                return ty_box(cod);
            }
        }
        err(DesugarErrorKind::TypeMismatch, e.pos, "unhandled operator");
    }

    Type infer_prefix(SExpr& e) {
        switch (e.op) {
            case PrefixOp::Delay: return ty_delay(infer(*e.a));
            case PrefixOp::Adv: return force_delay(infer(*e.a), e.pos);
            case PrefixOp::BoxOp: return ty_box(infer(*e.a));
            case PrefixOp::Unbox: return force_box(infer(*e.a), e.pos);
            case PrefixOp::Progress:
            case PrefixOp::Promote: return infer(*e.a);
            case PrefixOp::Into:
                err(DesugarErrorKind::TypeMismatch, e.pos,
                    "cannot infer the type of 'into'; add an annotation");
            case PrefixOp::Out:
                return unfold_mu(require_mu(infer(*e.a), e.pos));
            case PrefixOp::Fst: return force_prod(infer(*e.a), e.pos).first;
            case PrefixOp::Snd: return force_prod(infer(*e.a), e.pos).second;
            case PrefixOp::Head: {
                Type un = unfold_mu(require_mu(infer(*e.a), e.pos));
                require(un->kind == TypeKind::Prod, e.pos,
                        "'head' requires a stream-shaped recursive type");
                return un->a;
            }
            case PrefixOp::Tail: {
                Type un = unfold_mu(require_mu(infer(*e.a), e.pos));
                require(un->kind == TypeKind::Prod, e.pos,
                        "'tail' requires a stream-shaped recursive type");
                return un->b;
            }
            case PrefixOp::Val: return ty_event(infer(*e.a));
            case PrefixOp::Wait: {
                Type d = zonk(infer(*e.a));
                require(d->kind == TypeKind::Delay && resolve(d->a)->kind == TypeKind::Mu,
                        e.pos, "'wait' requires a delayed event");
                Type mu = resolve(d->a);
                Type un = unfold_mu(mu);
                require(un->kind == TypeKind::Sum && type_equal(un->b, ty_delay(mu)), e.pos,
                        "'wait' requires an event-shaped recursive type");
                return mu;
            }
            case PrefixOp::Just: return ty_maybe(infer(*e.a));
            case PrefixOp::In1: return ty_sum(infer(*e.a), new_meta());
            case PrefixOp::In2: return ty_sum(new_meta(), infer(*e.a));
        }
        err(DesugarErrorKind::TypeMismatch, e.pos, "unhandled prefix form");
    }

    void check(SExpr& e, const Type& expected0) {
        Type expected = resolve(expected0);
        e.etype = expected;
        switch (e.kind) {
            case SKind::Lam: {
                std::size_t depth = env_.size();
                Type t = expected;
                for (const auto& b : e.binders) {
                    auto [dom, cod] = force_arrow(t, e.pos);
                    env_.push_back({b, dom, false});
                    t = resolve(cod);
                }
                check(*e.a, t);
                env_.resize(depth);
                return;
            }
            case SKind::Pair: {
                auto [ta, tb] = force_prod(expected, e.pos);
                check(*e.a, ta);
                check(*e.b, tb);
                return;
            }
            case SKind::If: {
                check(*e.a, ty_bool());
                check(*e.b, expected);
                check(*e.c, expected);
                return;
            }
            case SKind::Case: {
                auto [ta, tb] = force_sum(infer(*e.a), e.a->pos);
                std::size_t depth = env_.size();
                env_.push_back({e.cx1, ta, false});
                check(*e.b, expected);
                env_.resize(depth);
                env_.push_back({e.cx2, tb, false});
                check(*e.c, expected);
                env_.resize(depth);
                return;
            }
            case SKind::Fix: {
                if (expected->kind != TypeKind::Box)
                    err(DesugarErrorKind::TypeMismatch, e.pos,
                        "'fix' must have a boxed type, found " + pretty(zonk(expected)));
                std::size_t depth = env_.size();
                env_.push_back({e.name, ty_delay(expected->a), false});
                check(*e.a, expected->a);
                env_.resize(depth);
                return;
            }
            case SKind::NothingLit: {
                if (expected->kind == TypeKind::Sum) {
                    if (!unify(expected->a, ty_unit()))
                        err(DesugarErrorKind::TypeMismatch, e.pos,
                            "'nothing' requires a Maybe type");
                    return;
                }
                break;
            }
            case SKind::BinOp:
                if (e.btag == BinTag::Cons && expected->kind == TypeKind::Mu) {
                    Type un = unfold_mu(expected);
                    require(un->kind == TypeKind::Prod, e.pos,
                            "'::' requires a stream-shaped recursive type");
                    check(*e.a, un->a);
                    check(*e.b, un->b);
                    return;
                }
                break;
            case SKind::Prefix:
                switch (e.op) {
                    case PrefixOp::Delay:
                        if (expected->kind == TypeKind::Delay) {
                            check(*e.a, expected->a);
                            return;
                        }
                        break;
                    case PrefixOp::BoxOp:
                        if (expected->kind == TypeKind::Box) {
                            check(*e.a, expected->a);
                            return;
                        }
                        break;
                    case PrefixOp::Into:
                        if (expected->kind == TypeKind::Mu) {
                            check(*e.a, unfold_mu(expected));
                            return;
                        }
                        if (expected->kind != TypeKind::Meta)
                            err(DesugarErrorKind::TypeMismatch, e.pos,
                                "'into' must have a recursive type, found " +
                                    pretty(zonk(expected)));
                        break;
                    case PrefixOp::Val:
                        if (expected->kind == TypeKind::Mu) {
                            Type un = unfold_mu(expected);
                            require(un->kind == TypeKind::Sum, e.pos,
                                    "'val' requires an event-shaped recursive type");
                            check(*e.a, un->a);
                            return;
                        }
                        break;
                    case PrefixOp::Wait:
                        if (expected->kind == TypeKind::Mu) {
                            Type un = unfold_mu(expected);
                            require(un->kind == TypeKind::Sum, e.pos,
                                    "'wait' requires an event-shaped recursive type");
                            check(*e.a, un->b);
                            return;
                        }
                        break;
                    case PrefixOp::Just:
                        if (expected->kind == TypeKind::Sum) {
                            check(*e.a, expected->b);
                            return;
                        }
                        break;
                    case PrefixOp::In1:
                        if (expected->kind == TypeKind::Sum) {
                            check(*e.a, expected->a);
                            return;
                        }
                        break;
                    case PrefixOp::In2:
                        if (expected->kind == TypeKind::Sum) {
                            check(*e.a, expected->b);
                            return;
                        }
                        break;
                    case PrefixOp::Progress:
                    case PrefixOp::Promote:
                        check(*e.a, expected);
                        return;
                    default:
                        break;
                }
                break;
            default:
                break;
        }
        Type got = infer(e);
        if (!unify(got, expected))
            err(DesugarErrorKind::TypeMismatch, e.pos,
                "expected " + pretty(zonk(expected)) + ", found " + pretty(zonk(got)));
    }

    // ------------------------------------------------------------- emission

    // Emits a subterm that will sit in an inference position of the core
    // checker, annotating it with its elaborated type when it could not
    // infer on its own.
    Term emit_infer(const SExpr& e) {
        Term core = emit(e);
        if (is_core_inferable(core)) return core;
        if (!e.etype)
            throw std::logic_error("emit: missing elaborated type");
        Type ty = zonk(e.etype);
        if (contains_meta(ty))
            err(DesugarErrorKind::UninstantiableTypeParameter, e.pos,
                "cannot determine the type of this expression");
        check_type_scope(ty, e.pos);
        return t_anno(core, ty);
    }

    Term emit(const SExpr& e) {
        switch (e.kind) {
            case SKind::Unit: return t_unit();
            case SKind::NatLit: return t_nat(e.lit);
            case SKind::BoolLit: return e.bval ? t_true() : t_false();
            case SKind::NothingLit: return t_inj(1, t_unit());
            case SKind::Var: {
                if (e.is_recursion) return t_var(def_->name);
                if (e.ref_def >= 0) {
                    const DefTemplate& tmpl = templates_[e.ref_def];
                    Term inst = tmpl.core;
                    Type ity = tmpl.type;
                    for (std::size_t i = 0; i < tmpl.params.size(); ++i) {
                        inst = term_subst_type(inst, tmpl.params[i].first, e.solved_targs[i]);
                        ity = subst_type(ity, tmpl.params[i].first, e.solved_targs[i]);
                    }
                    return t_anno(inst, ity);
                }
                return t_var(e.name);
            }
            case SKind::Lam: {
                Term core = emit(*e.a);
                for (auto it = e.binders.rbegin(); it != e.binders.rend(); ++it)
                    core = t_lam(*it, core);
                return core;
            }
            case SKind::App: {
                if (e.rec_prepat_step) return emit(*e.a);
                if (e.rec_spine) {
                    // r ⊙ u  =  delay (adv r (progress u))
                    return t_delay(t_app(t_adv(emit(*e.a)), t_progress(emit_infer(*e.b))));
                }
                return t_app(emit_infer(*e.a), emit(*e.b));
            }
            case SKind::BinOp: {
                switch (e.btag) {
                    case BinTag::Add: return t_add(emit(*e.a), emit(*e.b));
                    case BinTag::Monus: return t_prim(PrimTag::Monus, emit(*e.a), emit(*e.b));
                    case BinTag::Mul: return t_prim(PrimTag::Mul, emit(*e.a), emit(*e.b));
                    case BinTag::Eq: return t_prim(PrimTag::Eq, emit(*e.a), emit(*e.b));
                    case BinTag::Lt: return t_prim(PrimTag::Lt, emit(*e.a), emit(*e.b));
                    case BinTag::Cons: return t_into(t_pair(emit(*e.a), emit(*e.b)));
                    case BinTag::ApDelay:
                        return t_delay(t_app(t_adv(emit_infer(*e.a)), t_adv(emit_infer(*e.b))));
                    case BinTag::ApStable:
                        return t_delay(
                            t_app(t_adv(emit_infer(*e.a)), t_progress(emit_infer(*e.b))));
                    case BinTag::ApBox:
                        return t_box(
                            t_app(t_unbox(emit_infer(*e.a)), t_promote(emit_infer(*e.b))));
                    case BinTag::ApBoxBox:
                        return t_box(
                            t_app(t_unbox(emit_infer(*e.a)), t_unbox(emit_infer(*e.b))));
                }
                return emit(*e.a);
            }
            case SKind::Pair: return t_pair(emit(*e.a), emit(*e.b));
            case SKind::Anno: return t_anno(emit(*e.a), e.anno);
            case SKind::If:
                return t_case(emit_infer(*e.a), "_", emit(*e.c), "_", emit(*e.b));
            case SKind::Case:
                return t_case(emit_infer(*e.a), e.cx1, emit(*e.b), e.cx2, emit(*e.c));
            case SKind::Fix: return t_fix(e.name, emit(*e.a));
            case SKind::Prefix: {
                switch (e.op) {
                    case PrefixOp::Delay: return t_delay(emit(*e.a));
                    case PrefixOp::Adv: return t_adv(emit_infer(*e.a));
                    case PrefixOp::BoxOp: return t_box(emit(*e.a));
                    case PrefixOp::Unbox: return t_unbox(emit_infer(*e.a));
                    case PrefixOp::Progress: return t_progress(emit_infer(*e.a));
                    case PrefixOp::Promote: return t_promote(emit_infer(*e.a));
                    case PrefixOp::Into: return t_into(emit(*e.a));
                    case PrefixOp::Out: return t_out(emit_infer(*e.a));
                    case PrefixOp::Fst: return t_proj(1, emit_infer(*e.a));
                    case PrefixOp::Snd: return t_proj(2, emit_infer(*e.a));
                    case PrefixOp::Head: return t_proj(1, t_out(emit_infer(*e.a)));
                    case PrefixOp::Tail: return t_proj(2, t_out(emit_infer(*e.a)));
                    case PrefixOp::Val: return t_into(t_inj(1, emit(*e.a)));
                    case PrefixOp::Wait: return t_into(t_inj(2, emit(*e.a)));
                    case PrefixOp::Just: return t_inj(2, emit(*e.a));
                    case PrefixOp::In1: return t_inj(1, emit(*e.a));
                    case PrefixOp::In2: return t_inj(2, emit(*e.a));
                }
                return emit(*e.a);
            }
        }
        throw std::logic_error("emit: unhandled expression form");
    }
};

} // namespace

std::vector<CheckedDef> desugar(const SurfaceProgram& program) {
    Desugarer d;
    return d.run(program);
}

} // namespace ratt
