#include "ratt/surface.hpp"

#include <set>
#include <sstream>

namespace ratt {

namespace {

// Type printing levels: 0 arrow/mu, 1 sum, 2 prod, 3 prefix forms, 4 atoms.
void print_type(std::ostream& os, const Type& t, int level);

bool tvar_free_in(const std::string& name, const Type& t) {
    switch (t->kind) {
        case TypeKind::Var: return t->name == name;
        case TypeKind::Mu:
            if (t->name == name) return false;
            return tvar_free_in(name, t->a);
        default:
            if (t->a && tvar_free_in(name, t->a)) return true;
            return t->b && tvar_free_in(name, t->b);
    }
}

void print_type(std::ostream& os, const Type& t, int level) {
    auto paren = [&](int natural, auto&& body) {
        if (natural < level) {
            os << '(';
            body();
            os << ')';
        } else {
            body();
        }
    };
    auto prefix = [&](const char* kw, const Type& arg) {
        paren(3, [&] {
            os << kw << ' ';
            print_type(os, arg, 4);
        });
    };
    switch (t->kind) {
        case TypeKind::Var: os << t->name; return;
        case TypeKind::Unit: os << "Unit"; return;
        case TypeKind::Nat: os << "Nat"; return;
        case TypeKind::Meta: os << "?" << t->meta_id; return;
        case TypeKind::Delay: prefix("O", t->a); return;
        case TypeKind::Box: prefix("Box", t->a); return;
        case TypeKind::Sum:
            if (t->a->kind == TypeKind::Unit) {
                if (t->b->kind == TypeKind::Unit) {
                    os << "Bool";
                    return;
                }
                prefix("Maybe", t->b);
                return;
            }
            paren(1, [&] {
                print_type(os, t->a, 2);
                os << " + ";
                print_type(os, t->b, 2);
            });
            return;
        case TypeKind::Prod:
            paren(2, [&] {
                print_type(os, t->a, 2);
                os << " * ";
                print_type(os, t->b, 3);
            });
            return;
        case TypeKind::Arrow:
            paren(0, [&] {
                print_type(os, t->a, 1);
                os << " -> ";
                print_type(os, t->b, 0);
            });
            return;
        case TypeKind::Mu: {
            const Type& body = t->a;
            if ((body->kind == TypeKind::Prod || body->kind == TypeKind::Sum) &&
                body->b->kind == TypeKind::Var && body->b->name == t->name &&
                !tvar_free_in(t->name, body->a)) {
                prefix(body->kind == TypeKind::Prod ? "Str" : "Ev", body->a);
                return;
            }
            paren(0, [&] {
                os << "mu " << t->name << ". ";
                print_type(os, t->a, 0);
            });
            return;
        }
    }
}

std::string type_str(const Type& t, int level) {
    std::ostringstream os;
    print_type(os, t, level);
    return os.str();
}

// Term printing levels: 0 open forms (lambda, fix, case), 1 cons,
// 2 applicative ops, 3 comparisons, 4 add, 5 mul, 6 application,
// 7 keyword prefix forms, 8 closed atoms.
void print_term(std::ostream& os, const Term& t, int level);

void print_prefix(std::ostream& os, const char* kw, const Term& arg) {
    os << kw << ' ';
    print_term(os, arg, 8);
}

void print_term(std::ostream& os, const Term& t, int level) {
    auto paren = [&](int natural, auto&& body) {
        if (natural < level) {
            os << '(';
            body();
            os << ')';
        } else {
            body();
        }
    };
    switch (t->kind) {
        case TermKind::Unit: os << "()"; return;
        case TermKind::NatLit: os << t->lit.to_string(); return;
        case TermKind::Var: os << t->name; return;
        case TermKind::Loc:
            os << (t->loc.reserved ? "#in" : "#" + std::to_string(t->loc.index));
            return;
        case TermKind::Pair:
            os << '(';
            print_term(os, t->a, 0);
            os << ", ";
            print_term(os, t->b, 0);
            os << ')';
            return;
        case TermKind::Anno:
            os << '(';
            print_term(os, t->a, 0);
            os << " : " << type_str(t->anno, 0) << ')';
            return;
        case TermKind::Lam:
            paren(0, [&] {
                os << '\\' << t->name << ". ";
                print_term(os, t->a, 0);
            });
            return;
        case TermKind::Fix:
            paren(0, [&] {
                os << "fix " << t->name << ". ";
                print_term(os, t->a, 0);
            });
            return;
        case TermKind::Case:
            paren(0, [&] {
                os << "case ";
                print_term(os, t->a, 1);
                os << " of in1 " << t->name << " -> ";
                print_term(os, t->b, 1);
                os << " | in2 " << t->name2 << " -> ";
                print_term(os, t->c, 0);
            });
            return;
        case TermKind::App:
            paren(6, [&] {
                print_term(os, t->a, 6);
                os << ' ';
                print_term(os, t->b, 8);
            });
            return;
        case TermKind::Add:
            paren(4, [&] {
                print_term(os, t->a, 4);
                os << " + ";
                print_term(os, t->b, 5);
            });
            return;
        case TermKind::Prim: {
            const char* op = "==";
            int natural = 3, la = 4, ra = 4;
            switch (t->prim) {
                case PrimTag::Eq: op = "=="; break;
                case PrimTag::Lt: op = "<"; break;
                case PrimTag::Monus: op = "-"; natural = 4; la = 4; ra = 5; break;
                case PrimTag::Mul: op = "*"; natural = 5; la = 5; ra = 6; break;
            }
            paren(natural, [&] {
                print_term(os, t->a, la);
                os << ' ' << op << ' ';
                print_term(os, t->b, ra);
            });
            return;
        }
        case TermKind::Proj:
            paren(7, [&] {
                if (t->a->kind == TermKind::Out) {
                    print_prefix(os, t->idx == 1 ? "head" : "tail", t->a->a);
                } else {
                    print_prefix(os, t->idx == 1 ? "fst" : "snd", t->a);
                }
            });
            return;
        case TermKind::Inj:
            paren(7, [&] { print_prefix(os, t->idx == 1 ? "in1" : "in2", t->a); });
            return;
        case TermKind::Into:
            if (t->a->kind == TermKind::Pair) {
                paren(1, [&] {
                    print_term(os, t->a->a, 2);
                    os << " :: ";
                    print_term(os, t->a->b, 0);
                });
                return;
            }
            if (t->a->kind == TermKind::Inj) {
                paren(7, [&] {
                    print_prefix(os, t->a->idx == 1 ? "val" : "wait", t->a->a);
                });
                return;
            }
            paren(7, [&] { print_prefix(os, "into", t->a); });
            return;
        case TermKind::Out:
            paren(7, [&] { print_prefix(os, "out", t->a); });
            return;
        case TermKind::Delay:
            paren(7, [&] { print_prefix(os, "delay", t->a); });
            return;
        case TermKind::Adv:
            paren(7, [&] { print_prefix(os, "adv", t->a); });
            return;
        case TermKind::Box:
            paren(7, [&] { print_prefix(os, "box", t->a); });
            return;
        case TermKind::Unbox:
            paren(7, [&] { print_prefix(os, "unbox", t->a); });
            return;
        case TermKind::Progress:
            paren(7, [&] { print_prefix(os, "progress", t->a); });
            return;
        case TermKind::Promote:
            paren(7, [&] { print_prefix(os, "promote", t->a); });
            return;
    }
}

} // namespace

std::string pretty(const Type& t) { return type_str(t, 0); }

std::string pretty(const Term& t) {
    std::ostringstream os;
    print_term(os, t, 0);
    return os.str();
}

std::string pretty(const Location& l) {
    return l.reserved ? "#in" : "#" + std::to_string(l.index);
}

std::string pretty(const Heap& h) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [l, t] : h) {
        if (!first) os << ", ";
        first = false;
        os << pretty(l) << " |-> " << pretty(t);
    }
    os << '}';
    return os.str();
}

std::string pretty(const Store& s) {
    switch (s.shape) {
        case StoreShape::Bottom: return "bot";
        case StoreShape::One: return "lock " + pretty(s.later);
        case StoreShape::Two: return "lock " + pretty(s.now) + " tick " + pretty(s.later);
    }
    return "bot";
}

std::string pretty(const Context& ctx) {
    std::ostringstream os;
    bool first = true;
    for (const auto& e : ctx) {
        if (!first) os << ", ";
        first = false;
        switch (e.kind) {
            case CtxEntry::Kind::Bind: os << e.name << " : " << pretty(e.type); break;
            case CtxEntry::Kind::Lock: os << "lock"; break;
            case CtxEntry::Kind::Tick: os << "tick"; break;
        }
    }
    return os.str();
}

std::string print_value(const Term& v) {
    switch (v->kind) {
        case TermKind::NatLit: return v->lit.to_string();
        case TermKind::Unit: return "()";
        case TermKind::Pair: return "(" + print_value(v->a) + ", " + print_value(v->b) + ")";
        case TermKind::Inj: {
            if (v->a->kind == TermKind::Unit) return v->idx == 2 ? "true" : "false";
            std::string inner = print_value(v->a);
            if (v->a->kind == TermKind::Inj) inner = "(" + inner + ")";
            return (v->idx == 1 ? "in1 " : "in2 ") + inner;
        }
        default:
            return pretty(v); // non-value-typed payloads fall back to term syntax
    }
}

} // namespace ratt
