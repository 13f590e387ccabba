#include "ratt/surface.hpp"

#include <set>

namespace ratt {

namespace {

enum class Tok {
    Ident, Number, Keyword,
    LParen, RParen, LBracket, RBracket, Comma, Dot, Colon, ColonColon,
    Equal, EqEq, Dollar, Backslash, Arrow, Plus, Minus, Star, Less,
    ApDelay /* <*> */, ApStable /* <* */, ApBox /* [*] */, ApBoxBox /* [*]> */,
    Bar, Underscore,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SrcPos pos;
};

const std::set<std::string>& keywords() {
    static std::set<std::string> kw = {
        "def", "delay", "adv", "box", "unbox", "progress", "promote", "into",
        "out", "fix", "case", "of", "in1", "in2", "fst", "snd", "val", "wait",
        "just", "nothing", "if", "then", "else", "true", "false", "head",
        "tail", "mu", "stable",
    };
    return kw;
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    const std::string& src_;
    std::size_t i_ = 0;
    SrcPos pos_{1, 1};
    Token tok_;

    char cur() const { return i_ < src_.size() ? src_[i_] : '\0'; }
    char at(std::size_t off) const { return i_ + off < src_.size() ? src_[i_ + off] : '\0'; }

    void bump() {
        if (cur() == '\n') {
            ++pos_.line;
            pos_.col = 1;
        } else {
            ++pos_.col;
        }
        ++i_;
    }

    void skip_trivia() {
        for (;;) {
            char c = cur();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '-' && at(1) == '-') {
                while (cur() && cur() != '\n') bump();
            } else {
                break;
            }
        }
    }

    static bool ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool ident_char(char c) {
        return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
    }

    void advance() {
        skip_trivia();
        SrcPos p = pos_;
        char c = cur();
        if (!c) {
            tok_ = {Tok::End, "", p};
            return;
        }
        if (ident_start(c)) {
            std::string s;
            while (ident_char(cur())) {
                s.push_back(cur());
                bump();
            }
            if (s == "_") {
                tok_ = {Tok::Underscore, s, p};
            } else if (keywords().count(s)) {
                tok_ = {Tok::Keyword, s, p};
            } else {
                tok_ = {Tok::Ident, s, p};
            }
            return;
        }
        if (c >= '0' && c <= '9') {
            std::string s;
            while (cur() >= '0' && cur() <= '9') {
                s.push_back(cur());
                bump();
            }
            tok_ = {Tok::Number, s, p};
            return;
        }
        auto two = [&](Tok k, const char* text) {
            bump();
            bump();
            tok_ = {k, text, p};
        };
        switch (c) {
            case '(': bump(); tok_ = {Tok::LParen, "(", p}; return;
            case ')': bump(); tok_ = {Tok::RParen, ")", p}; return;
            case '[':
                if (at(1) == '*' && at(2) == ']' && at(3) == '>') {
                    bump(); bump(); bump(); bump();
                    tok_ = {Tok::ApBoxBox, "[*]>", p};
                } else if (at(1) == '*' && at(2) == ']') {
                    bump(); bump(); bump();
                    tok_ = {Tok::ApBox, "[*]", p};
                } else {
                    bump();
                    tok_ = {Tok::LBracket, "[", p};
                }
                return;
            case ']': bump(); tok_ = {Tok::RBracket, "]", p}; return;
            case ',': bump(); tok_ = {Tok::Comma, ",", p}; return;
            case '.': bump(); tok_ = {Tok::Dot, ".", p}; return;
            case ':':
                if (at(1) == ':') { two(Tok::ColonColon, "::"); return; }
                bump(); tok_ = {Tok::Colon, ":", p}; return;
            case '=':
                if (at(1) == '=') { two(Tok::EqEq, "=="); return; }
                bump(); tok_ = {Tok::Equal, "=", p}; return;
            case '$': bump(); tok_ = {Tok::Dollar, "$", p}; return;
            case '\\': bump(); tok_ = {Tok::Backslash, "\\", p}; return;
            case '-':
                if (at(1) == '>') { two(Tok::Arrow, "->"); return; }
                bump(); tok_ = {Tok::Minus, "-", p}; return;
            case '+': bump(); tok_ = {Tok::Plus, "+", p}; return;
            case '*': bump(); tok_ = {Tok::Star, "*", p}; return;
            case '<':
                if (at(1) == '*' && at(2) == '>') {
                    bump(); bump(); bump();
                    tok_ = {Tok::ApDelay, "<*>", p};
                    return;
                }
                if (at(1) == '*') { two(Tok::ApStable, "<*"); return; }
                bump(); tok_ = {Tok::Less, "<", p}; return;
            case '|': bump(); tok_ = {Tok::Bar, "|", p}; return;
            default:
                throw SyntaxError(p, "token", "unexpected character '" + std::string(1, c) + "'");
        }
    }
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    SurfaceProgram program() {
        SurfaceProgram p;
        while (lex_.peek().kind != Tok::End) {
            p.defs.push_back(definition());
        }
        return p;
    }

    SExprP expr_only() {
        SExprP e = expr();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    Lexer lex_;

    [[noreturn]] void err(const std::string& expected) {
        const Token& t = lex_.peek();
        throw SyntaxError(t.pos, expected,
                          "expected " + expected + " but found '" +
                              (t.kind == Tok::End ? "end of input" : t.text) + "'");
    }

    Token expect(Tok k, const std::string& what) {
        if (lex_.peek().kind != k) err(what);
        return lex_.take();
    }

    bool accept(Tok k) {
        if (lex_.peek().kind == k) {
            lex_.take();
            return true;
        }
        return false;
    }

    bool at_keyword(const char* kw) {
        return lex_.peek().kind == Tok::Keyword && lex_.peek().text == kw;
    }

    Token expect_keyword(const char* kw) {
        if (!at_keyword(kw)) err(std::string("'") + kw + "'");
        return lex_.take();
    }

    // ------------------------------------------------------------------ defs

    Definition definition() {
        Definition d;
        d.pos = expect_keyword("def").pos;
        d.name = expect(Tok::Ident, "definition name").text;
        if (accept(Tok::LBracket)) {
            for (;;) {
                std::string p = expect(Tok::Ident, "type parameter").text;
                bool stable = false;
                if (at_keyword("stable")) {
                    lex_.take();
                    stable = true;
                }
                d.params.emplace_back(p, stable);
                if (!accept(Tok::Comma)) break;
            }
            expect(Tok::RBracket, "']'");
        }
        expect(Tok::Colon, "':'");
        d.declared = type();
        // Optional argument list with a '$' fixpoint marker.
        while (lex_.peek().kind != Tok::Equal) {
            if (lex_.peek().kind == Tok::Dollar) {
                if (d.diamond) err("'=' (only one '$' per definition)");
                lex_.take();
                d.diamond = true;
                continue;
            }
            Pattern p = pattern();
            if (d.diamond) {
                d.postpats.push_back(std::move(p));
            } else {
                d.prepats.push_back(std::move(p));
            }
        }
        if (!d.diamond && !d.prepats.empty()) {
            err("'$' (argument patterns require the fixpoint marker)");
        }
        expect(Tok::Equal, "'='");
        d.body = expr();
        return d;
    }

    Pattern pattern() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident) {
            Pattern p;
            p.kind = Pattern::Kind::Var;
            p.pos = t.pos;
            p.name = lex_.take().text;
            return p;
        }
        if (t.kind == Tok::Underscore) {
            Pattern p;
            p.kind = Pattern::Kind::Wild;
            p.pos = lex_.take().pos;
            return p;
        }
        if (t.kind == Tok::LParen) {
            SrcPos pos = lex_.take().pos;
            Pattern a = pattern();
            expect(Tok::Comma, "',' in pair pattern");
            Pattern b = pattern();
            expect(Tok::RParen, "')'");
            Pattern p;
            p.kind = Pattern::Kind::Pair;
            p.pos = pos;
            p.a = std::make_shared<Pattern>(std::move(a));
            p.b = std::make_shared<Pattern>(std::move(b));
            return p;
        }
        err("pattern");
    }

    // ----------------------------------------------------------------- types

    Type type() {
        Type lhs = type_sum();
        if (accept(Tok::Arrow)) return ty_arrow(lhs, type());
        return lhs;
    }

    Type type_sum() {
        Type t = type_prod();
        while (accept(Tok::Plus)) t = ty_sum(t, type_prod());
        return t;
    }

    Type type_prod() {
        Type t = type_atom();
        while (accept(Tok::Star)) t = ty_prod(t, type_atom());
        return t;
    }

    Type type_atom() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::LParen) {
            lex_.take();
            Type inner = type();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind == Tok::Keyword && t.text == "mu") {
            lex_.take();
            std::string binder = expect(Tok::Ident, "type variable").text;
            expect(Tok::Dot, "'.'");
            return ty_mu(binder, type());
        }
        if (t.kind == Tok::Ident) {
            std::string name = lex_.take().text;
            if (name == "Nat") return ty_nat();
            if (name == "Unit") return ty_unit();
            if (name == "Bool") return ty_bool();
            if (name == "O") return ty_delay(type_atom());
            if (name == "Box") return ty_box(type_atom());
            if (name == "Str") return ty_stream(type_atom());
            if (name == "Ev") return ty_event(type_atom());
            if (name == "Maybe") return ty_maybe(type_atom());
            return ty_var(name);
        }
        err("type");
    }

    // ----------------------------------------------------------- expressions

    SExprP mk(SKind k, SrcPos pos) {
        auto e = std::make_shared<SExpr>();
        e->kind = k;
        e->pos = pos;
        return e;
    }

    SExprP expr() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Backslash) {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::Lam, pos);
            e->binders.push_back(binder_name());
            while (lex_.peek().kind != Tok::Dot) e->binders.push_back(binder_name());
            expect(Tok::Dot, "'.'");
            e->a = expr();
            return e;
        }
        if (t.kind == Tok::Keyword && t.text == "if") {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::If, pos);
            e->a = expr();
            expect_keyword("then");
            e->b = expr();
            expect_keyword("else");
            e->c = expr();
            return e;
        }
        if (t.kind == Tok::Keyword && t.text == "case") {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::Case, pos);
            e->a = expr();
            expect_keyword("of");
            expect_keyword("in1");
            e->cx1 = binder_name();
            expect(Tok::Arrow, "'->'");
            e->b = expr();
            expect(Tok::Bar, "'|'");
            expect_keyword("in2");
            e->cx2 = binder_name();
            expect(Tok::Arrow, "'->'");
            e->c = expr();
            return e;
        }
        if (t.kind == Tok::Keyword && t.text == "fix") {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::Fix, pos);
            e->name = expect(Tok::Ident, "binder").text;
            expect(Tok::Dot, "'.'");
            e->a = expr();
            return e;
        }
        return cons_expr();
    }

    std::string binder_name() {
        if (lex_.peek().kind == Tok::Underscore) {
            lex_.take();
            return "_";
        }
        return expect(Tok::Ident, "binder").text;
    }

    SExprP cons_expr() {
        SExprP lhs = ap_expr();
        if (lex_.peek().kind == Tok::ColonColon) {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::BinOp, pos);
            e->btag = BinTag::Cons;
            e->a = lhs;
            e->b = expr(); // right-associative, extends maximally
            return e;
        }
        return lhs;
    }

    SExprP ap_expr() {
        SExprP lhs = cmp_expr();
        for (;;) {
            Tok k = lex_.peek().kind;
            BinTag tag;
            if (k == Tok::ApDelay) tag = BinTag::ApDelay;
            else if (k == Tok::ApStable) tag = BinTag::ApStable;
            else if (k == Tok::ApBox) tag = BinTag::ApBox;
            else if (k == Tok::ApBoxBox) tag = BinTag::ApBoxBox;
            else break;
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::BinOp, pos);
            e->btag = tag;
            e->a = lhs;
            e->b = cmp_expr();
            lhs = e;
        }
        return lhs;
    }

    SExprP cmp_expr() {
        SExprP lhs = add_expr();
        Tok k = lex_.peek().kind;
        if (k == Tok::EqEq || k == Tok::Less) {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::BinOp, pos);
            e->btag = k == Tok::EqEq ? BinTag::Eq : BinTag::Lt;
            e->a = lhs;
            e->b = add_expr();
            return e;
        }
        return lhs;
    }

    SExprP add_expr() {
        SExprP lhs = mul_expr();
        for (;;) {
            Tok k = lex_.peek().kind;
            if (k != Tok::Plus && k != Tok::Minus) break;
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::BinOp, pos);
            e->btag = k == Tok::Plus ? BinTag::Add : BinTag::Monus;
            e->a = lhs;
            e->b = mul_expr();
            lhs = e;
        }
        return lhs;
    }

    SExprP mul_expr() {
        SExprP lhs = app_expr();
        while (lex_.peek().kind == Tok::Star) {
            SrcPos pos = lex_.take().pos;
            auto e = mk(SKind::BinOp, pos);
            e->btag = BinTag::Mul;
            e->a = lhs;
            e->b = app_expr();
            lhs = e;
        }
        return lhs;
    }

    bool at_atom_start() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Tok::LParen:
            case Tok::Number:
            case Tok::Ident:
                return true;
            case Tok::Keyword:
                return t.text == "delay" || t.text == "adv" || t.text == "box" ||
                       t.text == "unbox" || t.text == "progress" || t.text == "promote" ||
                       t.text == "into" || t.text == "out" || t.text == "fst" ||
                       t.text == "snd" || t.text == "head" || t.text == "tail" ||
                       t.text == "val" || t.text == "wait" || t.text == "just" ||
                       t.text == "in1" || t.text == "in2" || t.text == "true" ||
                       t.text == "false" || t.text == "nothing";
            default:
                return false;
        }
    }

    SExprP app_expr() {
        SExprP lhs = atom_expr();
        while (at_atom_start()) {
            auto e = mk(SKind::App, lhs->pos);
            e->a = lhs;
            e->b = atom_expr();
            lhs = e;
        }
        return lhs;
    }

    SExprP atom_expr() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Number) {
            Token tok = lex_.take();
            auto e = mk(SKind::NatLit, tok.pos);
            e->lit = Nat::from_string(tok.text);
            return e;
        }
        if (t.kind == Tok::Ident) {
            Token tok = lex_.take();
            auto e = mk(SKind::Var, tok.pos);
            e->name = tok.text;
            if (lex_.peek().kind == Tok::LBracket) {
                lex_.take();
                for (;;) {
                    e->targs.push_back(type());
                    if (!accept(Tok::Comma)) break;
                }
                expect(Tok::RBracket, "']'");
            }
            return e;
        }
        if (t.kind == Tok::LParen) {
            SrcPos pos = lex_.take().pos;
            if (accept(Tok::RParen)) return mk(SKind::Unit, pos);
            SExprP inner = expr();
            if (accept(Tok::Comma)) {
                auto e = mk(SKind::Pair, pos);
                e->a = inner;
                e->b = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            if (accept(Tok::Colon)) {
                auto e = mk(SKind::Anno, pos);
                e->a = inner;
                e->anno = type();
                expect(Tok::RParen, "')'");
                return e;
            }
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind == Tok::Keyword) {
            static const std::vector<std::pair<const char*, PrefixOp>> prefixes = {
                {"delay", PrefixOp::Delay}, {"adv", PrefixOp::Adv},
                {"box", PrefixOp::BoxOp}, {"unbox", PrefixOp::Unbox},
                {"progress", PrefixOp::Progress}, {"promote", PrefixOp::Promote},
                {"into", PrefixOp::Into}, {"out", PrefixOp::Out},
                {"fst", PrefixOp::Fst}, {"snd", PrefixOp::Snd},
                {"head", PrefixOp::Head}, {"tail", PrefixOp::Tail},
                {"val", PrefixOp::Val}, {"wait", PrefixOp::Wait},
                {"just", PrefixOp::Just}, {"in1", PrefixOp::In1},
                {"in2", PrefixOp::In2},
            };
            for (const auto& [kw, op] : prefixes) {
                if (t.text == kw) {
                    SrcPos pos = lex_.take().pos;
                    auto e = mk(SKind::Prefix, pos);
                    e->op = op;
                    e->a = atom_expr();
                    return e;
                }
            }
            if (t.text == "true" || t.text == "false") {
                Token tok = lex_.take();
                auto e = mk(SKind::BoolLit, tok.pos);
                e->bval = tok.text == "true";
                return e;
            }
            if (t.text == "nothing") {
                return mk(SKind::NothingLit, lex_.take().pos);
            }
        }
        err("expression");
    }
};

} // namespace

SurfaceProgram parse(const std::string& source) {
    Parser p(source);
    return p.program();
}

namespace {

// Value literal grammar: naturals, (), (v, w), in1 v, in2 v, with true and
// false as aliases for in2 () and in1 ().
Term value_of_sexpr(const SExpr& e) {
    switch (e.kind) {
        case SKind::Unit: return t_unit();
        case SKind::NatLit: return t_nat(e.lit);
        case SKind::BoolLit: return e.bval ? t_true() : t_false();
        case SKind::Pair: return t_pair(value_of_sexpr(*e.a), value_of_sexpr(*e.b));
        case SKind::Prefix:
            if (e.op == PrefixOp::In1) return t_inj(1, value_of_sexpr(*e.a));
            if (e.op == PrefixOp::In2) return t_inj(2, value_of_sexpr(*e.a));
            break;
        default:
            break;
    }
    throw SyntaxError(e.pos, "value literal", "not a value literal");
}

} // namespace

Term parse_value(const std::string& text) {
    Parser p(text);
    return value_of_sexpr(*p.expr_only());
}

std::string to_string(DesugarErrorKind k) {
    switch (k) {
        case DesugarErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case DesugarErrorKind::ArityMismatch: return "ArityMismatch";
        case DesugarErrorKind::UninstantiableTypeParameter: return "UninstantiableTypeParameter";
        case DesugarErrorKind::StabilityConstraintViolated: return "StabilityConstraintViolated";
        case DesugarErrorKind::TypeMismatch: return "TypeMismatch";
    }
    return "?";
}

} // namespace ratt
