#ifndef RATT_SURFACE_HPP
#define RATT_SURFACE_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ratt/machine.hpp"
#include "ratt/syntax.hpp"
#include "ratt/typecheck.hpp"

namespace ratt {

struct SrcPos {
    int line = 1;
    int col = 1;
};

struct SyntaxError : std::runtime_error {
    SrcPos pos;
    std::string expected;
    SyntaxError(SrcPos p, std::string exp, const std::string& msg)
        : std::runtime_error(msg), pos(p), expected(std::move(exp)) {}
};

enum class DesugarErrorKind {
    UnknownIdentifier,
    ArityMismatch,
    UninstantiableTypeParameter,
    StabilityConstraintViolated,
    TypeMismatch,
};

std::string to_string(DesugarErrorKind k);

struct DesugarError : std::runtime_error {
    DesugarErrorKind kind;
    SrcPos pos;
    std::string def_name;
    DesugarError(DesugarErrorKind k, SrcPos p, std::string def, const std::string& msg)
        : std::runtime_error(msg), kind(k), pos(p), def_name(std::move(def)) {}
};

// ---------------------------------------------------------------------------
// Surface abstract syntax
// ---------------------------------------------------------------------------

enum class SKind {
    Unit, NatLit, BoolLit, NothingLit, Var, Lam, App, BinOp, Pair, Anno,
    If, Case, Fix, Prefix,
};

enum class BinTag { Cons, ApDelay, ApStable, ApBox, ApBoxBox, Add, Monus, Mul, Eq, Lt };

enum class PrefixOp {
    Delay, Adv, BoxOp, Unbox, Progress, Promote, Into, Out,
    Fst, Snd, Head, Tail, Val, Wait, Just, In1, In2,
};

struct SExpr;
using SExprP = std::shared_ptr<SExpr>;

struct SExpr {
    SKind kind;
    SrcPos pos;
    Nat lit;
    bool bval = false;
    std::string name;                  // Var name, Fix binder
    std::vector<std::string> binders;  // Lam
    std::vector<Type> targs;           // explicit instantiation at a Var
    BinTag btag = BinTag::Add;
    PrefixOp op = PrefixOp::Delay;
    SExprP a, b, c;
    std::string cx1, cx2;              // Case binders
    Type anno;

    // Filled in by the elaborator.
    Type etype;                        // elaborated type (may contain metas)
    int ref_def = -1;                  // index into the program's definitions
    std::vector<Type> solved_targs;
    bool is_recursion = false;         // Var naming the enclosing fixpoint def
    int rec_prepats = 0;               // leading-argument count consumed so far
    bool rec_spine = false;            // App participating in a recursive call
    bool rec_prepat_step = false;      // App consuming one leading argument
};

struct Pattern {
    enum class Kind { Var, Wild, Pair } kind = Kind::Var;
    SrcPos pos;
    std::string name;
    std::shared_ptr<Pattern> a, b;
};

struct Definition {
    std::string name;
    SrcPos pos;
    std::vector<std::pair<std::string, bool>> params; // (name, stable?)
    Type declared;
    bool diamond = false;          // uses the '$' fixpoint sugar
    std::vector<Pattern> prepats;  // arguments left of '$'
    std::vector<Pattern> postpats; // arguments right of '$'
    SExprP body;
};

struct SurfaceProgram {
    std::vector<Definition> defs;
};

// Parses a .ratt source text. Throws SyntaxError.
SurfaceProgram parse(const std::string& source);

// Desugars a parsed program to closed core terms, one per definition, with
// earlier definitions inlined (and monomorphised) at their use sites.
// Throws DesugarError.
std::vector<CheckedDef> desugar(const SurfaceProgram& program);

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string pretty(const Type& t);
std::string pretty(const Term& t);
std::string pretty(const Store& s);
std::string pretty(const Heap& h);
std::string pretty(const Location& l);
std::string pretty(const Context& ctx);

// Driver value literals: naturals, (), (v, w), in1 v, in2 v; true/false are
// aliases for in2 ()/in1 ().
std::string print_value(const Term& v);
Term parse_value(const std::string& text); // throws SyntaxError

} // namespace ratt

#endif
