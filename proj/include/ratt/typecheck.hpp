#ifndef RATT_TYPECHECK_HPP
#define RATT_TYPECHECK_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratt/syntax.hpp"

namespace ratt {

// Fitch-style context: an ordered sequence of variable bindings and the
// two tokens. Well-formed contexts have at most one lock and one tick, and
// a tick only to the right of the lock.
struct CtxEntry {
    enum class Kind { Bind, Lock, Tick } kind;
    std::string name;
    Type type;

    static CtxEntry bind(std::string n, Type t) {
        return CtxEntry{Kind::Bind, std::move(n), std::move(t)};
    }
    static CtxEntry lock() { return CtxEntry{Kind::Lock, "", nullptr}; }
    static CtxEntry tick() { return CtxEntry{Kind::Tick, "", nullptr}; }
};

using Context = std::vector<CtxEntry>;

bool check_wf(const Context& ctx);

enum class TypeErrorKind {
    VarBehindToken,
    LambdaUnderTick,
    AdvOutsideLater,
    DelayOutsideNow,
    UnboxUnderTick,
    UnboxWithoutLock,
    ProgressNotStable,
    PromoteNotStable,
    ProgressOutsideLater,
    PromoteOutsideTemporal,
    FixWithTokens,
    Mismatch,
    CannotInfer,
};

std::string to_string(TypeErrorKind k);

struct TypeError {
    TypeErrorKind kind;
    Term term;     // offending subterm
    Context ctx;   // context snapshot at the failure
    std::string msg;
};

struct TypeCheckFailure : std::runtime_error {
    TypeError error;
    explicit TypeCheckFailure(TypeError e) : std::runtime_error(e.msg), error(std::move(e)) {}
};

struct CheckOptions {
    // Type parameters of the enclosing definition treated as opaque base
    // types; the subset declared stable.
    std::set<std::string> type_params;
    std::set<std::string> stable_params;
};

// Bidirectional reading of the declarative rules: introductions check,
// eliminations infer, annotations mediate. Both throw TypeCheckFailure.
Type infer(const Context& ctx, const Term& t, const CheckOptions& opts = {});
void check(const Context& ctx, const Term& t, const Type& a, const CheckOptions& opts = {});

struct CheckedDef {
    std::string name;
    std::vector<std::string> params;      // prenex type parameters
    std::set<std::string> stable_params;
    Type type;
    Term term;
};

struct DefReport {
    std::string name;
    std::optional<TypeError> error; // empty on success
};

struct ProgramReport {
    std::vector<DefReport> defs;
    bool ok() const {
        for (const auto& d : defs)
            if (d.error) return false;
        return true;
    }
};

// Checks each definition in the empty context against its declared type.
// Definitions are closed (earlier definitions already inlined at use sites).
ProgramReport check_program(const std::vector<CheckedDef>& defs);

} // namespace ratt

#endif
