#ifndef RATT_SYNTAX_HPP
#define RATT_SYNTAX_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <string>

#include "ratt/nat.hpp"

namespace ratt {

// Heap location. Exactly one reserved location exists per transducer run
// (the input slot, printed "#in"); the allocator never returns it.
struct Location {
    std::uint64_t index = 0;
    bool reserved = false;

    friend bool operator==(const Location& a, const Location& b) {
        return a.reserved == b.reserved && a.index == b.index;
    }
    friend bool operator<(const Location& a, const Location& b) {
        if (a.reserved != b.reserved) return b.reserved; // plain locations sort first
        return a.index < b.index;
    }
};

inline Location input_location() { return Location{0, true}; }

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind {
    Var,    // type variable, bound by an enclosing mu (or a definition parameter)
    Unit,
    Nat,
    Prod,
    Sum,
    Arrow,
    Delay,  // O A
    Box,    // Box A
    Mu,     // mu a. A
    Meta,   // unification placeholder; only alive inside the surface elaborator
};

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

struct TypeNode {
    TypeKind kind;
    std::string name;   // Var binder name / Mu binder
    Type a, b;
    int meta_id = -1;
};

Type ty_var(std::string name);
Type ty_unit();
Type ty_nat();
Type ty_prod(Type a, Type b);
Type ty_sum(Type a, Type b);
Type ty_arrow(Type a, Type b);
Type ty_delay(Type a);
Type ty_box(Type a);
Type ty_mu(std::string binder, Type body);
Type ty_meta(int id);

Type ty_bool();           // Unit + Unit
Type ty_maybe(Type a);    // Unit + A
Type ty_stream(Type a);   // mu x. A * x
Type ty_event(Type a);    // mu x. A + x

// Structural equality up to alpha-renaming of mu binders.
bool type_equal(const Type& a, const Type& b);

// True iff every free type variable of A is in theta and A is meta-free.
bool well_formed_type(const std::set<std::string>& theta, const Type& a);

// Stable types: Unit | Nat | Box A | stable*stable | stable+stable.
// Type variables count as stable exactly when listed in stable_vars.
bool is_stable(const Type& a);
bool is_stable(const Type& a, const std::set<std::string>& stable_vars);

// Value types are built from Unit, Nat, +, * only.
bool is_value_type(const Type& a);

// Capture-avoiding substitution of b for the free variable alpha in a.
Type subst_type(const Type& a, const std::string& alpha, const Type& b);

// The unfolding A[O(mu a. A)/a] of a recursive type mu a. A.
Type unfold_mu(const Type& mu);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

enum class PrimTag { Eq, Lt, Mul, Monus };

enum class TermKind {
    Unit,
    NatLit,
    Var,
    Lam,
    App,
    Add,
    Prim,
    Pair,
    Proj,     // idx 1 or 2
    Inj,      // idx 1 or 2
    Case,
    Delay,
    Adv,
    Box,
    Unbox,
    Progress,
    Promote,
    Into,
    Out,
    Fix,
    Loc,
    Anno,     // (t : A); erased by evaluation, used by the bidirectional checker
};

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
    TermKind kind;
    Nat lit;
    std::string name;    // Var / Lam / Fix binder / Case binder 1
    std::string name2;   // Case binder 2
    Term a, b, c;        // children; Case uses a=scrutinee b=branch1 c=branch2
    int idx = 0;
    PrimTag prim = PrimTag::Eq;
    Location loc;
    Type anno;
};

Term t_unit();
Term t_nat(Nat n);
Term t_var(std::string x);
Term t_lam(std::string x, Term body);
Term t_app(Term f, Term arg);
Term t_add(Term a, Term b);
Term t_prim(PrimTag tag, Term a, Term b);
Term t_pair(Term a, Term b);
Term t_proj(int i, Term t);
Term t_inj(int i, Term t);
Term t_case(Term scrut, std::string x1, Term b1, std::string x2, Term b2);
Term t_delay(Term t);
Term t_adv(Term t);
Term t_box(Term t);
Term t_unbox(Term t);
Term t_progress(Term t);
Term t_promote(Term t);
Term t_into(Term t);
Term t_out(Term t);
Term t_fix(std::string x, Term body);
Term t_loc(Location l);
Term t_anno(Term t, Type ty);

Term t_true();   // in2 ()
Term t_false();  // in1 ()

// One-pass value predicate per the value grammar: unit, literals, lambdas,
// pairs/injections/into of values, box t, fix x.t, and locations.
bool is_value(const Term& t);

// Free term variables.
std::set<std::string> free_vars(const Term& t);
bool is_closed(const Term& t);

// True iff the term contains no Loc node.
bool location_free(const Term& t);

// Capture-avoiding substitution t[v/x].
Term subst_term(const Term& t, const std::string& x, const Term& v);

// Alpha-equivalence, and strict structural identity (binder names matter).
bool term_alpha_equal(const Term& a, const Term& b);
bool term_identical(const Term& a, const Term& b);

// Fresh name generation for capture avoidance: base name + global counter.
std::string fresh_name(const std::string& base);

} // namespace ratt

#endif
