#ifndef RATT_MACHINE_HPP
#define RATT_MACHINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "ratt/syntax.hpp"

namespace ratt {

// Heaps map locations to (unevaluated) terms.
using Heap = std::map<Location, Term>;

bool heap_equal(const Heap& a, const Heap& b);
// Pointwise extension: every binding of a is present and identical in b.
bool heap_extends(const Heap& smaller, const Heap& larger);

// A store is one of:  bot  |  lock later  |  lock now tick later.
// The shapes gate what the machine may do: no store means no heap effects,
// a one-heap store permits storing into the later heap, a two-heap store
// additionally permits retrieving from the now heap.
enum class StoreShape { Bottom, One, Two };

struct Store {
    StoreShape shape = StoreShape::Bottom;
    Heap now;    // meaningful only for Two
    Heap later;  // meaningful for One and Two

    static Store bottom() { return Store{}; }
    static Store one(Heap later) { return Store{StoreShape::One, {}, std::move(later)}; }
    static Store two(Heap now, Heap later) {
        return Store{StoreShape::Two, std::move(now), std::move(later)};
    }

    bool is_bottom() const { return shape == StoreShape::Bottom; }
    bool has_tick() const { return shape == StoreShape::Two; }
};

bool store_equal(const Store& a, const Store& b);
// Same shape and both heaps extend pointwise.
bool store_extends(const Store& before, const Store& after);

// Garbage collection map: drops the now heap of a two-heap store.
Store trim(const Store& s);

enum class EvalErrorKind {
    StuckNoStore,      // a store-demanding rule met bot
    StuckNoTick,       // adv/progress outside a two-heap store
    DanglingLocation,
    NotAFunction,
    NotAPair,
    NotAnInj,
    NotABox,
    NotANat,
    FuelExhausted,
};

std::string to_string(EvalErrorKind k);

struct EvalError {
    EvalErrorKind kind;
    Term term;       // the term whose premise failed
    Store store;     // store snapshot at the failure
    std::string msg;
};

struct EvalFailure : std::runtime_error {
    EvalError error;
    explicit EvalFailure(EvalError e) : std::runtime_error(e.msg), error(std::move(e)) {}
};

// How alloc picks fresh indices. LaterOnly is the contract used everywhere;
// BothHeaps exists for the no-gc differential drivers, where retained now
// heaps would otherwise collide with restarted indices.
enum class AllocMode { LaterOnly, BothHeaps };

// Smallest non-reserved location absent from the later heap (and, in
// BothHeaps mode, also from the now heap). Deterministic in the domains.
Location alloc(const Store& s, AllocMode mode = AllocMode::LaterOnly);

// Per-rule trace callback: rule name, term under evaluation, current store.
using TraceHook = std::function<void(const std::string&, const Term&, const Store&)>;

struct EvalOptions {
    std::uint64_t fuel = 1'000'000;
    AllocMode alloc_mode = AllocMode::LaterOnly;
    TraceHook trace;
};

struct EvalOutcome {
    Term value;
    Store store;
    std::uint64_t fuel_used = 0;
    std::uint64_t allocs = 0;
};

// Big-step evaluation. Throws EvalFailure when a rule premise fails or fuel
// runs out. The same rules serve well-typed and ill-typed terms; eval_unsafe
// exists so driver call sites can say which gate they skipped.
EvalOutcome eval(const Term& t, Store store, const EvalOptions& opts = {});
EvalOutcome eval_unsafe(const Term& t, Store store, const EvalOptions& opts = {});

} // namespace ratt

#endif
