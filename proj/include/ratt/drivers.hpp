#ifndef RATT_DRIVERS_HPP
#define RATT_DRIVERS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ratt/machine.hpp"
#include "ratt/syntax.hpp"

namespace ratt {

struct StreamState {
    Term term;
    Heap heap; // the now heap of the next step
    std::uint64_t step_count = 0;
};

struct TransducerState {
    Term term;
    Heap heap; // never contains the reserved input location
    std::uint64_t step_count = 0;
};

struct StepStats {
    std::uint64_t step = 0;
    std::uint64_t heap_before = 0; // now-heap size handed to the machine
    std::uint64_t heap_after = 0;  // state heap size after trim
    std::uint64_t allocs = 0;
    std::uint64_t fuel_used = 0;
};

std::string stats_json_line(const StepStats& s);

enum class DriverErrorKind { NotAStreamValue, InputTypeMismatch };

struct DriverFailure : std::runtime_error {
    DriverErrorKind kind;
    DriverFailure(DriverErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
};

struct DriverOptions {
    std::uint64_t fuel_per_step = 1'000'000;
    bool gc = true;        // false: union the now heap into the next step instead
    Type element;          // stream/output element type; empty skips the value check
    Type input_element;    // transducer input type; empty skips the input check
    TraceHook trace;
};

// Shape helpers for declared driver types: Box (Str A) and Box (Str A -> Str B).
std::optional<Type> stream_element_of(const Type& t);
std::optional<std::pair<Type, Type>> transducer_elements_of(const Type& t);

// Structural membership check |- v : A for value types.
bool value_has_type(const Term& v, const Type& a);

StreamState stream_init(const Term& t);

struct StreamStepResult {
    Term value;
    StreamState next;
    StepStats stats;
};
StreamStepResult stream_step(const StreamState& s, const DriverOptions& opts = {});

TransducerState transducer_init(const Term& t);

struct TransducerStepResult {
    Term value;
    TransducerState next;
    StepStats stats;
};
TransducerStepResult transducer_step(const TransducerState& s, const Term& input,
                                     const DriverOptions& opts = {});

struct RunResult {
    std::vector<Term> values;
    std::vector<StepStats> stats;
    // On failure the prefix of values/stats is kept and the error described.
    std::optional<std::string> error;
    std::optional<EvalErrorKind> machine_error;
    std::optional<DriverErrorKind> driver_error;
    std::uint64_t error_step = 0; // 1-based step index of the failure

    bool ok() const { return !error.has_value(); }
};

RunResult run_stream(const Term& t, std::uint64_t steps, const DriverOptions& opts = {});
RunResult run_transducer(const Term& t, const std::vector<Term>& inputs,
                         const DriverOptions& opts = {});

RunResult run_stream_nogc(const Term& t, std::uint64_t steps, DriverOptions opts = {});
RunResult run_transducer_nogc(const Term& t, const std::vector<Term>& inputs,
                              DriverOptions opts = {});

} // namespace ratt

#endif
