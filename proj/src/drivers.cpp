#include "ratt/drivers.hpp"

#include <sstream>

namespace ratt {

std::string stats_json_line(const StepStats& s) {
    std::ostringstream os;
    os << "{\"step\":" << s.step << ",\"heap_before\":" << s.heap_before
       << ",\"heap_after\":" << s.heap_after << ",\"allocs\":" << s.allocs
       << ",\"fuel_used\":" << s.fuel_used << "}";
    return os.str();
}

std::optional<Type> stream_element_of(const Type& t) {
    if (t->kind != TypeKind::Box) return std::nullopt;
    const Type& mu = t->a;
    if (mu->kind != TypeKind::Mu || mu->a->kind != TypeKind::Prod) return std::nullopt;
    if (mu->a->b->kind != TypeKind::Var || mu->a->b->name != mu->name) return std::nullopt;
    return mu->a->a;
}

std::optional<std::pair<Type, Type>> transducer_elements_of(const Type& t) {
    if (t->kind != TypeKind::Box || t->a->kind != TypeKind::Arrow) return std::nullopt;
    auto in = stream_element_of(ty_box(t->a->a));
    auto out = stream_element_of(ty_box(t->a->b));
    if (!in || !out) return std::nullopt;
    return std::make_pair(*in, *out);
}

bool value_has_type(const Term& v, const Type& a) {
    switch (a->kind) {
        case TypeKind::Unit: return v->kind == TermKind::Unit;
        case TypeKind::Nat: return v->kind == TermKind::NatLit;
        case TypeKind::Prod:
            return v->kind == TermKind::Pair && value_has_type(v->a, a->a) &&
                   value_has_type(v->b, a->b);
        case TypeKind::Sum:
            return v->kind == TermKind::Inj &&
                   value_has_type(v->a, v->idx == 1 ? a->a : a->b);
        default:
            return false;
    }
}

StreamState stream_init(const Term& t) {
    return StreamState{t_unbox(t), {}, 0};
}

namespace {

struct StepOutcome {
    Term head;
    Location tail;
    Store store;
    std::uint64_t allocs = 0;
    std::uint64_t fuel_used = 0;
};

StepOutcome eval_step(const Term& term, Heap now, Heap later, const DriverOptions& opts) {
    EvalOptions eopts;
    eopts.fuel = opts.fuel_per_step;
    eopts.alloc_mode = opts.gc ? AllocMode::LaterOnly : AllocMode::BothHeaps;
    eopts.trace = opts.trace;
    EvalOutcome out = eval(term, Store::two(std::move(now), std::move(later)), eopts);
    const Term& v = out.value;
    if (v->kind != TermKind::Into || v->a->kind != TermKind::Pair ||
        v->a->b->kind != TermKind::Loc) {
        throw DriverFailure(DriverErrorKind::NotAStreamValue,
                            "step did not produce a stream cell");
    }
    if (opts.element && !value_has_type(v->a->a, opts.element)) {
        throw DriverFailure(DriverErrorKind::NotAStreamValue,
                            "emitted value does not inhabit the element type");
    }
    return StepOutcome{v->a->a, v->a->b->loc, std::move(out.store), out.allocs, out.fuel_used};
}

Heap next_heap(const Store& store, bool gc) {
    if (gc) return store.later;
    Heap merged = store.now;
    for (const auto& [l, t] : store.later) merged.insert_or_assign(l, t);
    return merged;
}

} // namespace

StreamStepResult stream_step(const StreamState& s, const DriverOptions& opts) {
    StepOutcome out = eval_step(s.term, s.heap, Heap{}, opts);
    StepStats stats;
    stats.step = s.step_count + 1;
    stats.heap_before = s.heap.size();
    stats.allocs = out.allocs;
    stats.fuel_used = out.fuel_used;
    Heap heap = next_heap(out.store, opts.gc);
    stats.heap_after = heap.size();
    StreamState next{t_adv(t_loc(out.tail)), std::move(heap), s.step_count + 1};
    return StreamStepResult{out.head, std::move(next), stats};
}

TransducerState transducer_init(const Term& t) {
    return TransducerState{t_app(t_unbox(t), t_adv(t_loc(input_location()))), {}, 0};
}

TransducerStepResult transducer_step(const TransducerState& s, const Term& input,
                                     const DriverOptions& opts) {
    if (opts.input_element && !value_has_type(input, opts.input_element)) {
        throw DriverFailure(DriverErrorKind::InputTypeMismatch,
                            "input value does not inhabit the input type");
    }
    Location lin = input_location();
    Heap now = s.heap;
    now.emplace(lin, t_into(t_pair(input, t_loc(lin))));
    Heap later;
    later.emplace(lin, t_unit());
    StepOutcome out = eval_step(s.term, std::move(now), std::move(later), opts);
    StepStats stats;
    stats.step = s.step_count + 1;
    stats.heap_before = s.heap.size() + 1;
    stats.allocs = out.allocs;
    stats.fuel_used = out.fuel_used;
    Heap heap = next_heap(out.store, opts.gc);
    heap.erase(lin); // the reserved placeholder never survives a step
    stats.heap_after = heap.size();
    TransducerState next{t_adv(t_loc(out.tail)), std::move(heap), s.step_count + 1};
    return TransducerStepResult{out.head, std::move(next), stats};
}

namespace {

template <typename StepFn>
RunResult run_loop(std::uint64_t steps, StepFn&& step) {
    RunResult r;
    for (std::uint64_t i = 0; i < steps; ++i) {
        try {
            step(r);
        } catch (const EvalFailure& f) {
            r.error = to_string(f.error.kind) + ": " + f.error.msg;
            r.machine_error = f.error.kind;
            r.error_step = i + 1;
            return r;
        } catch (const DriverFailure& f) {
            r.error = f.what();
            r.driver_error = f.kind;
            r.error_step = i + 1;
            return r;
        }
    }
    return r;
}

} // namespace

RunResult run_stream(const Term& t, std::uint64_t steps, const DriverOptions& opts) {
    StreamState state = stream_init(t);
    return run_loop(steps, [&](RunResult& r) {
        StreamStepResult sr = stream_step(state, opts);
        r.values.push_back(sr.value);
        r.stats.push_back(sr.stats);
        state = std::move(sr.next);
    });
}

RunResult run_transducer(const Term& t, const std::vector<Term>& inputs,
                         const DriverOptions& opts) {
    TransducerState state = transducer_init(t);
    std::size_t i = 0;
    return run_loop(inputs.size(), [&](RunResult& r) {
        TransducerStepResult sr = transducer_step(state, inputs[i++], opts);
        r.values.push_back(sr.value);
        r.stats.push_back(sr.stats);
        state = std::move(sr.next);
    });
}

RunResult run_stream_nogc(const Term& t, std::uint64_t steps, DriverOptions opts) {
    opts.gc = false;
    return run_stream(t, steps, opts);
}

RunResult run_transducer_nogc(const Term& t, const std::vector<Term>& inputs,
                              DriverOptions opts) {
    opts.gc = false;
    return run_transducer(t, inputs, opts);
}

} // namespace ratt
