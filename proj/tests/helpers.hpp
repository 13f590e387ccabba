#ifndef RATT_TESTS_HELPERS_HPP
#define RATT_TESTS_HELPERS_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratt/corpus.hpp"
#include "ratt/drivers.hpp"
#include "ratt/surface.hpp"
#include "ratt/typecheck.hpp"

namespace ratt::tests {

inline std::string corpus_dir() {
    if (const char* env = std::getenv("RATT_CORPUS_DIR")) return env;
#ifdef RATT_CORPUS_DIR
    return RATT_CORPUS_DIR;
#else
    return "corpus";
#endif
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Cached parse+desugar of a corpus file.
inline const std::vector<CheckedDef>& corpus_defs(const std::string& file) {
    static std::map<std::string, std::vector<CheckedDef>> cache;
    auto it = cache.find(file);
    if (it == cache.end()) {
        auto program = parse(slurp(corpus_dir() + "/" + file));
        it = cache.emplace(file, desugar(program)).first;
    }
    return it->second;
}

inline const CheckedDef& corpus_def(const std::string& file, const std::string& name) {
    for (const auto& d : corpus_defs(file)) {
        if (d.name == name) return d;
    }
    throw std::runtime_error("no definition " + name + " in " + file);
}

// Small deterministic RNG for property-style tests.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// Random closed value of a value type.
inline Term random_value(const Type& ty, Rng& rng) {
    switch (ty->kind) {
        case TypeKind::Nat: return t_nat(Nat(rng.below(21)));
        case TypeKind::Unit: return t_unit();
        case TypeKind::Prod:
            return t_pair(random_value(ty->a, rng), random_value(ty->b, rng));
        case TypeKind::Sum: {
            int side = rng.below(2) == 0 ? 1 : 2;
            return t_inj(side, random_value(side == 1 ? ty->a : ty->b, rng));
        }
        default:
            throw std::runtime_error("random_value: not a value type");
    }
}

inline std::vector<Term> random_values(const Type& ty, std::size_t n, Rng& rng) {
    std::vector<Term> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_value(ty, rng));
    return out;
}

inline bool values_equal(const std::vector<Term>& a, const std::vector<Term>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!term_identical(a[i], b[i])) return false;
    return true;
}

inline std::string show_values(const std::vector<Term>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += ", ";
        out += print_value(v);
    }
    return out;
}

} // namespace ratt::tests

#endif
