#ifndef RATT_CORPUS_HPP
#define RATT_CORPUS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ratt {

// One corpus program with its machine-checkable expectation. Loaded from
// the corpus/*.expect files that sit next to the .ratt sources.
struct CorpusEntry {
    enum class Kind {
        Stream,       // runs on the stream driver, compared against an oracle
        Transducer,   // runs on the transducer driver
        Check,        // typechecks; not driver-runnable (non-value elements)
        Rejected,     // fails type checking with the stated error kind
        UnsafeStream, // runs only with the type gate skipped; pinned trace behaviour
    };

    std::string name;
    std::string file;   // .ratt file, relative to the corpus directory
    std::string def;    // definition to load (usually == name)
    std::string type_text;
    Kind kind = Kind::Check;

    std::string oracle; // reference-implementation id used by the tests

    // Rejected entries.
    std::string reject_kind;

    // Unsafe-trace entries.
    std::vector<std::uint64_t> heap_sizes;     // expected trimmed sizes, per step
    std::string heap_law;                      // e.g. "2*step"
    std::vector<std::string> outputs_prefix;   // printed values before failure
    int stuck_step = -1;                       // 1-based, -1 if none
    std::string stuck_kind;                    // EvalErrorKind name

    // Bounded-heap constant for gc runs (0 = not pinned). exact_bound pins
    // equality at every step rather than an upper bound.
    std::uint64_t heap_bound = 0;
    bool exact_bound = false;
};

// All entries from every .expect file under dir.
std::vector<CorpusEntry> list_entries(const std::string& dir);

// RATT_CORPUS_DIR from the environment, else the build-time default.
std::string default_corpus_dir();

} // namespace ratt

#endif
