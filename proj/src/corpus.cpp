#include "ratt/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ratt {

namespace {

CorpusEntry::Kind kind_of(const std::string& s) {
    if (s == "stream") return CorpusEntry::Kind::Stream;
    if (s == "transducer") return CorpusEntry::Kind::Transducer;
    if (s == "check") return CorpusEntry::Kind::Check;
    if (s == "rejected") return CorpusEntry::Kind::Rejected;
    if (s == "unsafe-stream") return CorpusEntry::Kind::UnsafeStream;
    throw std::runtime_error("unknown corpus expectation kind: " + s);
}

} // namespace

std::vector<CorpusEntry> list_entries(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".expect") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<CorpusEntry> out;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        nlohmann::json doc = nlohmann::json::parse(in);
        for (const auto& j : doc) {
            CorpusEntry e;
            e.name = j.at("name").get<std::string>();
            e.file = j.value("file", path.stem().string() + ".ratt");
            e.def = j.value("def", e.name);
            e.type_text = j.value("type", "");
            e.kind = kind_of(j.at("kind").get<std::string>());
            e.oracle = j.value("oracle", "");
            e.reject_kind = j.value("reject_kind", "");
            if (j.contains("heap_sizes"))
                e.heap_sizes = j.at("heap_sizes").get<std::vector<std::uint64_t>>();
            e.heap_law = j.value("heap_law", "");
            if (j.contains("outputs_prefix"))
                e.outputs_prefix = j.at("outputs_prefix").get<std::vector<std::string>>();
            e.stuck_step = j.value("stuck_step", -1);
            e.stuck_kind = j.value("stuck_kind", "");
            e.heap_bound = j.value("heap_bound", 0ull);
            e.exact_bound = j.value("exact_bound", false);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::string default_corpus_dir() {
    if (const char* env = std::getenv("RATT_CORPUS_DIR")) return env;
#ifdef RATT_CORPUS_DIR_DEFAULT
    return RATT_CORPUS_DIR_DEFAULT;
#else
    return "corpus";
#endif
}

} // namespace ratt
