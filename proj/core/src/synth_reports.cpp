#include <string>

#include "codectx/rng.hpp"
#include "codectx/synth.hpp"

namespace codectx::synth {

namespace {

const std::vector<std::string> kBugPhrases = {
    "null pointer dereference crash",   "array index out of bounds",     "stream not closed resource leak",
    "infinite loop hangs thread",       "integer overflow wrong result", "race condition corrupts state",
    "unchecked cast throws exception",  "division by zero crash",        "deadlock when lock acquired twice",
    "uninitialized value read",
};
const std::vector<std::string> kNoisePhrases = {
    "rename variable naming convention", "add documentation comment typo", "feature request support export",
    "question about usage example",      "unused import cleanup style",    "refactor for readability",
    "update dependency version",         "improve log message wording",    "serializable class lacks version id",
    "method name should start lowercase",
};
const std::vector<std::string> kFiller = {"method", "class", "when", "user", "value", "call", "field",
                                          "after",  "before", "module", "report", "build"};
const std::vector<std::string> kCategories = {"CORRECTNESS", "BAD_PRACTICE", "STYLE", "PERFORMANCE",
                                              "MT_CORRECTNESS"};

}  // namespace

std::string warning_message(bool bug, Rng& rng) {
    const auto& phrases = bug ? kBugPhrases : kNoisePhrases;
    std::string text = phrases[rng.below(phrases.size())];
    text += " in " + kFiller[rng.below(kFiller.size())] + " " + kFiller[rng.below(kFiller.size())];
    text += " id" + std::to_string(rng.below(1000)) + ". ";
    text += phrases[rng.below(phrases.size())];
    if (rng.chance(0.5)) text += " " + kFiller[rng.below(kFiller.size())];
    return text;
}

std::vector<ingest::BugReportDoc> report_corpus(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ingest::BugReportDoc> docs;
    for (std::size_t i = 0; i < n; ++i) {
        const bool bug = i % 2 == 0;
        docs.push_back({"r" + std::to_string(i), warning_message(bug, rng),
                        bug ? ingest::ReportLabel::Bug : ingest::ReportLabel::NonBug});
    }
    return docs;
}

PlantedWarnings planted_warnings(std::size_t n, std::size_t planted, std::uint64_t seed) {
    Rng rng(seed);
    PlantedWarnings out;
    out.genuine.assign(n, true);
    for (std::size_t k = 0; k < planted && k < n; ++k) out.genuine[(k * n) / planted] = false;
    for (std::size_t i = 0; i < n; ++i) {
        ingest::BugWarning w;
        w.warning_type = out.genuine[i] ? "NP_NULL_ON_SOME_PATH" : "SE_NO_SERIALVERSIONID";
        w.category = kCategories[rng.below(kCategories.size())];
        w.priority = 1 + static_cast<int>(rng.below(3));
        w.class_name = "C" + std::to_string(i % 4);
        w.line_start = 1 + static_cast<int>(rng.below(20));
        w.line_end = w.line_start + static_cast<int>(rng.below(3));
        w.message = warning_message(out.genuine[i], rng);
        out.warnings.push_back(std::move(w));
    }
    return out;
}

}  // namespace codectx::synth
