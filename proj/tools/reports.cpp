#include <cstdio>
#include <sstream>

#include "cli.hpp"

namespace codectx::cli {

namespace {

// Full-corpus accuracy per variant column, kept for side-by-side reading only.
constexpr double kClassifyReference[] = {96.6, 95.6, 97.8, 98.2, 98.5};

std::string pct(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
    return buf;
}

template <typename Map>
std::string header(const Map& results, const RunConfig& cfg, tasks::TaskKind task) {
    std::ostringstream h;
    h << "# variant=";
    bool first = true;
    for (const auto& [v, _] : results) {
        h << (first ? "" : ",") << tasks::to_string(v);
        first = false;
    }
    h << " seed=" << cfg.train.seed << " task=" << tasks::to_string(task) << "\n# config:";
    for (const auto& [k, v] : cfg.echo) h << ' ' << k << '=' << v;
    h << '\n';
    return h.str();
}

}  // namespace

std::string classify_table(const std::map<tasks::Variant, eval::Metrics>& results, const RunConfig& cfg) {
    std::ostringstream t;
    t << header(results, cfg, tasks::TaskKind::Classify);
    t << "metric";
    for (const auto& [v, _] : results) t << '\t' << tasks::column_title(v);
    t << "\nAccuracy";
    for (const auto& [_, m] : results) t << '\t' << pct(m.accuracy);
    t << "\n# full-corpus reference, not reproduced at this scale:\n# Accuracy";
    for (const auto& [v, _] : results) t << '\t' << kClassifyReference[static_cast<int>(v)];
    t << '\n';
    return t.str();
}

std::string clone_table(const std::map<tasks::Variant, std::map<std::string, eval::Metrics>>& results,
                        const RunConfig& cfg) {
    std::ostringstream t;
    t << header(results, cfg, tasks::TaskKind::Clone);
    t << "type";
    for (const auto& [v, _] : results)
        for (const char* col : {"A", "P", "R", "F1"}) t << '\t' << tasks::to_string(v) << ':' << col;
    t << '\n';
    for (const char* row : {"T1", "T2", "ST3", "MT3", "T4", "ALL"}) {
        t << row;
        for (const auto& [_, by_type] : results) {
            const auto it = by_type.find(row);
            if (it == by_type.end()) {
                t << "\t-\t-\t-\t-";
                continue;
            }
            const auto& m = it->second;
            t << '\t' << pct(m.accuracy) << '\t' << pct(m.precision) << '\t' << pct(m.recall) << '\t' << pct(m.f1);
        }
        t << '\n';
    }
    t << "# full-corpus reference, not reproduced at this scale:\n# ALL F1\tNONE 84.9\tBUGS_AND_PATTERNS 94.6\n";
    return t.str();
}

}  // namespace codectx::cli
