#include "codectx/vocabulary.hpp"

#include <algorithm>

#include "codectx/errors.hpp"
#include "codectx/statements.hpp"

namespace codectx::encode {

namespace {
std::vector<std::string> reserved_symbols() {
    std::vector<std::string> s = {"<PAD>", "<UNK>", "<END_BLOCK>"};
    for (const auto& k : ingest::kind::mini_kinds()) s.push_back(Vocabulary::kind_symbol(k));
    return s;
}
}  // namespace

Vocabulary::Vocabulary() : symbols_(reserved_symbols()), reserved_(symbols_.size()) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) index_.emplace(symbols_[i], i);
}

std::string Vocabulary::node_symbol(const ingest::AstNode& node) {
    if (node.token) return *node.token;
    if (node.kind == kEndBlock) return "<END_BLOCK>";
    return kind_symbol(node.kind);
}

Vocabulary Vocabulary::build(const std::vector<const ingest::AstNode*>& corpus, int min_count) {
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    Vocabulary v;
    std::map<std::string, long> counts;
    for (const auto* root : corpus) {
        ingest::preorder(*root, [&](const ingest::AstNode& n) {
            std::string sym = node_symbol(n);
            if (!v.index_.contains(sym)) ++counts[sym];
        });
    }
    std::vector<std::pair<std::string, long>> kept;
    for (auto& [sym, c] : counts) {
        if (c >= min_count) kept.emplace_back(sym, c);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (auto& [sym, _] : kept) {
        v.index_.emplace(sym, v.symbols_.size());
        v.symbols_.push_back(sym);
    }
    return v;
}

Vocabulary Vocabulary::from_symbols(std::vector<std::string> symbols) {
    Vocabulary v;
    if (symbols.size() < v.reserved_ || !std::equal(v.symbols_.begin(), v.symbols_.end(), symbols.begin()))
        throw FormatError("vocabulary", "reserved symbols missing or reordered");
    v.symbols_ = std::move(symbols);
    v.index_.clear();
    for (std::size_t i = 0; i < v.symbols_.size(); ++i) {
        if (!v.index_.emplace(v.symbols_[i], i).second) throw FormatError("vocabulary", "duplicate symbol");
    }
    return v;
}

std::size_t Vocabulary::symbol_index(const std::string& symbol) const {
    const auto it = index_.find(symbol);
    return it == index_.end() ? kUnk : it->second;
}

std::size_t Vocabulary::index_of(const ingest::AstNode& node) const { return symbol_index(node_symbol(node)); }

}  // namespace codectx::encode
