#pragma once

#include <map>
#include <string>
#include <vector>

#include "codectx/ast.hpp"

namespace codectx::encode {

/// Symbol table for node inputs. Index layout: <PAD>, <UNK>, <END_BLOCK>, one
/// "<kind:K>" entry per mini-language kind, then tokens by descending
/// frequency (ties lexicographic). Tokenless nodes of kinds outside the
/// mini-language are counted as "<kind:K>" symbols like any token.
class Vocabulary {
public:
    static constexpr std::size_t kPad = 0;
    static constexpr std::size_t kUnk = 1;
    static constexpr std::size_t kEndBlockIndex = 2;

    Vocabulary();
    static Vocabulary build(const std::vector<const ingest::AstNode*>& corpus, int min_count);
    static Vocabulary from_symbols(std::vector<std::string> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    std::size_t reserved_count() const noexcept { return reserved_; }

    /// Index of a node's input symbol: its token if it has one, else its kind.
    std::size_t index_of(const ingest::AstNode& node) const;
    std::size_t symbol_index(const std::string& symbol) const;
    bool contains(const std::string& symbol) const { return index_.contains(symbol); }

    static std::string kind_symbol(const std::string& kind) { return "<kind:" + kind + ">"; }
    /// Symbol a node contributes (token, END_BLOCK marker, or kind symbol).
    static std::string node_symbol(const ingest::AstNode& node);

    bool operator==(const Vocabulary& o) const { return symbols_ == o.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::map<std::string, std::size_t> index_;
    std::size_t reserved_ = 0;
};

}  // namespace codectx::encode
