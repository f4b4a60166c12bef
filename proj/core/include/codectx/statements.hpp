#pragma once

#include <string_view>
#include <vector>

#include "codectx/ast.hpp"

namespace codectx::encode {

inline constexpr std::string_view kEndBlock = "END_BLOCK";

/// Statement kinds: each becomes one statement tree.
bool is_statement_kind(std::string_view kind);
/// Statements with a body; each is followed by one END_BLOCK marker.
bool is_compound_kind(std::string_view kind);
/// Body containers (else-branches, blocks) dropped from headers and walked through.
bool is_body_container(std::string_view kind);

struct StatementTree {
    /// Statement node with nested statements and body containers removed, or a
    /// childless END_BLOCK node.
    ingest::AstNode root;
    int line_start = 0;
    int line_end = 0;

    bool is_end_block() const noexcept { return root.kind == kEndBlock; }
};

/// Preorder statement-tree sequence of `ast`. Trees without statement nodes
/// yield an empty sequence.
std::vector<StatementTree> split_statements(const ingest::AstNode& ast);

}  // namespace codectx::encode
