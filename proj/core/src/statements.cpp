#include "codectx/statements.hpp"

#include <array>
#include <algorithm>

namespace codectx::encode {

namespace k = ingest::kind;

namespace {
constexpr std::array<std::string_view, 13> kStatementKinds = {
    k::kFuncDef, k::kMethodDef, k::kCtorDef, k::kMethodDecl, k::kFieldDecl, k::kDecl, k::kAssign,
    k::kIf,      k::kWhile,     k::kFor,     k::kForEach,    k::kReturn,    k::kCallStmt,
};
constexpr std::array<std::string_view, 7> kCompoundKinds = {
    k::kFuncDef, k::kMethodDef, k::kCtorDef, k::kIf, k::kWhile, k::kFor, k::kForEach,
};

ingest::AstNode excise(const ingest::AstNode& node) {
    ingest::AstNode out(node.kind, node.token, {}, node.line);
    for (const auto& c : node.children) {
        if (is_statement_kind(c.kind) || is_body_container(c.kind)) continue;
        out.children.push_back(excise(c));
    }
    return out;
}

void walk(const ingest::AstNode& node, std::vector<StatementTree>& out) {
    if (!is_statement_kind(node.kind)) {
        for (const auto& c : node.children) walk(c, out);
        return;
    }
    StatementTree header{excise(node)};
    std::tie(header.line_start, header.line_end) = ingest::line_span(header.root);
    out.push_back(std::move(header));
    for (const auto& c : node.children) walk(c, out);
    if (is_compound_kind(node.kind)) out.push_back(StatementTree{ingest::AstNode(std::string(kEndBlock))});
}
}  // namespace

bool is_statement_kind(std::string_view kind) {
    return std::find(kStatementKinds.begin(), kStatementKinds.end(), kind) != kStatementKinds.end();
}

bool is_compound_kind(std::string_view kind) {
    return std::find(kCompoundKinds.begin(), kCompoundKinds.end(), kind) != kCompoundKinds.end();
}

bool is_body_container(std::string_view kind) { return kind == k::kElse || kind == "Block"; }

std::vector<StatementTree> split_statements(const ingest::AstNode& ast) {
    std::vector<StatementTree> out;
    walk(ast, out);
    return out;
}

}  // namespace codectx::encode
