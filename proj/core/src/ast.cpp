#include "codectx/ast.hpp"

#include <algorithm>

namespace codectx::ingest {

const std::vector<std::string>& kind::mini_kinds() {
    static const std::vector<std::string> kinds = {
        std::string(kCompilationUnit), std::string(kClassDef),  std::string(kInterfaceDef),
        std::string(kExtends),         std::string(kImplements), std::string(kModifier),
        std::string(kFuncDef),         std::string(kMethodDef),  std::string(kMethodDecl),
        std::string(kCtorDef),         std::string(kFieldDecl),  std::string(kParams),
        std::string(kParam),           std::string(kType),       std::string(kDecl),
        std::string(kAssign),          std::string(kIf),         std::string(kElse),
        std::string(kWhile),           std::string(kFor),        std::string(kForEach),
        std::string(kForInit),         std::string(kForUpdate),  std::string(kReturn),
        std::string(kCallStmt),        std::string(kCall),       std::string(kArgs),
        std::string(kNew),             std::string(kName),       std::string(kBinaryOp),
        std::string(kUnaryOp),         std::string(kIdentifier), std::string(kLiteral),
        std::string(kOperator),
    };
    return kinds;
}

std::size_t node_count(const AstNode& root) {
    std::size_t n = 1;
    for (const auto& c : root.children) n += node_count(c);
    return n;
}

void preorder(const AstNode& root, const std::function<void(const AstNode&)>& visit) {
    visit(root);
    for (const auto& c : root.children) preorder(c, visit);
}

std::vector<std::string> preorder_tokens(const AstNode& root) {
    std::vector<std::string> out;
    preorder(root, [&](const AstNode& n) {
        if (n.token) out.push_back(*n.token);
    });
    return out;
}

std::pair<int, int> line_span(const AstNode& root) {
    int lo = 0;
    int hi = 0;
    preorder(root, [&](const AstNode& n) {
        if (n.line <= 0) return;
        lo = lo == 0 ? n.line : std::min(lo, n.line);
        hi = std::max(hi, n.line);
    });
    return {lo, hi};
}

std::optional<std::string> validate(const AstNode& root) {
    std::optional<std::string> problem;
    preorder(root, [&](const AstNode& n) {
        if (problem) return;
        if (n.kind.empty()) {
            problem = "node with empty kind";
            return;
        }
        const bool needs_token = n.is(kind::kIdentifier) || n.is(kind::kLiteral) || n.is(kind::kOperator);
        if (needs_token && n.is_leaf() && (!n.token || n.token->empty()))
            problem = n.kind + " leaf without token";
    });
    return problem;
}

}  // namespace codectx::ingest
