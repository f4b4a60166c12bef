#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codectx::ingest {

/// Node kinds produced by the mini-language parser. Imported AST records may
/// use any other kind string.
namespace kind {
inline constexpr std::string_view kCompilationUnit = "CompilationUnit";
inline constexpr std::string_view kClassDef = "ClassDef";
inline constexpr std::string_view kInterfaceDef = "InterfaceDef";
inline constexpr std::string_view kExtends = "Extends";
inline constexpr std::string_view kImplements = "Implements";
inline constexpr std::string_view kModifier = "Modifier";
inline constexpr std::string_view kFuncDef = "FuncDef";
inline constexpr std::string_view kMethodDef = "MethodDef";
inline constexpr std::string_view kMethodDecl = "MethodDecl";
inline constexpr std::string_view kCtorDef = "CtorDef";
inline constexpr std::string_view kFieldDecl = "FieldDecl";
inline constexpr std::string_view kParams = "Params";
inline constexpr std::string_view kParam = "Param";
inline constexpr std::string_view kType = "Type";
inline constexpr std::string_view kDecl = "Decl";
inline constexpr std::string_view kAssign = "Assign";
inline constexpr std::string_view kIf = "If";
inline constexpr std::string_view kElse = "Else";
inline constexpr std::string_view kWhile = "While";
inline constexpr std::string_view kFor = "For";
inline constexpr std::string_view kForEach = "ForEach";
inline constexpr std::string_view kForInit = "ForInit";
inline constexpr std::string_view kForUpdate = "ForUpdate";
inline constexpr std::string_view kReturn = "Return";
inline constexpr std::string_view kCallStmt = "CallStmt";
inline constexpr std::string_view kCall = "Call";
inline constexpr std::string_view kArgs = "Args";
inline constexpr std::string_view kNew = "New";
inline constexpr std::string_view kName = "Name";
inline constexpr std::string_view kBinaryOp = "BinaryOp";
inline constexpr std::string_view kUnaryOp = "UnaryOp";
inline constexpr std::string_view kIdentifier = "Identifier";
inline constexpr std::string_view kLiteral = "Literal";
inline constexpr std::string_view kOperator = "Operator";

/// The closed kind set of the mini-language, in a fixed order.
const std::vector<std::string>& mini_kinds();
}  // namespace kind

struct AstNode {
    std::string kind;
    std::optional<std::string> token;
    std::vector<AstNode> children;
    /// Source line (1-based), 0 when unknown. Layout metadata only: it is not
    /// part of structural equality.
    int line = 0;

    AstNode() = default;
    AstNode(std::string k, std::optional<std::string> tok = std::nullopt, std::vector<AstNode> kids = {},
            int ln = 0)
        : kind(std::move(k)), token(std::move(tok)), children(std::move(kids)), line(ln) {}

    bool is(std::string_view k) const noexcept { return kind == k; }
    bool is_leaf() const noexcept { return children.empty(); }

    friend bool operator==(const AstNode& a, const AstNode& b) {
        return a.kind == b.kind && a.token == b.token && a.children == b.children;
    }
};

std::size_t node_count(const AstNode& root);

/// Visits nodes in preorder.
void preorder(const AstNode& root, const std::function<void(const AstNode&)>& visit);

/// Tokens of all nodes that carry one, in preorder.
std::vector<std::string> preorder_tokens(const AstNode& root);

/// Smallest and largest nonzero line in the subtree; {0, 0} if none.
std::pair<int, int> line_span(const AstNode& root);

/// Checks the leaf-token invariant: Identifier, Literal and Operator leaves
/// carry a non-empty token. Returns a description of the first violation.
std::optional<std::string> validate(const AstNode& root);

}  // namespace codectx::ingest
