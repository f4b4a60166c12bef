#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "codectx/ast.hpp"

namespace codectx::ingest {

// Mini-language grammar (C/Java-flavoured):
//
//   unit      := (classdef | interfacedef | funcdef)*
//   classdef  := mods 'class' ID ('extends' type)? ('implements' type (',' type)*)? '{' member* '}'
//   interface := mods 'interface' ID ('extends' type (',' type)*)? '{' (mods type ID '(' params ')' ';')* '}'
//   member    := mods ( ID '(' params ')' block            -- constructor
//                     | type ID '(' params ')' (block | ';')
//                     | type ID ('=' expr)? ';' )
//   funcdef   := mods type ID '(' params ')' block
//   stmt      := block | decl | assign | call ';' | if | while | for | foreach | return
//   type      := ID
//   expr      := binary operators || && == != < <= > >= + - * / %, unary - !,
//                literals, names, calls, 'new' type '(' args ')'
//   mods      := ('public' | 'private' | 'protected' | 'static' | 'abstract' | 'final' | '@' ID)*
//
// Nested blocks are flattened into the enclosing statement list. Keywords and
// punctuation are structural; every other lexeme (names, literals, operators,
// modifiers) becomes a node token, in source order.

/// Parses mini-language source into a CompilationUnit tree.
/// Throws SyntaxError at the first unparseable token.
AstNode parse_mini(std::string_view source);

/// Content lexemes of `source` (what the tree's tokens must reproduce in
/// preorder). Throws SyntaxError on an unlexable character.
std::vector<std::string> lex_content_tokens(std::string_view source);

struct RenderStyle {
    int indent = 4;
    bool compact = false;        // single line
    bool comments = false;       // interleave comment lines
    unsigned comment_seed = 0;
};

/// Pretty-prints a mini-language tree back to source. parse_mini(render_mini(t)) == t.
std::string render_mini(const AstNode& unit, const RenderStyle& style = {});

}  // namespace codectx::ingest
