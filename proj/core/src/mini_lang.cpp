#include "codectx/mini_lang.hpp"

#include <array>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "codectx/errors.hpp"

namespace codectx::ingest {
namespace {

enum class Tok { Ident, Keyword, Modifier, Number, String, Punct, Op, End };

struct Token {
    Tok type;
    std::string text;
    int line;
    int column;
};

const std::unordered_set<std::string_view> kKeywords = {"if",    "else",      "while",   "for",        "return",
                                                        "class", "interface", "extends", "implements", "new"};
const std::unordered_set<std::string_view> kModifiers = {"public", "private",  "protected",
                                                         "static", "abstract", "final"};

bool is_literal_word(std::string_view w) { return w == "true" || w == "false" || w == "null"; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                const int l = line_, cl = col_;
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) throw SyntaxError(l, cl, "unterminated comment");
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    Token next() {
        const int l = line_, cl = col_;
        const char c = peek();
        const auto start = pos_;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            std::string w(src_.substr(start, pos_ - start));
            Tok t = Tok::Ident;
            if (kKeywords.contains(w)) t = Tok::Keyword;
            else if (kModifiers.contains(w)) t = Tok::Modifier;
            else if (is_literal_word(w)) t = Tok::Number;
            return {t, std::move(w), l, cl};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            }
            return {Tok::Number, std::string(src_.substr(start, pos_ - start)), l, cl};
        }
        if (c == '"') {
            advance();
            while (pos_ < src_.size() && peek() != '"' && peek() != '\n') {
                if (peek() == '\\') advance();
                if (pos_ < src_.size()) advance();
            }
            if (peek() != '"') throw SyntaxError(l, cl, "unterminated string literal");
            advance();
            return {Tok::String, std::string(src_.substr(start, pos_ - start)), l, cl};
        }
        if (c == '@') {
            advance();
            if (!(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
                throw SyntaxError(l, cl, "expected annotation name after '@'");
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            return {Tok::Modifier, std::string(src_.substr(start, pos_ - start)), l, cl};
        }
        static const std::array<std::string_view, 6> two_char = {"==", "!=", "<=", ">=", "&&", "||"};
        for (auto op : two_char) {
            if (src_.substr(pos_, 2) == op) {
                advance();
                advance();
                return {Tok::Op, std::string(op), l, cl};
            }
        }
        if (std::string_view("(){};,.:").find(c) != std::string_view::npos) {
            advance();
            return {Tok::Punct, std::string(1, c), l, cl};
        }
        if (std::string_view("=+-*/%<>!").find(c) != std::string_view::npos) {
            advance();
            // '=' is structural (assignment/initializer); the others are operators.
            return {c == '=' ? Tok::Punct : Tok::Op, std::string(1, c), l, cl};
        }
        throw SyntaxError(l, cl, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    AstNode unit() {
        AstNode root(std::string(kind::kCompilationUnit), std::nullopt, {}, 1);
        while (!at_end()) root.children.push_back(top_level());
        return root;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
    bool at_end() const { return cur().type == Tok::End; }

    [[noreturn]] void fail(const std::string& what) const {
        const auto& t = cur();
        throw SyntaxError(t.line, t.column,
                          what + (t.type == Tok::End ? " at end of input" : " near '" + t.text + "'"));
    }

    bool is_punct(std::string_view p) const { return cur().type == Tok::Punct && cur().text == p; }
    bool is_kw(std::string_view k) const { return cur().type == Tok::Keyword && cur().text == k; }
    bool is_op(std::string_view o) const { return cur().type == Tok::Op && cur().text == o; }

    void expect_punct(std::string_view p) {
        if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
        ++pos_;
    }
    void expect_kw(std::string_view k) {
        if (!is_kw(k)) fail("expected '" + std::string(k) + "'");
        ++pos_;
    }

    AstNode leaf(std::string_view k, const Token& t) { return AstNode(std::string(k), t.text, {}, t.line); }

    AstNode identifier() {
        if (cur().type != Tok::Ident) fail("expected identifier");
        return leaf(kind::kIdentifier, toks_[pos_++]);
    }

    std::vector<AstNode> modifiers() {
        std::vector<AstNode> mods;
        while (cur().type == Tok::Modifier) mods.push_back(leaf(kind::kModifier, toks_[pos_++]));
        return mods;
    }

    AstNode type() {
        if (cur().type != Tok::Ident) fail("expected type name");
        return leaf(kind::kType, toks_[pos_++]);
    }

    // True when a type followed by an identifier starts at the cursor.
    bool looks_like_decl() {
        const auto saved = pos_;
        bool ok = false;
        try {
            if (cur().type == Tok::Ident) {
                type();
                ok = cur().type == Tok::Ident;
            }
        } catch (const SyntaxError&) {
            ok = false;
        }
        pos_ = saved;
        return ok;
    }

    AstNode params() {
        AstNode ps(std::string(kind::kParams), std::nullopt, {}, cur().line);
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                const int ln = cur().line;
                AstNode t = type();
                AstNode id = identifier();
                ps.children.push_back(AstNode(std::string(kind::kParam), std::nullopt, {std::move(t), std::move(id)}, ln));
                if (!is_punct(",")) break;
                ++pos_;
            }
        }
        expect_punct(")");
        return ps;
    }

    void block_into(AstNode& owner) {
        expect_punct("{");
        while (!is_punct("}")) {
            if (at_end()) fail("expected '}'");
            statement_into(owner);
        }
        ++pos_;
    }

    // A statement that is either a block (flattened) or a single statement.
    void body_into(AstNode& owner) {
        if (is_punct("{")) block_into(owner);
        else statement_into(owner);
    }

    AstNode top_level() {
        const int ln = cur().line;
        auto mods = modifiers();
        if (is_kw("class")) return class_def(std::move(mods), ln);
        if (is_kw("interface")) return interface_def(std::move(mods), ln);
        AstNode fn(std::string(kind::kFuncDef), std::nullopt, std::move(mods), ln);
        fn.children.push_back(type());
        fn.children.push_back(identifier());
        fn.children.push_back(params());
        block_into(fn);
        return fn;
    }

    AstNode class_def(std::vector<AstNode> mods, int ln) {
        expect_kw("class");
        AstNode cls(std::string(kind::kClassDef), std::nullopt, std::move(mods), ln);
        AstNode name = identifier();
        const std::string class_name = *name.token;
        cls.children.push_back(std::move(name));
        if (is_kw("extends")) {
            AstNode ext(std::string(kind::kExtends), std::nullopt, {}, cur().line);
            ++pos_;
            ext.children.push_back(type());
            cls.children.push_back(std::move(ext));
        }
        if (is_kw("implements")) {
            AstNode impl(std::string(kind::kImplements), std::nullopt, {}, cur().line);
            ++pos_;
            impl.children.push_back(type());
            while (is_punct(",")) {
                ++pos_;
                impl.children.push_back(type());
            }
            cls.children.push_back(std::move(impl));
        }
        expect_punct("{");
        while (!is_punct("}")) {
            if (at_end()) fail("expected '}'");
            cls.children.push_back(member(class_name));
        }
        ++pos_;
        return cls;
    }

    AstNode interface_def(std::vector<AstNode> mods, int ln) {
        expect_kw("interface");
        AstNode itf(std::string(kind::kInterfaceDef), std::nullopt, std::move(mods), ln);
        itf.children.push_back(identifier());
        if (is_kw("extends")) {
            AstNode ext(std::string(kind::kExtends), std::nullopt, {}, cur().line);
            ++pos_;
            ext.children.push_back(type());
            while (is_punct(",")) {
                ++pos_;
                ext.children.push_back(type());
            }
            itf.children.push_back(std::move(ext));
        }
        expect_punct("{");
        while (!is_punct("}")) {
            if (at_end()) fail("expected '}'");
            const int mln = cur().line;
            AstNode decl(std::string(kind::kMethodDecl), std::nullopt, modifiers(), mln);
            decl.children.push_back(type());
            decl.children.push_back(identifier());
            decl.children.push_back(params());
            expect_punct(";");
            itf.children.push_back(std::move(decl));
        }
        ++pos_;
        return itf;
    }

    AstNode member(const std::string& class_name) {
        const int ln = cur().line;
        auto mods = modifiers();
        if (cur().type == Tok::Ident && cur().text == class_name && ahead(1).type == Tok::Punct &&
            ahead(1).text == "(") {
            AstNode ctor(std::string(kind::kCtorDef), std::nullopt, std::move(mods), ln);
            ctor.children.push_back(identifier());
            ctor.children.push_back(params());
            block_into(ctor);
            return ctor;
        }
        AstNode t = type();
        AstNode name = identifier();
        if (is_punct("(")) {
            AstNode ps = params();
            if (is_punct(";")) {
                ++pos_;
                AstNode decl(std::string(kind::kMethodDecl), std::nullopt, std::move(mods), ln);
                decl.children.push_back(std::move(t));
                decl.children.push_back(std::move(name));
                decl.children.push_back(std::move(ps));
                return decl;
            }
            AstNode m(std::string(kind::kMethodDef), std::nullopt, std::move(mods), ln);
            m.children.push_back(std::move(t));
            m.children.push_back(std::move(name));
            m.children.push_back(std::move(ps));
            block_into(m);
            return m;
        }
        AstNode field(std::string(kind::kFieldDecl), std::nullopt, std::move(mods), ln);
        field.children.push_back(std::move(t));
        field.children.push_back(std::move(name));
        if (is_punct("=")) {
            ++pos_;
            field.children.push_back(expr());
        }
        expect_punct(";");
        return field;
    }

    void statement_into(AstNode& owner) {
        const int ln = cur().line;
        if (is_punct("{")) {
            block_into(owner);
            return;
        }
        if (is_kw("if")) {
            ++pos_;
            AstNode s(std::string(kind::kIf), std::nullopt, {}, ln);
            expect_punct("(");
            s.children.push_back(expr());
            expect_punct(")");
            body_into(s);
            if (is_kw("else")) {
                AstNode e(std::string(kind::kElse), std::nullopt, {}, cur().line);
                ++pos_;
                body_into(e);
                s.children.push_back(std::move(e));
            }
            owner.children.push_back(std::move(s));
            return;
        }
        if (is_kw("while")) {
            ++pos_;
            AstNode s(std::string(kind::kWhile), std::nullopt, {}, ln);
            expect_punct("(");
            s.children.push_back(expr());
            expect_punct(")");
            body_into(s);
            owner.children.push_back(std::move(s));
            return;
        }
        if (is_kw("for")) {
            owner.children.push_back(for_statement());
            return;
        }
        if (is_kw("return")) {
            ++pos_;
            AstNode s(std::string(kind::kReturn), std::nullopt, {}, ln);
            if (!is_punct(";")) s.children.push_back(expr());
            expect_punct(";");
            owner.children.push_back(std::move(s));
            return;
        }
        if (looks_like_decl()) {
            AstNode s(std::string(kind::kDecl), std::nullopt, {}, ln);
            s.children.push_back(type());
            s.children.push_back(identifier());
            if (is_punct("=")) {
                ++pos_;
                s.children.push_back(expr());
            }
            expect_punct(";");
            owner.children.push_back(std::move(s));
            return;
        }
        if (cur().type == Tok::Ident) {
            AstNode target = postfix();
            if (is_punct("=")) {
                if (target.is(kind::kCall)) fail("cannot assign to a call");
                ++pos_;
                AstNode s(std::string(kind::kAssign), std::nullopt, {}, ln);
                s.children.push_back(std::move(target));
                s.children.push_back(expr());
                expect_punct(";");
                owner.children.push_back(std::move(s));
                return;
            }
            if (!target.is(kind::kCall)) fail("expected '=' or call");
            expect_punct(";");
            owner.children.push_back(AstNode(std::string(kind::kCallStmt), std::nullopt, {std::move(target)}, ln));
            return;
        }
        fail("expected statement");
    }

    AstNode for_statement() {
        const int ln = cur().line;
        expect_kw("for");
        expect_punct("(");
        // for-each: type ID ':' expr
        {
            const auto saved = pos_;
            bool each = false;
            try {
                if (cur().type == Tok::Ident) {
                    type();
                    if (cur().type == Tok::Ident) {
                        ++pos_;
                        each = is_punct(":");
                    }
                }
            } catch (const SyntaxError&) {
                each = false;
            }
            pos_ = saved;
            if (each) {
                AstNode s(std::string(kind::kForEach), std::nullopt, {}, ln);
                s.children.push_back(type());
                s.children.push_back(identifier());
                expect_punct(":");
                s.children.push_back(expr());
                expect_punct(")");
                body_into(s);
                return s;
            }
        }
        AstNode s(std::string(kind::kFor), std::nullopt, {}, ln);
        if (!is_punct(";")) {
            AstNode init(std::string(kind::kForInit), std::nullopt, {}, cur().line);
            if (looks_like_decl()) {
                init.children.push_back(type());
                init.children.push_back(identifier());
            } else {
                init.children.push_back(name_ref());
            }
            if (is_punct("=")) {
                ++pos_;
                init.children.push_back(expr());
            }
            s.children.push_back(std::move(init));
        }
        expect_punct(";");
        if (!is_punct(";")) s.children.push_back(expr());
        expect_punct(";");
        if (!is_punct(")")) {
            AstNode upd(std::string(kind::kForUpdate), std::nullopt, {}, cur().line);
            upd.children.push_back(name_ref());
            expect_punct("=");
            upd.children.push_back(expr());
            s.children.push_back(std::move(upd));
        }
        expect_punct(")");
        body_into(s);
        return s;
    }

    // ID ('.' ID)*  as Identifier or Name.
    AstNode name_ref() {
        const int ln = cur().line;
        AstNode first = identifier();
        if (!is_punct(".")) return first;
        AstNode name(std::string(kind::kName), std::nullopt, {std::move(first)}, ln);
        while (is_punct(".")) {
            ++pos_;
            name.children.push_back(identifier());
        }
        return name;
    }

    AstNode args() {
        AstNode a(std::string(kind::kArgs), std::nullopt, {}, cur().line);
        expect_punct("(");
        if (!is_punct(")")) {
            a.children.push_back(expr());
            while (is_punct(",")) {
                ++pos_;
                a.children.push_back(expr());
            }
        }
        expect_punct(")");
        return a;
    }

    // Names, field accesses and (chained) calls.
    AstNode postfix() {
        const int ln = cur().line;
        std::vector<AstNode> parts;
        parts.push_back(identifier());
        while (is_punct(".")) {
            ++pos_;
            parts.push_back(identifier());
        }
        if (!is_punct("(")) {
            if (parts.size() == 1) return std::move(parts.front());
            return AstNode(std::string(kind::kName), std::nullopt, std::move(parts), ln);
        }
        AstNode call(std::string(kind::kCall), std::nullopt, std::move(parts), ln);
        call.children.push_back(args());
        while (is_punct(".")) {
            ++pos_;
            AstNode outer(std::string(kind::kCall), std::nullopt, {std::move(call)}, ln);
            outer.children.push_back(identifier());
            while (is_punct(".")) {
                ++pos_;
                outer.children.push_back(identifier());
            }
            if (!is_punct("(")) fail("expected call after member access on call result");
            outer.children.push_back(args());
            call = std::move(outer);
        }
        return call;
    }

    AstNode expr() { return binary(0); }

    static int precedence(std::string_view op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "==" || op == "!=") return 3;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
        if (op == "+" || op == "-") return 5;
        if (op == "*" || op == "/" || op == "%") return 6;
        return -1;
    }

    AstNode binary(int min_prec) {
        AstNode lhs = unary();
        for (;;) {
            if (cur().type != Tok::Op) return lhs;
            const int prec = precedence(cur().text);
            if (prec < 0 || prec <= min_prec) return lhs;
            const Token op = toks_[pos_++];
            AstNode rhs = binary(prec);
            const int ln = lhs.line;
            lhs = AstNode(std::string(kind::kBinaryOp), std::nullopt,
                          {std::move(lhs), leaf(kind::kOperator, op), std::move(rhs)}, ln);
        }
    }

    AstNode unary() {
        if (is_op("-") || is_op("!")) {
            const Token op = toks_[pos_++];
            return AstNode(std::string(kind::kUnaryOp), std::nullopt, {leaf(kind::kOperator, op), unary()}, op.line);
        }
        return primary();
    }

    AstNode primary() {
        const auto& t = cur();
        if (t.type == Tok::Number || t.type == Tok::String) return leaf(kind::kLiteral, toks_[pos_++]);
        if (is_punct("(")) {
            ++pos_;
            AstNode e = expr();
            expect_punct(")");
            return e;
        }
        if (is_kw("new")) {
            const int ln = t.line;
            ++pos_;
            AstNode n(std::string(kind::kNew), std::nullopt, {}, ln);
            n.children.push_back(type());
            n.children.push_back(args());
            return n;
        }
        if (t.type == Tok::Ident) return postfix();
        fail("expected expression");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

class Renderer {
public:
    explicit Renderer(const RenderStyle& style) : style_(style), comment_state_(style.comment_seed * 2654435761u + 1) {}

    std::string run(const AstNode& unit) {
        for (const auto& c : unit.children) top(c);
        return out_.str();
    }

private:
    void newline() {
        if (style_.compact) {
            out_ << ' ';
            return;
        }
        out_ << '\n';
        maybe_comment();
        out_ << std::string(static_cast<std::size_t>(depth_ * style_.indent), ' ');
    }

    void maybe_comment() {
        if (!style_.comments) return;
        comment_state_ = comment_state_ * 1103515245u + 12345u;
        if ((comment_state_ >> 16) % 3 == 0)
            out_ << std::string(static_cast<std::size_t>(depth_ * style_.indent), ' ') << "// note "
                 << (comment_state_ >> 20) % 97 << '\n';
    }

    static bool is_mod(const AstNode& n) { return n.is(kind::kModifier); }

    std::size_t mods(const AstNode& n) {
        std::size_t i = 0;
        while (i < n.children.size() && is_mod(n.children[i])) {
            out_ << *n.children[i].token << ' ';
            ++i;
        }
        return i;
    }

    void type(const AstNode& t) { out_ << *t.token; }

    void params(const AstNode& ps) {
        out_ << '(';
        for (std::size_t i = 0; i < ps.children.size(); ++i) {
            if (i) out_ << ", ";
            type(ps.children[i].children[0]);
            out_ << ' ' << *ps.children[i].children[1].token;
        }
        out_ << ')';
    }

    void body(const AstNode& owner, std::size_t from) {
        out_ << " {";
        ++depth_;
        for (std::size_t i = from; i < owner.children.size(); ++i) {
            if (owner.children[i].is(kind::kElse)) break;
            newline();
            stmt(owner.children[i]);
        }
        --depth_;
        newline();
        out_ << '}';
    }

    void top(const AstNode& n) {
        std::size_t i = mods(n);
        if (n.is(kind::kClassDef)) {
            out_ << "class " << *n.children[i++].token;
            bool in_header = true;
            while (in_header && i < n.children.size()) {
                const auto& c = n.children[i];
                if (c.is(kind::kExtends)) {
                    out_ << " extends ";
                    type(c.children[0]);
                    ++i;
                } else if (c.is(kind::kImplements)) {
                    out_ << " implements ";
                    for (std::size_t k = 0; k < c.children.size(); ++k) {
                        if (k) out_ << ", ";
                        type(c.children[k]);
                    }
                    ++i;
                } else {
                    in_header = false;
                }
            }
            out_ << " {";
            ++depth_;
            for (; i < n.children.size(); ++i) {
                newline();
                member(n.children[i]);
            }
            --depth_;
            newline();
            out_ << '}';
            newline();
            return;
        }
        if (n.is(kind::kInterfaceDef)) {
            out_ << "interface " << *n.children[i++].token;
            if (i < n.children.size() && n.children[i].is(kind::kExtends)) {
                out_ << " extends ";
                for (std::size_t k = 0; k < n.children[i].children.size(); ++k) {
                    if (k) out_ << ", ";
                    type(n.children[i].children[k]);
                }
                ++i;
            }
            out_ << " {";
            ++depth_;
            for (; i < n.children.size(); ++i) {
                newline();
                member(n.children[i]);
            }
            --depth_;
            newline();
            out_ << '}';
            newline();
            return;
        }
        // FuncDef
        type(n.children[i]);
        out_ << ' ' << *n.children[i + 1].token;
        params(n.children[i + 2]);
        body(n, i + 3);
        newline();
    }

    void member(const AstNode& n) {
        std::size_t i = mods(n);
        if (n.is(kind::kCtorDef)) {
            out_ << *n.children[i].token;
            params(n.children[i + 1]);
            body(n, i + 2);
            return;
        }
        type(n.children[i]);
        out_ << ' ' << *n.children[i + 1].token;
        if (n.is(kind::kFieldDecl)) {
            if (i + 2 < n.children.size()) {
                out_ << " = ";
                expr(n.children[i + 2]);
            }
            out_ << ';';
            return;
        }
        params(n.children[i + 2]);
        if (n.is(kind::kMethodDecl)) {
            out_ << ';';
            return;
        }
        body(n, i + 3);
    }

    void stmt(const AstNode& n) {
        if (n.is(kind::kDecl)) {
            type(n.children[0]);
            out_ << ' ' << *n.children[1].token;
            if (n.children.size() > 2) {
                out_ << " = ";
                expr(n.children[2]);
            }
            out_ << ';';
        } else if (n.is(kind::kAssign)) {
            expr(n.children[0]);
            out_ << " = ";
            expr(n.children[1]);
            out_ << ';';
        } else if (n.is(kind::kCallStmt)) {
            expr(n.children[0]);
            out_ << ';';
        } else if (n.is(kind::kReturn)) {
            out_ << "return";
            if (!n.children.empty()) {
                out_ << ' ';
                expr(n.children[0]);
            }
            out_ << ';';
        } else if (n.is(kind::kIf)) {
            out_ << "if (";
            expr(n.children[0]);
            out_ << ')';
            body(n, 1);
            if (n.children.back().is(kind::kElse)) {
                out_ << " else";
                body(n.children.back(), 0);
            }
        } else if (n.is(kind::kWhile)) {
            out_ << "while (";
            expr(n.children[0]);
            out_ << ')';
            body(n, 1);
        } else if (n.is(kind::kForEach)) {
            out_ << "for (";
            type(n.children[0]);
            out_ << ' ' << *n.children[1].token << " : ";
            expr(n.children[2]);
            out_ << ')';
            body(n, 3);
        } else if (n.is(kind::kFor)) {
            out_ << "for (";
            std::size_t i = 0;
            if (i < n.children.size() && n.children[i].is(kind::kForInit)) {
                const auto& init = n.children[i++];
                std::size_t k = 0;
                if (init.children[0].is(kind::kType)) {
                    type(init.children[0]);
                    out_ << ' ' << *init.children[1].token;
                    k = 2;
                } else {
                    expr(init.children[0]);
                    k = 1;
                }
                if (k < init.children.size()) {
                    out_ << " = ";
                    expr(init.children[k]);
                }
            }
            out_ << "; ";
            if (i < n.children.size() && !n.children[i].is(kind::kForUpdate) && !is_statement_kind(n.children[i])) {
                expr(n.children[i++]);
            }
            out_ << "; ";
            if (i < n.children.size() && n.children[i].is(kind::kForUpdate)) {
                const auto& upd = n.children[i++];
                expr(upd.children[0]);
                out_ << " = ";
                expr(upd.children[1]);
            }
            out_ << ')';
            body(n, i);
        }
    }

    static bool is_statement_kind(const AstNode& n) {
        return n.is(kind::kDecl) || n.is(kind::kAssign) || n.is(kind::kCallStmt) || n.is(kind::kReturn) ||
               n.is(kind::kIf) || n.is(kind::kWhile) || n.is(kind::kFor) || n.is(kind::kForEach);
    }

    void dotted(const AstNode& n, std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i) {
            if (i > from) out_ << '.';
            if (n.children[i].is(kind::kCall)) expr(n.children[i]);
            else out_ << *n.children[i].token;
        }
    }

    void expr(const AstNode& n, int parent_prec = 0) {
        if (n.is(kind::kIdentifier) || n.is(kind::kLiteral)) {
            out_ << *n.token;
        } else if (n.is(kind::kName)) {
            dotted(n, 0, n.children.size());
        } else if (n.is(kind::kCall)) {
            dotted(n, 0, n.children.size() - 1);
            args(n.children.back());
        } else if (n.is(kind::kNew)) {
            out_ << "new ";
            type(n.children[0]);
            args(n.children[1]);
        } else if (n.is(kind::kUnaryOp)) {
            out_ << *n.children[0].token;
            const auto& operand = n.children[1];
            const bool wrap = operand.is(kind::kBinaryOp);
            if (wrap) out_ << '(';
            expr(operand, 7);
            if (wrap) out_ << ')';
        } else if (n.is(kind::kBinaryOp)) {
            const std::string& op = *n.children[1].token;
            const int prec = prec_of(op);
            const bool wrap = prec <= parent_prec;
            if (wrap) out_ << '(';
            expr(n.children[0], prec - 1);
            out_ << ' ' << op << ' ';
            expr(n.children[2], prec);
            if (wrap) out_ << ')';
        }
    }

    static int prec_of(std::string_view op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "==" || op == "!=") return 3;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
        if (op == "+" || op == "-") return 5;
        return 6;
    }

    void args(const AstNode& a) {
        out_ << '(';
        for (std::size_t i = 0; i < a.children.size(); ++i) {
            if (i) out_ << ", ";
            expr(a.children[i]);
        }
        out_ << ')';
    }

    const RenderStyle& style_;
    std::ostringstream out_;
    int depth_ = 0;
    unsigned comment_state_;
};

}  // namespace

AstNode parse_mini(std::string_view source) {
    Lexer lexer(source);
    Parser parser(lexer.run());
    return parser.unit();
}

std::vector<std::string> lex_content_tokens(std::string_view source) {
    Lexer lexer(source);
    std::vector<std::string> out;
    for (auto& t : lexer.run()) {
        if (t.type == Tok::Ident || t.type == Tok::Modifier || t.type == Tok::Number || t.type == Tok::String ||
            t.type == Tok::Op)
            out.push_back(std::move(t.text));
    }
    return out;
}

std::string render_mini(const AstNode& unit, const RenderStyle& style) {
    Renderer r(style);
    return r.run(unit);
}

}  // namespace codectx::ingest
