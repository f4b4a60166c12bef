#include <algorithm>
#include <map>
#include <numeric>

#include "codectx/errors.hpp"
#include "codectx/mini_lang.hpp"
#include "codectx/patterns.hpp"
#include "codectx/statements.hpp"
#include "codectx/synth.hpp"

namespace codectx::synth {

using ingest::AstNode;
using ingest::CloneType;
namespace kind = ingest::kind;

namespace {

const std::vector<std::string> kVarPool = {"a",   "b",   "c",   "k",   "m",   "acc", "tmp", "val",
                                           "idx", "cnt", "res", "sum", "cur", "lim", "pos", "w"};
const std::vector<std::string> kFuncPool = {"run", "calc", "work", "apply", "step", "proc"};
const std::vector<std::string> kCallPool = {"log", "emit", "trace"};
const std::vector<std::string> kRenamePool = {"alpha", "beta",  "gamma", "delta", "omega", "sigma",
                                              "theta", "kappa", "lam",   "rho",   "tau",   "phi",
                                              "chi",   "psi",   "zeta",  "eta",   "iota",  "mu",
                                              "nu",    "xi",    "ups",   "eps",   "omi",   "beth"};

std::string num(Rng& rng, int lo = 1, int hi = 9) {
    return std::to_string(lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1))));
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[rng.below(v.size())];
}

struct Roles {
    std::string fn, p1, p2, p3, v1, v2, call;
    std::vector<std::string> temps;
};

Roles draw_roles(Rng& rng) {
    std::vector<std::string> vars = kVarPool;
    rng.shuffle(std::span<std::string>(vars));
    Roles r;
    r.fn = pick(kFuncPool, rng);
    r.p1 = vars[0];
    r.p2 = vars[1];
    r.p3 = vars[2];
    r.v1 = vars[3];
    r.v2 = vars[4];
    r.temps.assign(vars.begin() + 5, vars.end());
    r.call = pick(kCallPool, rng);
    return r;
}

std::vector<std::string> core_statements(int label, const Roles& r, Rng& rng) {
    switch (label) {
        case 0:
            return {"int " + r.v1 + " = " + num(rng) + ";",
                    "for (int " + r.v2 + " = 0; " + r.v2 + " < " + r.p3 + "; " + r.v2 + " = " + r.v2 + " + 1) { " +
                        r.v1 + " = " + r.v1 + " + " + r.v2 + " * " + num(rng) + "; if (" + r.v1 + " > " +
                        num(rng, 10, 99) + ") { " + r.v1 + " = " + r.v1 + " - " + r.p1 + "; } }",
                    "return " + r.v1 + ";"};
        case 1:
            return {"int " + r.v1 + " = " + r.p1 + ";",
                    "while (" + r.p3 + " > 0) { if (" + r.p3 + " > " + r.v1 + ") { " + r.v1 + " = " + r.p3 + "; } " +
                        r.p3 + " = " + r.p3 + " - " + num(rng) + "; }",
                    "return " + r.v1 + ";"};
        case 2:
            return {"int " + r.v1 + " = 0;",
                    r.call + "(" + r.v1 + ");",
                    "if (" + r.p1 + " == " + num(rng) + ") { " + r.v1 + " = " + r.v1 + " + 1; " + r.call + "(" + r.v1 +
                        "); } else { " + r.v1 + " = " + r.v1 + " - 1; }",
                    r.call + "(" + r.v1 + ", " + r.p2 + ");",
                    "return " + r.v1 + ";"};
        case 3:
            return {"int " + r.v1 + " = " + num(rng) + ";",
                    "if (" + r.p1 + " > " + r.v1 + ") { if (" + r.p2 + " > " + r.v1 + ") { " + r.v1 + " = " + r.p1 +
                        " + " + r.p2 + "; } }",
                    r.v1 + " = " + r.v1 + " * " + num(rng) + ";",
                    "int " + r.v2 + " = " + r.v1 + " % " + num(rng, 2, 9) + ";",
                    "return " + r.v2 + ";"};
        default:
            throw ConfigError("skeleton label " + std::to_string(label) + " outside 0.." +
                              std::to_string(kSkeletonCount - 1));
    }
}

std::string assemble(const Roles& r, const std::vector<std::string>& body) {
    std::string src = "int " + r.fn + "(int " + r.p1 + ", int " + r.p2 + ", int " + r.p3 + ") {\n";
    for (const auto& s : body) src += "  " + s + "\n";
    return src + "}\n";
}

}  // namespace

std::size_t statement_count(const AstNode& ast) {
    std::size_t n = 0;
    ingest::preorder(ast, [&](const AstNode& node) { n += encode::is_statement_kind(node.kind); });
    return n;
}

std::string random_program_source(int label, Rng& rng, std::size_t min_statements) {
    const Roles r = draw_roles(rng);
    std::vector<std::string> body = core_statements(label, r, rng);
    std::size_t next_temp = 0;
    std::size_t extra = rng.below(3);
    // Filler goes anywhere before the final return.
    for (;;) {
        const std::string src = assemble(r, body);
        if (statement_count(ingest::parse_mini(src)) >= min_statements) {
            if (extra == 0) return src;
            --extra;
        }
        const std::size_t at = rng.below(body.size());
        if (next_temp < r.temps.size() && rng.chance(0.5)) {
            const std::string& t = r.temps[next_temp++];
            std::vector<std::string> stmts = {"int " + t + " = " + num(rng) + ";"};
            if (rng.chance(0.5)) stmts.push_back(t + " = " + t + " + " + r.p2 + ";");
            body.insert(body.begin() + static_cast<long>(at), stmts.begin(), stmts.end());
        } else {
            body.insert(body.begin() + static_cast<long>(at), r.call + "(" + num(rng) + ");");
        }
    }
}

AstNode random_program(int label, Rng& rng, std::size_t min_statements) {
    return ingest::parse_mini(random_program_source(label, rng, min_statements));
}

ingest::ClassificationCorpus program_corpus(std::size_t per_class, int classes, std::uint64_t seed) {
    if (classes < 2 || classes > kSkeletonCount)
        throw ConfigError("program corpus supports 2.." + std::to_string(kSkeletonCount) + " classes");
    Rng rng(seed);
    ingest::ClassificationCorpus corpus;
    corpus.classes = classes;
    for (std::size_t k = 0; k < per_class; ++k) {
        for (int c = 0; c < classes; ++c) {
            ingest::ClassificationSample s;
            s.id = "p" + std::to_string(c) + "_" + std::to_string(k);
            s.ast = random_program(c, rng);
            s.label = c;
            corpus.samples.push_back(std::move(s));
        }
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Clones

namespace {

void rename_identifiers(AstNode& n, std::map<std::string, std::string>& mapping, const std::function<std::string()>& fresh) {
    if (n.is(kind::kIdentifier) && n.token) {
        auto it = mapping.find(*n.token);
        if (it == mapping.end()) it = mapping.emplace(*n.token, fresh()).first;
        n.token = it->second;
    }
    for (auto& c : n.children) rename_identifiers(c, mapping, fresh);
}

AstNode* function_of(AstNode& unit) {
    for (auto& c : unit.children) {
        if (c.is(kind::kFuncDef)) return &c;
    }
    return nullptr;
}

std::size_t body_start(const AstNode& fn) {
    for (std::size_t i = 0; i < fn.children.size(); ++i) {
        if (fn.children[i].is(kind::kParams)) return i + 1;
    }
    return fn.children.size();
}

AstNode call_statement(const std::string& callee, const std::string& literal) {
    return AstNode(std::string(kind::kCallStmt), std::nullopt,
                   {AstNode(std::string(kind::kCall), std::nullopt,
                            {AstNode(std::string(kind::kIdentifier), callee),
                             AstNode(std::string(kind::kArgs), std::nullopt,
                                     {AstNode(std::string(kind::kLiteral), literal)})})});
}

// Insertions and deletions of simple top-level statements; returns the edit count.
std::size_t edit_statements(AstNode& unit, std::size_t edits, Rng& rng) {
    AstNode* fn = function_of(unit);
    if (!fn) throw UnsupportedTypeError("statement edits need a function");
    const std::size_t start = body_start(*fn);
    for (std::size_t e = 0; e < edits; ++e) {
        std::vector<std::size_t> deletable;
        for (std::size_t i = start; i < fn->children.size(); ++i) {
            const auto& k = fn->children[i].kind;
            if (k == kind::kDecl || k == kind::kAssign || k == kind::kCallStmt) deletable.push_back(i);
        }
        if (!deletable.empty() && rng.chance(0.5)) {
            fn->children.erase(fn->children.begin() + static_cast<long>(pick(deletable, rng)));
        } else {
            // Never after the final statement, which is the return.
            const std::size_t span = fn->children.size() - start;
            const std::size_t at = start + (span > 0 ? rng.below(span) : 0);
            fn->children.insert(fn->children.begin() + static_cast<long>(at),
                                call_statement(pick(kCallPool, rng), num(rng)));
        }
    }
    return edits;
}

std::string variant_id(const std::string& prefix, CloneType t, std::size_t k) {
    return prefix + std::string(ingest::to_string(t)) + "_" + std::to_string(k);
}

}  // namespace

AstNode alpha_normalize(const AstNode& ast) {
    AstNode out = ast;
    std::map<std::string, std::string> mapping;
    std::size_t next = 0;
    rename_identifiers(out, mapping, [&] { return "id" + std::to_string(next++); });
    return out;
}

CloneGenResult gen_synthetic_clones(const std::vector<ingest::CodeUnit>& seeds, CloneType type, std::size_t count,
                                    std::uint64_t rng_seed) {
    if (seeds.empty()) throw EmptyInputError("clone generation needs seed programs");
    Rng rng(rng_seed);
    CloneGenResult out;
    for (const auto& s : seeds) out.store[s.id] = s;
    const std::string prefix = "g" + std::to_string(rng_seed % 100000) + "_";

    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < seeds.size(); ++i) by_label[seeds[i].label].push_back(i);

    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = rng.below(seeds.size());
        const ingest::CodeUnit& a = seeds[i];
        ingest::ClonePair pair{a.id, "", 1, type, std::nullopt};
        std::size_t edits = 0;
        ingest::CodeUnit variant{variant_id(prefix, type, k), a.ast, {}, std::nullopt, a.label};
        switch (type) {
            case CloneType::T1: {
                ingest::RenderStyle style;
                style.indent = 1 + static_cast<int>(rng.below(8));
                style.compact = rng.chance(0.3);
                style.comments = rng.chance(0.5);
                style.comment_seed = static_cast<unsigned>(rng.below(1u << 20));
                variant.ast = ingest::parse_mini(ingest::render_mini(a.ast, style));
                break;
            }
            case CloneType::T2: {
                std::vector<std::string> pool = kRenamePool;
                rng.shuffle(std::span<std::string>(pool));
                std::size_t next = 0;
                std::map<std::string, std::string> mapping;
                rename_identifiers(variant.ast, mapping, [&] {
                    const std::size_t j = next++;
                    return j < pool.size() ? pool[j] : pool[j % pool.size()] + std::to_string(j / pool.size());
                });
                break;
            }
            case CloneType::ST3:
            case CloneType::MT3: {
                const std::size_t n = statement_count(a.ast);
                const std::size_t st_max = std::max<std::size_t>(1, n / 10);
                std::size_t lo = 1, hi = st_max;
                if (type == CloneType::MT3) {
                    lo = st_max + 1;
                    hi = std::max(lo, (3 * n) / 10);
                }
                edits = edit_statements(variant.ast, lo + rng.below(hi - lo + 1), rng);
                break;
            }
            case CloneType::T4: {
                const auto& same = by_label[a.label];
                if (same.size() < 2) throw UnsupportedTypeError("T4 needs two seeds sharing a label");
                std::size_t j = i;
                while (j == i) j = same[rng.below(same.size())];
                pair.id_b = seeds[j].id;
                break;
            }
            case CloneType::None: {
                if (by_label.size() < 2) throw UnsupportedTypeError("negatives need seeds with two labels");
                std::size_t j = i;
                while (seeds[j].label == a.label) j = rng.below(seeds.size());
                pair.id_b = seeds[j].id;
                pair.label = 0;
                break;
            }
        }
        if (pair.id_b.empty()) {
            pair.id_b = variant.id;
            out.store[variant.id] = std::move(variant);
        }
        out.pairs.push_back(std::move(pair));
        out.edits.push_back(edits);
    }
    return out;
}

ingest::CloneCorpus clone_benchmark(std::size_t n_seeds, std::size_t per_type, std::uint64_t seed,
                                    const std::string& prefix) {
    Rng rng(seed);
    std::vector<ingest::CodeUnit> seeds;
    for (std::size_t i = 0; i < n_seeds; ++i) {
        const int label = static_cast<int>(i % kSkeletonCount);
        seeds.push_back({prefix + "s" + std::to_string(i), random_program(label, rng, 10), {}, std::nullopt, label});
    }
    std::map<std::string, ingest::CodeUnit> store;
    std::vector<ingest::ClonePair> pairs;
    for (CloneType t : ingest::kPositiveCloneTypes) {
        auto pos = gen_synthetic_clones(seeds, t, per_type, rng.next());
        auto neg = gen_synthetic_clones(seeds, CloneType::None, per_type, rng.next());
        for (auto& p : neg.pairs) p.stratum = t;
        for (auto& [id, unit] : pos.store) {
            ingest::CodeUnit u = unit;
            const std::string key = id.starts_with(prefix) ? id : prefix + id;
            u.id = key;
            store[key] = std::move(u);
        }
        for (auto& p : pos.pairs) {
            if (!p.id_a.starts_with(prefix)) p.id_a = prefix + p.id_a;
            if (!p.id_b.starts_with(prefix)) p.id_b = prefix + p.id_b;
            pairs.push_back(p);
        }
        for (auto& p : neg.pairs) pairs.push_back(p);
    }
    return ingest::make_clone_corpus(std::move(store), std::move(pairs));
}

// ---------------------------------------------------------------------------
// Pattern classes

namespace {

const std::vector<std::string> kClassPool = {"Engine", "Store",  "Cache",  "Router", "Panel",  "Pool",
                                             "Index",  "Ledger", "Buffer", "Client", "Parser", "Sensor"};
const std::vector<std::string> kMethodPool = {"size", "reset", "load", "save", "check", "count", "compute", "flush"};

std::string filler_members(Rng& rng, std::vector<std::string>& fields) {
    std::string out;
    const std::size_t nf = rng.below(3);
    for (std::size_t i = 0; i < nf; ++i) {
        fields.push_back("g" + std::to_string(i));
        out += "  private int " + fields.back() + ";\n";
    }
    std::vector<std::string> names = kMethodPool;
    rng.shuffle(std::span<std::string>(names));
    const std::size_t nm = rng.below(3);
    for (std::size_t i = 0; i < nm; ++i) {
        const std::string extra = fields.empty() ? "" : " + " + pick(fields, rng);
        out += "  public int " + names[i] + "(int a) { int t = a * " + num(rng) + "; return t" + extra + "; }\n";
    }
    return out;
}

}  // namespace

std::string pattern_class_source(const std::string& pattern, Rng& rng) {
    std::vector<std::string> names = kClassPool;
    rng.shuffle(std::span<std::string>(names));
    const std::string& C = names[0];
    const std::string& X = names[1];
    const std::string& Y = names[2];
    const std::string I = "I" + names[3];
    std::vector<std::string> fields;
    const std::string filler = filler_members(rng, fields);
    if (pattern == "SINGLETON") {
        return "class " + C + " {\n  private static " + C + " instance;\n" + filler + "  private " + C +
               "() { }\n  public static " + C + " getInstance() {\n    if (instance == null) { instance = new " + C +
               "(); }\n    return instance;\n  }\n}\n";
    }
    if (pattern == "FACTORY_METHOD") {
        return "class " + C + " {\n" + filler + "  public static " + X + " create(int k) {\n    if (k > " + num(rng) +
               ") { return new " + X + "(k); }\n    return new " + Y + "(k);\n  }\n  public " + X +
               " build() { return create(" + num(rng) + "); }\n}\n";
    }
    if (pattern == "ADAPTER") {
        return "interface " + I + " { int request(int v); }\nclass " + C + " implements " + I + " {\n  private " + X +
               " adaptee;\n" + filler + "  public " + C + "(" + X + " a) { adaptee = a; }\n  public int request(int v) { return adaptee.specificRequest(v * " +
               num(rng) + "); }\n}\n";
    }
    if (pattern == "DECORATOR") {
        return "interface " + I + " { int op(int v); int size(); }\nclass " + C + " implements " + I +
               " {\n  private " + I + " inner;\n" + filler + "  public " + C + "(" + I +
               " w) { inner = w; }\n  @Override public int op(int v) { int r = inner.op(v); return r + " + num(rng) +
               "; }\n  @Override public int size() { return inner.size(); }\n}\n";
    }
    if (pattern == "OBSERVER") {
        return "class " + C + " {\n  private List subs;\n" + filler + "  public void attach(" + X +
               " o) { subs.add(o); }\n  public void publish(int e) { for (" + X +
               " o : subs) { o.update(e); } }\n}\n";
    }
    if (pattern == "NONE") {
        return "class " + C + " {\n  private int state;\n" + filler + "  public int step(int v) { state = state + v * " +
               num(rng) + "; return state; }\n}\n";
    }
    throw UnknownLabelError(pattern);
}

std::vector<ingest::PatternSample> pattern_corpus(std::size_t per_label, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ingest::PatternSample> out;
    for (std::size_t k = 0; k < per_label; ++k) {
        for (const auto& label : patterns::default_labels()) {
            out.push_back({"k" + label + "_" + std::to_string(k), ingest::parse_mini(pattern_class_source(label, rng)),
                           label});
        }
    }
    return out;
}

std::vector<ingest::BugWarning> random_warnings(const ingest::AstNode& ast, const std::string& class_name,
                                                std::size_t max_count, Rng& rng) {
    static const std::vector<std::string> categories = {"CORRECTNESS", "BAD_PRACTICE", "STYLE", "PERFORMANCE"};
    const auto [first, last] = ingest::line_span(ast);
    std::vector<ingest::BugWarning> out;
    const std::size_t nw = rng.below(max_count + 1);
    for (std::size_t w = 0; w < nw; ++w) {
        ingest::BugWarning warning;
        const bool genuine = rng.chance(0.7);
        warning.warning_type = genuine ? "NP_NULL_ON_SOME_PATH" : "SE_NO_SERIALVERSIONID";
        warning.category = pick(categories, rng);
        warning.priority = 1 + static_cast<int>(rng.below(3));
        warning.class_name = class_name;
        warning.line_start = first + static_cast<int>(rng.below(static_cast<std::size_t>(last - first + 1)));
        warning.line_end = warning.line_start;
        warning.message = warning_message(genuine, rng);
        out.push_back(std::move(warning));
    }
    return out;
}

void plant_warnings(std::map<std::string, ingest::CodeUnit>& store, std::uint64_t seed) {
    Rng rng(seed);
    for (auto& [id, unit] : store) unit.warnings = random_warnings(unit.ast, id, 3, rng);
}

ingest::ClassificationCorpus pattern_task_corpus(std::size_t per_class, std::uint64_t seed,
                                                 const std::vector<std::string>& labels) {
    if (labels.size() < 2) throw ConfigError("pattern task corpus needs at least two labels");
    Rng rng(seed);
    ingest::ClassificationCorpus corpus;
    corpus.classes = static_cast<int>(labels.size());
    for (std::size_t k = 0; k < per_class; ++k) {
        for (std::size_t c = 0; c < labels.size(); ++c) {
            ingest::ClassificationSample s;
            s.id = "q" + std::to_string(c) + "_" + std::to_string(k);
            s.ast = ingest::parse_mini(pattern_class_source(labels[c], rng));
            s.label = static_cast<int>(c);
            s.pattern = labels[c];
            std::string class_name;
            for (const auto& n : s.ast.children) {
                if (n.is(kind::kClassDef)) class_name = *n.children[0].token;
            }
            s.warnings = random_warnings(s.ast, class_name, 3, rng);
            corpus.samples.push_back(std::move(s));
        }
    }
    return corpus;
}

}  // namespace codectx::synth
