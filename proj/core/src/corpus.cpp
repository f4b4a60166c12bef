#include "codectx/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "codectx/errors.hpp"
#include "codectx/mini_lang.hpp"

namespace codectx::ingest {

using nlohmann::json;

// ---------------------------------------------------------------------------
// AST records

json ast_to_json(const AstNode& node) {
    json j;
    j["kind"] = node.kind;
    j["token"] = node.token ? json(*node.token) : json(nullptr);
    json kids = json::array();
    for (const auto& c : node.children) kids.push_back(ast_to_json(c));
    j["children"] = std::move(kids);
    if (node.line > 0) j["line"] = node.line;
    return j;
}

AstNode ast_from_json(const json& record) {
    if (!record.is_object()) throw FormatError("node", "expected object");
    const auto k = record.find("kind");
    if (k == record.end()) throw FormatError("kind", "missing");
    if (!k->is_string() || k->get_ref<const std::string&>().empty()) throw FormatError("kind", "expected non-empty string");
    AstNode node;
    node.kind = k->get<std::string>();
    if (const auto t = record.find("token"); t != record.end() && !t->is_null()) {
        if (!t->is_string()) throw FormatError("token", "expected string or null");
        node.token = t->get<std::string>();
    }
    if (const auto c = record.find("children"); c != record.end()) {
        if (!c->is_array()) throw FormatError("children", "expected array");
        node.children.reserve(c->size());
        for (const auto& child : *c) node.children.push_back(ast_from_json(child));
    }
    if (const auto l = record.find("line"); l != record.end()) {
        if (!l->is_number_integer() || l->get<int>() < 0) throw FormatError("line", "expected non-negative integer");
        node.line = l->get<int>();
    }
    return node;
}

std::string serialize_ast(const AstNode& node) { return ast_to_json(node).dump(); }

AstNode load_ast_record(std::string_view bytes) {
    json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (j.is_discarded()) throw FormatError("record", "malformed JSON");
    AstNode node = ast_from_json(j);
    if (auto problem = validate(node)) throw FormatError("token", *problem);
    return node;
}

// ---------------------------------------------------------------------------
// Warnings

std::size_t category_slot(std::string_view category) {
    const auto it = std::find(kWarningCategories.begin(), kWarningCategories.end(), category);
    return it == kWarningCategories.end() ? kWarningCategories.size() - 1
                                          : static_cast<std::size_t>(it - kWarningCategories.begin());
}

namespace {

std::string normalize_category(const std::string& c) {
    return std::string(kWarningCategories[category_slot(c)]);
}

int parse_int(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size()) throw FormatError(field, "not an integer: " + text);
        return v;
    } catch (const std::logic_error&) {
        throw FormatError(field, "not an integer: " + text);
    }
}

void check_warning(const BugWarning& w) {
    if (w.priority < 1 || w.priority > 3) throw FormatError("priority", "must be in 1..3");
    if (w.line_start < 0 || w.line_end < 0) throw FormatError("start", "negative line");
    if (w.line_start > w.line_end) throw FormatError("end", "line_start > line_end");
}

}  // namespace

std::vector<BugWarning> load_warnings(std::string_view xml) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw FormatError("xml", e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    const auto root = tree.get_child_optional("BugCollection");
    if (!root) throw FormatError("BugCollection", "missing root element");

    std::vector<BugWarning> out;
    for (const auto& [tag, inst] : *root) {
        if (tag != "BugInstance") continue;
        BugWarning w;
        w.warning_type = inst.get<std::string>("<xmlattr>.type", "");
        w.category = normalize_category(inst.get<std::string>("<xmlattr>.category", "UNKNOWN"));
        w.priority = parse_int(inst.get<std::string>("<xmlattr>.priority", "3"), "priority");
        w.class_name = inst.get<std::string>("Class.<xmlattr>.classname", "");
        if (auto m = inst.get_optional<std::string>("Method.<xmlattr>.name")) w.method_name = *m;
        // SourceLine may sit directly under the instance or under Method/Class.
        std::optional<std::reference_wrapper<const pt::ptree>> line;
        if (auto s = inst.get_child_optional("SourceLine")) line = std::cref(*s);
        else if (auto s2 = inst.get_child_optional("Method.SourceLine")) line = std::cref(*s2);
        else if (auto s3 = inst.get_child_optional("Class.SourceLine")) line = std::cref(*s3);
        if (line) {
            const auto& sl = line->get();
            w.line_start = parse_int(sl.get<std::string>("<xmlattr>.start", "0"), "start");
            w.line_end = parse_int(sl.get<std::string>("<xmlattr>.end", std::to_string(w.line_start)), "end");
        }
        w.message = inst.get<std::string>("LongMessage", inst.get<std::string>("ShortMessage", ""));
        if (auto r = inst.get_optional<std::string>("<xmlattr>.report")) w.report_id = *r;
        check_warning(w);
        out.push_back(std::move(w));
    }
    return out;
}

std::string warnings_to_xml(const std::vector<BugWarning>& warnings) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    pt::ptree& coll = root.add_child("BugCollection", pt::ptree{});
    for (const auto& w : warnings) {
        pt::ptree inst;
        inst.put("<xmlattr>.type", w.warning_type);
        inst.put("<xmlattr>.priority", w.priority);
        inst.put("<xmlattr>.category", w.category);
        if (w.report_id) inst.put("<xmlattr>.report", *w.report_id);
        inst.put("Class.<xmlattr>.classname", w.class_name);
        if (w.method_name) inst.put("Method.<xmlattr>.name", *w.method_name);
        inst.put("SourceLine.<xmlattr>.start", w.line_start);
        inst.put("SourceLine.<xmlattr>.end", w.line_end);
        inst.put("LongMessage", w.message);
        coll.add_child("BugInstance", inst);
    }
    std::ostringstream out;
    pt::write_xml(out, root, pt::xml_writer_make_settings<std::string>(' ', 2));
    return out.str();
}

json warning_to_json(const BugWarning& w) {
    json j;
    j["type"] = w.warning_type;
    j["category"] = w.category;
    j["priority"] = w.priority;
    j["class_name"] = w.class_name;
    j["method_name"] = w.method_name ? json(*w.method_name) : json(nullptr);
    j["line_start"] = w.line_start;
    j["line_end"] = w.line_end;
    j["message"] = w.message;
    if (w.report_id) j["report_id"] = *w.report_id;
    return j;
}

BugWarning warning_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("warnings", "expected object");
    BugWarning w;
    try {
        w.warning_type = j.value("type", "");
        w.category = normalize_category(j.value("category", "UNKNOWN"));
        w.priority = j.value("priority", 3);
        w.class_name = j.value("class_name", "");
        if (auto m = j.find("method_name"); m != j.end() && !m->is_null()) w.method_name = m->get<std::string>();
        w.line_start = j.value("line_start", 0);
        w.line_end = j.value("line_end", w.line_start);
        w.message = j.value("message", "");
        if (auto r = j.find("report_id"); r != j.end() && !r->is_null()) w.report_id = r->get<std::string>();
    } catch (const json::type_error& e) {
        throw FormatError("warnings", e.what());
    }
    check_warning(w);
    return w;
}

// ---------------------------------------------------------------------------
// JSON-lines helpers

namespace {

template <typename F>
void for_each_record(std::string_view jsonl, F&& fn) {
    std::size_t start = 0;
    int lineno = 0;
    while (start <= jsonl.size()) {
        auto end = jsonl.find('\n', start);
        if (end == std::string_view::npos) end = jsonl.size();
        ++lineno;
        auto line = jsonl.substr(start, end - start);
        start = end + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == jsonl.size()) break;
            continue;
        }
        json j = json::parse(line.begin(), line.end(), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw FormatError("line " + std::to_string(lineno), "malformed JSON record");
        fn(j, lineno);
        if (end == jsonl.size()) break;
    }
}

std::string require_string(const json& j, const char* field) {
    const auto it = j.find(field);
    if (it == j.end() || !it->is_string()) throw FormatError(field, "missing or not a string");
    return it->get<std::string>();
}

int require_int(const json& j, const char* field) {
    const auto it = j.find(field);
    if (it == j.end() || !it->is_number_integer()) throw FormatError(field, "missing or not an integer");
    return it->get<int>();
}

AstNode code_or_ast(const json& j, const std::string& id) {
    if (const auto a = j.find("ast"); a != j.end()) {
        AstNode node = ast_from_json(*a);
        if (auto problem = validate(node)) throw FormatError("ast", id + ": " + *problem);
        return node;
    }
    if (const auto c = j.find("code"); c != j.end()) {
        if (!c->is_string()) throw FormatError("code", id + ": expected string");
        try {
            return parse_mini(c->get<std::string>());
        } catch (const SyntaxError& e) {
            throw FormatError("code", id + ": " + e.what());
        }
    }
    throw FormatError("ast", id + ": record has neither 'ast' nor 'code'");
}

std::vector<BugWarning> warnings_of(const json& j) {
    std::vector<BugWarning> out;
    if (const auto w = j.find("warnings"); w != j.end() && !w->is_null()) {
        if (!w->is_array()) throw FormatError("warnings", "expected array");
        for (const auto& item : *w) out.push_back(warning_from_json(item));
    }
    return out;
}

std::optional<std::string> pattern_of(const json& j) {
    if (const auto p = j.find("pattern"); p != j.end() && !p->is_null()) {
        if (!p->is_string()) throw FormatError("pattern", "expected string or null");
        return p->get<std::string>();
    }
    return std::nullopt;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("path", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Bug-report documents

std::vector<BugReportDoc> parse_report_docs(std::string_view jsonl) {
    std::vector<BugReportDoc> docs;
    std::set<std::string> seen;
    for_each_record(jsonl, [&](const json& j, int) {
        BugReportDoc d;
        d.id = require_string(j, "id");
        d.text = require_string(j, "text");
        if (d.text.empty()) throw FormatError("text", d.id + ": empty text");
        const std::string label = require_string(j, "label");
        if (label == "bug") d.label = ReportLabel::Bug;
        else if (label == "non-bug") d.label = ReportLabel::NonBug;
        else throw FormatError("label", d.id + ": expected 'bug' or 'non-bug'");
        if (!seen.insert(d.id).second) throw FormatError("id", "duplicate id " + d.id);
        docs.push_back(std::move(d));
    });
    return docs;
}

std::vector<BugReportDoc> load_report_docs(const std::filesystem::path& path) {
    return parse_report_docs(read_file(path));
}

std::string report_docs_to_jsonl(const std::vector<BugReportDoc>& docs) {
    std::string out;
    for (const auto& d : docs)
        out += json{{"id", d.id}, {"text", d.text}, {"label", d.label == ReportLabel::Bug ? "bug" : "non-bug"}}.dump() +
               "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Classification corpus

ClassificationCorpus parse_classification_corpus(std::string_view jsonl) {
    ClassificationCorpus corpus;
    bool have_header = false;
    std::vector<std::string> bad;
    for_each_record(jsonl, [&](const json& j, int) {
        if (!have_header) {
            corpus.classes = require_int(j, "classes");
            if (corpus.classes <= 0) throw FormatError("classes", "must be positive");
            have_header = true;
            return;
        }
        ClassificationSample s;
        s.id = require_string(j, "id");
        s.label = require_int(j, "label");
        s.ast = code_or_ast(j, s.id);
        s.warnings = warnings_of(j);
        s.pattern = pattern_of(j);
        if (s.label < 0 || s.label >= corpus.classes) bad.push_back(s.id);
        corpus.samples.push_back(std::move(s));
    });
    if (!have_header) throw FormatError("classes", "missing header line");
    if (!bad.empty()) throw LabelRangeError(std::move(bad));
    return corpus;
}

ClassificationCorpus load_classification_corpus(const std::filesystem::path& path) {
    return parse_classification_corpus(read_file(path));
}

std::string classification_corpus_to_jsonl(const ClassificationCorpus& corpus) {
    std::string out = json{{"classes", corpus.classes}}.dump() + "\n";
    for (const auto& s : corpus.samples) {
        json j;
        j["id"] = s.id;
        j["label"] = s.label;
        j["ast"] = ast_to_json(s.ast);
        json ws = json::array();
        for (const auto& w : s.warnings) ws.push_back(warning_to_json(w));
        j["warnings"] = std::move(ws);
        j["pattern"] = s.pattern ? json(*s.pattern) : json(nullptr);
        out += j.dump() + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Clone corpus

std::string_view to_string(CloneType t) {
    switch (t) {
        case CloneType::T1: return "T1";
        case CloneType::T2: return "T2";
        case CloneType::ST3: return "ST3";
        case CloneType::MT3: return "MT3";
        case CloneType::T4: return "T4";
        case CloneType::None: return "NONE";
    }
    return "NONE";
}

std::optional<CloneType> parse_clone_type(std::string_view s) {
    if (s.starts_with("BCB-")) s.remove_prefix(4);
    if (s == "T1") return CloneType::T1;
    if (s == "T2") return CloneType::T2;
    if (s == "ST3") return CloneType::ST3;
    if (s == "MT3") return CloneType::MT3;
    if (s == "T4") return CloneType::T4;
    if (s == "NONE") return CloneType::None;
    return std::nullopt;
}

std::map<CloneType, std::vector<ClonePair>> CloneCorpus::by_type() const {
    std::map<CloneType, std::vector<ClonePair>> groups;
    for (const auto& p : pairs) groups[p.clone_type].push_back(p);
    return groups;
}

std::map<std::string, CodeUnit> parse_code_store(std::string_view jsonl) {
    std::map<std::string, CodeUnit> store;
    for_each_record(jsonl, [&](const json& j, int) {
        CodeUnit u;
        u.id = require_string(j, "id");
        u.ast = code_or_ast(j, u.id);
        u.warnings = warnings_of(j);
        u.pattern = pattern_of(j);
        if (const auto l = j.find("label"); l != j.end() && !l->is_null()) {
            if (!l->is_number_integer()) throw FormatError("label", u.id + ": expected integer");
            u.label = l->get<int>();
        }
        const std::string id = u.id;
        if (!store.emplace(id, std::move(u)).second) throw FormatError("id", "duplicate id " + id);
    });
    return store;
}

std::vector<ClonePair> parse_clone_pairs(std::string_view jsonl) {
    std::vector<ClonePair> pairs;
    for_each_record(jsonl, [&](const json& j, int lineno) {
        ClonePair p;
        p.id_a = require_string(j, "id1");
        p.id_b = require_string(j, "id2");
        p.label = require_int(j, "label");
        if (p.label != 0 && p.label != 1) throw FormatError("label", "line " + std::to_string(lineno) + ": expected 0 or 1");
        const std::string type = j.contains("type") && j["type"].is_string() ? j["type"].get<std::string>() : "NONE";
        const auto t = parse_clone_type(type);
        if (!t) throw FormatError("type", "line " + std::to_string(lineno) + ": unknown clone type " + type);
        p.clone_type = *t;
        if (p.label == 0) p.clone_type = CloneType::None;
        if (p.label == 1 && p.clone_type == CloneType::None)
            throw FormatError("type", "line " + std::to_string(lineno) + ": positive pair without clone type");
        if (const auto g = j.find("group"); g != j.end() && g->is_string()) {
            const auto gt = parse_clone_type(g->get<std::string>());
            if (!gt) throw FormatError("group", "line " + std::to_string(lineno) + ": unknown stratum");
            if (*gt != CloneType::None) p.stratum = *gt;
        }
        pairs.push_back(std::move(p));
    });
    return pairs;
}

CloneCorpus make_clone_corpus(std::map<std::string, CodeUnit> store, std::vector<ClonePair> pairs) {
    std::vector<std::string> dangling;
    std::set<std::string> reported;
    for (const auto& p : pairs) {
        for (const auto* id : {&p.id_a, &p.id_b}) {
            if (!store.contains(*id) && reported.insert(*id).second) dangling.push_back(*id);
        }
    }
    if (!dangling.empty()) throw DanglingIdError(std::move(dangling));
    return CloneCorpus{std::move(store), std::move(pairs)};
}

CloneCorpus load_clone_corpus(const std::filesystem::path& code_path, const std::filesystem::path& pair_path) {
    return make_clone_corpus(parse_code_store(read_file(code_path)), parse_clone_pairs(read_file(pair_path)));
}

std::string code_store_to_jsonl(const std::map<std::string, CodeUnit>& store) {
    std::string out;
    for (const auto& [id, u] : store) {
        json j;
        j["id"] = id;
        j["ast"] = ast_to_json(u.ast);
        if (!u.warnings.empty()) {
            json ws = json::array();
            for (const auto& w : u.warnings) ws.push_back(warning_to_json(w));
            j["warnings"] = std::move(ws);
        }
        if (u.pattern) j["pattern"] = *u.pattern;
        if (u.label >= 0) j["label"] = u.label;
        out += j.dump() + "\n";
    }
    return out;
}

std::string clone_pairs_to_jsonl(const std::vector<ClonePair>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        json j;
        j["id1"] = p.id_a;
        j["id2"] = p.id_b;
        j["label"] = p.label;
        j["type"] = std::string(to_string(p.clone_type));
        if (p.stratum) j["group"] = std::string(to_string(*p.stratum));
        out += j.dump() + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pattern corpus

std::vector<PatternSample> parse_pattern_corpus(std::string_view jsonl) {
    std::vector<PatternSample> out;
    for_each_record(jsonl, [&](const json& j, int) {
        PatternSample s;
        s.id = require_string(j, "id");
        s.ast = code_or_ast(j, s.id);
        s.pattern = require_string(j, "pattern");
        out.push_back(std::move(s));
    });
    return out;
}

std::vector<PatternSample> load_pattern_corpus(const std::filesystem::path& path) {
    return parse_pattern_corpus(read_file(path));
}

// ---------------------------------------------------------------------------

std::size_t attach_warnings(std::vector<ClassificationSample>& samples, const std::vector<BugWarning>& warnings) {
    std::size_t attached = 0;
    for (auto& s : samples) {
        std::set<std::string> names{s.id};
        preorder(s.ast, [&](const AstNode& n) {
            if (!n.is(kind::kClassDef)) return;
            for (const auto& c : n.children) {
                if (c.is(kind::kIdentifier)) {
                    names.insert(*c.token);
                    break;
                }
            }
        });
        for (const auto& w : warnings) {
            if (names.contains(w.class_name)) {
                s.warnings.push_back(w);
                ++attached;
            }
        }
    }
    return attached;
}

}  // namespace codectx::ingest
