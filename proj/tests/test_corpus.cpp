#include <gtest/gtest.h>

#include <filesystem>

#include "codectx/corpus.hpp"
#include "codectx/errors.hpp"
#include "codectx/mini_lang.hpp"

using namespace codectx;
using namespace codectx::ingest;

namespace {
const std::filesystem::path kFixtures = CODECTX_FIXTURE_DIR;

std::string bug_instance(int i, const std::string& category = "CORRECTNESS") {
    return "<BugInstance type=\"T" + std::to_string(i) + "\" priority=\"" + std::to_string(1 + i % 3) +
           "\" category=\"" + category + "\"><Class classname=\"C" + std::to_string(i) +
           "\"/><Method name=\"m\"/><SourceLine start=\"" + std::to_string(i) + "\" end=\"" +
           std::to_string(i + 2) + "\"/><LongMessage>msg " + std::to_string(i) + "</LongMessage></BugInstance>";
}
}  // namespace

TEST(AstRecord, DirectMapping) {
    const AstNode n =
        load_ast_record(R"({"kind":"Return","token":null,"children":[{"kind":"Literal","token":"1","children":[]}]})");
    EXPECT_EQ(node_count(n), 2u);
    EXPECT_EQ(n.kind, "Return");
    EXPECT_EQ(n.children[0].token, std::optional<std::string>("1"));
}

TEST(AstRecord, MissingKindNamesField) {
    try {
        load_ast_record(R"({"token":null,"children":[]})");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.field(), "kind");
    }
    try {
        load_ast_record(R"({"kind":"Return","children":[{"token":"1"}]})");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.field(), "kind");
    }
    EXPECT_THROW(load_ast_record("{not json"), FormatError);
    EXPECT_THROW(load_ast_record(R"({"kind":"Return","children":{}})"), FormatError);
}

TEST(AstRecord, RoundTripOfParsedTree) {
    const AstNode parsed = parse_mini("int f(){return 1;}");
    const std::string bytes = serialize_ast(parsed);
    EXPECT_EQ(load_ast_record(bytes), parsed);
    EXPECT_EQ(serialize_ast(load_ast_record(bytes)), bytes);
}

TEST(Warnings, FigureMessage) {
    const std::string xml = R"(<BugCollection>
  <BugInstance type="EC_UNRELATED_CLASS_AND_INTERFACE" priority="1" category="CORRECTNESS">
    <Class classname="Name"/>
    <Method name="allEmpty"/>
    <SourceLine start="3" end="7"/>
    <LongMessage>call to equals() comparing unrelated class and interface</LongMessage>
  </BugInstance>
</BugCollection>)";
    const auto ws = load_warnings(xml);
    ASSERT_EQ(ws.size(), 1u);
    EXPECT_EQ(ws[0].message, "call to equals() comparing unrelated class and interface");
    EXPECT_EQ(ws[0].category, "CORRECTNESS");
    EXPECT_EQ(ws[0].priority, 1);
    EXPECT_EQ(ws[0].class_name, "Name");
    EXPECT_EQ(ws[0].method_name, std::optional<std::string>("allEmpty"));
    EXPECT_EQ(ws[0].line_start, 3);
    EXPECT_EQ(ws[0].line_end, 7);
}

TEST(Warnings, EmptyAndLargeCollections) {
    EXPECT_TRUE(load_warnings("<BugCollection></BugCollection>").empty());
    std::string xml = "<BugCollection>";
    for (int i = 0; i < 103; ++i) xml += bug_instance(i);
    xml += "</BugCollection>";
    const auto ws = load_warnings(xml);
    ASSERT_EQ(ws.size(), 103u);
    for (int i = 0; i < 103; ++i) EXPECT_EQ(ws[static_cast<std::size_t>(i)].class_name, "C" + std::to_string(i));
}

TEST(Warnings, UnknownCategoryKeptAsUnknown) {
    const auto ws = load_warnings("<BugCollection>" + bug_instance(1, "NOVEL") + "</BugCollection>");
    ASSERT_EQ(ws.size(), 1u);
    EXPECT_EQ(ws[0].category, "UNKNOWN");
}

TEST(Warnings, MalformedInputs) {
    EXPECT_THROW(load_warnings("<BugCollection><BugInstance></BugCollection>"), FormatError);
    EXPECT_THROW(load_warnings("<Other/>"), FormatError);
    EXPECT_THROW(load_warnings(R"(<BugCollection><BugInstance priority="7"/></BugCollection>)"), FormatError);
    EXPECT_THROW(
        load_warnings(R"(<BugCollection><BugInstance priority="1"><SourceLine start="9" end="2"/></BugInstance></BugCollection>)"),
        FormatError);
}

TEST(Warnings, XmlWriterRoundTrip) {
    std::string xml = "<BugCollection>";
    for (int i = 0; i < 5; ++i) xml += bug_instance(i, i == 2 ? "STYLE" : "SECURITY");
    xml += "</BugCollection>";
    const auto ws = load_warnings(xml);
    EXPECT_EQ(load_warnings(warnings_to_xml(ws)), ws);
}

TEST(ClassificationCorpus, ToyFixture) {
    const auto corpus = load_classification_corpus(kFixtures / "toy_classify.jsonl");
    EXPECT_EQ(corpus.classes, 4);
    ASSERT_EQ(corpus.samples.size(), 20u);
    EXPECT_EQ(corpus.samples.front().id, "p00");
    EXPECT_EQ(corpus.samples.back().id, "p34");
    int empty = 0;
    for (const auto& s : corpus.samples) {
        EXPECT_LT(s.label, corpus.classes);
        empty += s.warnings.empty();
    }
    // Half of the programs carry no warnings.
    EXPECT_EQ(empty, 10);
}

TEST(ClassificationCorpus, LabelRange) {
    const std::string text = "{\"classes\":104}\n"
                             "{\"id\":\"a\",\"label\":103,\"code\":\"int f(){return 1;}\"}\n"
                             "{\"id\":\"b\",\"label\":104,\"code\":\"int f(){return 1;}\"}\n"
                             "{\"id\":\"c\",\"label\":-1,\"code\":\"int f(){return 1;}\"}\n";
    try {
        parse_classification_corpus(text);
        FAIL();
    } catch (const LabelRangeError& e) {
        EXPECT_EQ(e.ids(), (std::vector<std::string>{"b", "c"}));
    }
}

TEST(ClassificationCorpus, FormatErrors) {
    EXPECT_THROW(parse_classification_corpus(""), FormatError);
    EXPECT_THROW(parse_classification_corpus("{\"classes\":2}\n{\"id\":\"a\",\"label\":0}\n"), FormatError);
    EXPECT_THROW(parse_classification_corpus("{\"classes\":2}\n{\"id\":\"a\",\"label\":0,\"code\":\"int f({\"}\n"),
                 FormatError);
}

TEST(ClassificationCorpus, SerializationRoundTrip) {
    const auto corpus = load_classification_corpus(kFixtures / "toy_classify.jsonl");
    const auto again = parse_classification_corpus(classification_corpus_to_jsonl(corpus));
    ASSERT_EQ(again.samples.size(), corpus.samples.size());
    for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
        EXPECT_EQ(again.samples[i].ast, corpus.samples[i].ast);
        EXPECT_EQ(again.samples[i].warnings, corpus.samples[i].warnings);
    }
}

TEST(CloneCorpus, Fixture) {
    const auto corpus = load_clone_corpus(kFixtures / "clone_code.jsonl", kFixtures / "clone_pairs.jsonl");
    EXPECT_EQ(corpus.store.size(), 10u);
    EXPECT_EQ(corpus.pairs.size(), 5u);
    const auto groups = corpus.by_type();
    EXPECT_EQ(groups.size(), 5u);
    for (CloneType t : kPositiveCloneTypes) {
        ASSERT_TRUE(groups.contains(t));
        EXPECT_FALSE(groups.at(t).empty());
    }
}

TEST(CloneCorpus, DanglingIds) {
    auto store = parse_code_store(read_file(kFixtures / "clone_code.jsonl"));
    auto pairs = parse_clone_pairs("{\"id1\":\"c0\",\"id2\":\"x9\",\"label\":0,\"type\":\"NONE\"}\n");
    try {
        make_clone_corpus(std::move(store), std::move(pairs));
        FAIL();
    } catch (const DanglingIdError& e) {
        EXPECT_EQ(e.ids(), std::vector<std::string>{"x9"});
    }
}

TEST(ReportDocs, ParseAndValidate) {
    const auto docs = parse_report_docs(
        "{\"id\":\"r1\",\"text\":\"Null pointer crash\",\"label\":\"bug\"}\n"
        "{\"id\":\"r2\",\"text\":\"Please add docs\",\"label\":\"non-bug\"}\n");
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[1].label, ReportLabel::NonBug);
    EXPECT_THROW(parse_report_docs("{\"id\":\"r1\",\"text\":\"\",\"label\":\"bug\"}\n"), FormatError);
    EXPECT_THROW(parse_report_docs("{\"id\":\"r1\",\"text\":\"a\",\"label\":\"bug\"}\n"
                                   "{\"id\":\"r1\",\"text\":\"b\",\"label\":\"bug\"}\n"),
                 FormatError);
}

TEST(AttachWarnings, JoinsByIdOrClassName) {
    ClassificationCorpus corpus;
    corpus.classes = 2;
    corpus.samples.push_back({"s1", parse_mini("class Foo { int x; }"), 0, {}, std::nullopt});
    corpus.samples.push_back({"s2", parse_mini("int f(){return 1;}"), 1, {}, std::nullopt});
    BugWarning a;
    a.class_name = "Foo";
    BugWarning b;
    b.class_name = "s2";
    BugWarning c;
    c.class_name = "Nope";
    EXPECT_EQ(attach_warnings(corpus.samples, {a, b, c}), 2u);
    EXPECT_EQ(corpus.samples[0].warnings.size(), 1u);
    EXPECT_EQ(corpus.samples[1].warnings.size(), 1u);
}
