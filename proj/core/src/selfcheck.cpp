#include "codectx/selfcheck.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "codectx/bugs.hpp"
#include "codectx/encoder.hpp"
#include "codectx/kernels.hpp"
#include "codectx/mini_lang.hpp"
#include "codectx/synth.hpp"
#include "codectx/tasks.hpp"

namespace codectx::selfcheck {

namespace {

using nn::ParamSet;
using nn::Tensor;

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) { return nn::uniform_init(std::move(shape), 1.0, rng); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

const char* kProgram = "int f(int x){ int y = x * 2; while (y > 3) { y = y - x; } return y; }";

}  // namespace

nn::GradCheckResult grad_affine(std::uint64_t seed) {
    Rng rng(seed);
    ParamSet ps;
    ps.add("W", random_tensor({3, 4}, rng));
    ps.add("b", random_tensor({3}, rng));
    ps.add("x", random_tensor({4}, rng));
    const Tensor r = random_tensor({3}, rng);
    auto loss = [&](ParamSet& p) {
        const Tensor y = nn::affine(p.value("x"), p.value("W"), p.value("b"));
        const auto g = nn::affine_backward(p.value("x"), p.value("W"), r);
        nn::add_to(p.grad("W").values(), g.dW.values());
        nn::add_to(p.grad("b").values(), g.db.values());
        nn::add_to(p.grad("x").values(), g.dx.values());
        return dot(y.values(), r.values());
    };
    return nn::grad_check(loss, ps, kGradEps);
}

nn::GradCheckResult grad_gru_step(std::uint64_t seed) {
    Rng rng(seed);
    ParamSet ps;
    nn::add_gru_params(ps, "gru.", 3, 4, rng);
    ps.add("x", random_tensor({3}, rng));
    ps.add("h", random_tensor({4}, rng));
    const Tensor r = random_tensor({4}, rng);
    auto loss = [&](ParamSet& p) {
        const auto w = nn::GruView::bind(p, "gru.");
        auto g = nn::GruGradView::bind(p, "gru.");
        nn::GruCache cache;
        nn::gru_forward(w, p.value("x").values(), p.value("h").values(), cache);
        nn::gru_backward(w, cache, r.values(), g, p.grad("x").values(), p.grad("h").values());
        return dot(cache.h, r.values());
    };
    return nn::grad_check(loss, ps, kGradEps);
}

nn::GradCheckResult grad_max_pool(std::uint64_t seed) {
    Rng rng(seed);
    ParamSet ps;
    const char* names[] = {"a", "b", "c"};
    for (const char* n : names) ps.add(n, random_tensor({5}, rng));
    const Tensor r = random_tensor({5}, rng);
    auto loss = [&](ParamSet& p) {
        const auto pooled = nn::max_pool({p.value("a"), p.value("b"), p.value("c")});
        const auto g = nn::max_pool_backward(pooled, r, 3);
        for (std::size_t i = 0; i < 3; ++i) nn::add_to(p.grad(names[i]).values(), g[i].values());
        return dot(pooled.out.values(), r.values());
    };
    return nn::grad_check(loss, ps, kGradEps);
}

nn::GradCheckResult grad_softmax_xent(std::uint64_t seed) {
    Rng rng(seed);
    ParamSet ps;
    ps.add("z", random_tensor({5}, rng));
    auto loss = [&](ParamSet& p) {
        const auto r = nn::softmax_xent(p.value("z"), 2);
        nn::add_to(p.grad("z").values(), r.grad.values());
        return r.loss;
    };
    return nn::grad_check(loss, ps, kGradEps);
}

nn::GradCheckResult grad_encode_statement(std::uint64_t seed) {
    const auto ast = ingest::parse_mini(kProgram);
    const auto vocab = encode::Vocabulary::build({&ast}, 1);
    encode::EncoderConfig cfg;
    cfg.vocab_size = vocab.size();
    cfg.dim = 6;
    cfg.hidden = 5;
    cfg.rounds = 2;
    Rng rng(seed);
    ParamSet ps;
    encode::init_encoder_params(ps, cfg, rng);
    ps.value(encode::kBias) = nn::uniform_init({cfg.dim}, 0.3, rng);
    const auto stmt = encode::index_statement(encode::split_statements(ast)[1], vocab);
    const std::vector<encode::ContextVector> ctx = {
        {encode::Channel::Bug, 1, nn::uniform_init({cfg.dim}, 0.4, rng)}};
    const Tensor r = random_tensor({cfg.dim}, rng);
    auto loss = [&](ParamSet& p) {
        encode::StatementCache cache;
        const Tensor v = encode::encode_statement(stmt, ctx, p, cfg, &cache);
        encode::encode_statement_backward(cache, r, p, cfg);
        return dot(v.values(), r.values());
    };
    return nn::grad_check(loss, ps, kGradEps);
}

nn::GradCheckResult grad_encode_code(std::uint64_t seed) {
    Rng rng(seed);
    ParamSet ps;
    nn::add_gru_params(ps, encode::kGruFwd, 4, 3, rng);
    nn::add_gru_params(ps, encode::kGruBwd, 4, 3, rng);
    for (int i = 0; i < 3; ++i) ps.add("s" + std::to_string(i), random_tensor({4}, rng));
    const Tensor r = random_tensor({6}, rng);
    auto loss = [&](ParamSet& p) {
        const std::vector<Tensor> vecs = {p.value("s0"), p.value("s1"), p.value("s2")};
        encode::SequenceCache cache;
        const Tensor code = encode::encode_code(vecs, p, &cache);
        const auto d = encode::encode_code_backward(cache, r, p);
        for (int i = 0; i < 3; ++i) nn::add_to(p.grad("s" + std::to_string(i)).values(), d[i].values());
        return dot(code.values(), r.values());
    };
    return nn::grad_check(loss, ps, kGradEps);
}

nn::GradCheckResult grad_encoder_path(std::uint64_t seed) {
    ingest::ClassificationSample s;
    s.ast = ingest::parse_mini(kProgram);
    s.label = 1;
    ingest::BugWarning w;
    w.category = "STYLE";
    w.priority = 2;
    w.line_start = w.line_end = 1;
    s.warnings = {w};
    s.pattern = "SINGLETON";
    ingest::ClassificationCorpus data{3, {s}};

    tasks::TrainConfig cfg;
    cfg.dim = 5;
    cfg.hidden = 4;
    cfg.epochs = 0;
    cfg.seed = seed;
    tasks::ModelBundle b = tasks::train_task(data, tasks::Variant::RawBugs, cfg);
    b.variant = tasks::Variant::BugsAndPatterns;
    b.filter = bugs::BugFilterModel{};
    b.filter->threshold = 0.0;  // keep every warning
    const auto unit = tasks::prepare_unit(s.ast, s.warnings, s.pattern, b);

    auto loss = [&](ParamSet&) {
        tasks::UnitCache cache;
        const Tensor code = tasks::code_vector(unit, b, &cache);
        const auto x = nn::softmax_xent(nn::affine(code, b.params.value(tasks::kClsW), b.params.value(tasks::kClsB)),
                                        s.label);
        const auto g = nn::affine_backward(code, b.params.value(tasks::kClsW), x.grad);
        nn::add_to(b.params.grad(tasks::kClsW).values(), g.dW.values());
        nn::add_to(b.params.grad(tasks::kClsB).values(), g.db.values());
        tasks::code_vector_backward(cache, g.dx, b);
        return x.loss;
    };
    b.params.zero_grad();
    return nn::grad_check(loss, b.params, kGradEps);
}

// ---------------------------------------------------------------------------

namespace {

void walk_tokens(const ingest::AstNode& n, bool inside, std::vector<std::string>& out, std::size_t& compounds) {
    inside = inside || encode::is_statement_kind(n.kind);
    compounds += encode::is_compound_kind(n.kind);
    if (inside && n.token) out.push_back(*n.token);
    for (const auto& c : n.children) walk_tokens(c, inside, out, compounds);
}

std::size_t count(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
        n += std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<long>(i));
    return n;
}

std::vector<std::string> words(const std::string& gram) {
    std::vector<std::string> out;
    std::istringstream in(gram);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

}  // namespace

std::size_t split_mismatches(std::size_t programs, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < programs; ++i) {
        const auto ast = synth::random_program(static_cast<int>(rng.below(synth::kSkeletonCount)), rng);
        std::vector<std::string> emitted, expected;
        std::size_t markers = 0, compounds = 0;
        for (const auto& t : encode::split_statements(ast)) {
            if (t.is_end_block()) ++markers;
            else for (auto& tok : ingest::preorder_tokens(t.root)) emitted.push_back(tok);
        }
        walk_tokens(ast, false, expected, compounds);
        bad += emitted != expected || markers != compounds;
    }
    return bad;
}

std::size_t ngram_mismatches(std::size_t docs, std::size_t length, std::uint64_t seed) {
    const bugs::Tokens alphabet = {"null", "pointer", "leak", "stream", "loop", "index", "crash", "value"};
    Rng rng(seed);
    std::vector<bugs::Tokens> corpus(docs);
    for (auto& d : corpus)
        for (std::size_t i = 0; i < length; ++i) d.push_back(alphabet[rng.below(alphabet.size())]);
    const auto vocab = bugs::build_ngram_vocab(corpus, 3, 2);

    std::size_t bad = 0;
    std::set<std::vector<std::string>> frequent;
    for (const auto& d : corpus) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (std::size_t s = 0; s + n <= d.size(); ++s) {
                std::vector<std::string> g(d.begin() + static_cast<long>(s), d.begin() + static_cast<long>(s + n));
                std::size_t df = 0;
                for (const auto& e : corpus) df += count(e, g) > 0;
                if (df >= 2) frequent.insert(g);
            }
        }
    }
    bad += frequent.size() != vocab.size();
    for (std::size_t i = 0; i < vocab.size(); ++i) bad += !frequent.contains(words(vocab.grams[i]));
    for (const auto& d : corpus) {
        const auto m = bugs::featurize(d, vocab);
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            const auto c = static_cast<double>(count(d, words(vocab.grams[i])));
            const auto it = m.find(i);
            bad += (it == m.end() ? 0.0 : it->second) != c;
        }
    }
    return bad;
}

std::size_t symmetry_mismatches(std::size_t pairs, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t n = 1 + rng.below(32);
        const tasks::CloneHead head{nn::uniform_init({n}, 3.0, rng), rng.normal(), 0.5};
        const Tensor a = nn::uniform_init({n}, 5.0, rng), b = nn::uniform_init({n}, 5.0, rng);
        bad += tasks::clone_score(a, b, head) != tasks::clone_score(b, a, head);
    }
    return bad;
}

std::vector<CheckResult> run_all() {
    std::vector<CheckResult> out;
    auto grad = [&](const char* name, nn::GradCheckResult r) {
        std::ostringstream d;
        d << "max rel error " << r.max_rel_error << " at " << r.worst_param << "[" << r.worst_index << "]";
        out.push_back({name, r.max_rel_error < kGradTolerance, d.str()});
    };
    auto oracle = [&](const char* name, std::size_t mismatches) {
        out.push_back({name, mismatches == 0, std::to_string(mismatches) + " mismatches"});
    };
    grad("affine", grad_affine(1));
    grad("gru_step", grad_gru_step(2));
    grad("max_pool", grad_max_pool(3));
    grad("softmax_xent", grad_softmax_xent(4));
    grad("encode_statement", grad_encode_statement(5));
    grad("encode_code", grad_encode_code(6));
    grad("encoder_path", grad_encoder_path(7));
    oracle("split_statements", split_mismatches(50, 8));
    oracle("ngram_vocab", ngram_mismatches(10, 50, 9));
    oracle("clone_symmetry", symmetry_mismatches(1000, 10));
    return out;
}

}  // namespace codectx::selfcheck
