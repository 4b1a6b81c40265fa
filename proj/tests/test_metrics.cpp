#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rex/error.hpp"
#include "rex/metrics.hpp"
#include "rex/rerank.hpp"
#include "test_helpers.hpp"

using namespace rex;

namespace {

/// Maps each distinct token to its own axis; everything is orthogonal.
class OneHotProvider final : public metrics::EmbeddingProvider {
public:
    explicit OneHotProvider(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {}
    std::size_t dimensionality() const override { return vocab_.size(); }
    std::vector<double> embed(std::string_view token) const override {
        std::vector<double> v(vocab_.size(), 0.0);
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            if (vocab_[i] == token) v[i] = 1.0;
        }
        return v;
    }

private:
    std::vector<std::string> vocab_;
};

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("ndcg: ideal ordering scores exactly 1") {
    std::map<std::string, int> rel{{"a", 9}, {"b", 7}, {"c", 3}, {"d", 0}};
    CHECK(metrics::ndcg_at_k({"a", "b", "c", "d"}, rel, 4) == 1.0);
    CHECK(metrics::ndcg_at_k({"a", "b", "c", "d"}, rel, 2) == 1.0);
}

TEST_CASE("ndcg: reversed two-item hand value") {
    std::map<std::string, int> rel{{"a", 9}, {"b", 0}};
    const double got = metrics::ndcg_at_k({"b", "a"}, rel, 2);
    // DCG = 0 + 9/log2(3), IDCG = 9
    CHECK(got == doctest::Approx(9.0 / std::log2(3.0) / 9.0).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.6309297535714574).epsilon(1e-9));
}

TEST_CASE("ndcg: k beyond the list length truncates gracefully") {
    std::map<std::string, int> rel{{"a", 3}, {"b", 5}};
    CHECK(metrics::ndcg_at_k({"b", "a"}, rel, 100) == 1.0);
}

TEST_CASE("ndcg: all-zero relevance defines 0, unknown id throws") {
    std::map<std::string, int> rel{{"a", 0}, {"b", 0}};
    CHECK(metrics::ndcg_at_k({"a", "b"}, rel, 2) == 0.0);
    CHECK_THROWS_AS(metrics::ndcg_at_k({"a", "zz"}, rel, 2), ValidationError);
}

TEST_CASE("ndcg matches the direct-formula oracle on random instances") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t len = 1 + rng() % 10;
        std::map<std::string, int> rel;
        std::vector<std::string> order;
        std::vector<int> gains;
        for (std::size_t i = 0; i < len; ++i) {
            const std::string id = "i" + std::to_string(i);
            const int g = static_cast<int>(rng() % 10);
            rel[id] = g;
            order.push_back(id);
            gains.push_back(g);
        }
        for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{10}}) {
            CHECK(metrics::ndcg_at_k(order, rel, k) ==
                  doctest::Approx(oracle::ndcg_direct(gains, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("ndcg ignores permutations strictly below the cutoff") {
    std::map<std::string, int> rel{{"a", 9}, {"b", 7}, {"c", 3}, {"d", 2}, {"e", 1}};
    const double base = metrics::ndcg_at_k({"a", "b", "c", "d", "e"}, rel, 2);
    const double swapped = metrics::ndcg_at_k({"a", "b", "e", "d", "c"}, rel, 2);
    CHECK(base == swapped);
}

TEST_CASE("bleu identity and empty candidate") {
    const std::vector<std::string> tokens = {"the", "cat", "sat", "down"};
    CHECK(metrics::bleu(tokens, tokens) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(metrics::bleu({}, tokens) == 0.0);
    CHECK(metrics::bleu({"zebra"}, tokens) == 0.0);
}

TEST_CASE("bleu short-candidate hand value") {
    // p1 = 2/2, p2 = 1/1, brevity = exp(1 - 3/2)
    const double got = metrics::bleu({"the", "cat"}, {"the", "cat", "sat"});
    CHECK(got == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.6065306597126334).epsilon(1e-9));
}

TEST_CASE("bleu add-1 smoothing only triggers for n >= 2 zeros") {
    // unigrams overlap, bigrams do not
    const double got = metrics::bleu({"the", "dog"}, {"dog", "the"}, 2);
    // p1 = 2/2 = 1, p2 smoothed to 1/(1+1); BP = 1
    CHECK(got == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("rouge_l identities and hand value") {
    const std::vector<std::string> same = {"a", "b", "c"};
    const auto identical = metrics::rouge_l(same, same);
    CHECK(identical.precision == 1.0);
    CHECK(identical.recall == 1.0);
    CHECK(identical.f1 == 1.0);

    const auto r = metrics::rouge_l({"the", "cat", "sat"}, {"the", "cat", "ran"});
    CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const auto disjoint = metrics::rouge_l({"x", "y"}, {"p", "q"});
    CHECK(disjoint.f1 == 0.0);
}

TEST_CASE("rouge_l LCS agrees with the recursive oracle") {
    std::mt19937_64 rng(5);
    const auto vocab = test::random_vocab(rng, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> a, b;
        for (std::size_t i = 0, n = 1 + rng() % 12; i < n; ++i) a.push_back(vocab[rng() % 6]);
        for (std::size_t i = 0, n = 1 + rng() % 12; i < n; ++i) b.push_back(vocab[rng() % 6]);
        const auto got = metrics::rouge_l(a, b);
        const double lcs = static_cast<double>(oracle::lcs_length(a, b));
        if (lcs == 0.0) {
            CHECK(got.f1 == 0.0);
        } else {
            CHECK(got.precision == doctest::Approx(lcs / a.size()).epsilon(1e-12));
            CHECK(got.recall == doctest::Approx(lcs / b.size()).epsilon(1e-12));
        }
    }
}

TEST_CASE("cosine similarity identities") {
    CHECK(metrics::cosine_similarity("carbon flux data", "carbon flux data") ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(metrics::cosine_similarity("", "carbon"), ValidationError);
    CHECK_THROWS_AS(metrics::cosine_similarity("...", "carbon"), ValidationError);

    OneHotProvider onehot({"alpha", "beta"});
    CHECK(metrics::cosine_similarity("alpha", "beta", onehot) == 0.0);
}

TEST_CASE("cosine similarity equals a separate mean-pool recomputation") {
    const std::string a = "carbon flux measurements over grassland";
    const std::string b = "carbon dataset with flux values";
    const auto& provider = metrics::default_embedding_provider();

    const auto ta = retrieval::tokenize(a);
    const auto tb = retrieval::tokenize(b);
    std::vector<double> ea(provider.dimensionality(), 0.0), eb(provider.dimensionality(), 0.0);
    for (const auto& t : ta) {
        const auto e = provider.embed(t);
        for (std::size_t i = 0; i < ea.size(); ++i) ea[i] += e[i] / ta.size();
    }
    for (const auto& t : tb) {
        const auto e = provider.embed(t);
        for (std::size_t i = 0; i < eb.size(); ++i) eb[i] += e[i] / tb.size();
    }
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        dot += ea[i] * eb[i];
        na += ea[i] * ea[i];
        nb += eb[i] * eb[i];
    }
    const double expect = dot / (std::sqrt(na) * std::sqrt(nb));
    CHECK(metrics::cosine_similarity(a, b) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(metrics::cosine_similarity(a, b) >= 0.0);  // non-negative default provider
    CHECK(metrics::cosine_similarity(a, b) <= 1.0);
}

TEST_CASE("cosine similarity is symmetric and scale invariant") {
    struct Scaled final : metrics::EmbeddingProvider {
        double factor;
        explicit Scaled(double f) : factor(f) {}
        std::size_t dimensionality() const override {
            return metrics::default_embedding_provider().dimensionality();
        }
        std::vector<double> embed(std::string_view token) const override {
            auto v = metrics::default_embedding_provider().embed(token);
            for (double& x : v) x *= factor;
            return v;
        }
    };
    const std::string a = "ocean temperature buoy";
    const std::string b = "ocean salinity sensor";
    CHECK(metrics::cosine_similarity(a, b) == metrics::cosine_similarity(b, a));
    Scaled big(7.5);
    CHECK(metrics::cosine_similarity(a, b, big) ==
          doctest::Approx(metrics::cosine_similarity(a, b)).epsilon(1e-12));
}

TEST_CASE("bertscore identities and brute-force toy case") {
    const std::vector<std::string> same = {"carbon", "flux"};
    CHECK(metrics::bertscore_f1(same, same) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(metrics::bertscore_f1({}, same), ValidationError);

    OneHotProvider onehot({"a", "b", "c", "d"});
    CHECK(metrics::bertscore_f1({"a", "b"}, {"c", "d"}, onehot) == 0.0);

    // 3-token toy case against a direct max-cosine matching computation
    const std::vector<std::string> cand = {"a", "b", "c"};
    const std::vector<std::string> ref = {"a", "d", "c"};
    // precision: a->1, b->0, c->1 => 2/3; recall: a->1, d->0, c->1 => 2/3
    CHECK(metrics::bertscore_f1(cand, ref, onehot) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("evaluate_run: oracle system gets all ones") {
    const auto data = corpus::load_dataset(test::fixture_path("rankings_10.jsonl"));
    std::vector<std::pair<rerank::RerankedList, corpus::ExpertRanking>> paired;
    for (const auto& ranking : data) {
        auto judged = ranking.judged;
        std::sort(judged.begin(), judged.end(), [](const auto& a, const auto& b) {
            if (a.relevance != b.relevance) return a.relevance > b.relevance;
            return a.item.id < b.item.id;
        });
        rerank::RerankedList list;
        list.query = ranking.query;
        for (std::size_t i = 0; i < judged.size(); ++i) {
            list.entries.push_back(
                {judged[i].item, static_cast<double>(10 - i), static_cast<int>(i + 1)});
        }
        paired.emplace_back(std::move(list), ranking);
    }
    const auto report = metrics::evaluate_run(paired);
    CHECK(report.ndcg5 == 1.0);
    CHECK(report.ndcg10 == 1.0);
    CHECK(report.cosine == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.bertscore == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.bleu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.rouge_l == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.per_query.size() == 10);
}

TEST_CASE("evaluate_run: single reversed two-item query composes ndcg example") {
    corpus::ExpertRanking truth;
    truth.query = test::make_query("q", "carbon");
    truth.judged.push_back({test::make_item("a", "carbon summary"), 9});
    truth.judged.push_back({test::make_item("b", "other text"), 0});

    rerank::RerankedList list;
    list.query = truth.query;
    list.entries.push_back({truth.judged[1].item, 2.0, 1});
    list.entries.push_back({truth.judged[0].item, 1.0, 2});

    const auto report = metrics::evaluate_run({{list, truth}});
    CHECK(report.ndcg5 == doctest::Approx(0.6309297535714574).epsilon(1e-9));
    CHECK(report.ndcg10 == doctest::Approx(0.6309297535714574).epsilon(1e-9));

    CHECK_THROWS_AS(metrics::evaluate_run({}), ValidationError);
}

TEST_CASE("report csv is table-shaped") {
    metrics::MetricReport r;
    r.ndcg5 = 0.5;
    r.ndcg10 = 0.6;
    r.cosine = 0.7;
    r.bertscore = 0.8;
    r.bleu = 0.25;
    r.rouge_l = 0.3;
    const auto csv = metrics::report_csv({{"BM25", r}});
    CHECK(csv.find("Model,NDCG@5,NDCG@10,Cos. Sim.,BERTScore,BLEU,Rouge-L\n") == 0);
    CHECK(csv.find("BM25,0.500000,0.600000,0.700000,0.800000,0.250000,0.300000\n") !=
          std::string::npos);
}

TEST_CASE("metrics are invariant under item id relabeling") {
    std::map<std::string, int> rel{{"a", 4}, {"b", 8}, {"c", 1}};
    std::map<std::string, int> relabeled{{"x", 4}, {"y", 8}, {"z", 1}};
    CHECK(metrics::ndcg_at_k({"b", "a", "c"}, rel, 3) ==
          metrics::ndcg_at_k({"y", "x", "z"}, relabeled, 3));
}

}  // TEST_SUITE
