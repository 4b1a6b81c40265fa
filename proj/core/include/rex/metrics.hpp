#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rex::corpus {
struct ExpertRanking;
}
namespace rex::rerank {
struct RerankedList;
}

namespace rex::metrics {

/// Deterministic token -> vector encoder. Implementations must return the
/// same vector for the same token, with a fixed dimensionality.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimensionality() const = 0;
    virtual std::vector<double> embed(std::string_view token) const = 0;
};

/// Hermetic default: seeded hashed bag of character trigrams. Entries are
/// non-negative counts, so pairwise cosines land in [0, 1]. No external
/// model is involved; plug a real encoder through EmbeddingProvider when
/// semantic quality matters.
class HashedNgramEmbedding final : public EmbeddingProvider {
public:
    explicit HashedNgramEmbedding(std::size_t dim = 64, std::uint64_t seed = 0x7ea7c0de);

    std::size_t dimensionality() const override { return dim_; }
    std::vector<double> embed(std::string_view token) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Shared default provider instance (dim 64, fixed seed).
const EmbeddingProvider& default_embedding_provider();

double cosine(const std::vector<double>& a, const std::vector<double>& b);  // 0 on zero norm
std::vector<double> mean_embedding(const std::vector<std::string>& tokens,
                                   const EmbeddingProvider& provider);

/// NDCG@k with linear gain: DCG@k = sum_{p=1..k} rel_p / log2(p+1),
/// normalized by the ideal ordering of the same items. Linear gain is
/// deliberate: grades run 0-9 and exponential gains would let a single 9
/// dwarf everything else. Returns 0 when every item is irrelevant. Throws
/// ValidationError for ids missing from the relevance map.
double ndcg_at_k(const std::vector<std::string>& system_order,
                 const std::map<std::string, int>& relevance, std::size_t k);

/// BLEU with clipped n-gram precisions (n up to max_n, capped at the
/// candidate length), brevity penalty, and add-1 smoothing applied only to
/// zero counts of order >= 2. Unigram precision 0 means BLEU 0. Empty
/// candidate scores 0.
double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::string>& reference, std::size_t max_n = 4);

struct RougeL {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Longest-common-subsequence precision/recall/F1.
RougeL rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

/// Mean-pooled token embeddings compared by cosine. Throws ValidationError
/// when either text tokenizes to nothing; a zero-norm mean yields 0.
double cosine_similarity(const std::string& text_a, const std::string& text_b,
                         const EmbeddingProvider& provider = default_embedding_provider());

/// Greedy token matching: precision is the mean over candidate tokens of the
/// best cosine against any reference token, recall symmetric, F1 harmonic.
/// Throws ValidationError when either side is empty.
double bertscore_f1(const std::vector<std::string>& candidate,
                    const std::vector<std::string>& reference,
                    const EmbeddingProvider& provider = default_embedding_provider());

struct QueryMetrics {
    std::string query_id;
    double ndcg5 = 0.0;
    double ndcg10 = 0.0;
    double cosine = 0.0;
    double bertscore = 0.0;
    double bleu = 0.0;
    double rouge_l = 0.0;
};

struct MetricReport {
    double ndcg5 = 0.0;
    double ndcg10 = 0.0;
    double cosine = 0.0;
    double bertscore = 0.0;
    double bleu = 0.0;
    double rouge_l = 0.0;
    std::vector<QueryMetrics> per_query;
};

/// Scores a set of system rankings against expert ground truth. NDCG uses
/// the full graded relevance; the text metrics compare the system's
/// top-ranked summary against the expert's top-ranked summary (relevance
/// descending, ties by ascending item id). Throws ValidationError on an
/// empty pairing.
MetricReport evaluate_run(
    const std::vector<std::pair<rerank::RerankedList, corpus::ExpertRanking>>& paired,
    const EmbeddingProvider& provider = default_embedding_provider());

/// Model-comparison CSV: Model, NDCG@5, NDCG@10, Cos. Sim., BERTScore,
/// BLEU, Rouge-L; one row per labelled report.
std::string report_csv(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace rex::metrics
