#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "rex/corpus.hpp"
#include "rex/metrics.hpp"
#include "rex/retrieval.hpp"

namespace rex::scorer {

/// Feature layout shared by scorer and trainer. Bump the spec id whenever
/// the layout changes; persisted weights carry it.
inline constexpr std::size_t kFeatureDim = 6;
inline constexpr const char* kFeatureSpecId = "ir-basic-v1";

/// Fixed-length feature map for a (query, item) pair:
///   [0] BM25 score of the item's tokens against the query (corpus
///       statistics from the index, term counts from the item itself)
///   [1] fraction of distinct query tokens present in the item
///   [2] fraction of distinct item tokens present in the query
///   [3] item token occurrences matching the query, over item length
///   [4] cosine between mean-pooled query and item token embeddings
///   [5] constant bias 1.0
struct FeatureVector {
    std::array<double, kFeatureDim> values{};

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// The single-score ranking head: one weight per feature, score by dot
/// product. Immutable in use; construct a new one to retrain.
struct LinearScorer {
    std::vector<double> weights = std::vector<double>(kFeatureDim, 0.0);
    std::string feature_spec = kFeatureSpecId;
};

std::string save_scorer(const LinearScorer& s);                 // JSON text
LinearScorer load_scorer_from_string(const std::string& json);  // inverse
LinearScorer load_scorer(const std::string& path);

/// Deterministic feature extraction. The item need not be indexed: corpus
/// statistics (df, N, avgdl) come from the index while term counts come
/// from the item's own token list, so the same code path serves masked
/// items.
FeatureVector extract_features(const corpus::Query& query, const corpus::ResponseItem& item,
                               const retrieval::InvertedIndex& index,
                               const retrieval::Bm25Params& params = {},
                               const metrics::EmbeddingProvider& provider =
                                   metrics::default_embedding_provider());

/// Dot product of weights and features. Throws ValidationError on
/// dimension mismatch.
double score(const LinearScorer& s, const FeatureVector& f);

/// Repeated masked scoring for one (query, item) pair: the coalition value
/// function behind the attribution engine. Precomputes per-token state so
/// each evaluation is cheap, while producing bit-identical results to
/// extract_features on the kept subsequence (single shared code path).
class MaskedScorer {
public:
    MaskedScorer(corpus::Query query, corpus::ResponseItem item,
                 const retrieval::InvertedIndex& index, const retrieval::Bm25Params& params = {},
                 const metrics::EmbeddingProvider& provider =
                     metrics::default_embedding_provider());

    std::size_t token_count() const { return item_.tokens.size(); }
    const corpus::ResponseItem& item() const { return item_; }
    const corpus::Query& query() const { return query_; }

    /// Features of the item restricted to positions with keep[i] == true.
    /// Throws ValidationError when the mask length differs from the token
    /// count. Pure and deterministic.
    FeatureVector features(const std::vector<bool>& keep) const;
    double value(const LinearScorer& s, const std::vector<bool>& keep) const;

private:
    struct QueryTerm {
        std::vector<std::size_t> positions;  // item positions carrying the term
        double idf = 0.0;
    };

    corpus::Query query_;
    corpus::ResponseItem item_;
    retrieval::Bm25Params params_;
    double avg_doc_length_ = 0.0;
    std::size_t distinct_query_tokens_ = 0;
    std::vector<QueryTerm> query_terms_;            // one per query token occurrence
    std::vector<bool> position_in_query_;           // per item position
    std::vector<std::vector<double>> embeddings_;   // per item position
    std::vector<double> query_mean_embedding_;
    // distinct item tokens -> their positions (for the distinct-overlap feature)
    std::vector<std::pair<bool, std::vector<std::size_t>>> distinct_groups_;
};

/// score(extract_features(query, item restricted to kept tokens)). The
/// all-true mask equals the unmasked score exactly.
double score_masked(const LinearScorer& s, const corpus::Query& query,
                    const corpus::ResponseItem& item, const std::vector<bool>& keep,
                    const retrieval::InvertedIndex& index,
                    const retrieval::Bm25Params& params = {});

struct RemoteScorerConfig {
    std::string endpoint;    // e.g. http://127.0.0.1:8088/score
    std::string model;
    std::chrono::milliseconds timeout{5000};
    int max_retries = 3;     // additional attempts after the first
    std::chrono::milliseconds initial_backoff{200};
    std::string api_key_env; // env var holding a bearer token, optional
};

/// POSTs {query, url, summary} and expects {score}. Retries network and
/// 5xx failures with exponential backoff; throws HttpError (carrying the
/// attempt count) when retries are exhausted and ParseError on a
/// non-numeric body.
double remote_score(const RemoteScorerConfig& cfg, const corpus::Query& query,
                    const corpus::ResponseItem& item);

/// Pluggable (query, item) -> real used by the rerank stage.
using ScoreFn = std::function<double(const corpus::Query&, const corpus::ResponseItem&)>;

/// Binds a linear scorer to an index as a ScoreFn.
ScoreFn make_score_fn(LinearScorer s, const retrieval::InvertedIndex& index,
                      retrieval::Bm25Params params = {});

}  // namespace rex::scorer
