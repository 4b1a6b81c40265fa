#include "rex/scorer.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rex/error.hpp"
#include "rex/io.hpp"

namespace rex::scorer {

std::string save_scorer(const LinearScorer& s) {
    nlohmann::ordered_json j;
    j["feature_spec"] = s.feature_spec;
    j["weights"] = s.weights;
    return j.dump();
}

LinearScorer load_scorer_from_string(const std::string& json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid scorer file: ") + e.what());
    }
    LinearScorer s;
    s.feature_spec = j.value("feature_spec", std::string{});
    if (s.feature_spec != kFeatureSpecId) {
        throw ValidationError("scorer feature spec '" + s.feature_spec +
                              "' does not match this build's layout '" + kFeatureSpecId + "'");
    }
    s.weights = j.at("weights").get<std::vector<double>>();
    if (s.weights.size() != kFeatureDim) {
        throw ValidationError("scorer has " + std::to_string(s.weights.size()) +
                              " weights, expected " + std::to_string(kFeatureDim));
    }
    for (double w : s.weights) {
        if (!std::isfinite(w)) throw ValidationError("scorer weights must be finite");
    }
    return s;
}

LinearScorer load_scorer(const std::string& path) {
    return load_scorer_from_string(io::read_file(path));
}

double score(const LinearScorer& s, const FeatureVector& f) {
    if (s.weights.size() != kFeatureDim) {
        throw ValidationError("scorer dimension " + std::to_string(s.weights.size()) +
                              " does not match feature dimension " + std::to_string(kFeatureDim));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < kFeatureDim; ++i) dot += s.weights[i] * f.values[i];
    return dot;
}

MaskedScorer::MaskedScorer(corpus::Query query, corpus::ResponseItem item,
                           const retrieval::InvertedIndex& index,
                           const retrieval::Bm25Params& params,
                           const metrics::EmbeddingProvider& provider)
    : query_(std::move(query)), item_(std::move(item)), params_(params),
      avg_doc_length_(index.avg_doc_length()) {
    const auto query_tokens = retrieval::tokenize(query_.text);

    std::unordered_map<std::string, std::vector<std::size_t>> item_positions;
    for (std::size_t p = 0; p < item_.tokens.size(); ++p) {
        item_positions[item_.tokens[p]].push_back(p);
    }

    std::unordered_set<std::string> distinct_query(query_tokens.begin(), query_tokens.end());
    distinct_query_tokens_ = distinct_query.size();

    query_terms_.reserve(query_tokens.size());
    for (const auto& token : query_tokens) {
        QueryTerm term;
        term.idf = retrieval::bm25_idf(index.size(), index.document_frequency(token));
        auto it = item_positions.find(token);
        if (it != item_positions.end()) term.positions = it->second;
        query_terms_.push_back(std::move(term));
    }

    position_in_query_.resize(item_.tokens.size());
    embeddings_.reserve(item_.tokens.size());
    for (std::size_t p = 0; p < item_.tokens.size(); ++p) {
        position_in_query_[p] = distinct_query.count(item_.tokens[p]) > 0;
        embeddings_.push_back(provider.embed(item_.tokens[p]));
    }
    query_mean_embedding_ = metrics::mean_embedding(query_tokens, provider);

    // Distinct surface forms in first-appearance order keeps everything
    // deterministic.
    std::unordered_set<std::string> seen;
    for (std::size_t p = 0; p < item_.tokens.size(); ++p) {
        if (!seen.insert(item_.tokens[p]).second) continue;
        distinct_groups_.emplace_back(position_in_query_[p], item_positions[item_.tokens[p]]);
    }
}

FeatureVector MaskedScorer::features(const std::vector<bool>& keep) const {
    if (keep.size() != item_.tokens.size()) {
        throw ValidationError("mask length " + std::to_string(keep.size()) +
                              " does not match token count " +
                              std::to_string(item_.tokens.size()));
    }

    std::size_t kept = 0;
    for (bool k : keep) kept += k ? 1 : 0;
    const double doc_len = static_cast<double>(kept);

    FeatureVector f;

    // [0] BM25 against the kept subsequence, corpus statistics unchanged.
    double bm25 = 0.0;
    for (const auto& term : query_terms_) {
        std::size_t tf = 0;
        for (std::size_t p : term.positions) tf += keep[p] ? 1 : 0;
        if (tf == 0) continue;
        bm25 += retrieval::bm25_term(term.idf, static_cast<double>(tf), doc_len, avg_doc_length_,
                                     params_);
    }
    f[0] = bm25;

    // [1] distinct query tokens present / distinct query tokens
    // [2] distinct kept item tokens present in query / distinct kept item tokens
    // The covered query tokens and the kept-in-query item tokens are the
    // same surface forms; only the denominators differ.
    std::size_t distinct_kept = 0;
    std::size_t distinct_kept_in_query = 0;
    for (const auto& [in_query, positions] : distinct_groups_) {
        bool any = false;
        for (std::size_t p : positions) {
            if (keep[p]) {
                any = true;
                break;
            }
        }
        if (any) {
            ++distinct_kept;
            if (in_query) ++distinct_kept_in_query;
        }
    }
    f[1] = distinct_query_tokens_ > 0 ? static_cast<double>(distinct_kept_in_query) /
                                            static_cast<double>(distinct_query_tokens_)
                                      : 0.0;
    f[2] = distinct_kept > 0
               ? static_cast<double>(distinct_kept_in_query) / static_cast<double>(distinct_kept)
               : 0.0;

    // [3] kept occurrences matching the query, over kept length
    std::size_t matched_occurrences = 0;
    for (std::size_t p = 0; p < keep.size(); ++p) {
        if (keep[p] && position_in_query_[p]) ++matched_occurrences;
    }
    f[3] = kept > 0 ? static_cast<double>(matched_occurrences) / static_cast<double>(kept) : 0.0;

    // [4] cosine between mean-pooled embeddings (0 for the empty coalition)
    std::vector<double> item_mean(query_mean_embedding_.size(), 0.0);
    if (kept > 0) {
        for (std::size_t p = 0; p < keep.size(); ++p) {
            if (!keep[p]) continue;
            for (std::size_t i = 0; i < item_mean.size(); ++i) item_mean[i] += embeddings_[p][i];
        }
        const double inv = 1.0 / static_cast<double>(kept);
        for (double& x : item_mean) x *= inv;
    }
    f[4] = metrics::cosine(item_mean, query_mean_embedding_);

    f[5] = 1.0;  // bias
    return f;
}

double MaskedScorer::value(const LinearScorer& s, const std::vector<bool>& keep) const {
    return score(s, features(keep));
}

FeatureVector extract_features(const corpus::Query& query, const corpus::ResponseItem& item,
                               const retrieval::InvertedIndex& index,
                               const retrieval::Bm25Params& params,
                               const metrics::EmbeddingProvider& provider) {
    MaskedScorer masked(query, item, index, params, provider);
    return masked.features(std::vector<bool>(item.tokens.size(), true));
}

double score_masked(const LinearScorer& s, const corpus::Query& query,
                    const corpus::ResponseItem& item, const std::vector<bool>& keep,
                    const retrieval::InvertedIndex& index, const retrieval::Bm25Params& params) {
    MaskedScorer masked(query, item, index, params);
    return masked.value(s, keep);
}

ScoreFn make_score_fn(LinearScorer s, const retrieval::InvertedIndex& index,
                      retrieval::Bm25Params params) {
    return [s = std::move(s), &index, params](const corpus::Query& query,
                                              const corpus::ResponseItem& item) {
        return score(s, extract_features(query, item, index, params));
    };
}

}  // namespace rex::scorer
