#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rex/corpus.hpp"
#include "rex/retrieval.hpp"
#include "rex/scorer.hpp"

namespace rex::attribution {

enum class Method { exact, sampled };

struct TokenValue {
    std::string token;
    std::size_t position = 0;  // index into the item's token sequence
    double value = 0.0;
};

/// Per-token Shapley values of the ranking score for one (query, item)
/// pair. token_values holds one entry per token position; duplicates of the
/// same surface form are attributed separately. Efficiency: the values sum
/// to full_value - base_value (1e-9 for exact; per-permutation telescoping
/// for sampled).
struct AttributionResult {
    corpus::Query query;
    std::string item_id;
    std::string item_url;
    std::vector<TokenValue> token_values;
    Method method = Method::exact;
    std::optional<std::size_t> sample_count;
    double base_value = 0.0;  // f(empty coalition)
    double full_value = 0.0;  // f(all tokens)
};

struct AttributionConfig {
    std::size_t exact_limit = 14;   // caps enumeration at 2^14 evaluations
    std::size_t permutations = 2000;
    std::uint64_t seed = 0;
    std::size_t top_k = 10;
};

/// Exact Shapley values by coalition enumeration,
///   phi_i = sum over S not containing i of
///           |S|! (n-|S|-1)! / n! * [f(S+{i}) - f(S)]
/// with f the masked ranking score. Masked tokens are deleted before
/// feature extraction, so f(empty) is the zero-token item's score. Throws
/// ValidationError when the token count exceeds exact_limit (use
/// shapley_sampled instead).
AttributionResult shapley_exact(const corpus::Query& query, const corpus::ResponseItem& item,
                                const scorer::LinearScorer& s,
                                const retrieval::InvertedIndex& index,
                                const AttributionConfig& cfg = {});

/// Permutation-sampling estimate: each token's value is its mean marginal
/// contribution over cfg.permutations random orderings. Deterministic given
/// cfg.seed; each permutation's contributions telescope to
/// full_value - base_value.
AttributionResult shapley_sampled(const corpus::Query& query, const corpus::ResponseItem& item,
                                  const scorer::LinearScorer& s,
                                  const retrieval::InvertedIndex& index,
                                  const AttributionConfig& cfg = {});

/// Picks whichever method the token count allows: exact up to
/// cfg.exact_limit, sampled beyond.
AttributionResult shapley_auto(const corpus::Query& query, const corpus::ResponseItem& item,
                               const scorer::LinearScorer& s,
                               const retrieval::InvertedIndex& index,
                               const AttributionConfig& cfg = {});

/// k highest-valued entries, value descending with ties broken by earlier
/// position; fewer when the item has fewer tokens.
std::vector<TokenValue> top_k_tokens(const AttributionResult& result, std::size_t k);

/// Plot-data file: comment header with the query text and item URL, then
/// token,position,value rows sorted by value descending (full precision),
/// then an aggregated-by-surface-form section. render_report returns the
/// text; write_report places it atomically on disk.
std::string render_report(const AttributionResult& result);
void write_report(const AttributionResult& result, const std::string& path);

/// Reads the per-position rows back (stops at the aggregate section).
std::vector<TokenValue> parse_report_rows(const std::string& report_text);

/// One-line JSON serialization for the attributions stage file.
std::string to_json_line(const AttributionResult& result);
AttributionResult from_json_line(const std::string& line);

}  // namespace rex::attribution
