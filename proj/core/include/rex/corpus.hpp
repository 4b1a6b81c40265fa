#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rex::corpus {

/// A user query. Ids are unique within a dataset; text is non-empty after
/// trimming.
struct Query {
    std::string id;
    std::string text;
};

/// A retrievable document: URL plus a short summary. Tokens are derived
/// deterministically from the summary at load time (see retrieval::tokenize).
struct ResponseItem {
    std::string id;
    std::string url;
    std::string summary;
    std::vector<std::string> tokens;
};

struct JudgedItem {
    ResponseItem item;
    int relevance = 0;  // 0..9, 9 = best match
};

/// One query with its expert-judged candidates (ground truth for training
/// and evaluation). Paper-conformant data carries exactly 10 judged items;
/// the validator warns but does not reject other lengths.
struct ExpertRanking {
    Query query;
    std::vector<JudgedItem> judged;
};

/// (query, preferred item, rejected item) with strictly greater source
/// relevance on the positive side.
struct PreferencePair {
    Query query;
    ResponseItem positive;
    ResponseItem negative;
};

/// Disjoint, exhaustive 80:10:10 partition; remainder rows go to train.
struct DatasetSplit {
    std::vector<ExpertRanking> train;
    std::vector<ExpertRanking> validation;
    std::vector<ExpertRanking> test;
    std::uint64_t seed = 0;
};

/// Anonymized user population: a count only, no identities.
struct UserSet {
    std::size_t count = 0;
};

/// Loads one-JSON-object-per-line ranking records and validates them.
/// Input order is preserved. Throws ParseError with the offending line on
/// malformed JSON and ValidationError on invariant violations (e.g.
/// relevance outside [0,9]).
std::vector<ExpertRanking> load_dataset(const std::string& path);

/// Loads an items-only corpus file (one JSON item per line).
std::vector<ResponseItem> load_corpus(const std::string& path);

/// Serializes rankings back to the dataset line format (used by the split
/// stage). Round-trips through load_dataset.
std::string to_dataset_line(const ExpertRanking& ranking);

/// Deterministic 80:10:10 split. Same data + seed always produces the same
/// partition; sizes are N-2*floor(0.1N) / floor(0.1N) / floor(0.1N).
DatasetSplit split_dataset(const std::vector<ExpertRanking>& data, std::uint64_t seed);

/// Cross product of the top-ceil(m/2) judged items against the bottom
/// floor(m/2), positive-major order. Items are ordered by relevance
/// descending with ties broken by ascending item id; pairs whose two sides
/// have equal relevance are skipped (they carry no preference signal).
/// Throws ValidationError for rankings with fewer than 2 items.
std::vector<PreferencePair> build_preference_pairs(const ExpertRanking& ranking);

/// Sum of judged-list lengths (one pointwise example per judged item).
std::size_t count_pointwise_examples(const std::vector<ExpertRanking>& data);

}  // namespace rex::corpus
