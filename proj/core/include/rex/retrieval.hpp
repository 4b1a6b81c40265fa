#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "rex/corpus.hpp"

namespace rex::retrieval {

struct TokenizeOptions {
    bool strip_stopwords = false;  // small built-in English list
    bool stem = false;             // Harman S-stemmer (plural stripping)
};

/// Lowercases and splits on anything that is not a word character (letters,
/// digits, underscore; bytes >= 0x80 pass through so UTF-8 words survive).
/// Empty tokens are dropped. Deterministic.
std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts = {});

/// Okapi parameters. k1 >= 0, 0 <= b <= 1.
struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::size_t doc = 0;  // index into items()
    int term_frequency = 0;
};

/// Immutable once built; concurrent read-only queries are safe.
class InvertedIndex {
public:
    InvertedIndex() = default;

    const std::vector<corpus::ResponseItem>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }  // N
    double avg_doc_length() const { return avg_doc_length_; }

    /// Number of indexed documents containing the term; 0 for unseen terms.
    std::size_t document_frequency(std::string_view term) const;

    /// Token count of an indexed document. Throws ValidationError for
    /// unknown ids.
    std::size_t doc_length(const std::string& item_id) const;

    const std::vector<Posting>& postings(std::string_view term) const;

    bool contains(const std::string& item_id) const;
    const corpus::ResponseItem& item(const std::string& item_id) const;

private:
    friend InvertedIndex build_index(const std::vector<corpus::ResponseItem>& items);

    std::vector<corpus::ResponseItem> items_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::size_t> id_to_doc_;
    double avg_doc_length_ = 0.0;
};

/// Indexes the items' token sequences. Throws ValidationError on duplicate
/// item ids.
InvertedIndex build_index(const std::vector<corpus::ResponseItem>& items);

/// Smoothed non-negative idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
inline double bm25_idf(std::size_t n_docs, std::size_t df) {
    return std::log(1.0 + (static_cast<double>(n_docs) - static_cast<double>(df) + 0.5) /
                              (static_cast<double>(df) + 0.5));
}

/// Per-term contribution: idf * tf*(k1+1) / (tf + k1*(1 - b + b*len/avglen)).
/// An empty corpus (avg_len 0) normalizes to 1.
inline double bm25_term(double idf, double tf, double doc_len, double avg_len,
                        const Bm25Params& p) {
    const double norm = avg_len > 0.0 ? doc_len / avg_len : 1.0;
    return idf * tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * norm));
}

/// Okapi BM25: sum of bm25_term over query tokens, one contribution per
/// occurrence. 0 when no query term occurs in the item. Throws
/// ValidationError for ids not in the index.
double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_tokens, const std::string& item_id);

struct ScoredItem {
    corpus::ResponseItem item;
    double score = 0.0;
};

/// Top-m documents sharing at least one term with the query, by descending
/// BM25 score, ties broken by ascending item id.
std::vector<ScoredItem> retrieve_topk(const InvertedIndex& index, const Bm25Params& params,
                                      const corpus::Query& query, std::size_t m);

}  // namespace rex::retrieval
