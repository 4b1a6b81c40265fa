#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rex/corpus.hpp"
#include "rex/scorer.hpp"

namespace rex::rerank {

struct RankedEntry {
    corpus::ResponseItem item;
    double score = 0.0;
    int rank = 0;  // 1-based, consecutive
};

/// Candidates sorted by descending ranking score; ties keep their original
/// candidate order. When truncation is set the list was cut to that many
/// entries.
struct RerankedList {
    corpus::Query query;
    std::vector<RankedEntry> entries;
    std::optional<std::size_t> truncation;
};

/// Scores every candidate and stable-sorts by score descending. m_r, when
/// present, must be strictly smaller than the candidate count (the refined
/// list is a proper subset). Throws ValidationError on empty candidates or
/// an out-of-range m_r.
RerankedList rerank(const corpus::Query& query, const std::vector<corpus::ResponseItem>& candidates,
                    const scorer::ScoreFn& score, std::optional<std::size_t> m_r = std::nullopt);

/// Reranks every ranking's judged items and pairs the result with its
/// ground truth, ready for the metrics stage.
std::vector<std::pair<RerankedList, corpus::ExpertRanking>> rerank_against_experts(
    const std::vector<corpus::ExpertRanking>& rankings, const scorer::ScoreFn& score);

/// One-line JSON serialization (query id and text, ranked item ids,
/// full-precision scores, ranks); from_json_line inverts it, resolving
/// items from the given catalog.
std::string to_json_line(const RerankedList& list);
RerankedList from_json_line(const std::string& line,
                            const std::vector<corpus::ResponseItem>& catalog);

}  // namespace rex::rerank
