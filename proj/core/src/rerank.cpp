#include "rex/rerank.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "rex/error.hpp"

namespace rex::rerank {

RerankedList rerank(const corpus::Query& query, const std::vector<corpus::ResponseItem>& candidates,
                    const scorer::ScoreFn& score, std::optional<std::size_t> m_r) {
    if (candidates.empty()) {
        throw ValidationError("rerank: no candidates for query '" + query.id + "'");
    }
    if (m_r && *m_r >= candidates.size()) {
        throw ValidationError("rerank: m_r (" + std::to_string(*m_r) +
                              ") must be smaller than the candidate count (" +
                              std::to_string(candidates.size()) + ")");
    }

    RerankedList out;
    out.query = query;
    out.truncation = m_r;
    out.entries.reserve(candidates.size());
    for (const auto& item : candidates) {
        out.entries.push_back(RankedEntry{item, score(query, item), 0});
    }
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const RankedEntry& a, const RankedEntry& b) { return a.score > b.score; });
    if (m_r) out.entries.resize(*m_r);
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        out.entries[i].rank = static_cast<int>(i) + 1;
    }
    return out;
}

std::vector<std::pair<RerankedList, corpus::ExpertRanking>> rerank_against_experts(
    const std::vector<corpus::ExpertRanking>& rankings, const scorer::ScoreFn& score) {
    std::vector<std::pair<RerankedList, corpus::ExpertRanking>> out;
    out.reserve(rankings.size());
    for (const auto& ranking : rankings) {
        std::vector<corpus::ResponseItem> candidates;
        candidates.reserve(ranking.judged.size());
        for (const auto& judged : ranking.judged) candidates.push_back(judged.item);
        out.emplace_back(rerank(ranking.query, candidates, score), ranking);
    }
    return out;
}

std::string to_json_line(const RerankedList& list) {
    nlohmann::ordered_json j;
    j["query_id"] = list.query.id;
    j["query_text"] = list.query.text;
    if (list.truncation) j["truncation"] = *list.truncation;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& entry : list.entries) {
        nlohmann::ordered_json ej;
        ej["item_id"] = entry.item.id;
        ej["score"] = entry.score;
        ej["rank"] = entry.rank;
        j["entries"].push_back(std::move(ej));
    }
    return j.dump();
}

RerankedList from_json_line(const std::string& line,
                            const std::vector<corpus::ResponseItem>& catalog) {
    std::unordered_map<std::string, const corpus::ResponseItem*> by_id;
    for (const auto& item : catalog) by_id[item.id] = &item;

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid reranked record: ") + e.what());
    }
    RerankedList list;
    list.query.id = j.at("query_id").get<std::string>();
    list.query.text = j.value("query_text", std::string{});
    if (j.contains("truncation")) list.truncation = j["truncation"].get<std::size_t>();
    for (const auto& ej : j.at("entries")) {
        const std::string item_id = ej.at("item_id").get<std::string>();
        auto it = by_id.find(item_id);
        if (it == by_id.end()) {
            throw ValidationError("reranked record references unknown item '" + item_id + "'");
        }
        list.entries.push_back(
            RankedEntry{*it->second, ej.at("score").get<double>(), ej.at("rank").get<int>()});
    }
    return list;
}

}  // namespace rex::rerank
