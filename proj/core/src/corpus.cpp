#include "rex/corpus.hpp"

#include <algorithm>
#include <iostream>
#include <random>

#include <json.hpp>

#include "rex/error.hpp"
#include "rex/io.hpp"
#include "rex/retrieval.hpp"

namespace rex::corpus {
namespace {

using nlohmann::ordered_json;

std::string trimmed(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

ResponseItem parse_item(const ordered_json& j, std::size_t line_no) {
    ResponseItem item;
    try {
        item.id = j.at("item_id").get<std::string>();
        item.url = j.value("url", std::string{});
        item.summary = j.at("summary").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad item record: ") + e.what(), line_no);
    }
    if (trimmed(item.summary).empty()) {
        throw ValidationError("item '" + item.id + "' has an empty summary (line " +
                              std::to_string(line_no) + ")");
    }
    item.tokens = retrieval::tokenize(item.summary);
    return item;
}

ExpertRanking parse_ranking(const std::string& line, std::size_t line_no) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }

    ExpertRanking ranking;
    try {
        ranking.query.id = j.at("query_id").get<std::string>();
        ranking.query.text = j.at("query_text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad ranking record: ") + e.what(), line_no);
    }
    if (trimmed(ranking.query.text).empty()) {
        throw ValidationError("query '" + ranking.query.id + "' has empty text (line " +
                              std::to_string(line_no) + ")");
    }
    if (!j.contains("items") || !j["items"].is_array()) {
        throw ParseError("ranking record has no items array", line_no);
    }

    for (const auto& ij : j["items"]) {
        JudgedItem judged;
        judged.item = parse_item(ij, line_no);
        if (!ij.contains("relevance") || !ij["relevance"].is_number_integer()) {
            throw ParseError("item '" + judged.item.id + "' has no integer relevance", line_no);
        }
        judged.relevance = ij["relevance"].get<int>();
        if (judged.relevance < 0 || judged.relevance > 9) {
            throw ValidationError("relevance " + std::to_string(judged.relevance) +
                                  " outside [0,9] for item '" + judged.item.id + "' (line " +
                                  std::to_string(line_no) + ")");
        }
        ranking.judged.push_back(std::move(judged));
    }

    for (std::size_t i = 0; i < ranking.judged.size(); ++i) {
        for (std::size_t k = i + 1; k < ranking.judged.size(); ++k) {
            if (ranking.judged[i].item.id == ranking.judged[k].item.id) {
                throw ValidationError("duplicate item id '" + ranking.judged[i].item.id +
                                      "' in ranking '" + ranking.query.id + "' (line " +
                                      std::to_string(line_no) + ")");
            }
        }
    }
    if (ranking.judged.size() != 10) {
        std::cerr << "warning: ranking '" << ranking.query.id << "' has "
                  << ranking.judged.size() << " judged items (expected 10)\n";
    }
    return ranking;
}

}  // namespace

std::vector<ExpertRanking> load_dataset(const std::string& path) {
    const std::string text = io::read_file(path);
    std::vector<ExpertRanking> out;
    std::size_t line_no = 0;
    for (const auto& line : io::split_lines(text)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        out.push_back(parse_ranking(line, line_no));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t k = i + 1; k < out.size(); ++k) {
            if (out[i].query.id == out[k].query.id) {
                throw ValidationError("duplicate query id '" + out[i].query.id + "' in " + path);
            }
        }
    }
    return out;
}

std::vector<ResponseItem> load_corpus(const std::string& path) {
    const std::string text = io::read_file(path);
    std::vector<ResponseItem> items;
    std::size_t line_no = 0;
    for (const auto& line : io::split_lines(text)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        items.push_back(parse_item(j, line_no));
    }
    return items;
}

std::string to_dataset_line(const ExpertRanking& ranking) {
    ordered_json j;
    j["query_id"] = ranking.query.id;
    j["query_text"] = ranking.query.text;
    j["items"] = ordered_json::array();
    for (const auto& judged : ranking.judged) {
        ordered_json ij;
        ij["item_id"] = judged.item.id;
        ij["url"] = judged.item.url;
        ij["summary"] = judged.item.summary;
        ij["relevance"] = judged.relevance;
        j["items"].push_back(std::move(ij));
    }
    return j.dump();
}

DatasetSplit split_dataset(const std::vector<ExpertRanking>& data, std::uint64_t seed) {
    if (data.empty()) {
        throw ValidationError("split_dataset: dataset is empty");
    }
    const std::size_t n = data.size();
    const std::size_t n_validation = n / 10;
    const std::size_t n_test = n / 10;
    const std::size_t n_train = n - n_validation - n_test;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    // Explicit Fisher-Yates: std::shuffle's draw sequence is not pinned by
    // the standard, this one is.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    DatasetSplit split;
    split.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        const ExpertRanking& r = data[order[i]];
        if (i < n_train) {
            split.train.push_back(r);
        } else if (i < n_train + n_validation) {
            split.validation.push_back(r);
        } else {
            split.test.push_back(r);
        }
    }
    return split;
}

std::vector<PreferencePair> build_preference_pairs(const ExpertRanking& ranking) {
    const std::size_t m = ranking.judged.size();
    if (m < 2) {
        throw ValidationError("ranking '" + ranking.query.id +
                              "' has fewer than 2 judged items; cannot form pairs");
    }

    std::vector<JudgedItem> sorted = ranking.judged;
    std::sort(sorted.begin(), sorted.end(), [](const JudgedItem& a, const JudgedItem& b) {
        if (a.relevance != b.relevance) return a.relevance > b.relevance;
        return a.item.id < b.item.id;
    });

    const std::size_t top = (m + 1) / 2;  // ceil(m/2) positives when m is odd
    std::vector<PreferencePair> pairs;
    pairs.reserve(top * (m - top));
    for (std::size_t p = 0; p < top; ++p) {
        for (std::size_t q = top; q < m; ++q) {
            if (sorted[p].relevance == sorted[q].relevance) continue;  // no signal
            pairs.push_back(PreferencePair{ranking.query, sorted[p].item, sorted[q].item});
        }
    }
    return pairs;
}

std::size_t count_pointwise_examples(const std::vector<ExpertRanking>& data) {
    std::size_t total = 0;
    for (const auto& r : data) total += r.judged.size();
    return total;
}

}  // namespace rex::corpus
