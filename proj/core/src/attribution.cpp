#include "rex/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rex/error.hpp"
#include "rex/io.hpp"

namespace rex::attribution {
namespace {

// s!(n-s-1)!/n! for all coalition sizes s of an n-token game. n is capped
// at the exact limit, so every factorial here is exact in a double.
std::vector<double> coalition_weights(std::size_t n) {
    std::vector<double> fact(n + 1, 1.0);
    for (std::size_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
    std::vector<double> w(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        w[s] = fact[s] * fact[n - s - 1] / fact[n];
    }
    return w;
}

AttributionResult make_result(const corpus::Query& query, const corpus::ResponseItem& item,
                              Method method) {
    AttributionResult result;
    result.query = query;
    result.item_id = item.id;
    result.item_url = item.url;
    result.method = method;
    result.token_values.reserve(item.tokens.size());
    for (std::size_t p = 0; p < item.tokens.size(); ++p) {
        result.token_values.push_back(TokenValue{item.tokens[p], p, 0.0});
    }
    return result;
}

}  // namespace

AttributionResult shapley_exact(const corpus::Query& query, const corpus::ResponseItem& item,
                                const scorer::LinearScorer& s,
                                const retrieval::InvertedIndex& index,
                                const AttributionConfig& cfg) {
    const std::size_t n = item.tokens.size();
    if (n > cfg.exact_limit) {
        throw ValidationError("item '" + item.id + "' has " + std::to_string(n) +
                              " tokens, above the exact limit of " +
                              std::to_string(cfg.exact_limit) + "; use shapley_sampled");
    }

    scorer::MaskedScorer masked(query, item, index);
    AttributionResult result = make_result(query, item, Method::exact);

    // Evaluate the value function once per coalition bitmask.
    const std::size_t n_masks = std::size_t{1} << n;
    std::vector<double> value(n_masks, 0.0);
    std::vector<bool> keep(n, false);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        for (std::size_t i = 0; i < n; ++i) keep[i] = (mask >> i) & 1u;
        value[mask] = masked.value(s, keep);
    }
    result.base_value = value[0];
    result.full_value = value[n_masks - 1];

    if (n == 0) return result;
    const auto weights = coalition_weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        double phi = 0.0;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
            phi += weights[size] * (value[mask | bit] - value[mask]);
        }
        result.token_values[i].value = phi;
    }
    return result;
}

AttributionResult shapley_sampled(const corpus::Query& query, const corpus::ResponseItem& item,
                                  const scorer::LinearScorer& s,
                                  const retrieval::InvertedIndex& index,
                                  const AttributionConfig& cfg) {
    if (cfg.permutations == 0) {
        throw ValidationError("shapley_sampled: permutations must be >= 1");
    }
    const std::size_t n = item.tokens.size();

    scorer::MaskedScorer masked(query, item, index);
    AttributionResult result = make_result(query, item, Method::sampled);
    result.sample_count = cfg.permutations;

    std::vector<bool> none(n, false), all(n, true);
    result.base_value = masked.value(s, none);
    result.full_value = masked.value(s, all);
    if (n == 0) return result;

    std::vector<double> sums(n, 0.0);
    std::vector<std::size_t> order(n);
    std::mt19937_64 rng(cfg.seed);
    std::vector<bool> keep(n);

    for (std::size_t p = 0; p < cfg.permutations; ++p) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
        }
        std::fill(keep.begin(), keep.end(), false);
        double previous = result.base_value;
        for (std::size_t step = 0; step < n; ++step) {
            keep[order[step]] = true;
            // the last step is the full coalition for every permutation
            const double current = step + 1 == n ? result.full_value : masked.value(s, keep);
            sums[order[step]] += current - previous;
            previous = current;
        }
    }

    const double inv = 1.0 / static_cast<double>(cfg.permutations);
    for (std::size_t i = 0; i < n; ++i) result.token_values[i].value = sums[i] * inv;
    return result;
}

AttributionResult shapley_auto(const corpus::Query& query, const corpus::ResponseItem& item,
                               const scorer::LinearScorer& s,
                               const retrieval::InvertedIndex& index,
                               const AttributionConfig& cfg) {
    if (item.tokens.size() <= cfg.exact_limit) {
        return shapley_exact(query, item, s, index, cfg);
    }
    return shapley_sampled(query, item, s, index, cfg);
}

std::vector<TokenValue> top_k_tokens(const AttributionResult& result, std::size_t k) {
    if (k == 0) {
        throw ValidationError("top_k_tokens: k must be >= 1");
    }
    std::vector<TokenValue> sorted = result.token_values;
    std::sort(sorted.begin(), sorted.end(), [](const TokenValue& a, const TokenValue& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.position < b.position;
    });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

std::string render_report(const AttributionResult& result) {
    std::ostringstream out;
    out << "# query: " << result.query.text << '\n';
    out << "# url: " << result.item_url << '\n';
    out << "# item: " << result.item_id << '\n';
    out << "# method: " << (result.method == Method::exact ? "exact" : "sampled");
    if (result.sample_count) out << " permutations=" << *result.sample_count;
    out << '\n';
    out << "token,position,value\n";

    std::vector<TokenValue> sorted = result.token_values;
    std::sort(sorted.begin(), sorted.end(), [](const TokenValue& a, const TokenValue& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.position < b.position;
    });
    for (const auto& tv : sorted) {
        out << tv.token << ',' << tv.position << ',' << io::format_double(tv.value) << '\n';
    }

    // Second view: values summed over duplicate surface forms.
    std::map<std::string, double> aggregated;
    for (const auto& tv : result.token_values) aggregated[tv.token] += tv.value;
    std::vector<std::pair<std::string, double>> agg(aggregated.begin(), aggregated.end());
    std::sort(agg.begin(), agg.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    out << "# aggregate\n";
    out << "token,value\n";
    for (const auto& [token, value] : agg) {
        out << token << ',' << io::format_double(value) << '\n';
    }
    return out.str();
}

void write_report(const AttributionResult& result, const std::string& path) {
    io::atomic_write(path, render_report(result));
}

std::vector<TokenValue> parse_report_rows(const std::string& report_text) {
    std::vector<TokenValue> rows;
    bool in_rows = false;
    for (const auto& line : io::split_lines(report_text)) {
        if (line == "# aggregate") break;
        if (line == "token,position,value") {
            in_rows = true;
            continue;
        }
        if (!in_rows || line.empty() || line.front() == '#') continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ParseError("malformed report row: " + line);
        }
        TokenValue tv;
        tv.token = line.substr(0, c1);
        tv.position = static_cast<std::size_t>(std::stoull(line.substr(c1 + 1, c2 - c1 - 1)));
        tv.value = std::stod(line.substr(c2 + 1));
        rows.push_back(std::move(tv));
    }
    return rows;
}

std::string to_json_line(const AttributionResult& result) {
    nlohmann::ordered_json j;
    j["query_id"] = result.query.id;
    j["query_text"] = result.query.text;
    j["item_id"] = result.item_id;
    j["item_url"] = result.item_url;
    j["method"] = result.method == Method::exact ? "exact" : "sampled";
    if (result.sample_count) j["sample_count"] = *result.sample_count;
    j["base_value"] = result.base_value;
    j["full_value"] = result.full_value;
    j["tokens"] = nlohmann::ordered_json::array();
    for (const auto& tv : result.token_values) {
        nlohmann::ordered_json tj;
        tj["token"] = tv.token;
        tj["position"] = tv.position;
        tj["value"] = tv.value;
        j["tokens"].push_back(std::move(tj));
    }
    return j.dump();
}

AttributionResult from_json_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid attribution record: ") + e.what());
    }
    AttributionResult result;
    result.query.id = j.at("query_id").get<std::string>();
    result.query.text = j.value("query_text", std::string{});
    result.item_id = j.at("item_id").get<std::string>();
    result.item_url = j.value("item_url", std::string{});
    result.method = j.value("method", std::string{"exact"}) == "sampled" ? Method::sampled
                                                                         : Method::exact;
    if (j.contains("sample_count")) result.sample_count = j["sample_count"].get<std::size_t>();
    result.base_value = j.at("base_value").get<double>();
    result.full_value = j.at("full_value").get<double>();
    for (const auto& tj : j.at("tokens")) {
        result.token_values.push_back(TokenValue{tj.at("token").get<std::string>(),
                                                 tj.at("position").get<std::size_t>(),
                                                 tj.at("value").get<double>()});
    }
    return result;
}

}  // namespace rex::attribution
