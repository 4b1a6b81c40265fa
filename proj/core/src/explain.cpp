#include "rex/explain.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include <json.hpp>

#include "rex/error.hpp"
#include "rex/http_client.hpp"
#include "rex/io.hpp"

namespace rex::explain {
namespace {

constexpr const char* kWithAttributionTemplate =
    "You are given the following information:\n"
    "\n"
    "- A user query: {query}\n"
    "- The top tokens from the response, each accompanied by its attribution value\n"
    "  indicating its importance in ranking:\n"
    "{token_attribution_block}\n"
    "- The response item, including its URL and full text content:\n"
    "  - URL: {url}\n"
    "  - Summary Text: {summary}\n"
    "\n"
    "Using the attribution values of the top tokens, generate a concise, clear, and "
    "coherent explanation describing why this response was selected to answer the "
    "query. Focus on how the most important tokens contribute to the relevance and "
    "ranking of this response.\n"
    "\n"
    "Your explanation should help a user understand the reasoning behind the ranking "
    "decision based on the key contributing tokens.\n";

constexpr const char* kWithoutAttributionTemplate =
    "You are given the following information:\n"
    "\n"
    "- A user query: {query}\n"
    "- The response item, including its URL and full text content:\n"
    "  - URL: {url}\n"
    "  - Summary Text: {summary}\n"
    "\n"
    "Using the query and the response content, generate a concise, clear, and "
    "coherent explanation describing why this response was selected to answer the "
    "query.\n"
    "\n"
    "Your explanation should help a user understand the reasoning behind the ranking "
    "decision.\n";

void replace_placeholder(std::string& text, const std::string& placeholder,
                         const std::string& value, bool required) {
    const auto pos = text.find(placeholder);
    if (pos == std::string::npos) {
        if (required) {
            throw ValidationError("template is missing the " + placeholder + " placeholder");
        }
        return;
    }
    std::string out;
    out.reserve(text.size() + value.size());
    std::size_t start = 0;
    for (auto at = pos; at != std::string::npos; at = text.find(placeholder, start)) {
        out.append(text, start, at - start);
        out.append(value);
        start = at + placeholder.size();
    }
    out.append(text, start, std::string::npos);
    text = std::move(out);
}

std::string sanitized(std::string name) {
    for (char& c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok) c = '_';
    }
    return name;
}

}  // namespace

std::string variant_name(Variant v) {
    return v == Variant::with_attribution ? "with_attribution" : "without_attribution";
}

PromptTemplate PromptTemplate::builtin(Variant v) {
    PromptTemplate t;
    t.variant = v;
    t.text = v == Variant::with_attribution ? kWithAttributionTemplate
                                            : kWithoutAttributionTemplate;
    return t;
}

PromptTemplate PromptTemplate::from_file(const std::string& path, Variant v) {
    PromptTemplate t;
    t.variant = v;
    t.text = io::read_file(path);
    return t;
}

std::string build_prompt(const PromptTemplate& tmpl, const corpus::Query& query,
                         const std::vector<attribution::TokenValue>& top_tokens,
                         const corpus::ResponseItem& item) {
    if (item.summary.empty()) {
        throw ValidationError("item '" + item.id + "' has no summary text");
    }
    std::string prompt = tmpl.text;
    replace_placeholder(prompt, "{query}", query.text, true);
    replace_placeholder(prompt, "{url}", item.url, true);
    replace_placeholder(prompt, "{summary}", item.summary, true);

    if (tmpl.variant == Variant::with_attribution) {
        if (top_tokens.empty()) {
            throw ValidationError("with_attribution prompt requires a non-empty token list");
        }
        std::string block;
        char buf[32];
        for (std::size_t i = 0; i < top_tokens.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.2f", top_tokens[i].value);
            block += top_tokens[i].token;
            block += ": ";
            block += buf;
            if (i + 1 < top_tokens.size()) block.push_back('\n');
        }
        replace_placeholder(prompt, "{token_attribution_block}", block, true);
    } else if (prompt.find("{token_attribution_block}") != std::string::npos) {
        throw ValidationError(
            "without_attribution template must not contain {token_attribution_block}");
    }
    return prompt;
}

std::string to_json_line(const ExplanationRecord& record) {
    nlohmann::ordered_json j;
    j["query_id"] = record.query_id;
    j["item_id"] = record.item_id;
    j["variant"] = variant_name(record.variant);
    j["prompt"] = record.prompt;
    j["response"] = record.response;
    j["model"] = record.model;
    j["temperature"] = record.temperature;
    j["status"] = record.status == RecordStatus::ok ? "ok" : "pending";
    // latency deliberately not persisted: stage outputs must be
    // byte-identical across reruns
    return j.dump();
}

ExplanationRecord record_from_json_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid explanation record: ") + e.what());
    }
    ExplanationRecord record;
    record.query_id = j.at("query_id").get<std::string>();
    record.item_id = j.at("item_id").get<std::string>();
    record.variant = j.value("variant", std::string{}) == "without_attribution"
                         ? Variant::without_attribution
                         : Variant::with_attribution;
    record.prompt = j.value("prompt", std::string{});
    record.response = j.value("response", std::string{});
    record.model = j.value("model", std::string{});
    record.temperature = j.value("temperature", 0.5);
    record.status =
        j.value("status", std::string{"ok"}) == "pending" ? RecordStatus::pending : RecordStatus::ok;
    return record;
}

ExplanationRecord generate_explanation(const LlmBackendConfig& cfg, const std::string& query_id,
                                       const std::string& item_id, Variant variant,
                                       const std::string& prompt) {
    ExplanationRecord record;
    record.query_id = query_id;
    record.item_id = item_id;
    record.variant = variant;
    record.prompt = prompt;
    record.model = cfg.model;
    record.temperature = cfg.temperature;

    if (cfg.offline) {
        const std::string dir = cfg.offline_dir.empty() ? "." : cfg.offline_dir;
        const std::string path = dir + "/prompt_" + sanitized(query_id) + "_" +
                                 sanitized(item_id) + "_" + variant_name(variant) + ".txt";
        io::atomic_write(path, prompt);
        record.status = RecordStatus::pending;
        return record;
    }

    nlohmann::ordered_json request;
    request["model"] = cfg.model;
    request["temperature"] = cfg.temperature;
    if (cfg.pass_candidate_count) {
        request["n"] = cfg.candidate_count;
    }
    request["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});

    std::map<std::string, std::string> headers;
    if (!cfg.api_key_env.empty()) {
        if (const char* token = std::getenv(cfg.api_key_env.c_str())) {
            headers["Authorization"] = std::string("Bearer ") + token;
        }
    }

    http::RetryPolicy policy;
    policy.max_retries = cfg.max_retries;
    policy.initial_backoff = cfg.initial_backoff;
    policy.timeout = cfg.timeout;

    const auto start = std::chrono::steady_clock::now();
    const std::string body =
        http::post_json(http::parse_endpoint(cfg.endpoint), request.dump(), policy, headers);
    record.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    nlohmann::json response;
    try {
        response = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("backend returned a non-JSON body: ") + e.what());
    }
    if (!response.contains("choices") || !response["choices"].is_array() ||
        response["choices"].empty()) {
        throw ParseError("backend response has no choices: " + body);
    }
    const auto& first = response["choices"][0];
    if (first.contains("message") && first["message"].contains("content")) {
        record.response = first["message"]["content"].get<std::string>();
    } else if (first.contains("text")) {
        record.response = first["text"].get<std::string>();
    } else {
        throw ParseError("backend choice carries no text: " + body);
    }
    if (record.response.empty()) {
        throw ParseError("backend returned an empty explanation");
    }
    record.status = RecordStatus::ok;
    return record;
}

std::vector<ExplanationRecord> explain_ranked_list(
    const LlmBackendConfig& cfg, const std::vector<PromptTemplate>& templates,
    const rerank::RerankedList& reranked,
    const std::vector<attribution::AttributionResult>& attributions, std::size_t top_k) {
    std::unordered_map<std::string, const attribution::AttributionResult*> by_item;
    for (const auto& a : attributions) by_item[a.item_id] = &a;

    std::vector<ExplanationRecord> records;
    records.reserve(reranked.entries.size() * templates.size());
    for (const auto& entry : reranked.entries) {
        auto it = by_item.find(entry.item.id);
        if (it == by_item.end()) {
            throw ValidationError("no attribution result for item '" + entry.item.id + "'");
        }
        const auto top = attribution::top_k_tokens(*it->second, top_k);
        for (const auto& tmpl : templates) {
            const std::string prompt = build_prompt(tmpl, reranked.query, top, entry.item);
            records.push_back(generate_explanation(cfg, reranked.query.id, entry.item.id,
                                                   tmpl.variant, prompt));
        }
    }
    return records;
}

}  // namespace rex::explain
