#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "rex/attribution.hpp"
#include "rex/corpus.hpp"
#include "rex/rerank.hpp"

namespace rex::explain {

enum class Variant { with_attribution, without_attribution };

std::string variant_name(Variant v);

/// Prompt template with {query}, {token_attribution_block}, {url} and
/// {summary} placeholders. The with_attribution variant renders one
/// "token: value" line per supplied token; the without_attribution variant
/// has no attribution block or token-focused instructions (the ablation
/// arm).
struct PromptTemplate {
    std::string text;
    Variant variant = Variant::with_attribution;

    /// Built-in templates (also shipped under data/templates for editing).
    static PromptTemplate builtin(Variant v);
    static PromptTemplate from_file(const std::string& path, Variant v);
};

/// Fills the template. Attribution values render with exactly two decimal
/// places ("carbon: 0.32"). Throws ValidationError when a required
/// placeholder is missing from the template, when the with_attribution
/// variant receives no tokens, or when the item carries an empty summary.
std::string build_prompt(const PromptTemplate& tmpl, const corpus::Query& query,
                         const std::vector<attribution::TokenValue>& top_tokens,
                         const corpus::ResponseItem& item);

struct LlmBackendConfig {
    std::string endpoint;            // chat-completion style JSON endpoint
    std::string model = "gpt-4o";
    double temperature = 0.5;
    int candidate_count = 4;         // passed through as "n" when supported
    bool pass_candidate_count = true;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;             // additional attempts after the first
    std::chrono::milliseconds initial_backoff{200};
    std::string api_key_env;         // env var holding the bearer token
    bool offline = false;            // write prompts to disk, no network
    std::string offline_dir;         // where pending prompts land
};

enum class RecordStatus { ok, pending };

/// One explanation exchange. latency is runtime telemetry and is not
/// persisted (stage outputs must be byte-identical across reruns).
struct ExplanationRecord {
    std::string query_id;
    std::string item_id;
    Variant variant = Variant::with_attribution;
    std::string prompt;
    std::string response;  // the generated reasoning text
    std::string model;
    double temperature = 0.5;
    RecordStatus status = RecordStatus::ok;
    std::chrono::milliseconds latency{0};
};

std::string to_json_line(const ExplanationRecord& record);
ExplanationRecord record_from_json_line(const std::string& line);

/// Sends the prompt to the chat-completion backend (request: {model,
/// temperature, messages:[{role,content}]}; response text from
/// choices[0]). Retries per config with exponential backoff; throws
/// HttpError after the final attempt and ParseError on a malformed body.
/// In offline mode no network is touched: the prompt is written to
/// offline_dir and the record comes back pending.
ExplanationRecord generate_explanation(const LlmBackendConfig& cfg, const std::string& query_id,
                                       const std::string& item_id, Variant variant,
                                       const std::string& prompt);

/// One record per ranked item and requested template, item-major and in
/// ranked order. Attributions are matched by item id; a missing one is an
/// error naming the item. top_k bounds the token lines per prompt.
std::vector<ExplanationRecord> explain_ranked_list(
    const LlmBackendConfig& cfg, const std::vector<PromptTemplate>& templates,
    const rerank::RerankedList& reranked,
    const std::vector<attribution::AttributionResult>& attributions, std::size_t top_k = 10);

}  // namespace rex::explain
