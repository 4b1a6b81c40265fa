#include <cstdlib>

#include <json.hpp>

#include "rex/error.hpp"
#include "rex/http_client.hpp"
#include "rex/scorer.hpp"

namespace rex::scorer {

double remote_score(const RemoteScorerConfig& cfg, const corpus::Query& query,
                    const corpus::ResponseItem& item) {
    nlohmann::ordered_json request;
    request["query"] = query.text;
    request["url"] = item.url;
    request["summary"] = item.summary;

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

    const std::string body =
        http::post_json(http::parse_endpoint(cfg.endpoint), request.dump(), policy, headers);

    nlohmann::json response;
    try {
        response = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("remote scorer returned a non-JSON body: ") + e.what());
    }
    if (!response.contains("score") || !response["score"].is_number()) {
        throw ParseError("remote scorer response has no numeric 'score' field: " + body);
    }
    return response["score"].get<double>();
}

}  // namespace rex::scorer
