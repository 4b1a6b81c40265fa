#include "rex/http_client.hpp"

#include <thread>

#include <httplib.h>

#include "rex/error.hpp"

namespace rex::http {

Endpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("endpoint is not a URL: " + url);
    }
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ValidationError("unsupported scheme '" + scheme + "' in endpoint: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string::npos) {
        ep.base = url;
        ep.path = "/";
    } else {
        ep.base = url.substr(0, path_start);
        ep.path = url.substr(path_start);
    }
    return ep;
}

std::string post_json(const Endpoint& endpoint, const std::string& body,
                      const RetryPolicy& policy, const std::map<std::string, std::string>& headers) {
    const int attempts_allowed = 1 + std::max(0, policy.max_retries);
    std::chrono::milliseconds backoff = policy.initial_backoff;
    std::string last_failure;

    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }

        httplib::Client client(endpoint.base);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
            policy.timeout));
        client.set_read_timeout(policy.timeout);
        client.set_write_timeout(policy.timeout);
        httplib::Headers hl;
        for (const auto& [k, v] : headers) hl.emplace(k, v);

        auto res = client.Post(endpoint.path, hl, body, "application/json");
        if (!res) {
            last_failure = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_failure = "server returned status " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            throw HttpError("request to " + endpoint.base + endpoint.path +
                                " rejected with status " + std::to_string(res->status),
                            attempt);
        }
        return res->body;
    }
    throw HttpError("request to " + endpoint.base + endpoint.path + " failed: " + last_failure,
                    attempts_allowed);
}

}  // namespace rex::http
