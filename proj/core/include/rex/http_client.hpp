#pragma once

#include <chrono>
#include <map>
#include <string>

namespace rex::http {

struct Endpoint {
    std::string base;  // scheme://host:port
    std::string path;  // leading slash
};

/// Splits "http://host:port/some/path" into base and path. Throws
/// ValidationError on anything that does not look like an HTTP(S) URL.
Endpoint parse_endpoint(const std::string& url);

struct RetryPolicy {
    int max_retries = 3;  // additional attempts after the first
    std::chrono::milliseconds initial_backoff{200};
    std::chrono::milliseconds timeout{5000};
};

/// POSTs a JSON body and returns the response body. Connection failures,
/// timeouts and 5xx statuses are retried with exponential backoff
/// (initial_backoff doubling per retry); other statuses fail immediately.
/// Throws HttpError carrying the attempt count.
std::string post_json(const Endpoint& endpoint, const std::string& body,
                      const RetryPolicy& policy,
                      const std::map<std::string, std::string>& headers = {});

}  // namespace rex::http
