#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rex {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Structured-input parse failure; carries the 1-based line it occurred on
/// when the input is line-oriented (0 otherwise).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

/// A value violated a documented invariant (relevance range, sizes, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// HTTP request failed after the configured retries; carries the attempt count.
class HttpError : public Error {
public:
    HttpError(const std::string& what, int attempts)
        : Error(what + " (after " + std::to_string(attempts) + " attempt(s))"),
          attempts_(attempts) {}

    int attempts() const { return attempts_; }

private:
    int attempts_ = 0;
};

}  // namespace rex
