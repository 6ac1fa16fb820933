#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctigap::util {

// Base for all library errors. CLI maps DomainError to exit 1 and
// IoError/ServerError to exit 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid input documents. byte_offset is the position reported by the
// JSON parser, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what), byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Violated preconditions or domain contracts (empty universe, universe
// mismatch, unknown entity, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

// HTTP failures talking to a Caldera server; status 0 means transport-level.
class ServerError : public Error {
public:
    ServerError(const std::string& what, int status, std::string body)
        : Error(what), status_(status), body_(std::move(body)) {}

    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

}  // namespace ctigap::util
