#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dispatchsim {

// Base of everything the library throws on bad input or impossible requests.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file content. Line numbers are 1-based and count the header.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NoRouteError : public Error {
public:
    using Error::Error;
};

class OutOfWindowError : public Error {
public:
    using Error::Error;
};

class ShortfallError : public Error {
public:
    using Error::Error;
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// An incident that cannot contribute a HIST/AUCT pair. The reason is a short
// machine-readable tag ("missing_response", "no_candidates", ...).
class SkipIncidentError : public Error {
public:
    SkipIncidentError(std::string reason, const std::string& what)
        : Error(what), reason_(std::move(reason)) {}

    const std::string& reason() const { return reason_; }

private:
    std::string reason_;
};

}  // namespace dispatchsim
