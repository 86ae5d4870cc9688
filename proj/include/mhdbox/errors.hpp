#pragma once

#include <stdexcept>
#include <string>

namespace mhdbox {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// An operation's stated hypothesis does not hold for the given input.
struct PreconditionViolated : Error {
    using Error::Error;
};

struct StepRejected : Error {
    using Error::Error;
};

struct NonFinite : Error {
    using Error::Error;
};

struct DegenerateDraft : Error {
    using Error::Error;
};

struct NonMonotoneTime : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct NonPositiveValues : Error {
    using Error::Error;
};

struct RunTooShort : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line)
        : Error("parse error at line " + std::to_string(line) + ": " + msg), line_number(line) {}
    int line_number;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& key, const std::string& why)
        : Error("invalid config: " + key + ": " + why), key_name(key) {}
    std::string key_name;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace mhdbox
