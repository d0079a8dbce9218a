#pragma once

#include <stdexcept>
#include <string>

namespace fdk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// malformed input; line is 1-based, 0 when unknown
struct ParseError : Error {
    ParseError(const std::string& msg, long line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line(line) {}
    long line;
};

struct ValidationError : Error {
    using Error::Error;
};

// spec needs an annotation layer the corpus does not carry
struct CapabilityError : Error {
    using Error::Error;
};

struct DegenerateCorpusError : Error {
    using Error::Error;
};

struct UndefinedCorrelationError : Error {
    using Error::Error;
};

struct StratificationError : Error {
    using Error::Error;
};

}  // namespace fdk
