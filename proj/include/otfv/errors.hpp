#pragma once

#include <stdexcept>
#include <string>

namespace otfv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(const std::string& what, long line)
        : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

struct AdmissibilityViolation : Error {
    using Error::Error;
};

struct NotAcute : Error {
    using Error::Error;
};

struct MeshMismatch : Error {
    using Error::Error;
};

struct NegativeDensity : Error {
    using Error::Error;
};

struct ZeroDensity : Error {
    using Error::Error;
};

struct UnsupportedKind : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

} // namespace otfv
