#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mfct {

// Error taxonomy shared across the library. Every throwing operation names
// the condition it rejects; the CLI maps ConfigError/ParseError to exit
// code 2 and everything else to 1.

struct InvalidMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeadNode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyRegion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidTopology : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownFog : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyMerge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Carries the dotted path of the offending field, e.g. "grey.rho".
struct ConfigError : std::runtime_error {
    std::string field;

    ConfigError(std::string field_path, const std::string& what)
        : std::runtime_error("config error at " + field_path + ": " + what),
          field(std::move(field_path)) {}
};

}  // namespace mfct
