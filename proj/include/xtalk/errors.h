#ifndef XTALK_ERRORS_H
#define XTALK_ERRORS_H

#include <stdexcept>
#include <string>

namespace xtalk {

/// A caller-supplied value is outside its documented domain.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A registry, layout or config file cannot support the requested operation.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Objects that must agree on qubit or region counts do not.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file content.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace xtalk

#endif
