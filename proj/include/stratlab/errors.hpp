#pragma once

#include <stdexcept>
#include <string>

namespace stratlab {

/// Malformed wire data. byte_offset is -1 when not applicable.
class CodecError : public std::runtime_error {
public:
    CodecError(const std::string& what, long byte_offset = -1)
        : std::runtime_error(what), byte_offset_(byte_offset) {}
    long byte_offset() const { return byte_offset_; }

private:
    long byte_offset_;
};

/// Arguments outside an operation's domain (zero difficulty, negative time, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation invoked in the wrong protocol or connection state.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Analysis input lacks what the analysis needs (no sessions, no shares, ...).
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stratlab
