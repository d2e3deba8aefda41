#pragma once

#include <stdexcept>
#include <string>

namespace hsa {

/// Malformed model text: syntax errors and schema violations found while
/// reading a model file. `byte_offset` is -1 when no position is known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what, long byte_offset = -1)
        : std::runtime_error(what), byte_offset(byte_offset) {}
    long byte_offset;
};

/// Structurally invalid registry content: unresolved references, duplicate
/// identifiers, cyclic instantiation, out-of-range derivative orders.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A test-oracle helper was asked to enumerate a graph beyond its size or
/// count budget. Enumeration is exponential; the bound is a safety valve.
class OracleBoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hsa
