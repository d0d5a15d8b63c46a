#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgl {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: corpus documents, token lines, manifests.
struct ParseError : Error {
    using Error::Error;
};

// A graph with zero relationships where at least one is required.
struct EmptyGraphError : Error {
    using Error::Error;
};

// Cross-references between graph, layout and sequences do not resolve.
struct ConsistencyError : Error {
    using Error::Error;
};

// A token stream does not follow the segment pattern. Carries the first
// offending token position (0-based over the whole line) and the kinds
// that would have been accepted there.
struct AlignmentError : Error {
    AlignmentError(std::size_t position, std::string expected, const std::string& message)
        : Error(message), position(position), expected(std::move(expected)) {}

    std::size_t position;
    std::string expected;
};

// Serialized table or report does not match the expected format/version.
struct FormatError : Error {
    using Error::Error;
};

// Prediction requested from a table with no training data behind it.
struct UntrainedError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Filesystem-level failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace sgl
