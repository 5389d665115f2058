#pragma once

#include <stdexcept>
#include <string>

namespace serpmine {

// Base class for all domain errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed JSON text (syntax level).
struct JsonError : Error {
    using Error::Error;
};

// Structurally valid JSON that violates the document schema or an
// invariant (unknown block type, position < 1, empty query, ...).
struct SchemaError : Error {
    using Error::Error;
};

// Raised when a SERP body contains a configured captcha marker.
struct CaptchaDetected : Error {
    using Error::Error;
};

struct EmptyQuery : Error {
    using Error::Error;
};

// CSS selector text that cannot be parsed.
struct SelectorError : Error {
    using Error::Error;
};

// Feature spec names an unknown block type or is otherwise inconsistent.
struct SpecMismatch : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct TooFewRows : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Dataset line whose label is not one of the accepted intent names.
struct BadLabel : Error {
    BadLabel(const std::string& msg, int line) : Error(msg), line_no(line) {}
    int line_no;
};

// Unparseable dataset line (e.g. empty query with a label attached).
struct BadRecord : Error {
    BadRecord(const std::string& msg, int line) : Error(msg), line_no(line) {}
    int line_no;
};

// Operation invoked with a result/state that its contract forbids.
struct PreconditionError : Error {
    using Error::Error;
};

struct NonBijectiveMapping : Error {
    using Error::Error;
};

// Cluster id present in the data but absent from the intent mapping.
struct UnnamedCluster : Error {
    using Error::Error;
};

}  // namespace serpmine
