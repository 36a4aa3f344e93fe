#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chartforge {

/// Base of every exception the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A table violates its construction invariants (duplicate labels, ragged
/// rows, pipes in text, non-finite numbers).
class InvalidTable : public Error {
public:
    using Error::Error;
};

/// Markdown input could not be read as a table.
class MalformedTable : public Error {
public:
    using Error::Error;
};

/// Distribution or synthesis parameters outside their valid domain.
class InvalidParams : public Error {
public:
    using Error::Error;
};

class IncompatibleChartType : public Error {
public:
    using Error::Error;
};

/// A referring mark or query names an element that does not exist.
class UnknownTarget : public Error {
public:
    using Error::Error;
};

/// A template cannot be bound against the given table / marks.
class SlotUnsatisfiable : public Error {
public:
    using Error::Error;
};

/// JSON input failed schema validation. `path()` names the offending node,
/// e.g. `steps[1].func`.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class EmptyReference : public Error {
public:
    using Error::Error;
};

}  // namespace chartforge
