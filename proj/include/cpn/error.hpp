#pragma once

#include <stdexcept>
#include <string>

namespace cpn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: foreign node sets, dimension mismatches, invalid nets.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A node of the wrong sort (place vs transition).
class SortError : public Error {
public:
    using Error::Error;
};

/// A completion procedure or search exceeded its configured guard.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::size_t produced)
        : Error(what), produced_(produced) {}
    /// Number of intermediate vectors held when the guard fired.
    std::size_t produced() const { return produced_; }

private:
    std::size_t produced_;
};

/// Firing a disabled binding or step.
class BehaviourError : public Error {
public:
    using Error::Error;
};

/// Operation undefined for the given kind of morphism (e.g. non-discrete input to a product).
class CategoryError : public Error {
public:
    using Error::Error;
};

/// A precondition of a behavioural theorem is not met (e.g. non-open image).
class HypothesisError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          reason_(what), line_(line), column_(column) {}
    /// The message without the position prefix.
    const std::string& reason() const { return reason_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string reason_;
    std::size_t line_;
    std::size_t column_;
};

} // namespace cpn
