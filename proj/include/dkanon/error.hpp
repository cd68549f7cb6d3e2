#pragma once

#include <stdexcept>
#include <string>

namespace dkanon {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files (CSV, JSON).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Unknown attributes, bad qi/sensitive partitions, schema mismatches.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

// Ill-formed relations, clusterings, or constraint sets.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& what) : Error(what) {}
};

// Invalid run configuration; distinct from an unsatisfiable instance.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// The candidate search exceeded its enumeration budget.  Raised instead of
// silently truncating the search, so "no clustering found" always means the
// search space was exhausted.
class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

// An internal invariant failed (e.g. a repair step could not restore
// constraint satisfaction).  Indicates a bug or an instance outside the
// algorithm's contract, never a user error.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(what) {}
};

} // namespace dkanon
