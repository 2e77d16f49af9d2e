// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace polytraverse {

// Caller handed us something malformed: bad dimensions, point outside the
// region, empty input where a non-empty one is required.
class InvalidInputError : public std::runtime_error {
public:
    explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

// A network or region file could not be parsed. The message carries
// line/field context.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// The LP kernel hit its iteration cap. Distinct from infeasibility: the
// query remains undecided and must never be treated as "empty".
class SolverStallError : public std::runtime_error {
public:
    explicit SolverStallError(const std::string& what) : std::runtime_error(what) {}
};

// A request outside the supported envelope (size guards, exact mode in high
// dimension, dumps for P != 2).
class UnsupportedConfigError : public std::runtime_error {
public:
    explicit UnsupportedConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polytraverse
