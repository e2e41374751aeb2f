#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deanon {

/// Malformed input while reading a text artifact (edge list, egonet file, ...).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A node id was requested that the graph does not contain.
class MissingNodeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter combination that cannot be honored.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sampling request asked for more items than the population can supply.
class ExhaustionError : public std::runtime_error {
public:
    ExhaustionError(const std::string& what, std::size_t achievable)
        : std::runtime_error(what + "; achievable count: " + std::to_string(achievable)),
          achievable_(achievable) {}

    std::size_t achievable() const { return achievable_; }

private:
    std::size_t achievable_;
};

/// Training cannot proceed (empty pool, single-class bag, ...).
class TrainingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A model document is unreadable: bad version, truncated, or invalid content.
class ModelFormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation was applied to an anonymization scheme it does not support.
class UnsupportedSchemeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; carries the stage name for diagnostics.
class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "': " + what), stage_(stage) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace deanon
