#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fileloc {

// Coarse classification used by the CLI to pick an exit code:
// config -> 2, repo/data -> 3, internal -> 4.
enum class ErrorKind { config, data, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(std::string m) : Error(ErrorKind::config, std::move(m)) {}
};

struct RepoNotFound : Error {
    explicit RepoNotFound(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct RefNotFound : Error {
    explicit RefNotFound(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

// Commit with more than two parents; only 2-way merges are supported.
struct UnsupportedMerge : Error {
    explicit UnsupportedMerge(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct NotAMerge : Error {
    explicit NotAMerge(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct InvalidGraph : Error {
    explicit InvalidGraph(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct GitObjectMissing : Error {
    explicit GitObjectMissing(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct IoError : Error {
    explicit IoError(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct SchemaError : Error {
    SchemaError(std::size_t line, std::string m)
        : Error(ErrorKind::data, "line " + std::to_string(line) + ": " + m), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct UnsupportedVariant : Error {
    explicit UnsupportedVariant(std::string m) : Error(ErrorKind::config, std::move(m)) {}
};

struct EmptyCorpus : Error {
    explicit EmptyCorpus(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct DecompositionFailure : Error {
    explicit DecompositionFailure(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct PositivesNotRanked : Error {
    explicit PositivesNotRanked(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct EmptyInput : Error {
    explicit EmptyInput(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct DegenerateInput : Error {
    explicit DegenerateInput(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

struct InsufficientGroups : Error {
    explicit InsufficientGroups(std::string m) : Error(ErrorKind::data, std::move(m)) {}
};

}  // namespace fileloc
