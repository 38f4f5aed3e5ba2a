#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace diskmc {

struct SourcePos {
    uint32_t line = 0;   // 1-based, 0 = unknown
    uint32_t column = 0; // 1-based
};

// One parser/type-checker message, tied to a position in the model text.
struct Diagnostic {
    SourcePos pos;
    std::string message;

    std::string to_string() const {
        if (pos.line == 0) return message;
        return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
    }
};

// Model-level failures: type errors, bad distributions, domain violations,
// partition function out of range, evaluation errors.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

class EvalError : public ModelError {
public:
    explicit EvalError(const std::string& what) : ModelError(what) {}
};

// Filesystem / sequential-contract failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed on-disk data: unknown record tag, truncated record, length
// mismatch, corrupt compression frame.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Value iteration exceeded its configured iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// An internal consistency check fired (monotonicity violated, preliminary
// index survived correction, ...). Always a bug or corrupted input.
class InternalCheckError : public std::logic_error {
public:
    explicit InternalCheckError(const std::string& what) : std::logic_error(what) {}
};

} // namespace diskmc
