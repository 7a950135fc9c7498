#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowstat {

/// Caller broke a documented precondition (unsorted trace, window mismatch, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A record handed to an operation violates the operation's input contract.
/// Carries the index of the offending record.
class RecordContractError : public ContractError {
public:
    RecordContractError(std::size_t index, const std::string& what)
        : ContractError("record " + std::to_string(index) + ": " + what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration failed validation; fields() lists every violated field name.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> fields)
        : std::invalid_argument(join(fields)), fields_(std::move(fields)) {}

    const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    static std::string join(const std::vector<std::string>& fields) {
        std::string msg = "invalid configuration:";
        for (const auto& f : fields) msg += " " + f;
        return msg;
    }

    std::vector<std::string> fields_;
};

/// Malformed input file. Line numbers are 1-based; 0 means "whole file".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, std::size_t line, std::string field, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " +
                             (field.empty() ? std::string{} : "field '" + field + "': ") + what),
          file_(std::move(file)), line_(line), field_(std::move(field)) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

}  // namespace flowstat
