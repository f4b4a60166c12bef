#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace codectx {

/// Root of every error the library raises. `exit_code()` is the process exit
/// status the CLI maps the error to.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 3; }
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, const std::string& what)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class FormatError : public Error {
public:
    explicit FormatError(std::string field, const std::string& detail = {})
        : Error("format error in field '" + field + "'" + (detail.empty() ? "" : ": " + detail)),
          field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace detail {
inline std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}
}  // namespace detail

class LabelRangeError : public Error {
public:
    explicit LabelRangeError(std::vector<std::string> ids)
        : Error("label out of range for: " + detail::join_ids(ids)), ids_(std::move(ids)) {}
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

class DanglingIdError : public Error {
public:
    explicit DanglingIdError(std::vector<std::string> ids)
        : Error("unresolved ids: " + detail::join_ids(ids)), ids_(std::move(ids)) {}
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error("shape error: " + what) {}
    int exit_code() const noexcept override { return 4; }
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what) : Error("empty input: " + what) {}
};

class EmptyCorpusError : public Error {
public:
    EmptyCorpusError() : Error("empty corpus") {}
};

class DegenerateLabelsError : public Error {
public:
    DegenerateLabelsError() : Error("training labels contain fewer than two classes") {}
};

class MissingChannelError : public Error {
public:
    explicit MissingChannelError(const std::string& input)
        : Error("missing channel input: " + input), input_(input) {}
    const std::string& input() const noexcept { return input_; }

private:
    std::string input_;
};

class UnsupportedTypeError : public Error {
public:
    explicit UnsupportedTypeError(const std::string& type) : Error("unsupported clone type: " + type) {}
};

class UnknownLabelError : public Error {
public:
    explicit UnknownLabelError(const std::string& label) : Error("unknown label: " + label) {}
};

class NotAClassError : public Error {
public:
    explicit NotAClassError(const std::string& what) : Error("not a class: " + what) {}
};

class VersionError : public Error {
public:
    VersionError(int found, int supported)
        : Error("bundle format_version " + std::to_string(found) + " is newer than supported version " +
                std::to_string(supported)) {}
};

/// Bad configuration or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

}  // namespace codectx
