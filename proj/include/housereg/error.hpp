#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace housereg {

/// Base for every error raised by the library. The CLI maps the category to
/// an exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { kInput, kPipeline, kIo };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(Category::kPipeline, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error(Category::kInput, what + " (line " + std::to_string(line) +
                                    ", offset " + std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(std::string column)
      : Error(Category::kInput, "missing mapped column '" + column + "'"),
        column_(std::move(column)) {}

  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::kInput, what) {}
};

struct FieldError {
  enum class Kind { kCoercion, kRange, kCategory };
  Kind kind;
  std::string field;
  std::string text;
  std::string message;
};

/// A record that failed coercion. Carries one entry per offending field.
class CoercionError : public Error {
 public:
  explicit CoercionError(std::vector<FieldError> errors);

  const std::vector<FieldError>& field_errors() const noexcept { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

class VocabularyError : public Error {
 public:
  explicit VocabularyError(std::string code)
      : Error(Category::kPipeline,
              "building style code '" + code + "' not resolvable"),
        code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(Category::kIo, what + " after " + std::to_string(attempts) +
                                 " attempt(s)"),
        attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class SourceError : public Error {
 public:
  explicit SourceError(int status)
      : Error(Category::kInput,
              "data source returned HTTP status " + std::to_string(status)),
        status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::kIo, what) {}
};

/// Wraps a failure with the pipeline stage it happened in.
class StageError : public Error {
 public:
  StageError(Category category, std::string stage, std::size_t records,
             const std::string& cause)
      : Error(category, "stage '" + stage + "' failed after " +
                            std::to_string(records) + " record(s): " + cause),
        stage_(std::move(stage)),
        records_(records) {}

  const std::string& stage() const noexcept { return stage_; }
  std::size_t records() const noexcept { return records_; }

 private:
  std::string stage_;
  std::size_t records_;
};

}  // namespace housereg
