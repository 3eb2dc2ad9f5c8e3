#pragma once

#include <stdexcept>
#include <string>

namespace btx {

// Error taxonomy maps onto CLI exit codes:
//   DomainError  -> 1   (bad data, violated preconditions)
//   ConfigError  -> 2   (bad arguments or configuration)
//   ServiceError -> 3   (external service failures)
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ServiceError : public Error {
 public:
  using Error::Error;
};

// -- domain errors ----------------------------------------------------------

class EmptyInput : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyReference : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyCandidateList : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyCorpus : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyScores : public DomainError {
 public:
  using DomainError::DomainError;
};

class ZeroFrequency : public DomainError {
 public:
  using DomainError::DomainError;
};

class MissingGroup : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnfittedModel : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateLabels : public DomainError {
 public:
  using DomainError::DomainError;
};

class SchemaViolation : public DomainError {
 public:
  SchemaViolation(std::size_t line, std::string field, const std::string& message)
      : DomainError("line " + std::to_string(line) + ", field '" + field + "': " + message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class DanglingParent : public DomainError {
 public:
  using DomainError::DomainError;
};

// -- configuration errors ---------------------------------------------------

class UnsupportedPair : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// -- external-service errors ------------------------------------------------

class ProviderFailure : public ServiceError {
 public:
  using ServiceError::ServiceError;
};

class AllLanguagesFailed : public ServiceError {
 public:
  using ServiceError::ServiceError;
};

class ServiceUnavailable : public ServiceError {
 public:
  using ServiceError::ServiceError;
};

class MalformedResponse : public ServiceError {
 public:
  using ServiceError::ServiceError;
};

}  // namespace btx
