#pragma once

#include <stdexcept>
#include <string>

namespace capreward {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record does not match the expected schema; field() names the offender.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error("schema error in '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ReferentialIntegrityError : public Error {
 public:
  using Error::Error;
};

class LengthLimitError : public Error {
 public:
  using Error::Error;
};

class MissingPhraseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config error for '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace capreward
