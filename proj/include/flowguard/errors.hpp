#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace flowguard {

// Base of every error the library raises. `kind()` is the stable name used in
// CLI messages and service error bodies.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define FLOWGUARD_ERROR(Name)                                      \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  }

// Malformed document. Carries the byte offset reported by the JSON reader.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  const char* kind() const noexcept override { return "ParseError"; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Missing or mistyped required field; `field()` is a JSON path like
// "call_traces[2].from".
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const char* kind() const noexcept override { return "SchemaError"; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Training produced a non-finite loss.
class NumericalDivergence : public Error {
 public:
  NumericalDivergence(int epoch, const std::string& what)
      : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  const char* kind() const noexcept override { return "NumericalDivergence"; }
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

FLOWGUARD_ERROR(RangeError);
FLOWGUARD_ERROR(MalformedEvent);
FLOWGUARD_ERROR(NetworkError);
FLOWGUARD_ERROR(NotFound);
FLOWGUARD_ERROR(UnsupportedNode);
FLOWGUARD_ERROR(EmptyGraph);
FLOWGUARD_ERROR(ShapeError);
FLOWGUARD_ERROR(FeatureMissing);
FLOWGUARD_ERROR(DegenerateDataset);
FLOWGUARD_ERROR(InputError);
FLOWGUARD_ERROR(UndefinedAUC);
FLOWGUARD_ERROR(ConfigError);

#undef FLOWGUARD_ERROR

}  // namespace flowguard
