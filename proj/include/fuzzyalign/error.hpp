#pragma once

#include <stdexcept>
#include <string>

namespace fuzzyalign {

enum class ErrorKind {
  Syntax,
  Semantic,
  TypeMismatch,
  UndefinedVariable,
  NotEnabled,
  WrongWriteSet,
  GuardViolated,
  UnreachableFinal,
  IllegalMove,
  ActivityMismatch,
  NonFinite,
  InvalidArgument,
  BudgetExceeded,
  EmptySample,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fuzzyalign
