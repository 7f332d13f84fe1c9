#pragma once

#include <stdexcept>
#include <string>

namespace codeclass {

enum class ErrorKind {
  NotPrimePower,
  DivisionByZero,
  TooLarge,
  RankDeficient,
  ZeroColumn,
  NotSpanning,
  SpectrumEmpty,
  InconsistentBounds,
  UnboundedVariable,
  BlocksOverlap,
  BlocksRequired,
  GroupTooLarge,
  FormatError,
  VersionMismatch,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace codeclass
