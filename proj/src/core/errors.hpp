// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cifs {

enum class ErrorKind {
  InvalidArgument,
  InvalidModel,
  Config,
  ConvergenceFailure,
  NoAttractingSide,
  PreconditionViolation,
  SearchExhausted,
  ContractionFails,
  VerificationFailed,
  Unpolarized,
  NoMinimalGenerator,
  HorizonExceeded,
  LengthExceeded,
  CoverGap,
};

const char* to_string(ErrorKind kind);

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cifs
