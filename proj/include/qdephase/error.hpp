#pragma once

#include <stdexcept>
#include <string>

namespace qdephase {

enum class ErrorCode {
  invalid_argument = 1,
  wrong_variant = 2,
  numerical = 3,
  io = 4,
};

/// Base exception for everything thrown by the library core. The C API maps
/// the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Adaptive quadrature gave up before reaching its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(ErrorCode::numerical, what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

}  // namespace qdephase
