#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace ite {

enum class ErrorCode {
  DimensionMismatch,
  KTooLarge,
  NonFiniteInput,
  TooFewPoints,
  DomainError,
  DuplicatePoints,
  InvalidAlpha,
  UnknownEstimator,
  UnknownParameter,
  InvalidParameterValue,
  ArityMismatch,
  BlockError,
  BandwidthNonPositive,
  WeightError,
  NonSymmetric,
  DegenerateInput,
  BadDims,
  BadTarget,
  ShapeError,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::UnknownEstimator: return "UnknownEstimator";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::InvalidParameterValue: return "InvalidParameterValue";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::BlockError: return "BlockError";
    case ErrorCode::BandwidthNonPositive: return "BandwidthNonPositive";
    case ErrorCode::WeightError: return "WeightError";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::BadDims: return "BadDims";
    case ErrorCode::BadTarget: return "BadTarget";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Exception thrown by the numerical routines. The framework layer converts
/// it into a `Result` so that callers of `estimate` never see a throw.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

struct Status {
  ErrorCode code;
  std::string message;
};

template <typename T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Status status) : state_(std::move(status)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    if (!ok()) throw Error(status().code, status().message);
    return std::get<T>(state_);
  }
  T&& value() && {
    if (!ok()) throw Error(status().code, status().message);
    return std::get<T>(std::move(state_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  const Status& status() const { return std::get<Status>(state_); }

 private:
  std::variant<T, Status> state_;
};

/// Runs `fn` and folds any `ite::Error` into a failed Result.
template <typename Fn>
auto capture(Fn&& fn) -> Result<decltype(fn())> {
  try {
    return std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return Status{e.code(), e.message()};
  }
}

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace ite
