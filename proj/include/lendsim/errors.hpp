#pragma once

#include <stdexcept>
#include <string>

namespace lendsim {

enum class ErrorCode {
  ArithmeticOverflow,
  DivisionByZero,
  DomainError,
  InvalidState,
  InvalidTime,
  ReserveFrozen,
  LiquidityExhausted,
  CollateralInsufficient,
  AmountExceedsBalance,
  NotLiquidatable,
  CloseFactorExceeded,
  NotFound,
  OracleMissing,
  InsufficientDepth,
  ConfigError,
  DeterminismViolation,
};

const char* error_code_name(ErrorCode code);

// Every failure in the library throws this. The code is stable API; the
// message is for humans and not matched by callers.
class SimError : public std::runtime_error {
public:
  SimError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ArithmeticOverflow: return "arithmetic-overflow";
    case ErrorCode::DivisionByZero: return "division-by-zero";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::InvalidTime: return "invalid-time";
    case ErrorCode::ReserveFrozen: return "reserve-frozen";
    case ErrorCode::LiquidityExhausted: return "liquidity-exhausted";
    case ErrorCode::CollateralInsufficient: return "collateral-insufficient";
    case ErrorCode::AmountExceedsBalance: return "amount-exceeds-balance";
    case ErrorCode::NotLiquidatable: return "not-liquidatable";
    case ErrorCode::CloseFactorExceeded: return "close-factor-exceeded";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::OracleMissing: return "oracle-missing";
    case ErrorCode::InsufficientDepth: return "insufficient-depth";
    case ErrorCode::ConfigError: return "config-error";
    case ErrorCode::DeterminismViolation: return "determinism-violation";
  }
  return "unknown";
}

}  // namespace lendsim
