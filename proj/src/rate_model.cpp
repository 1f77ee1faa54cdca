#include "lendsim/rate_model.hpp"

namespace lendsim {

void RateParams::validate() const {
  const FixedDec zero = FixedDec::zero();
  const FixedDec one = FixedDec::one();
  if (base_rate < zero) {
    throw SimError(ErrorCode::ConfigError, "base_rate must be non-negative");
  }
  if (slope1 < zero || slope2 < zero) {
    throw SimError(ErrorCode::ConfigError, "rate slopes must be non-negative");
  }
  if (optimal_util <= zero || optimal_util >= one) {
    throw SimError(ErrorCode::ConfigError, "optimal_util must lie strictly inside (0, 1)");
  }
  if (reserve_factor < zero || reserve_factor >= one) {
    throw SimError(ErrorCode::ConfigError, "reserve_factor must lie in [0, 1)");
  }
}

FixedDec utilization(const FixedDec& total_debt, const FixedDec& total_liquidity) {
  if (total_debt < FixedDec::zero() || total_liquidity < FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, "utilization inputs must be non-negative");
  }
  if (total_liquidity.is_zero()) return FixedDec::zero();
  return total_debt.div(total_liquidity);
}

FixedDec borrow_rate(const FixedDec& util, const RateParams& params) {
  if (util < FixedDec::zero()) {
    throw SimError(ErrorCode::DomainError, "utilization must be non-negative");
  }
  FixedDec rate;
  if (util <= params.optimal_util) {
    rate = params.base_rate.add(util.div(params.optimal_util).mul(params.slope1));
  } else {
    FixedDec excess = util.sub(params.optimal_util)
                          .div(FixedDec::one().sub(params.optimal_util));
    rate = params.base_rate.add(params.slope1).add(excess.mul(params.slope2));
  }
  return rate.min(params.max_rate());
}

FixedDec supply_rate(const FixedDec& util, const RateParams& params) {
  FixedDec gross = borrow_rate(util, params).mul(util);
  return gross.mul(FixedDec::one().sub(params.reserve_factor));
}

}  // namespace lendsim
