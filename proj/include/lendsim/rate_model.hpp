#pragma once

#include "lendsim/fixed_dec.hpp"

namespace lendsim {

// Kinked utilization curve in the Aave V2 style: a gentle slope up to the
// optimal point, a steep slope past it, capped at base + slope1 + slope2.
struct RateParams {
  FixedDec base_rate;        // r0, per-year
  FixedDec optimal_util;     // kink position, in (0, 1)
  FixedDec slope1;           // per-year slope below the kink
  FixedDec slope2;           // per-year slope above the kink
  FixedDec reserve_factor;   // share of borrow interest kept by the protocol

  FixedDec max_rate() const { return base_rate.add(slope1).add(slope2); }
  void validate() const;
};

// debt / liquidity; defined as 0 when there is no liquidity
FixedDec utilization(const FixedDec& total_debt, const FixedDec& total_liquidity);

// Evaluation order is part of the contract (it pins the rounding):
//   below kink:  r = r0 + div(u, u_opt) * slope1
//   above kink:  r = r0 + slope1 + div(u - u_opt, 1 - u_opt) * slope2
// then clamp to max_rate.
FixedDec borrow_rate(const FixedDec& util, const RateParams& params);

// borrow_rate(u) * u * (1 - reserve_factor)
FixedDec supply_rate(const FixedDec& util, const RateParams& params);

}  // namespace lendsim
